"""
Registry of Python classes bound to schema definitions.

`@bebop_record("pkg.Name")` marks a dataclass (or IntEnum) as the Python
face of a definition. `Bebop.DYNAMIC.binding` uses the registry to turn
dynamic values into instances and back.
"""

from typing import Callable, Dict, Optional, Type, TypeVar

T = TypeVar("T", bound=type)

_CLASSES: Dict[str, type] = {}


def bebop_record(fqn: str) -> Callable[[T], T]:
    """
    Class decorator binding a class to the definition `fqn`.

    Args:
        fqn: Fully-qualified definition name

    Raises:
        ValueError: If another class is already bound to `fqn`
    """

    def register(cls: T) -> T:
        existing = _CLASSES.get(fqn)
        if existing is not None and existing is not cls:
            raise ValueError(f"{fqn} is already bound to {existing.__qualname__}")
        _CLASSES[fqn] = cls
        cls.__bebop_fqn__ = fqn
        return cls

    return register


def record_class(fqn: str) -> Optional[type]:
    return _CLASSES.get(fqn)


def record_fqn(cls: Type) -> Optional[str]:
    return getattr(cls, "__bebop_fqn__", None)
