"""
Dynamic values for definitions.

Primitives, strings, arrays and maps use plain Python values; these
classes cover the three aggregate kinds. Equality ignores `type_name` so
a hand-built value compares equal to its decoded counterpart.
"""

from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, Optional


class _FieldValues(Mapping):
    __slots__ = ("_fields", "type_name")

    def __init__(self, fields: Optional[Dict[str, Any]] = None, type_name: Optional[str] = None, **kwargs: Any):
        self._fields = dict(fields or {}, **kwargs)
        self.type_name = type_name

    def __getitem__(self, name: str) -> Any:
        return self._fields[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._fields)

    def __len__(self) -> int:
        return len(self._fields)

    def __getattr__(self, name: str) -> Any:
        if name.startswith("_"):
            raise AttributeError(name)
        try:
            return self._fields[name]
        except KeyError:
            raise AttributeError(f"{self._label()} has no field {name!r}") from None

    def __eq__(self, other) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return self._fields == other._fields

    __hash__ = None

    def _label(self) -> str:
        return self.type_name.rsplit(".", 1)[-1] if self.type_name else type(self).__name__

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}={v!r}" for k, v in self._fields.items())
        return f"{self._label()}({inner})"

    def to_dict(self) -> Dict[str, Any]:
        return dict(self._fields)


class StructValue(_FieldValues):
    """Every field of a struct, in definition order."""


class MessageValue(_FieldValues):
    """Present fields of a message; absent fields are missing, not None."""


@dataclass(frozen=True)
class UnionValue:
    """One branch of a union, selected by discriminator."""

    discriminator: int
    value: Any
    branch: Optional[str] = field(default=None, compare=False)


__all__ = ["MessageValue", "StructValue", "UnionValue"]
