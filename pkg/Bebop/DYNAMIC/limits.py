"""Bounds applied while decoding untrusted input."""

from dataclasses import dataclass
from typing import Optional

from Bebop.Utils.Config import settings


@dataclass(frozen=True)
class DecodeLimits:
    """
    Attributes:
        max_depth: Deepest nesting of arrays, maps and definitions
        max_elements: Total array and map entries across one decode
    """

    max_depth: int = 256
    max_elements: int = 16 * 1024 * 1024

    def __post_init__(self):
        if self.max_depth < 1 or self.max_elements < 1:
            raise ValueError("decode limits must be positive")

    @classmethod
    def default(cls, max_depth: Optional[int] = None, max_elements: Optional[int] = None) -> "DecodeLimits":
        """Limits from settings (BEBOP_DECODE_MAX_DEPTH / BEBOP_DECODE_MAX_ELEMENTS) unless overridden."""
        return cls(
            max_depth=max_depth if max_depth is not None else settings.decode_max_depth,
            max_elements=max_elements if max_elements is not None else settings.decode_max_elements,
        )
