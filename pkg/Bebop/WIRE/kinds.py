"""
Primitive kinds of the Bebop wire format.

Every primitive has a fixed byte width. The table below is the single
source of truth for sizes, `struct` formats and schema spellings.
"""

import math
import struct
from enum import Enum
from typing import Dict, Optional


class PrimitiveKind(Enum):
    """Fixed-width primitive kinds, valued by their canonical schema name."""

    BOOL = "bool"
    BYTE = "byte"
    INT8 = "int8"
    INT16 = "int16"
    UINT16 = "uint16"
    INT32 = "int32"
    UINT32 = "uint32"
    INT64 = "int64"
    UINT64 = "uint64"
    INT128 = "int128"
    UINT128 = "uint128"
    FLOAT16 = "float16"
    BFLOAT16 = "bfloat16"
    FLOAT32 = "float32"
    FLOAT64 = "float64"
    UUID = "uuid"
    TIMESTAMP = "timestamp"
    DURATION = "duration"

    @property
    def size(self) -> int:
        """Encoded byte count."""
        return _SIZES[self]

    @property
    def struct_format(self) -> Optional[str]:
        """Single-character `struct` code, or None when no direct code exists."""
        return _FORMATS.get(self)

    @property
    def is_integer(self) -> bool:
        return self in _INTEGER_RANGES

    @property
    def is_float(self) -> bool:
        return self in (PrimitiveKind.FLOAT16, PrimitiveKind.BFLOAT16, PrimitiveKind.FLOAT32, PrimitiveKind.FLOAT64)

    @property
    def is_signed(self) -> bool:
        return self.is_integer and _INTEGER_RANGES[self][0] < 0

    @property
    def integer_range(self) -> tuple:
        """Inclusive (min, max) for integer kinds."""
        return _INTEGER_RANGES[self]

    @property
    def is_map_key(self) -> bool:
        """Integers, bool, string and uuid may key a map; string is not a primitive kind."""
        return self.is_integer or self in (PrimitiveKind.BOOL, PrimitiveKind.UUID)

    @classmethod
    def from_name(cls, name: str) -> Optional["PrimitiveKind"]:
        """Look up a kind by schema spelling, aliases included."""
        return _BY_NAME.get(name)


_SIZES: Dict[PrimitiveKind, int] = {
    PrimitiveKind.BOOL: 1,
    PrimitiveKind.BYTE: 1,
    PrimitiveKind.INT8: 1,
    PrimitiveKind.INT16: 2,
    PrimitiveKind.UINT16: 2,
    PrimitiveKind.INT32: 4,
    PrimitiveKind.UINT32: 4,
    PrimitiveKind.INT64: 8,
    PrimitiveKind.UINT64: 8,
    PrimitiveKind.INT128: 16,
    PrimitiveKind.UINT128: 16,
    PrimitiveKind.FLOAT16: 2,
    PrimitiveKind.BFLOAT16: 2,
    PrimitiveKind.FLOAT32: 4,
    PrimitiveKind.FLOAT64: 8,
    PrimitiveKind.UUID: 16,
    PrimitiveKind.TIMESTAMP: 16,
    PrimitiveKind.DURATION: 12,
}

_FORMATS: Dict[PrimitiveKind, str] = {
    PrimitiveKind.BYTE: "B",
    PrimitiveKind.INT8: "b",
    PrimitiveKind.INT16: "h",
    PrimitiveKind.UINT16: "H",
    PrimitiveKind.INT32: "i",
    PrimitiveKind.UINT32: "I",
    PrimitiveKind.INT64: "q",
    PrimitiveKind.UINT64: "Q",
    PrimitiveKind.FLOAT16: "e",
    PrimitiveKind.FLOAT32: "f",
    PrimitiveKind.FLOAT64: "d",
}

_INTEGER_RANGES: Dict[PrimitiveKind, tuple] = {
    PrimitiveKind.BYTE: (0, 0xFF),
    PrimitiveKind.INT8: (-(1 << 7), (1 << 7) - 1),
    PrimitiveKind.INT16: (-(1 << 15), (1 << 15) - 1),
    PrimitiveKind.UINT16: (0, (1 << 16) - 1),
    PrimitiveKind.INT32: (-(1 << 31), (1 << 31) - 1),
    PrimitiveKind.UINT32: (0, (1 << 32) - 1),
    PrimitiveKind.INT64: (-(1 << 63), (1 << 63) - 1),
    PrimitiveKind.UINT64: (0, (1 << 64) - 1),
    PrimitiveKind.INT128: (-(1 << 127), (1 << 127) - 1),
    PrimitiveKind.UINT128: (0, (1 << 128) - 1),
}

_ALIASES = {
    "uint8": PrimitiveKind.BYTE,
    "half": PrimitiveKind.FLOAT16,
    "bf16": PrimitiveKind.BFLOAT16,
    "guid": PrimitiveKind.UUID,
}

_BY_NAME: Dict[str, PrimitiveKind] = {kind.value: kind for kind in PrimitiveKind}
_BY_NAME.update(_ALIASES)


# -----------------------------------------------------------------------------
# 16-bit float conversions
# -----------------------------------------------------------------------------

_F32 = struct.Struct("<f")
_U32 = struct.Struct("<I")
_F16 = struct.Struct("<e")
_U16 = struct.Struct("<H")


def float32_bits(value: float) -> int:
    """IEEE 754 binary32 bit pattern of `value`; overflow saturates to infinity."""
    try:
        return _U32.unpack(_F32.pack(value))[0]
    except OverflowError:
        return 0xFF800000 if value < 0 else 0x7F800000


def bfloat16_to_float(bits: int) -> float:
    """Widen a bfloat16 pattern to a float; exact, the pattern fills the high half."""
    return _F32.unpack(_U32.pack((bits & 0xFFFF) << 16))[0]


def float_to_bfloat16(value: float) -> int:
    """Narrow a float to a bfloat16 pattern, round-to-nearest-even, NaN kept quiet."""
    bits = float32_bits(value)
    if math.isnan(value):
        return ((bits >> 16) | 0x0040) & 0xFFFF
    rounding_bias = 0x7FFF + ((bits >> 16) & 1)
    return ((bits + rounding_bias) >> 16) & 0xFFFF


def float16_to_bits(value: float) -> int:
    """IEEE 754 binary16 bit pattern, round-to-nearest-even, overflow to infinity."""
    try:
        return _U16.unpack(_F16.pack(value))[0]
    except OverflowError:
        return 0xFC00 if value < 0 else 0x7C00


def bits_to_float16(bits: int) -> float:
    return _F16.unpack(_U16.pack(bits & 0xFFFF))[0]
