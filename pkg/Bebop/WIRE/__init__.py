"""Fixed-width binary encoding primitives."""

from Bebop.WIRE.arrays import PrimitiveArray
from Bebop.WIRE.errors import (
    DepthExceeded,
    DiscriminatorUnknown,
    DuplicateMapKey,
    ElementLimitExceeded,
    InvalidUtf8,
    MissingEndMarker,
    MissingTerminator,
    TagOutOfRange,
    Truncated,
    TypeMismatch,
    WireError,
)
from Bebop.WIRE.kinds import PrimitiveKind
from Bebop.WIRE.reader import ByteReader
from Bebop.WIRE.temporal import NANOS_PER_SECOND, WireDuration, WireTimestamp
from Bebop.WIRE.writer import ByteWriter, encode_fixed

__all__ = [
    "ByteReader",
    "ByteWriter",
    "DepthExceeded",
    "DiscriminatorUnknown",
    "DuplicateMapKey",
    "ElementLimitExceeded",
    "InvalidUtf8",
    "MissingEndMarker",
    "MissingTerminator",
    "NANOS_PER_SECOND",
    "PrimitiveArray",
    "PrimitiveKind",
    "TagOutOfRange",
    "Truncated",
    "TypeMismatch",
    "WireDuration",
    "WireError",
    "WireTimestamp",
    "encode_fixed",
]
