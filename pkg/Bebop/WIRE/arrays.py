"""
Zero-copy views over runs of fixed-width numbers.

A decoded `float32[]` of a few thousand elements is a single slice of the
input buffer; elements are unpacked only when somebody asks for them.
"""

import struct
from collections.abc import Sequence
from typing import Iterator, List

from Bebop.WIRE.kinds import PrimitiveKind


class PrimitiveArray(Sequence):
    """Read-only sequence backed by a memoryview of little-endian elements."""

    __slots__ = ("kind", "raw", "_count", "_cache")

    def __init__(self, kind: PrimitiveKind, raw: memoryview, count: int):
        self.kind = kind
        self.raw = raw
        self._count = count
        self._cache = None

    def __len__(self) -> int:
        return self._count

    def tolist(self) -> List:
        if self._cache is None:
            self._cache = _unpack(self.kind, self.raw, self._count)
        return self._cache

    def __getitem__(self, index):
        return self.tolist()[index]

    def __iter__(self) -> Iterator:
        return iter(self.tolist())

    def __eq__(self, other) -> bool:
        if isinstance(other, PrimitiveArray):
            return self.kind is other.kind and bytes(self.raw) == bytes(other.raw)
        if isinstance(other, (list, tuple)):
            return self.tolist() == list(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.kind, bytes(self.raw)))

    def __repr__(self) -> str:
        preview = self.tolist()[:8]
        more = ", ..." if self._count > 8 else ""
        return f"PrimitiveArray({self.kind.value}, [{', '.join(map(repr, preview))}{more}])"


def _unpack(kind: PrimitiveKind, raw: memoryview, count: int) -> List:
    if kind is PrimitiveKind.BFLOAT16:
        data = bytes(raw)
        widened = bytearray(count * 4)
        widened[2::4] = data[0::2]
        widened[3::4] = data[1::2]
        return list(struct.unpack(f"<{count}f", widened))
    return list(struct.unpack(f"<{count}{kind.struct_format}", raw))


def is_view_kind(kind: PrimitiveKind) -> bool:
    """Kinds whose arrays decode as views; bool and byte keep their native types."""
    return kind is PrimitiveKind.BFLOAT16 or (
        kind.struct_format is not None and kind not in (PrimitiveKind.BYTE,)
    )


__all__ = ["PrimitiveArray", "is_view_kind"]
