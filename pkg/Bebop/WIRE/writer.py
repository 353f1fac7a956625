"""
ByteWriter: append-only little-endian encoder for Bebop primitives.

Example:
    >>> w = ByteWriter()
    >>> w.write_string("hello")
    >>> w.getvalue().hex(" ")
    '05 00 00 00 68 65 6c 6c 6f 00'
"""

import struct
import uuid
from typing import Any, Sequence

from Bebop.WIRE.errors import TypeMismatch
from Bebop.WIRE.kinds import PrimitiveKind, float16_to_bits, float32_bits, float_to_bfloat16

_U8 = struct.Struct("<B")
_U16 = struct.Struct("<H")
_U32 = struct.Struct("<I")
_U64 = struct.Struct("<Q")
_TIMESTAMP = struct.Struct("<qii")
_DURATION = struct.Struct("<qi")

_STRUCTS = {kind: struct.Struct("<" + kind.struct_format) for kind in PrimitiveKind if kind.struct_format}

_MASK64 = (1 << 64) - 1


class ByteWriter:
    """Growable output buffer; `position` is always the number of bytes written."""

    __slots__ = ("_buffer",)

    def __init__(self) -> None:
        self._buffer = bytearray()

    @property
    def position(self) -> int:
        return len(self._buffer)

    def __len__(self) -> int:
        return len(self._buffer)

    def getvalue(self) -> bytes:
        return bytes(self._buffer)

    # -------------------------------------------------------------------------
    # Raw writes
    # -------------------------------------------------------------------------

    def write_bytes(self, data) -> None:
        self._buffer += data

    def write_byte(self, value: int) -> None:
        self._buffer.append(value)

    def write_uint32(self, value: int) -> None:
        self._buffer += _U32.pack(value)

    # -------------------------------------------------------------------------
    # Primitives
    # -------------------------------------------------------------------------

    def write_fixed(self, kind: PrimitiveKind, value: Any) -> None:
        """Append `value` as `kind`, exactly `kind.size` bytes."""
        try:
            if kind is PrimitiveKind.BOOL:
                self._buffer.append(1 if value else 0)
            elif kind.is_float:
                self._write_float(kind, value)
            elif kind.is_integer:
                self._write_integer(kind, value)
            elif kind is PrimitiveKind.UUID:
                self._buffer += _uuid_bytes(value)
            elif kind is PrimitiveKind.TIMESTAMP:
                self._buffer += _TIMESTAMP.pack(value.seconds, value.nanos, value.offset_ms)
            elif kind is PrimitiveKind.DURATION:
                self._buffer += _DURATION.pack(value.seconds, value.nanos)
            else:  # pragma: no cover - enum is exhaustive
                raise TypeMismatch(f"unknown primitive kind {kind}")
        except (struct.error, AttributeError, TypeError, ValueError, OverflowError) as exc:
            raise TypeMismatch(f"cannot encode {value!r} as {kind.value}: {exc}") from exc

    def _write_integer(self, kind: PrimitiveKind, value: int) -> None:
        if isinstance(value, bool) or not isinstance(value, int):
            raise TypeMismatch(f"expected int for {kind.value}, got {type(value).__name__}")
        low, high = kind.integer_range
        if not low <= value <= high:
            raise TypeMismatch(f"{value} out of range for {kind.value}")
        if kind in (PrimitiveKind.INT128, PrimitiveKind.UINT128):
            raw = value & ((1 << 128) - 1)
            self._buffer += _U64.pack(raw & _MASK64)
            self._buffer += _U64.pack(raw >> 64)
        else:
            self._buffer += _STRUCTS[kind].pack(value)

    def _write_float(self, kind: PrimitiveKind, value: float) -> None:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise TypeMismatch(f"expected float for {kind.value}, got {type(value).__name__}")
        if kind is PrimitiveKind.BFLOAT16:
            self._buffer += _U16.pack(float_to_bfloat16(value))
        elif kind is PrimitiveKind.FLOAT16:
            self._buffer += _U16.pack(float16_to_bits(value))
        elif kind is PrimitiveKind.FLOAT32:
            self._buffer += _U32.pack(float32_bits(value))
        else:
            self._buffer += _STRUCTS[kind].pack(value)

    def write_array(self, kind: PrimitiveKind, values: Sequence) -> None:
        """Append a run of fixed-width numbers with one `struct` call when possible."""
        raw = getattr(values, "raw", None)
        if raw is not None and getattr(values, "kind", None) is kind:
            self._buffer += raw
            return
        fmt = kind.struct_format
        # struct packs bools as numbers; only the per-element path rejects them
        if fmt and (kind is PrimitiveKind.BOOL or not any(isinstance(value, bool) for value in values)):
            try:
                self._buffer += struct.pack(f"<{len(values)}{fmt}", *values)
                return
            except (struct.error, OverflowError):
                pass  # fall through for the precise per-element error
        for value in values:
            self.write_fixed(kind, value)

    # -------------------------------------------------------------------------
    # Length-prefixed building blocks
    # -------------------------------------------------------------------------

    def write_string(self, value: str) -> None:
        """4-byte byte-length, UTF-8 content, 0x00 terminator."""
        if not isinstance(value, str):
            raise TypeMismatch(f"expected str, got {type(value).__name__}")
        data = value.encode("utf-8")
        self._buffer += _U32.pack(len(data))
        self._buffer += data
        self._buffer.append(0)

    def reserve_length(self) -> int:
        """Reserve a 4-byte length prefix; returns the handle for `patch_length`."""
        handle = len(self._buffer)
        self._buffer += b"\x00\x00\x00\x00"
        return handle

    def patch_length(self, handle: int) -> None:
        """Store the count of bytes written since `reserve_length` into the prefix."""
        _U32.pack_into(self._buffer, handle, len(self._buffer) - handle - 4)


def _uuid_bytes(value: Any) -> bytes:
    if isinstance(value, uuid.UUID):
        return value.bytes
    if isinstance(value, (bytes, bytearray)) and len(value) == 16:
        return bytes(value)
    if isinstance(value, str):
        return uuid.UUID(value).bytes
    raise TypeMismatch(f"expected uuid, got {type(value).__name__}")


def encode_fixed(kind: PrimitiveKind, value: Any) -> bytes:
    """Convenience: encode a single primitive to bytes."""
    writer = ByteWriter()
    writer.write_fixed(kind, value)
    return writer.getvalue()


__all__ = ["ByteWriter", "encode_fixed"]
