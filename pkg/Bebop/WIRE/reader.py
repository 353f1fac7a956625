"""
ByteReader: bounds-checked little-endian decoder for Bebop primitives.

A reader owns a window `[start, end)` of a shared memoryview. Sub-readers
carve a message body out of the parent window without copying.
"""

import struct
import uuid
from typing import Any

from Bebop.WIRE.arrays import PrimitiveArray, is_view_kind
from Bebop.WIRE.errors import InvalidUtf8, MissingTerminator, Truncated
from Bebop.WIRE.kinds import PrimitiveKind, bfloat16_to_float, bits_to_float16
from Bebop.WIRE.temporal import WireDuration, WireTimestamp

_U16 = struct.Struct("<H")
_U32 = struct.Struct("<I")
_U64 = struct.Struct("<Q")
_TIMESTAMP = struct.Struct("<qii")
_DURATION = struct.Struct("<qi")

_STRUCTS = {kind: struct.Struct("<" + kind.struct_format) for kind in PrimitiveKind if kind.struct_format}


class ByteReader:
    """Cursor over an immutable buffer."""

    __slots__ = ("_view", "_pos", "_end")

    def __init__(self, data, start: int = 0, end: int = None):
        self._view = data if isinstance(data, memoryview) else memoryview(data)
        if self._view.format != "B" or self._view.ndim != 1:
            self._view = self._view.cast("B")
        self._pos = start
        self._end = len(self._view) if end is None else end

    @property
    def position(self) -> int:
        return self._pos

    @property
    def end(self) -> int:
        return self._end

    @property
    def remaining(self) -> int:
        return self._end - self._pos

    def at_end(self) -> bool:
        return self._pos >= self._end

    def _need(self, count: int) -> int:
        start = self._pos
        if count < 0 or start + count > self._end:
            raise Truncated(f"needed {count} bytes, {self._end - start} left", offset=start)
        self._pos = start + count
        return start

    # -------------------------------------------------------------------------
    # Raw reads
    # -------------------------------------------------------------------------

    def read_byte(self) -> int:
        return self._view[self._need(1)]

    def read_uint32(self) -> int:
        return _U32.unpack_from(self._view, self._need(4))[0]

    def peek_uint32(self) -> int:
        if self._pos + 4 > self._end:
            raise Truncated("needed 4 bytes for a length prefix", offset=self._pos)
        return _U32.unpack_from(self._view, self._pos)[0]

    def read_view(self, count: int) -> memoryview:
        start = self._need(count)
        return self._view[start:start + count]

    def read_bytes(self, count: int) -> bytes:
        return bytes(self.read_view(count))

    def skip(self, count: int) -> None:
        self._need(count)

    def seek_end(self) -> None:
        self._pos = self._end

    def sub_reader(self, length: int) -> "ByteReader":
        """Consume `length` bytes and return a reader restricted to them."""
        start = self._need(length)
        return ByteReader(self._view, start, start + length)

    # -------------------------------------------------------------------------
    # Primitives
    # -------------------------------------------------------------------------

    def read_fixed(self, kind: PrimitiveKind) -> Any:
        start = self._need(kind.size)
        view = self._view
        if kind is PrimitiveKind.BOOL:
            return view[start] != 0
        fmt = _STRUCTS.get(kind)
        if fmt is not None and kind is not PrimitiveKind.FLOAT16:
            return fmt.unpack_from(view, start)[0]
        if kind is PrimitiveKind.FLOAT16:
            return bits_to_float16(_U16.unpack_from(view, start)[0])
        if kind is PrimitiveKind.BFLOAT16:
            return bfloat16_to_float(_U16.unpack_from(view, start)[0])
        if kind in (PrimitiveKind.INT128, PrimitiveKind.UINT128):
            low = _U64.unpack_from(view, start)[0]
            high = _U64.unpack_from(view, start + 8)[0]
            value = (high << 64) | low
            if kind is PrimitiveKind.INT128 and value >= 1 << 127:
                value -= 1 << 128
            return value
        if kind is PrimitiveKind.UUID:
            return uuid.UUID(bytes=bytes(view[start:start + 16]))
        if kind is PrimitiveKind.TIMESTAMP:
            return WireTimestamp(*_TIMESTAMP.unpack_from(view, start))
        if kind is PrimitiveKind.DURATION:
            return WireDuration(*_DURATION.unpack_from(view, start))
        raise AssertionError(f"unhandled primitive kind {kind}")  # pragma: no cover

    def read_string_view(self) -> memoryview:
        """Validate framing and return the UTF-8 content without decoding it."""
        origin = self._pos
        length = self.read_uint32()
        if length + 1 > self._end - self._pos:
            raise Truncated(f"string of {length} bytes exceeds input", offset=origin)
        content = self.read_view(length)
        terminator = self._pos
        if self.read_byte() != 0:
            raise MissingTerminator("string not followed by 0x00", offset=terminator)
        return content

    def read_string(self) -> str:
        origin = self._pos
        content = self.read_string_view()
        try:
            return str(content, "utf-8")
        except UnicodeDecodeError as exc:
            raise InvalidUtf8(f"invalid UTF-8 in string: {exc.reason}", offset=origin + 4 + exc.start) from exc

    def read_array_view(self, kind: PrimitiveKind, count: int):
        """
        Read `count` consecutive elements of `kind`.

        Returns:
            `bytes` for byte arrays, a PrimitiveArray view for numeric kinds,
            and a list for everything else.
        """
        size = kind.size
        if count * size > self._end - self._pos:
            raise Truncated(f"array of {count} x {kind.value} exceeds input", offset=self._pos)
        if kind is PrimitiveKind.BYTE:
            return self.read_bytes(count)
        if is_view_kind(kind):
            return PrimitiveArray(kind, self.read_view(count * size), count)
        return [self.read_fixed(kind) for _ in range(count)]
