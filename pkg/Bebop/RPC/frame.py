"""
Binary frame layout.

    offset 0  uint32  payload length (never counts the cursor trailer)
    offset 4  uint8   flags
    offset 5  uint32  stream id
    offset 9  payload
              uint64  cursor, only when CURSOR is set
"""

import struct
from dataclasses import dataclass
from enum import IntFlag
from typing import Optional, Union

from Bebop.RPC.errors import FlagCursorMismatch, UnsupportedCompressed
from Bebop.WIRE.errors import Truncated
from Bebop.WIRE.reader import ByteReader
from Bebop.WIRE.temporal import WireDuration, WireTimestamp

HEADER_SIZE = 9
CURSOR_SIZE = 8
MAX_CURSOR = (1 << 64) - 1

_HEADER = struct.Struct("<IBI")
_CURSOR = struct.Struct("<Q")


class FrameFlags(IntFlag):
    NONE = 0
    END_STREAM = 0x01
    ERROR = 0x02
    COMPRESSED = 0x04
    TRAILER = 0x08
    CURSOR = 0x10


@dataclass(frozen=True)
class FrameHeader:
    length: int
    flags: FrameFlags
    stream_id: int

    def pack(self) -> bytes:
        return _HEADER.pack(self.length, int(self.flags), self.stream_id)

    @classmethod
    def unpack(cls, data, offset: int = 0) -> "FrameHeader":
        if len(data) - offset < HEADER_SIZE:
            raise Truncated(f"frame header needs {HEADER_SIZE} bytes, {len(data) - offset} present", offset=offset)
        length, flags, stream_id = _HEADER.unpack_from(data, offset)
        return cls(length, FrameFlags(flags), stream_id)


@dataclass(frozen=True)
class Frame:
    """One decoded frame; `payload` excludes the cursor trailer."""

    flags: FrameFlags
    stream_id: int
    payload: bytes = b""
    cursor: Optional[int] = None

    @property
    def header(self) -> FrameHeader:
        return FrameHeader(len(self.payload), self.flags, self.stream_id)

    @property
    def end_stream(self) -> bool:
        return bool(self.flags & FrameFlags.END_STREAM)

    @property
    def is_error(self) -> bool:
        return bool(self.flags & FrameFlags.ERROR)

    def encode(self) -> bytes:
        return encode_frame(self.header, self.payload, self.cursor)


def encode_frame(header: FrameHeader, payload: bytes, cursor: Optional[int] = None) -> bytes:
    """
    Header, payload and optional cursor trailer.

    Raises:
        FlagCursorMismatch: If a cursor is present iff CURSOR is not set
        ValueError: If `header.length` is not the payload size or the cursor is out of range
    """
    has_flag = bool(header.flags & FrameFlags.CURSOR)
    if has_flag != (cursor is not None):
        raise FlagCursorMismatch(
            "cursor given without CURSOR flag" if cursor is not None else "CURSOR flag set without a cursor"
        )
    if header.length != len(payload):
        raise ValueError(f"header length {header.length} does not match payload size {len(payload)}")
    parts = [header.pack(), bytes(payload)]
    if cursor is not None:
        if not 0 <= cursor <= MAX_CURSOR:
            raise ValueError(f"cursor {cursor} out of uint64 range")
        parts.append(_CURSOR.pack(cursor))
    return b"".join(parts)


def decode_frame(data: Union[bytes, bytearray, memoryview, ByteReader]) -> Frame:
    """
    Read one frame; a ByteReader is advanced past it.

    Raises:
        Truncated: Header, payload or cursor cut short
        UnsupportedCompressed: COMPRESSED flag set
    """
    reader = data if isinstance(data, ByteReader) else ByteReader(data)
    origin = reader.position
    if reader.remaining < HEADER_SIZE:
        raise Truncated(f"frame header needs {HEADER_SIZE} bytes, {reader.remaining} present", offset=origin)
    header = FrameHeader.unpack(reader.read_view(HEADER_SIZE))
    if header.flags & FrameFlags.COMPRESSED:
        raise UnsupportedCompressed("compressed frames are not supported", offset=origin)
    if header.length > reader.remaining:
        raise Truncated(f"frame payload of {header.length} bytes exceeds input", offset=reader.position)
    payload = reader.read_bytes(header.length)
    cursor = None
    if header.flags & FrameFlags.CURSOR:
        if reader.remaining < CURSOR_SIZE:
            raise Truncated("cursor trailer cut short", offset=reader.position)
        cursor = _CURSOR.unpack(reader.read_bytes(CURSOR_SIZE))[0]
    return Frame(header.flags, header.stream_id, payload, cursor)


def frame_size(header: FrameHeader) -> int:
    """Total bytes on the wire for a frame with this header."""
    return HEADER_SIZE + header.length + (CURSOR_SIZE if header.flags & FrameFlags.CURSOR else 0)


def deadline_remaining(deadline: WireTimestamp, now: Optional[WireTimestamp] = None) -> WireDuration:
    """Time left before an absolute deadline; zero or negative means expired."""
    return deadline.minus(now if now is not None else WireTimestamp.now())


__all__ = [
    "CURSOR_SIZE",
    "HEADER_SIZE",
    "Frame",
    "FrameFlags",
    "FrameHeader",
    "decode_frame",
    "deadline_remaining",
    "encode_frame",
    "frame_size",
]
