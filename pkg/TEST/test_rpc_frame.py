"""
Tests for the frame codec, the call header and status codes.
"""

import itertools

import pytest

from Bebop.RPC.client import RpcClient, resolve_method
from Bebop.RPC.errors import FlagCursorMismatch, UnsupportedCompressed
from Bebop.RPC.frame import (
    CURSOR_SIZE,
    HEADER_SIZE,
    Frame,
    FrameFlags,
    FrameHeader,
    deadline_remaining,
    decode_frame,
    encode_frame,
    frame_size,
)
from Bebop.RPC.messages import CallHeader, ErrorPayload, decode_message, encode_message
from Bebop.RPC.server import error_frame, split_call_frame
from Bebop.RPC.status import APPLICATION_STATUS_MIN, StatusCode, http_status, status_name
from Bebop.TRANSPORT.loopback import loopback_pair
from Bebop.WIRE.errors import Truncated
from Bebop.WIRE.reader import ByteReader
from Bebop.WIRE.temporal import WireDuration, WireTimestamp
from support import START, make_server

ALL_FLAGS = [FrameFlags.END_STREAM, FrameFlags.ERROR, FrameFlags.COMPRESSED, FrameFlags.TRAILER, FrameFlags.CURSOR]


def flag_combinations():
    for size in range(len(ALL_FLAGS) + 1):
        for combo in itertools.combinations(ALL_FLAGS, size):
            flags = FrameFlags.NONE
            for flag in combo:
                flags |= flag
            yield flags


# =============================================================================
# Frame layout
# =============================================================================

class TestFrameLayout:
    """Byte positions of the header fields and the cursor trailer."""

    def test_flag_values(self):
        assert [int(flag) for flag in ALL_FLAGS] == [0x01, 0x02, 0x04, 0x08, 0x10]

    def test_header_bytes(self):
        data = Frame(FrameFlags.END_STREAM, 7, b"ab").encode()
        assert data == bytes.fromhex("02000000" "01" "07000000" "6162")
        assert HEADER_SIZE == 9

    def test_cursor_trailer_not_counted(self):
        data = Frame(FrameFlags.CURSOR, 1, b"xyz", cursor=9500).encode()
        assert len(data) == HEADER_SIZE + 3 + CURSOR_SIZE
        assert int.from_bytes(data[0:4], "little") == 3
        assert int.from_bytes(data[-8:], "little") == 9500

    def test_frame_size(self):
        assert frame_size(FrameHeader(3, FrameFlags.CURSOR, 1)) == 20
        assert frame_size(FrameHeader(0, FrameFlags.END_STREAM, 1)) == 9

    def test_header_unpack(self):
        header = FrameHeader.unpack(bytes.fromhex("05000000" "11" "2a000000"))
        assert header == FrameHeader(5, FrameFlags.END_STREAM | FrameFlags.CURSOR, 42)


class TestFrameRoundtrip:
    """Every flag combination with payloads of 0, 1 and 4096 bytes."""

    @pytest.mark.parametrize("flags", list(flag_combinations()), ids=lambda f: f"flags={int(f):#04x}")
    @pytest.mark.parametrize("size", [0, 1, 4096])
    def test_roundtrip(self, flags, size):
        payload = bytes(index % 251 for index in range(size))
        cursor = 0xFFFF_FFFF_FFFF_FFFF if flags & FrameFlags.CURSOR else None
        frame = Frame(flags, 3, payload, cursor)
        data = frame.encode()
        assert int.from_bytes(data[0:4], "little") == size
        if flags & FrameFlags.COMPRESSED:
            with pytest.raises(UnsupportedCompressed):
                decode_frame(data)
            return
        assert decode_frame(data) == frame

    def test_mixed_stream(self):
        first = Frame(FrameFlags.CURSOR, 1, b"one", cursor=1)
        second = Frame(FrameFlags.END_STREAM, 1, b"two")
        reader = ByteReader(first.encode() + second.encode())
        assert decode_frame(reader) == first
        assert decode_frame(reader) == second
        assert reader.remaining == 0


class TestFrameErrors:
    """Mismatches and truncation."""

    def test_cursor_without_flag(self):
        with pytest.raises(FlagCursorMismatch):
            encode_frame(FrameHeader(0, FrameFlags.NONE, 1), b"", cursor=5)

    def test_flag_without_cursor(self):
        with pytest.raises(FlagCursorMismatch):
            encode_frame(FrameHeader(0, FrameFlags.CURSOR, 1), b"")

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            encode_frame(FrameHeader(4, FrameFlags.NONE, 1), b"abc")

    def test_cursor_out_of_range(self):
        with pytest.raises(ValueError):
            encode_frame(FrameHeader(0, FrameFlags.CURSOR, 1), b"", cursor=1 << 64)

    def test_short_header(self):
        with pytest.raises(Truncated):
            decode_frame(b"\x01\x00\x00\x00\x00")

    def test_short_payload(self):
        with pytest.raises(Truncated):
            decode_frame(bytes.fromhex("05000000" "00" "01000000" "6162"))

    def test_short_cursor(self):
        data = FrameHeader(3, FrameFlags.CURSOR, 1).pack() + b"abc" + b"\x00" * 4
        with pytest.raises(Truncated):
            decode_frame(data)


# =============================================================================
# Call header and errors
# =============================================================================

class TestCallHeader:
    """The message that opens every call."""

    def test_roundtrip(self):
        header = CallHeader(
            method_id=0xDEADBEEF,
            deadline=WireTimestamp(1_700_000_000, 5),
            metadata={"trace": b"\x01\x02"},
            cursor=9500,
        )
        assert decode_message(CallHeader, encode_message(header)) == header

    def test_fresh_call_has_zero_cursor(self):
        header = decode_message(CallHeader, encode_message(CallHeader(method_id=99)))
        assert header.cursor == 0
        assert header.deadline is None

    def test_split_call_frame(self):
        payload = encode_message(CallHeader(method_id=42)) + b"request"
        header, rest = split_call_frame(payload)
        assert header.method_id == 42
        assert rest == b"request"

    def test_error_frame(self):
        frame = error_frame(9, StatusCode.NOT_FOUND, "gone")
        assert frame.flags == FrameFlags.ERROR | FrameFlags.END_STREAM
        assert decode_message(ErrorPayload, frame.payload) == ErrorPayload(code=5, message="gone")


class TestStatus:
    """Numbering and HTTP mapping."""

    def test_fixed_codes(self):
        assert StatusCode.INVALID_ARGUMENT == 3
        assert StatusCode.DEADLINE_EXCEEDED == 4
        assert StatusCode.PERMISSION_DENIED == 7
        assert StatusCode.UNAUTHENTICATED == 16
        assert APPLICATION_STATUS_MIN == 17

    def test_names(self):
        assert status_name(4) == "DEADLINE_EXCEEDED"
        assert status_name(200) == "APP_200"

    @pytest.mark.parametrize(
        "code, expected",
        [(0, 200), (3, 400), (4, 504), (5, 404), (7, 403), (12, 501), (13, 500), (17, 500)],
    )
    def test_http_status(self, code, expected):
        assert http_status(code) == expected

    def test_deadline_remaining(self):
        deadline = START.plus(WireDuration.from_seconds(2))
        assert deadline_remaining(deadline, START).to_seconds() == 2.0
        assert deadline_remaining(START, deadline).is_expired


# =============================================================================
# Framing overhead
# =============================================================================

class TestFramingOverhead:
    """A unary call costs one request frame and one response frame."""

    @pytest.mark.asyncio
    async def test_unary_exchange_framing_bytes(self):
        print("\n🧪 Measuring framing overhead of one unary call...")
        server = make_server()
        client_end, server_end = loopback_pair(start=START)
        task = server.attach(server_end)
        client = RpcClient(client_end)
        request = b"hello, bebop"
        try:
            reply = await client.unary("/Test/Echo", request)
            assert reply == request
            header_bytes = len(encode_message(CallHeader(method_id=resolve_method("/Test/Echo"))))
            body_bytes = header_bytes + len(request) + len(reply)
            assert client_end.sent_frames == 1
            assert server_end.sent_frames == 1
            assert client_end.sent_bytes + server_end.sent_bytes - body_bytes == 18
        finally:
            await client.close()
            await task
            await server.close()
        print("✅ 18 bytes of framing")
