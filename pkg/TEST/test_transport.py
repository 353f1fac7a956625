"""
Tests for the transports: loopback and TCP carrying every method shape,
stream cursor resumption, disconnects, and the HTTP unary gateway.
"""

import asyncio
import gc
import socket
import weakref
from contextlib import asynccontextmanager

import aiohttp
import pytest
import pytest_asyncio
from aiohttp import test_utils

from Bebop.RPC.client import RpcClient, resolve_method
from Bebop.RPC.errors import RpcError
from Bebop.RPC.frame import Frame, FrameFlags
from Bebop.RPC.messages import CallHeader, ErrorPayload, decode_message, encode_message
from Bebop.RPC.status import APPLICATION_STATUS_MIN, StatusCode
from Bebop.TRANSPORT.errors import ConnectionClosed, ConnectionRefused
from Bebop.TRANSPORT.http import DEADLINE_HEADER, STATUS_HEADER, create_http_app, http_unary_call
from Bebop.TRANSPORT.loopback import loopback_pair
from Bebop.TRANSPORT.tcp import connect_tcp
from Bebop.WIRE.temporal import WireTimestamp
from support import START, loopback_client, make_server, pack_int, tcp_client, unpack_int


def unused_port() -> int:
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


async def ints(iterable):
    return [unpack_int(item.payload) async for item in iterable]


@pytest.fixture(params=["loopback", "tcp"])
def transport(request):
    return request.param


@pytest_asyncio.fixture
async def any_client(transport, server):
    """RpcClient to the shared test server over each binary transport."""
    opener = loopback_client(server) if transport == "loopback" else tcp_client(server)
    async with opener as connected:
        yield connected
    await server.close()


@asynccontextmanager
async def raw_loopback(server):
    """Client end, server end and an RpcClient, for tests that cut the link."""
    client_end, server_end = loopback_pair(start=START)
    task = server.attach(server_end)
    client = RpcClient(client_end)
    try:
        yield client_end, server_end, client
    finally:
        await client.close()
        await asyncio.gather(task, return_exceptions=True)


# =============================================================================
# Method shapes
# =============================================================================

@pytest.mark.integration
class TestMethodShapes:
    """All four call shapes over loopback and TCP."""

    @pytest.mark.asyncio
    async def test_unary(self, any_client):
        assert await any_client.unary("/Test/Echo", b"ping") == b"ping"
        assert unpack_int(await any_client.unary("/Test/Inc", pack_int(41))) == 42

    @pytest.mark.asyncio
    async def test_empty_request(self, any_client):
        assert await any_client.unary("/Test/Echo", b"") == b""

    @pytest.mark.asyncio
    async def test_metadata_reaches_handler(self, any_client, server):
        await any_client.unary("/Test/Echo", b"", metadata={"trace": b"\x01\x02"})
        assert server.calls.metadata[-1] == {"trace": b"\x01\x02"}

    @pytest.mark.asyncio
    async def test_server_stream(self, any_client):
        items = [item async for item in any_client.server_stream("/Test/Count", pack_int(3))]
        assert [unpack_int(item.payload) for item in items] == [0, 1, 2]
        assert [item.cursor for item in items] == [1, 2, 3]

    @pytest.mark.asyncio
    async def test_empty_server_stream(self, any_client):
        assert await ints(any_client.server_stream("/Test/Count", pack_int(0))) == []

    @pytest.mark.asyncio
    async def test_client_stream(self, any_client):
        assert unpack_int(await any_client.client_stream("/Test/Sum", [pack_int(n) for n in range(1, 5)])) == 10

    @pytest.mark.asyncio
    async def test_client_stream_from_async_iterable(self, any_client):
        async def numbers():
            for n in (5, 6):
                yield pack_int(n)

        assert unpack_int(await any_client.client_stream("/Test/Sum", numbers())) == 11

    @pytest.mark.asyncio
    async def test_duplex(self, any_client):
        replies = [reply async for reply in any_client.duplex("/Test/Chat", [b"hi", b"there"])]
        assert replies == [b"HI", b"THERE"]

    @pytest.mark.asyncio
    async def test_concurrent_calls_interleave(self, any_client):
        replies = await asyncio.gather(*[any_client.unary("/Test/Inc", pack_int(n)) for n in range(20)])
        assert [unpack_int(reply) for reply in replies] == list(range(1, 21))

    @pytest.mark.asyncio
    async def test_unknown_method(self, any_client):
        with pytest.raises(RpcError) as excinfo:
            await any_client.unary("/Test/Nope", b"")
        assert excinfo.value.status == StatusCode.UNIMPLEMENTED

    @pytest.mark.asyncio
    async def test_application_status(self, any_client):
        with pytest.raises(RpcError) as excinfo:
            await any_client.unary("/Test/Fail", b"")
        assert excinfo.value.status == APPLICATION_STATUS_MIN
        assert excinfo.value.message == "refused"

    @pytest.mark.asyncio
    async def test_deadline_exceeded(self, any_client):
        with pytest.raises(RpcError) as excinfo:
            await any_client.unary("/Test/Hang", b"", deadline=any_client.deadline_in(0.2))
        assert excinfo.value.status == StatusCode.DEADLINE_EXCEEDED

    @pytest.mark.asyncio
    async def test_expired_deadline_skips_handler(self, any_client, server):
        with pytest.raises(RpcError) as excinfo:
            await any_client.unary("/Test/Echo", b"", deadline=any_client.deadline_in(-1))
        assert excinfo.value.status == StatusCode.DEADLINE_EXCEEDED
        assert "Echo" not in server.calls.counts


# =============================================================================
# Cursors
# =============================================================================

@pytest.mark.integration
class TestCursorResumption:
    """An interrupted stream resumes from the last cursor with no gaps or duplicates."""

    @pytest.mark.asyncio
    async def test_resume_after_link_cut(self, server):
        print("\n🧪 Cutting a counter stream after 4 elements...")
        received, last_cursor = [], 0
        async with raw_loopback(server) as (client_end, server_end, client):
            client_end.disconnect_after(5)
            with pytest.raises(ConnectionClosed):
                async for item in client.server_stream("/Test/Count", pack_int(10)):
                    received.append(unpack_int(item.payload))
                    last_cursor = item.cursor
            assert client_end.closed and server_end.closed
        assert received == [0, 1, 2, 3]
        assert last_cursor == 4

        async with loopback_client(server) as client:
            received += await ints(client.server_stream("/Test/Count", pack_int(10), cursor=last_cursor))
        await server.close()
        assert received == list(range(10))
        print("✅ Resumed stream delivered the exact remainder")

    @pytest.mark.asyncio
    async def test_resume_over_tcp(self, server):
        received, last_cursor = [], 0
        async with tcp_client(server) as client:
            stream = client.server_stream("/Test/Count", pack_int(10))
            async for item in stream:
                received.append(unpack_int(item.payload))
                last_cursor = item.cursor
                if len(received) == 6:
                    break
            await stream.aclose()
        async with tcp_client(server) as client:
            received += await ints(client.server_stream("/Test/Count", pack_int(10), cursor=last_cursor))
        await server.close()
        assert received == list(range(10))

    @pytest.mark.asyncio
    async def test_cursor_at_end(self, client):
        assert await ints(client.server_stream("/Test/Count", pack_int(3), cursor=3)) == []


# =============================================================================
# Loopback link
# =============================================================================

class TestLoopbackLink:
    """Disconnect injection, peer identity and frame accounting."""

    @pytest.mark.asyncio
    async def test_disconnect_after_three_frames(self):
        client_end, server_end = loopback_pair(start=START)
        client_end.disconnect_after(3)
        for index in range(3):
            await client_end.send(Frame(FrameFlags.NONE, 1, bytes([index])))
        assert client_end.closed and server_end.closed
        with pytest.raises(ConnectionClosed):
            await client_end.send(Frame(FrameFlags.NONE, 1))
        for index in range(3):
            assert (await server_end.receive()).payload == bytes([index])
        with pytest.raises(ConnectionClosed):
            await server_end.receive()
        with pytest.raises(ConnectionClosed):
            await client_end.receive()

    @pytest.mark.asyncio
    async def test_disconnect_immediately(self):
        client_end, server_end = loopback_pair()
        client_end.disconnect_after(0)
        with pytest.raises(ConnectionClosed):
            await server_end.send(Frame(FrameFlags.NONE, 1))

    def test_peer_identity(self):
        client_end, server_end = loopback_pair(client_address="alice")
        assert server_end.peer == "alice"
        assert client_end.peer.startswith("loopback-server:")

    @pytest.mark.asyncio
    async def test_malformed_call_header_closes_connection(self, server):
        client_end, server_end = loopback_pair(start=START)
        task = server.attach(server_end)
        await client_end.send(Frame(FrameFlags.END_STREAM, 1, b"\xff\xff\xff\xff"))
        await asyncio.wait_for(task, 5)
        with pytest.raises(ConnectionClosed):
            await client_end.receive()


def call_frame(stream_id: int, path: str, payload: bytes = b"", end_stream: bool = True) -> Frame:
    """Call-initiating frame: the encoded CallHeader followed by `payload`."""
    header = encode_message(CallHeader(method_id=resolve_method(path)))
    flags = FrameFlags.END_STREAM if end_stream else FrameFlags.NONE
    return Frame(flags, stream_id, header + payload)


@pytest.mark.integration
class TestFinishedStreams:
    """Frames that arrive after their call has ended leave the connection alone."""

    @pytest.mark.asyncio
    async def test_late_request_frames_are_dropped(self, server):
        print("\n🧪 Sending requests after a client-stream call already answered...")
        client_end, server_end = loopback_pair(start=START)
        task = server.attach(server_end)
        await client_end.send(call_frame(1, "/Test/First", end_stream=False))
        await client_end.send(Frame(FrameFlags.NONE, 1, b"a"))
        reply = await asyncio.wait_for(client_end.receive(), 5)
        assert (reply.stream_id, reply.payload, reply.is_error) == (1, b"a", False)

        await client_end.send(Frame(FrameFlags.NONE, 1, b"b"))
        await client_end.send(Frame(FrameFlags.END_STREAM, 1))
        await client_end.send(call_frame(2, "/Test/Echo", b"x"))
        reply = await asyncio.wait_for(client_end.receive(), 5)
        assert (reply.stream_id, reply.payload, reply.is_error) == (2, b"x", False)
        assert not task.done()

        await client_end.close()
        await asyncio.gather(task, return_exceptions=True)
        print("✅ Connection survived the late frames")

    @pytest.mark.asyncio
    async def test_late_frames_after_rejected_call(self, server):
        client_end, server_end = loopback_pair(start=START)
        task = server.attach(server_end)
        header = encode_message(CallHeader(method_id=0x0BAD_F00D))
        await client_end.send(Frame(FrameFlags.NONE, 1, header))
        reply = await asyncio.wait_for(client_end.receive(), 5)
        assert reply.is_error
        assert decode_message(ErrorPayload, reply.payload).code == StatusCode.UNIMPLEMENTED

        await client_end.send(Frame(FrameFlags.NONE, 1, b"still sending"))
        await client_end.send(call_frame(2, "/Test/Echo", b"y"))
        reply = await asyncio.wait_for(client_end.receive(), 5)
        assert (reply.stream_id, reply.payload) == (2, b"y")

        await client_end.close()
        await asyncio.gather(task, return_exceptions=True)

    @pytest.mark.asyncio
    async def test_empty_frame_never_opens_a_call(self, server):
        client_end, server_end = loopback_pair(start=START)
        task = server.attach(server_end)
        await client_end.send(Frame(FrameFlags.END_STREAM, 7))
        await client_end.send(call_frame(8, "/Test/Echo", b"z"))
        reply = await asyncio.wait_for(client_end.receive(), 5)
        assert (reply.stream_id, reply.payload) == (8, b"z")

        await client_end.close()
        await asyncio.gather(task, return_exceptions=True)

    @pytest.mark.asyncio
    @pytest.mark.parametrize("pauses", [1, 2, 3])
    async def test_follow_up_call_after_short_read(self, any_client, pauses):
        async def letters():
            for letter in (b"x", b"y", b"z"):
                yield letter
                for _ in range(pauses):
                    await asyncio.sleep(0)

        assert await any_client.client_stream("/Test/First", letters()) == b"x"
        assert await any_client.unary("/Test/Echo", b"after") == b"after"


class TestConnectionState:
    """Per-call state is released when the call ends, not when the connection does."""

    @pytest.mark.asyncio
    async def test_contexts_released_after_each_call(self, server, client):
        seen = []

        @server.method("/Test/Remember")
        async def remember(request: bytes, context) -> bytes:
            seen.append(weakref.ref(context))
            return request

        for index in range(5):
            assert await client.unary("/Test/Remember", bytes([index])) == bytes([index])
        assert await client.unary("/Test/Echo", b"") == b""
        await asyncio.sleep(0)
        gc.collect()
        assert len(seen) == 5
        assert all(ref() is None for ref in seen)


class TestTcpConnect:
    """Client connection failures."""

    @pytest.mark.asyncio
    async def test_connection_refused(self):
        with pytest.raises(ConnectionRefused):
            await connect_tcp("127.0.0.1", unused_port())


# =============================================================================
# HTTP
# =============================================================================

@pytest_asyncio.fixture
async def http(server):
    """(base URL, client session) for the HTTP gateway in front of `server`."""
    async with test_utils.TestServer(create_http_app(server), host="127.0.0.1") as test_server:
        async with aiohttp.ClientSession() as session:
            yield f"http://127.0.0.1:{test_server.port}", session
    await server.close()


@pytest.mark.integration
class TestHttpGateway:
    """POST /<Service>/<Method> for unary calls."""

    @pytest.mark.asyncio
    async def test_unary_call(self, http):
        base, session = http
        assert unpack_int(await http_unary_call(session, base, "/Test/Inc", pack_int(1))) == 2

    @pytest.mark.asyncio
    async def test_status_header_on_success(self, http):
        base, session = http
        async with session.post(f"{base}/Test/Echo", data=b"abc") as response:
            assert response.status == 200
            assert response.headers[STATUS_HEADER] == "0"
            assert await response.read() == b"abc"

    @pytest.mark.asyncio
    async def test_metadata_headers(self, http, server):
        base, session = http
        await http_unary_call(session, base, "/Test/Echo", b"", metadata={"trace": b"abc"})
        assert server.calls.metadata[-1] == {"trace": b"abc"}

    @pytest.mark.asyncio
    @pytest.mark.parametrize(
        "path, http_code, status",
        [
            ("/Test/Nope", 404, StatusCode.NOT_FOUND),
            ("/Test/Count", 501, StatusCode.UNIMPLEMENTED),
            ("/Test/Chat", 501, StatusCode.UNIMPLEMENTED),
            ("/Test/Fail", 500, APPLICATION_STATUS_MIN),
        ],
    )
    async def test_failures(self, http, path, http_code, status):
        base, session = http
        async with session.post(f"{base}{path}", data=b"") as response:
            assert response.status == http_code
            assert response.headers[STATUS_HEADER] == str(int(status))
            assert decode_message(ErrorPayload, await response.read()).code == status

    @pytest.mark.asyncio
    async def test_client_raises_with_status(self, http):
        base, session = http
        with pytest.raises(RpcError) as excinfo:
            await http_unary_call(session, base, "/Test/Fail", b"")
        assert excinfo.value.status == APPLICATION_STATUS_MIN
        assert excinfo.value.message == "refused"

    @pytest.mark.asyncio
    async def test_expired_deadline(self, http):
        base, session = http
        with pytest.raises(RpcError) as excinfo:
            await http_unary_call(session, base, "/Test/Echo", b"", deadline=WireTimestamp.from_millis(1))
        assert excinfo.value.status == StatusCode.DEADLINE_EXCEEDED

    @pytest.mark.asyncio
    async def test_malformed_deadline(self, http):
        base, session = http
        async with session.post(f"{base}/Test/Echo", data=b"", headers={DEADLINE_HEADER: "soon"}) as response:
            assert response.status == 400
            assert response.headers[STATUS_HEADER] == "3"

    @pytest.mark.asyncio
    async def test_connection_refused(self):
        async with aiohttp.ClientSession() as session:
            with pytest.raises(ConnectionRefused):
                await http_unary_call(session, f"http://127.0.0.1:{unused_port()}", "/Test/Echo", b"")
