"""Shared RPC fixtures: a small test service and connected client/server helpers."""

import asyncio
import struct
from contextlib import asynccontextmanager
from typing import AsyncIterator, Dict, List, Optional

from Bebop.RPC.errors import RpcError
from Bebop.RPC.registry import MethodType
from Bebop.RPC.server import RpcServer, WithCursor
from Bebop.RPC.status import APPLICATION_STATUS_MIN
from Bebop.TRANSPORT.loopback import loopback_pair
from Bebop.WIRE.temporal import WireDuration, WireTimestamp

_INT = struct.Struct("<i")

START = WireTimestamp(1_700_000_000)


def pack_int(value: int) -> bytes:
    return _INT.pack(value)


def unpack_int(data: bytes) -> int:
    return _INT.unpack(data)[0]


class Calls:
    """Records handler invocations so tests can count them."""

    def __init__(self) -> None:
        self.counts: Dict[str, int] = {}
        self.metadata: List[Dict[str, bytes]] = []

    def hit(self, name: str) -> None:
        self.counts[name] = self.counts.get(name, 0) + 1


def make_server(retention: Optional[int] = None, clock=None) -> RpcServer:
    """
    Server with one method of every shape, all on raw payloads.

    /Test/Echo      unary          request bytes back
    /Test/Inc       unary          int32 + 1
    /Test/Double    unary          int32 * 2
    /Test/Fail      unary          always APPLICATION_STATUS_MIN
    /Test/Hang      unary          waits until cancelled
    /Test/Count     server stream  int32 n -> n frames, cursor i+1 from the call cursor
    /Test/Sum       client stream  int32 sum of the requests
    /Test/First     client stream  first request back, without reading the rest
    /Test/Chat      duplex         every request uppercased
    """
    kwargs = {"retention": retention}
    if clock is not None:
        kwargs["clock"] = clock
    server = RpcServer(**kwargs)
    server.calls = Calls()

    @server.method("/Test/Echo")
    async def echo(request: bytes, context) -> bytes:
        server.calls.hit("Echo")
        server.calls.metadata.append(dict(context.metadata))
        return request

    @server.method("/Test/Inc")
    async def inc(request: bytes, context) -> bytes:
        server.calls.hit("Inc")
        return pack_int(unpack_int(request) + 1)

    @server.method("/Test/Double")
    async def double(request: bytes, context) -> bytes:
        server.calls.hit("Double")
        return pack_int(unpack_int(request) * 2)

    @server.method("/Test/Fail")
    async def fail(request: bytes, context) -> bytes:
        server.calls.hit("Fail")
        raise RpcError(APPLICATION_STATUS_MIN, "refused")

    @server.method("/Test/Hang")
    async def hang(request: bytes, context) -> bytes:
        server.calls.hit("Hang")
        await asyncio.Event().wait()
        return b""

    @server.method("/Test/Count", MethodType.SERVER_STREAM)
    async def count(request: bytes, context) -> AsyncIterator[WithCursor]:
        server.calls.hit("Count")
        for index in range(context.cursor, unpack_int(request)):
            yield WithCursor(pack_int(index), index + 1)

    @server.method("/Test/Sum", MethodType.CLIENT_STREAM)
    async def total(requests, context) -> bytes:
        server.calls.hit("Sum")
        result = 0
        async for item in requests:
            result += unpack_int(item)
        return pack_int(result)

    @server.method("/Test/First", MethodType.CLIENT_STREAM)
    async def first(requests, context) -> bytes:
        server.calls.hit("First")
        async for item in requests:
            return item
        return b""

    @server.method("/Test/Chat", MethodType.DUPLEX)
    async def chat(requests, context) -> AsyncIterator[bytes]:
        server.calls.hit("Chat")
        async for item in requests:
            yield item.upper()

    return server


@asynccontextmanager
async def loopback_client(
    server: RpcServer,
    latency: Optional[WireDuration] = None,
    client_address: Optional[str] = None,
):
    """Attach `server` to one end of a fresh loopback pair; yield an RpcClient on the other."""
    from Bebop.RPC.client import RpcClient

    client_end, server_end = loopback_pair(latency=latency, client_address=client_address, start=START)
    task = server.attach(server_end)
    client = RpcClient(client_end)
    try:
        yield client
    finally:
        await client.close()
        await asyncio.gather(task, return_exceptions=True)


@asynccontextmanager
async def tcp_client(server: RpcServer):
    """Serve on an ephemeral TCP port; yield an RpcClient connected to it. The caller closes `server`."""
    from Bebop.RPC.client import RpcClient
    from Bebop.TRANSPORT.tcp import connect_tcp

    listener = await server.serve_tcp("127.0.0.1", 0)
    port = listener.sockets[0].getsockname()[1]
    client = RpcClient(await connect_tcp("127.0.0.1", port))
    try:
        yield client
    finally:
        await client.close()
        listener.close()
        await listener.wait_closed()
