"""
Frames over a TCP stream.

The socket carries raw frames back to back; the 9-byte header says how
many payload bytes (and whether a cursor trailer) follow.
"""

import asyncio
from typing import TYPE_CHECKING, Optional

from Bebop.RPC.frame import CURSOR_SIZE, HEADER_SIZE, Frame, FrameFlags, FrameHeader, decode_frame
from Bebop.TRANSPORT.base import Connection
from Bebop.TRANSPORT.errors import ConnectionClosed, ConnectionRefused
from Bebop.Utils.Config import settings
from Bebop.Utils.Log import get_logger

if TYPE_CHECKING:
    from Bebop.RPC.server import RpcServer

logger = get_logger(__name__)


def _address(writer: asyncio.StreamWriter) -> str:
    peer = writer.get_extra_info("peername")
    if isinstance(peer, tuple) and len(peer) >= 2:
        return f"{peer[0]}:{peer[1]}"
    return str(peer or "")


class TcpConnection(Connection):
    """A connection over an asyncio stream pair; the peer is the remote `host:port`."""

    def __init__(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter):
        self._reader = reader
        self._writer = writer
        self._write_lock = asyncio.Lock()
        self._closed = False
        self.peer = _address(writer)

    @property
    def closed(self) -> bool:
        return self._closed

    async def send(self, frame: Frame) -> None:
        if self._closed:
            raise ConnectionClosed(f"connection to {self.peer} is closed")
        data = frame.encode()
        async with self._write_lock:
            try:
                self._writer.write(data)
                await self._writer.drain()
            except (ConnectionError, OSError) as exc:
                self._closed = True
                raise ConnectionClosed(f"connection to {self.peer} lost: {exc}") from exc

    async def receive(self) -> Frame:
        if self._closed:
            raise ConnectionClosed(f"connection to {self.peer} is closed")
        try:
            head = await self._reader.readexactly(HEADER_SIZE)
            header = FrameHeader.unpack(head)
            rest = header.length + (CURSOR_SIZE if header.flags & FrameFlags.CURSOR else 0)
            body = await self._reader.readexactly(rest) if rest else b""
        except (asyncio.IncompleteReadError, ConnectionError, OSError) as exc:
            self._closed = True
            raise ConnectionClosed(f"connection to {self.peer} closed") from exc
        return decode_frame(head + body)

    async def close(self) -> None:
        if self._closed and self._writer.is_closing():
            return
        self._closed = True
        self._writer.close()
        try:
            await self._writer.wait_closed()
        except (ConnectionError, OSError):
            pass


async def connect_tcp(host: Optional[str] = None, port: Optional[int] = None) -> TcpConnection:
    """
    Open a client connection.

    Raises:
        ConnectionRefused: If the server cannot be reached
    """
    host = host or settings.rpc_host
    port = port or settings.rpc_port
    try:
        reader, writer = await asyncio.open_connection(host, port)
    except OSError as exc:
        raise ConnectionRefused(f"cannot connect to {host}:{port}: {exc}", {"host": host, "port": port}) from exc
    logger.debug(f"Connected to {host}:{port}")
    return TcpConnection(reader, writer)


async def serve_tcp(server: "RpcServer", host: Optional[str] = None, port: Optional[int] = None) -> asyncio.AbstractServer:
    """Accept connections and hand each to `server.serve_connection`; port 0 picks a free port."""
    host = host or settings.rpc_host
    port = settings.rpc_port if port is None else port

    async def accept(reader: asyncio.StreamReader, writer: asyncio.StreamWriter) -> None:
        await server.serve_connection(TcpConnection(reader, writer))

    listener = await asyncio.start_server(accept, host, port)
    bound = ", ".join(_address_of(sock) for sock in listener.sockets or ())
    logger.info(f"Serving RPC over TCP on {bound}")
    return listener


def _address_of(sock) -> str:
    name = sock.getsockname()
    return f"{name[0]}:{name[1]}"


__all__ = ["TcpConnection", "connect_tcp", "serve_tcp"]
