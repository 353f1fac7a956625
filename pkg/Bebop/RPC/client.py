"""
RPC client over a `Connection`.

One reader task demultiplexes inbound frames by stream id; each call owns
a stream id allocated from 1 upwards.
"""

from __future__ import annotations

import asyncio
import uuid
from dataclasses import dataclass
from typing import AsyncIterable, AsyncIterator, Dict, Iterable, List, Optional, Sequence, Union

from Bebop.DESCRIPTOR.routing import method_routing_id, parse_method_path
from Bebop.RPC.context import Clock
from Bebop.RPC.errors import RpcError
from Bebop.RPC.frame import Frame, FrameFlags
from Bebop.RPC.messages import (
    BATCH_METHOD_ID,
    BUILTIN_METHODS,
    FUTURE_CANCEL_ID,
    FUTURE_DISPATCH_ID,
    FUTURE_RESOLVE_ID,
    BatchCall,
    BatchRequest,
    BatchResponse,
    BatchResult,
    CallHeader,
    ErrorPayload,
    FutureCancelRequest,
    FutureDispatchRequest,
    FutureHandle,
    FutureResolveRequest,
    FutureResult,
    decode_message,
    encode_message,
)
from Bebop.RPC.status import StatusCode
from Bebop.TRANSPORT.base import Connection
from Bebop.TRANSPORT.errors import ConnectionClosed
from Bebop.Utils.Log import get_logger
from Bebop.WIRE.errors import WireError
from Bebop.WIRE.temporal import WireDuration, WireTimestamp

logger = get_logger(__name__)

Method = Union[int, str]
Payloads = Union[Iterable[bytes], AsyncIterable[bytes]]

_CLOSED = object()
_BUILTIN_IDS = {path: routing_id for routing_id, path in BUILTIN_METHODS.items()}


@dataclass(frozen=True)
class StreamItem:
    """One streamed response and its resume position, if the server sent one."""

    payload: bytes
    cursor: Optional[int] = None


def resolve_method(method: Method) -> int:
    """Routing ID for an ID or a `/Service/Method` path."""
    if isinstance(method, int):
        return method
    if method in _BUILTIN_IDS:
        return _BUILTIN_IDS[method]
    return method_routing_id(*parse_method_path(method))


async def _iterate(payloads: Payloads) -> AsyncIterator[bytes]:
    if hasattr(payloads, "__aiter__"):
        async for payload in payloads:
            yield payload
    else:
        for payload in payloads:
            yield payload


class RpcClient:
    """
    Issue calls on a connection.

    Example:
        >>> async with RpcClient(connection) as client:
        ...     reply = await client.unary("/Echo/Echo", payload)
    """

    def __init__(self, connection: Connection):
        self.connection = connection
        self._streams: Dict[int, asyncio.Queue] = {}
        self._next_stream = 1
        self._reader: Optional[asyncio.Task] = None
        self._closed = False

    @property
    def clock(self) -> Clock:
        return self.connection.clock

    def deadline_in(self, seconds: float) -> WireTimestamp:
        """Absolute deadline `seconds` from now on this connection's clock."""
        return self.clock.now().plus(WireDuration.from_seconds(seconds))

    # -------------------------------------------------------------------------
    # Frame plumbing
    # -------------------------------------------------------------------------

    def _ensure_reader(self) -> None:
        if self._closed:
            raise ConnectionClosed("client is closed")
        if self._reader is None:
            self._reader = asyncio.ensure_future(self._read_loop())

    async def _read_loop(self) -> None:
        try:
            while True:
                frame = await self.connection.receive()
                queue = self._streams.get(frame.stream_id)
                if queue is None:
                    logger.debug(f"Dropping frame for unknown stream {frame.stream_id}")
                    continue
                queue.put_nowait(frame)
        except (ConnectionClosed, WireError) as exc:
            logger.debug(f"Client reader stopped: {exc}")
        finally:
            self._closed = True
            for queue in self._streams.values():
                queue.put_nowait(_CLOSED)

    def _open_stream(self) -> tuple:
        self._ensure_reader()
        stream_id = self._next_stream
        self._next_stream += 1
        queue: asyncio.Queue = asyncio.Queue()
        self._streams[stream_id] = queue
        return stream_id, queue

    async def _next_frame(self, queue: asyncio.Queue) -> Frame:
        frame = await queue.get()
        if frame is _CLOSED:
            raise ConnectionClosed("connection closed during call")
        if frame.is_error:
            try:
                error = decode_message(ErrorPayload, frame.payload)
            except WireError as exc:
                raise RpcError(StatusCode.INTERNAL, f"undecodable error frame: {exc}") from exc
            raise RpcError(error.code, error.message)
        return frame

    async def _start(
        self,
        stream_id: int,
        method: Method,
        payload: bytes,
        end_stream: bool,
        deadline: Optional[WireTimestamp],
        metadata: Optional[Dict[str, bytes]],
        cursor: int = 0,
    ) -> None:
        header = CallHeader(
            method_id=resolve_method(method),
            deadline=deadline,
            metadata=dict(metadata) if metadata else None,
            cursor=cursor,
        )
        flags = FrameFlags.END_STREAM if end_stream else FrameFlags.NONE
        await self.connection.send(Frame(flags, stream_id, encode_message(header) + payload))

    async def _send_requests(self, stream_id: int, payloads: Payloads) -> None:
        async for payload in _iterate(payloads):
            await self.connection.send(Frame(FrameFlags.NONE, stream_id, payload))
        await self.connection.send(Frame(FrameFlags.END_STREAM, stream_id))

    # -------------------------------------------------------------------------
    # Method shapes
    # -------------------------------------------------------------------------

    async def unary(
        self,
        method: Method,
        payload: bytes,
        deadline: Optional[WireTimestamp] = None,
        metadata: Optional[Dict[str, bytes]] = None,
    ) -> bytes:
        """
        Raises:
            RpcError: The call failed on the server
            ConnectionClosed: The connection dropped before the response
        """
        stream_id, queue = self._open_stream()
        try:
            await self._start(stream_id, method, payload, True, deadline, metadata)
            frame = await self._next_frame(queue)
            return frame.payload
        finally:
            self._streams.pop(stream_id, None)

    async def server_stream(
        self,
        method: Method,
        payload: bytes,
        deadline: Optional[WireTimestamp] = None,
        metadata: Optional[Dict[str, bytes]] = None,
        cursor: int = 0,
    ) -> AsyncIterator[StreamItem]:
        """Yield responses until the server ends the stream; `cursor` resumes an earlier stream."""
        stream_id, queue = self._open_stream()
        try:
            await self._start(stream_id, method, payload, True, deadline, metadata, cursor)
            while True:
                frame = await self._next_frame(queue)
                if frame.end_stream and not frame.payload:
                    return
                yield StreamItem(frame.payload, frame.cursor)
                if frame.end_stream:
                    return
        finally:
            self._streams.pop(stream_id, None)

    async def client_stream(
        self,
        method: Method,
        payloads: Payloads,
        deadline: Optional[WireTimestamp] = None,
        metadata: Optional[Dict[str, bytes]] = None,
    ) -> bytes:
        stream_id, queue = self._open_stream()
        try:
            await self._start(stream_id, method, b"", False, deadline, metadata)
            sender = asyncio.ensure_future(self._send_requests(stream_id, payloads))
            try:
                frame = await self._next_frame(queue)
            finally:
                if not sender.done():
                    sender.cancel()
                await asyncio.gather(sender, return_exceptions=True)
            return frame.payload
        finally:
            self._streams.pop(stream_id, None)

    async def duplex(
        self,
        method: Method,
        payloads: Payloads,
        deadline: Optional[WireTimestamp] = None,
        metadata: Optional[Dict[str, bytes]] = None,
    ) -> AsyncIterator[bytes]:
        stream_id, queue = self._open_stream()
        sender = None
        try:
            await self._start(stream_id, method, b"", False, deadline, metadata)
            sender = asyncio.ensure_future(self._send_requests(stream_id, payloads))
            while True:
                frame = await self._next_frame(queue)
                if frame.end_stream and not frame.payload:
                    return
                yield frame.payload
                if frame.end_stream:
                    return
        finally:
            if sender is not None:
                if not sender.done():
                    sender.cancel()
                await asyncio.gather(sender, return_exceptions=True)
            self._streams.pop(stream_id, None)

    # -------------------------------------------------------------------------
    # Built-in methods
    # -------------------------------------------------------------------------

    async def batch(
        self,
        calls: Sequence[BatchCall],
        deadline: Optional[WireTimestamp] = None,
        metadata: Optional[Dict[str, bytes]] = None,
    ) -> List[BatchResult]:
        """Run calls in one round trip; per-call failures are in the results."""
        request = BatchRequest(calls=list(calls), deadline=deadline)
        reply = await self.unary(BATCH_METHOD_ID, encode_message(request), deadline, metadata)
        return decode_message(BatchResponse, reply).results

    async def dispatch_future(
        self,
        call: Optional[BatchCall] = None,
        batch: Optional[BatchRequest] = None,
        idempotency_key: Optional[uuid.UUID] = None,
        discard_result: bool = False,
        deadline: Optional[WireTimestamp] = None,
    ) -> uuid.UUID:
        """Start a background call or batch; `deadline` bounds the work, not the dispatch."""
        request = FutureDispatchRequest(
            call=call,
            batch=batch,
            idempotency_key=idempotency_key,
            discard_result=discard_result,
            deadline=deadline,
        )
        reply = await self.unary(FUTURE_DISPATCH_ID, encode_message(request))
        return decode_message(FutureHandle, reply).id

    async def resolve_futures(self, ids: Sequence[uuid.UUID] = ()) -> AsyncIterator[FutureResult]:
        """Results as futures complete; without ids, every future this caller owns."""
        request = encode_message(FutureResolveRequest(ids=list(ids)))
        async for item in self.server_stream(FUTURE_RESOLVE_ID, request):
            yield decode_message(FutureResult, item.payload)

    async def cancel_future(self, future_id: uuid.UUID) -> None:
        await self.unary(FUTURE_CANCEL_ID, encode_message(FutureCancelRequest(id=future_id)))

    # -------------------------------------------------------------------------
    # Lifecycle
    # -------------------------------------------------------------------------

    async def close(self) -> None:
        self._closed = True
        await self.connection.close()
        if self._reader is not None:
            self._reader.cancel()
            await asyncio.gather(self._reader, return_exceptions=True)

    async def __aenter__(self) -> "RpcClient":
        return self

    async def __aexit__(self, *exc_info) -> None:
        await self.close()


__all__ = ["RpcClient", "StreamItem", "resolve_method"]
