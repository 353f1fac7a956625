"""
RPC server.

Routes calls by integer routing ID, runs the four method shapes over any
`Connection`, and provides the built-in Batch and futures methods.

Frame usage per call:
    - The first frame of a stream carries the CallHeader. Unary and
      server-stream calls append the request and set END_STREAM; client
      stream and duplex calls send the header alone and then one message
      per frame, closing with a zero-length END_STREAM frame.
    - Unary responses are a single END_STREAM frame. Streamed responses are
      one frame per message followed by a zero-length END_STREAM frame.
    - Failures are a single ERROR|END_STREAM frame carrying an Error message.
"""

from __future__ import annotations

import asyncio
import inspect
from dataclasses import dataclass
from typing import Any, AsyncIterator, Callable, Dict, List, Optional, Set

from Bebop.DESCRIPTOR.model import MethodDescriptor
from Bebop.DESCRIPTOR.routing import RESERVED_IDS
from Bebop.DYNAMIC.table import TypeTable
from Bebop.RPC.batch import execute_batch, plan_batch
from Bebop.RPC.context import SYSTEM_CLOCK, Clock, RpcContext
from Bebop.RPC.errors import RpcError
from Bebop.RPC.frame import Frame, FrameFlags
from Bebop.RPC.futures import FutureBody, FutureManager, FutureStore, InMemoryFutureStore
from Bebop.RPC.messages import (
    BATCH_METHOD_ID,
    BUILTIN_METHODS,
    FUTURE_CANCEL_ID,
    FUTURE_DISPATCH_ID,
    FUTURE_RESOLVE_ID,
    BatchRequest,
    BatchResponse,
    CallHeader,
    Empty,
    ErrorPayload,
    FutureCancelRequest,
    FutureDispatchRequest,
    FutureHandle,
    FutureResolveRequest,
    FutureResult,
    decode_message,
    encode_message,
)
from Bebop.RPC.registry import MessageCodec, MethodRegistration, MethodRegistry, MethodType
from Bebop.RPC.result import CallResult
from Bebop.RPC.status import StatusCode
from Bebop.TRANSPORT.base import Connection
from Bebop.TRANSPORT.errors import ConnectionClosed
from Bebop.Utils.Log import get_logger
from Bebop.WIRE.errors import WireError
from Bebop.WIRE.reader import ByteReader
from Bebop.WIRE.temporal import WireTimestamp

logger = get_logger(__name__)

_END = object()


@dataclass(frozen=True)
class WithCursor:
    """A streamed response tagged with a resume position."""

    value: Any
    cursor: int


def _unwrap(item: Any):
    if isinstance(item, WithCursor):
        return item.value, item.cursor
    return item, None


def _earliest(first: Optional[WireTimestamp], second: WireTimestamp) -> WireTimestamp:
    if first is None or second.total_nanos < first.total_nanos:
        return second
    return first


def error_frame(stream_id: int, status: int, message: str) -> Frame:
    payload = encode_message(ErrorPayload(code=int(status), message=message))
    return Frame(FrameFlags.ERROR | FrameFlags.END_STREAM, stream_id, payload)


def split_call_frame(payload: bytes):
    """CallHeader and the bytes that follow it in a call-initiating frame."""
    reader = ByteReader(payload)
    header = decode_message(CallHeader, reader)
    return header, reader.read_bytes(reader.remaining)


# =============================================================================
# Inbound streams
# =============================================================================

class _Inbound:
    """Request messages of one client-stream or duplex call."""

    def __init__(self) -> None:
        self.queue: asyncio.Queue = asyncio.Queue()

    def feed(self, frame: Frame) -> None:
        if frame.payload or not frame.end_stream:
            self.queue.put_nowait(frame.payload)
        if frame.end_stream:
            self.queue.put_nowait(_END)

    def close(self) -> None:
        self.queue.put_nowait(_END)

    async def messages(self, codec: MessageCodec) -> AsyncIterator[Any]:
        while True:
            payload = await self.queue.get()
            if payload is _END:
                return
            try:
                yield codec.decode(payload)
            except (WireError, ValueError, TypeError) as exc:
                raise RpcError(StatusCode.INVALID_ARGUMENT, f"undecodable request: {exc}") from exc


# =============================================================================
# Server
# =============================================================================

class RpcServer:
    """
    Method registry plus call execution.

    Args:
        registry: Application methods; the built-ins are added to it
        store: Futures result storage; in-memory by default
        clock: Wall clock for futures deadlines
        retention: Completed futures kept by the default store
    """

    def __init__(
        self,
        registry: Optional[MethodRegistry] = None,
        store: Optional[FutureStore] = None,
        clock: Clock = SYSTEM_CLOCK,
        retention: Optional[int] = None,
    ):
        self.registry = registry if registry is not None else MethodRegistry()
        self.clock = clock
        self.futures = FutureManager(self._future_body, store or InMemoryFutureStore(retention), clock)
        self._connections: Set[asyncio.Task] = set()
        self._register_builtins()

    # -------------------------------------------------------------------------
    # Registration
    # -------------------------------------------------------------------------

    def add(
        self,
        path: str,
        method_type: MethodType,
        handler: Callable[..., Any],
        request: Optional[MessageCodec] = None,
        response: Optional[MessageCodec] = None,
    ) -> MethodRegistration:
        return self.registry.add(path, method_type, handler, request, response)

    def method(
        self,
        path: str,
        method_type: MethodType = MethodType.UNARY,
        request: Optional[MessageCodec] = None,
        response: Optional[MessageCodec] = None,
    ):
        """Decorator form of `add`."""

        def decorator(handler):
            self.add(path, method_type, handler, request, response)
            return handler

        return decorator

    def add_descriptor(
        self,
        service_name: str,
        method: MethodDescriptor,
        handler: Callable[..., Any],
        table: TypeTable,
    ) -> MethodRegistration:
        return self.registry.add_descriptor(service_name, method, handler, table)

    def _register_builtins(self) -> None:
        builtins = [
            (BATCH_METHOD_ID, MethodType.UNARY, self._batch, BatchRequest, BatchResponse),
            (FUTURE_DISPATCH_ID, MethodType.UNARY, self._dispatch, FutureDispatchRequest, FutureHandle),
            (FUTURE_RESOLVE_ID, MethodType.SERVER_STREAM, self._resolve, FutureResolveRequest, FutureResult),
            (FUTURE_CANCEL_ID, MethodType.UNARY, self._cancel, FutureCancelRequest, Empty),
        ]
        for routing_id, method_type, handler, request_cls, response_cls in builtins:
            self.registry.register(
                MethodRegistration(
                    routing_id,
                    BUILTIN_METHODS[routing_id],
                    method_type,
                    handler,
                    MessageCodec.for_record(request_cls),
                    MessageCodec.for_record(response_cls),
                    builtin=True,
                )
            )

    # -------------------------------------------------------------------------
    # Built-in methods
    # -------------------------------------------------------------------------

    async def _batch(self, request: BatchRequest, context: RpcContext) -> BatchResponse:
        plan = plan_batch(request.calls, self.registry)
        if request.deadline is not None:
            context = context.derive(context.method_id, _earliest(context.deadline, request.deadline))
        results = await execute_batch(plan, request.calls, self.invoke, context)
        return BatchResponse(results)

    async def _dispatch(self, request: FutureDispatchRequest, context: RpcContext) -> FutureHandle:
        return await self.futures.dispatch(request, context.peer)

    async def _resolve(self, request: FutureResolveRequest, context: RpcContext) -> AsyncIterator[FutureResult]:
        async for result in self.futures.resolve(request, context.peer):
            yield result

    async def _cancel(self, request: FutureCancelRequest, context: RpcContext) -> Empty:
        await self.futures.cancel(request, context.peer)
        return Empty()

    def _future_body(self, request: FutureDispatchRequest) -> FutureBody:
        """Validate a dispatch request and build the work it runs."""
        if (request.call is None) == (request.batch is None):
            raise RpcError(StatusCode.INVALID_ARGUMENT, "a future wraps exactly one of a call or a batch")
        if request.call is not None:
            call = request.call
            registration = self.registry.get(call.method_id)
            if call.method_id in RESERVED_IDS or registration is None:
                raise RpcError(StatusCode.INVALID_ARGUMENT, f"future call targets unknown method {call.method_id:#010x}")
            if registration.method_type is not MethodType.UNARY:
                raise RpcError(StatusCode.INVALID_ARGUMENT, f"future call targets {registration.method_type.value} method {registration.path}")
            payload = call.payload or b""
            return lambda context: self.invoke(call.method_id, payload, context.derive(call.method_id))

        batch = request.batch
        plan = plan_batch(batch.calls, self.registry)

        async def run_batch(context: RpcContext) -> CallResult:
            if batch.deadline is not None:
                context = context.derive(BATCH_METHOD_ID, batch.deadline)
            results = await execute_batch(plan, batch.calls, self.invoke, context)
            return CallResult.ok(encode_message(BatchResponse(results)))

        return run_batch

    # -------------------------------------------------------------------------
    # Execution
    # -------------------------------------------------------------------------

    async def _collect(self, registration: MethodRegistration, request: Any, context: RpcContext) -> List[bytes]:
        if registration.method_type is MethodType.UNARY:
            return [registration.response.encode(await registration.handler(request, context))]
        responses = []
        async for item in registration.handler(request, context):
            value, _ = _unwrap(item)
            responses.append(registration.response.encode(value))
        return responses

    async def invoke(self, method_id: int, payload: bytes, context: RpcContext) -> CallResult:
        """
        Run a unary or server-stream method on a complete request payload.

        Server-stream responses are buffered. Never raises for call failures.
        """
        registration = self.registry.get(method_id)
        if registration is None:
            return CallResult.fail(StatusCode.UNIMPLEMENTED, f"no method with routing ID {method_id:#010x}")
        if registration.method_type.request_stream:
            return CallResult.fail(
                StatusCode.INVALID_ARGUMENT,
                f"{registration.path} is {registration.method_type.value} and needs a request stream",
            )
        if context.expired:
            return CallResult.fail(StatusCode.DEADLINE_EXCEEDED, "deadline exceeded before handler start")
        try:
            request = registration.request.decode(payload)
        except (WireError, ValueError, TypeError) as exc:
            return CallResult.fail(StatusCode.INVALID_ARGUMENT, f"undecodable request: {exc}")
        try:
            responses = await asyncio.wait_for(
                self._collect(registration, request, context), timeout=context.timeout_seconds()
            )
        except Exception as exc:
            return CallResult.from_exception(exc)
        return CallResult.ok(*responses, metadata=context.response_metadata)

    # -------------------------------------------------------------------------
    # Connections
    # -------------------------------------------------------------------------

    async def serve_connection(self, connection: Connection) -> None:
        """
        Read frames until the connection closes, running one task per stream.

        Stream ids are allocated upward by the caller, so a frame at or below
        the highest id seen that matches no open request stream is a late
        frame for a finished call and is dropped. An undecodable call header
        on a new stream closes the connection.
        """
        inbound: Dict[int, _Inbound] = {}
        calls: Dict[int, asyncio.Task] = {}
        contexts: Dict[int, RpcContext] = {}
        highest = 0

        def finished(stream_id: int) -> None:
            calls.pop(stream_id, None)
            inbound.pop(stream_id, None)
            contexts.pop(stream_id, None)

        logger.debug(f"Serving connection from {connection.peer}")
        try:
            while True:
                frame = await connection.receive()
                stream = inbound.get(frame.stream_id)
                if stream is not None:
                    stream.feed(frame)
                    continue
                if frame.stream_id <= highest or frame.stream_id in calls:
                    logger.debug(f"Dropping late frame for stream {frame.stream_id}")
                    continue
                if not frame.payload:
                    logger.debug(f"Dropping empty frame opening stream {frame.stream_id}")
                    continue
                highest = frame.stream_id
                header, first = split_call_frame(frame.payload)
                context = RpcContext(
                    method_id=header.method_id,
                    deadline=header.deadline,
                    metadata=dict(header.metadata or {}),
                    cursor=header.cursor,
                    peer=connection.peer,
                    clock=connection.clock,
                )
                contexts[frame.stream_id] = context
                registration = self.registry.get(header.method_id)
                if registration is not None and registration.method_type.request_stream:
                    stream = inbound[frame.stream_id] = _Inbound()
                    if frame.end_stream:
                        stream.close()
                task = asyncio.ensure_future(self._run_call(connection, frame, first, registration, context, stream))
                calls[frame.stream_id] = task
                task.add_done_callback(lambda _, sid=frame.stream_id: finished(sid))
        except ConnectionClosed:
            logger.debug(f"Connection from {connection.peer} closed")
        except WireError as exc:
            logger.warning(f"Closing connection from {connection.peer}: {exc}")
        finally:
            for context in contexts.values():
                context.cancel()
            pending = list(calls.values())
            for task in pending:
                task.cancel()
            await asyncio.gather(*pending, return_exceptions=True)
            await connection.close()

    async def _run_call(
        self,
        connection: Connection,
        frame: Frame,
        first: bytes,
        registration: Optional[MethodRegistration],
        context: RpcContext,
        inbound: Optional[_Inbound],
    ) -> None:
        stream_id = frame.stream_id
        try:
            if registration is None:
                raise RpcError(StatusCode.UNIMPLEMENTED, f"no method with routing ID {context.method_id:#010x}")
            if context.expired:
                raise RpcError(StatusCode.DEADLINE_EXCEEDED, "deadline exceeded before handler start")
            if registration.method_type.request_stream:
                if first:
                    raise RpcError(StatusCode.INVALID_ARGUMENT, "streamed requests must follow the call header in their own frames")
            elif not frame.end_stream:
                raise RpcError(StatusCode.INVALID_ARGUMENT, f"{registration.path} takes a single request frame")
            await asyncio.wait_for(
                self._respond(connection, stream_id, registration, first, context, inbound),
                timeout=context.timeout_seconds(),
            )
        except ConnectionClosed:
            return
        except Exception as exc:
            result = CallResult.from_exception(exc)
            try:
                await connection.send(error_frame(stream_id, result.status, result.error))
            except ConnectionClosed:
                pass

    async def _respond(
        self,
        connection: Connection,
        stream_id: int,
        registration: MethodRegistration,
        first: bytes,
        context: RpcContext,
        inbound: Optional[_Inbound],
    ) -> None:
        method_type = registration.method_type
        if method_type.request_stream:
            argument = inbound.messages(registration.request)
        else:
            try:
                argument = registration.request.decode(first)
            except (WireError, ValueError, TypeError) as exc:
                raise RpcError(StatusCode.INVALID_ARGUMENT, f"undecodable request: {exc}") from exc

        if not method_type.response_stream:
            response = await registration.handler(argument, context)
            await connection.send(Frame(FrameFlags.END_STREAM, stream_id, registration.response.encode(response)))
            return

        stream = registration.handler(argument, context)
        if not inspect.isasyncgen(stream):
            raise RpcError(StatusCode.INTERNAL, f"{registration.path} handler must be an async generator")
        try:
            async for item in stream:
                value, cursor = _unwrap(item)
                flags = FrameFlags.CURSOR if cursor is not None else FrameFlags.NONE
                await connection.send(Frame(flags, stream_id, registration.response.encode(value), cursor))
        finally:
            await stream.aclose()
        await connection.send(Frame(FrameFlags.END_STREAM, stream_id))

    # -------------------------------------------------------------------------
    # Lifecycle
    # -------------------------------------------------------------------------

    def attach(self, connection: Connection) -> asyncio.Task:
        """Serve `connection` in the background until it closes."""
        task = asyncio.ensure_future(self.serve_connection(connection))
        self._connections.add(task)
        task.add_done_callback(self._connections.discard)
        return task

    async def serve_tcp(self, host: Optional[str] = None, port: Optional[int] = None):
        """Listen for TCP connections; returns the started `asyncio.Server`."""
        from Bebop.TRANSPORT.tcp import serve_tcp

        return await serve_tcp(self, host, port)

    async def close(self) -> None:
        tasks = list(self._connections)
        for task in tasks:
            task.cancel()
        await asyncio.gather(*tasks, return_exceptions=True)
        await self.futures.close()
        logger.debug("RpcServer closed")


__all__ = ["RpcServer", "WithCursor", "error_frame", "split_call_frame"]
