"""
HTTP/1.1 mapping for unary calls.

    POST /<Service>/<Method>       body: encoded request
    bebop-deadline: <ms>           absolute deadline, milliseconds since the epoch
    bebop-meta-<key>: <value>      request metadata

Responses carry `bebop-status`. On success the body is the encoded
response; on failure it is an encoded Error message and the HTTP status
follows the call status.
"""

from typing import TYPE_CHECKING, Dict, Optional

import aiohttp
from aiohttp import web

from Bebop.RPC.context import RpcContext
from Bebop.RPC.errors import RpcError
from Bebop.RPC.messages import ErrorPayload, decode_message, encode_message
from Bebop.RPC.registry import MethodType
from Bebop.RPC.status import StatusCode, http_status
from Bebop.TRANSPORT.errors import ConnectionRefused
from Bebop.Utils.Log import get_logger
from Bebop.WIRE.errors import WireError
from Bebop.WIRE.temporal import WireTimestamp

if TYPE_CHECKING:
    from Bebop.RPC.server import RpcServer

logger = get_logger(__name__)

CONTENT_TYPE = "application/x-bebop"
DEADLINE_HEADER = "bebop-deadline"
STATUS_HEADER = "bebop-status"
META_PREFIX = "bebop-meta-"


def _failure(status: int, message: str) -> web.Response:
    return web.Response(
        status=http_status(status),
        body=encode_message(ErrorPayload(code=int(status), message=message)),
        headers={STATUS_HEADER: str(int(status)), "Content-Type": CONTENT_TYPE},
    )


def _metadata(headers) -> Dict[str, bytes]:
    return {
        name[len(META_PREFIX):].lower(): value.encode("utf-8")
        for name, value in headers.items()
        if name.lower().startswith(META_PREFIX)
    }


def create_http_app(server: "RpcServer") -> web.Application:
    """aiohttp application routing `POST /<Service>/<Method>` to `server`."""

    async def handle(request: web.Request) -> web.Response:
        path = f"/{request.match_info['service']}/{request.match_info['method']}"
        registration = server.registry.get_by_path(path)
        if registration is None:
            return _failure(StatusCode.NOT_FOUND, f"unknown method {path}")
        if registration.method_type is not MethodType.UNARY:
            return _failure(StatusCode.UNIMPLEMENTED, f"{path} is {registration.method_type.value}; HTTP carries unary calls only")

        deadline = None
        raw_deadline = request.headers.get(DEADLINE_HEADER)
        if raw_deadline is not None:
            try:
                deadline = WireTimestamp.from_millis(int(raw_deadline))
            except ValueError:
                return _failure(StatusCode.INVALID_ARGUMENT, f"malformed {DEADLINE_HEADER}: {raw_deadline!r}")

        context = RpcContext(
            method_id=registration.routing_id,
            deadline=deadline,
            metadata=_metadata(request.headers),
            peer=request.remote or "",
            clock=server.clock,
        )
        result = await server.invoke(registration.routing_id, await request.read(), context)
        if not result.success:
            logger.debug(f"HTTP {path} failed: [{result.status}] {result.error}")
            return _failure(result.status, result.error)
        return web.Response(
            status=200,
            body=result.payload,
            headers={STATUS_HEADER: "0", "Content-Type": CONTENT_TYPE},
        )

    app = web.Application()
    app.router.add_post("/{service}/{method}", handle)
    return app


async def http_unary_call(
    session: aiohttp.ClientSession,
    base_url: str,
    path: str,
    payload: bytes,
    deadline: Optional[WireTimestamp] = None,
    metadata: Optional[Dict[str, bytes]] = None,
) -> bytes:
    """
    Make one unary call over HTTP.

    Raises:
        RpcError: With the status from `bebop-status`
        ConnectionRefused: If the server cannot be reached
    """
    headers = {"Content-Type": CONTENT_TYPE}
    if deadline is not None:
        headers[DEADLINE_HEADER] = str(deadline.total_nanos // 1_000_000)
    for key, value in (metadata or {}).items():
        headers[f"{META_PREFIX}{key}"] = value.decode("utf-8")
    try:
        async with session.post(f"{base_url.rstrip('/')}{path}", data=payload, headers=headers) as response:
            body = await response.read()
            status = int(response.headers.get(STATUS_HEADER, "0" if response.status == 200 else "13"))
    except aiohttp.ClientConnectionError as exc:
        raise ConnectionRefused(f"cannot reach {base_url}: {exc}") from exc
    if status == StatusCode.OK:
        return body
    try:
        error = decode_message(ErrorPayload, body)
    except WireError:
        raise RpcError(status, f"HTTP {response.status}")
    raise RpcError(error.code, error.message)


__all__ = ["CONTENT_TYPE", "DEADLINE_HEADER", "META_PREFIX", "STATUS_HEADER", "create_http_app", "http_unary_call"]
