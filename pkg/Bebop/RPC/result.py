"""
Standardized outcome of one call.

Batch entries, future bodies and HTTP requests run handlers through
`RpcServer.invoke`, which never raises for handler failures: it returns
a CallResult built with `ok()` or `fail()`.
"""

import asyncio
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from Bebop.RPC.errors import RpcError
from Bebop.RPC.status import StatusCode, status_name
from Bebop.Utils.errors import BebopError
from Bebop.Utils.Log import get_logger
from Bebop.WIRE.errors import WireError

logger = get_logger(__name__)


@dataclass
class CallResult:
    """
    Attributes:
        status: OK or the failure status
        responses: Encoded responses; one for unary calls, every message for streams
        error: Failure message, required when status is not OK
        metadata: Response metadata set by the handler
    """

    status: int = StatusCode.OK
    responses: List[bytes] = field(default_factory=list)
    error: Optional[str] = None
    metadata: Dict[str, bytes] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.status != StatusCode.OK and not (self.error and self.error.strip()):
            raise ValueError("CallResult with a failure status must have a non-empty error message")
        if self.status == StatusCode.OK and self.error:
            raise ValueError(f"CallResult with status OK cannot have an error message. Got error: {self.error}")

    @property
    def success(self) -> bool:
        return self.status == StatusCode.OK

    @property
    def payload(self) -> bytes:
        """The single response of a unary call."""
        return self.responses[0] if self.responses else b""

    @classmethod
    def ok(cls, *responses: bytes, metadata: Optional[Dict[str, bytes]] = None) -> "CallResult":
        return cls(StatusCode.OK, list(responses), None, dict(metadata or {}))

    @classmethod
    def fail(cls, status: int, error: str) -> "CallResult":
        return cls(int(status), [], error or status_name(status))

    @classmethod
    def from_exception(cls, exc: BaseException) -> "CallResult":
        """
        Map an exception to a status: RpcError keeps its own, timeouts become
        DEADLINE_EXCEEDED, undecodable input INVALID_ARGUMENT, anything else INTERNAL.
        """
        if isinstance(exc, RpcError):
            return cls.fail(exc.status, exc.message)
        if isinstance(exc, asyncio.TimeoutError):
            return cls.fail(StatusCode.DEADLINE_EXCEEDED, "deadline exceeded")
        if isinstance(exc, asyncio.CancelledError):
            return cls.fail(StatusCode.CANCELLED, "call cancelled")
        if isinstance(exc, WireError):
            return cls.fail(StatusCode.INVALID_ARGUMENT, f"undecodable request: {exc}")
        if not isinstance(exc, BebopError):
            logger.error(f"Handler failed: {exc!r}", exc_info=exc)
        return cls.fail(StatusCode.INTERNAL, str(exc) or type(exc).__name__)

    def to_error(self) -> RpcError:
        return RpcError(self.status, self.error or "")

    def __bool__(self) -> bool:
        return self.success


__all__ = ["CallResult"]
