"""Errors raised by the RPC layer."""

from typing import Any, Dict, Optional

from Bebop.RPC.status import StatusCode, status_name
from Bebop.Utils.errors import BebopError
from Bebop.WIRE.errors import WireError


class RpcError(BebopError):
    """A call failed with a status code; travels as an ERROR frame."""

    def __init__(self, status: int, message: str = "", details: Optional[Dict[str, Any]] = None):
        self.status = int(status)
        super().__init__(message or status_name(status), details)

    def __str__(self) -> str:
        return f"[{status_name(self.status)}] {self.message}"


class FlagCursorMismatch(WireError):
    """A cursor was given without the CURSOR flag, or the flag without a cursor."""


class UnsupportedCompressed(WireError):
    """Frame has the COMPRESSED flag; compression is not supported."""


class InvalidReference(RpcError):
    """A batch call forwards from itself, a later call, or an index below -1."""

    def __init__(self, message: str, index: int):
        self.index = index
        super().__init__(StatusCode.INVALID_ARGUMENT, message, {"index": index})


class MethodNotBatchable(RpcError):
    """Client-stream, duplex and built-in methods cannot be batched."""

    def __init__(self, message: str, method_id: int):
        self.method_id = method_id
        super().__init__(StatusCode.INVALID_ARGUMENT, message, {"method_id": method_id})


class RegistryError(BebopError):
    """Method registration failed."""


__all__ = ["FlagCursorMismatch", "InvalidReference", "MethodNotBatchable", "RegistryError", "RpcError", "UnsupportedCompressed"]
