"""
RPC control messages (`bebop/rpc.bop`) and reserved method IDs.

Message fields left at None are absent on the wire.
"""

import uuid
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Union

from Bebop.DESCRIPTOR.records import bebop_record
from Bebop.DYNAMIC.binding import decode_record, encode_record
from Bebop.WIRE.reader import ByteReader
from Bebop.WIRE.temporal import WireTimestamp

_PACKAGE = "bebop.rpc"

INVALID_METHOD_ID = 0
BATCH_METHOD_ID = 1
FUTURE_DISPATCH_ID = 2
FUTURE_RESOLVE_ID = 3
FUTURE_CANCEL_ID = 4

BUILTIN_METHODS = {
    BATCH_METHOD_ID: "/Bebop/Batch",
    FUTURE_DISPATCH_ID: "/Bebop/Dispatch",
    FUTURE_RESOLVE_ID: "/Bebop/Resolve",
    FUTURE_CANCEL_ID: "/Bebop/Cancel",
}

OWN_PAYLOAD = -1


@bebop_record(f"{_PACKAGE}.CallHeader")
@dataclass
class CallHeader:
    method_id: int = 0
    deadline: Optional[WireTimestamp] = None
    metadata: Optional[Dict[str, bytes]] = None
    cursor: int = 0


@bebop_record(f"{_PACKAGE}.Error")
@dataclass
class ErrorPayload:
    code: int = 0
    message: str = ""
    details: Optional[bytes] = None


@bebop_record(f"{_PACKAGE}.Empty")
@dataclass
class Empty:
    pass


@bebop_record(f"{_PACKAGE}.BatchCall")
@dataclass
class BatchCall:
    call_id: int = 0
    method_id: int = 0
    payload: Optional[bytes] = None
    input_from: int = OWN_PAYLOAD


@bebop_record(f"{_PACKAGE}.BatchRequest")
@dataclass
class BatchRequest:
    calls: List[BatchCall] = field(default_factory=list)
    deadline: Optional[WireTimestamp] = None


@bebop_record(f"{_PACKAGE}.BatchResult")
@dataclass
class BatchResult:
    call_id: int = 0
    status: int = 0
    responses: List[bytes] = field(default_factory=list)
    error: Optional[str] = None


@bebop_record(f"{_PACKAGE}.BatchResponse")
@dataclass
class BatchResponse:
    results: List[BatchResult] = field(default_factory=list)


@bebop_record(f"{_PACKAGE}.FutureDispatchRequest")
@dataclass
class FutureDispatchRequest:
    call: Optional[BatchCall] = None
    batch: Optional[BatchRequest] = None
    idempotency_key: Optional[uuid.UUID] = None
    discard_result: bool = False
    deadline: Optional[WireTimestamp] = None


@bebop_record(f"{_PACKAGE}.FutureHandle")
@dataclass
class FutureHandle:
    id: Optional[uuid.UUID] = None


@bebop_record(f"{_PACKAGE}.FutureResolveRequest")
@dataclass
class FutureResolveRequest:
    ids: List[uuid.UUID] = field(default_factory=list)


@bebop_record(f"{_PACKAGE}.FutureSuccess")
@dataclass
class FutureSuccess:
    payload: bytes = b""
    metadata: Dict[str, bytes] = field(default_factory=dict)


@bebop_record(f"{_PACKAGE}.FutureFailure")
@dataclass
class FutureFailure:
    code: int = 0
    message: str = ""


@bebop_record(f"{_PACKAGE}.FutureResult")
@dataclass
class FutureResult:
    id: Optional[uuid.UUID] = None
    outcome: Optional[Union[FutureSuccess, FutureFailure]] = None

    @property
    def succeeded(self) -> bool:
        return isinstance(self.outcome, FutureSuccess)


@bebop_record(f"{_PACKAGE}.FutureCancelRequest")
@dataclass
class FutureCancelRequest:
    id: Optional[uuid.UUID] = None


def encode_message(message) -> bytes:
    return encode_record(message)


def decode_message(cls, data: Union[bytes, memoryview, ByteReader]):
    return decode_record(cls, data)


__all__ = [
    "BATCH_METHOD_ID",
    "BUILTIN_METHODS",
    "FUTURE_CANCEL_ID",
    "FUTURE_DISPATCH_ID",
    "FUTURE_RESOLVE_ID",
    "INVALID_METHOD_ID",
    "OWN_PAYLOAD",
    "BatchCall",
    "BatchRequest",
    "BatchResponse",
    "BatchResult",
    "CallHeader",
    "Empty",
    "ErrorPayload",
    "FutureCancelRequest",
    "FutureDispatchRequest",
    "FutureFailure",
    "FutureHandle",
    "FutureResolveRequest",
    "FutureResult",
    "FutureSuccess",
    "decode_message",
    "encode_message",
]
