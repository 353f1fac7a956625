"""
Frame protocol, call runtime, batching and futures.

`RpcServer` and `RpcClient` live in `Bebop.RPC.server` and
`Bebop.RPC.client`; they depend on the transports, which in turn import
this package, so they are not re-exported here.
"""

from Bebop.RPC.batch import BatchPlan, execute_batch, plan_batch
from Bebop.RPC.context import SYSTEM_CLOCK, Clock, ManualClock, RpcContext
from Bebop.RPC.errors import (
    FlagCursorMismatch,
    InvalidReference,
    MethodNotBatchable,
    RegistryError,
    RpcError,
    UnsupportedCompressed,
)
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
from Bebop.RPC.futures import FutureManager, FutureRecord, FutureState, FutureStore, InMemoryFutureStore
from Bebop.RPC.messages import (
    BATCH_METHOD_ID,
    FUTURE_CANCEL_ID,
    FUTURE_DISPATCH_ID,
    FUTURE_RESOLVE_ID,
    OWN_PAYLOAD,
    BatchCall,
    BatchRequest,
    BatchResponse,
    BatchResult,
    CallHeader,
    Empty,
    ErrorPayload,
    FutureCancelRequest,
    FutureDispatchRequest,
    FutureFailure,
    FutureHandle,
    FutureResolveRequest,
    FutureResult,
    FutureSuccess,
    decode_message,
    encode_message,
)
from Bebop.RPC.registry import MessageCodec, MethodRegistration, MethodRegistry, MethodType
from Bebop.RPC.result import CallResult
from Bebop.RPC.status import APPLICATION_STATUS_MIN, StatusCode, http_status, status_name

__all__ = [
    "APPLICATION_STATUS_MIN",
    "BATCH_METHOD_ID",
    "CURSOR_SIZE",
    "FUTURE_CANCEL_ID",
    "FUTURE_DISPATCH_ID",
    "FUTURE_RESOLVE_ID",
    "HEADER_SIZE",
    "OWN_PAYLOAD",
    "SYSTEM_CLOCK",
    "BatchCall",
    "BatchPlan",
    "BatchRequest",
    "BatchResponse",
    "BatchResult",
    "CallHeader",
    "CallResult",
    "Clock",
    "Empty",
    "ErrorPayload",
    "FlagCursorMismatch",
    "Frame",
    "FrameFlags",
    "FrameHeader",
    "FutureCancelRequest",
    "FutureDispatchRequest",
    "FutureFailure",
    "FutureHandle",
    "FutureManager",
    "FutureRecord",
    "FutureResolveRequest",
    "FutureResult",
    "FutureState",
    "FutureStore",
    "FutureSuccess",
    "InMemoryFutureStore",
    "InvalidReference",
    "ManualClock",
    "MessageCodec",
    "MethodNotBatchable",
    "MethodRegistration",
    "MethodRegistry",
    "MethodType",
    "RegistryError",
    "RpcContext",
    "RpcError",
    "StatusCode",
    "UnsupportedCompressed",
    "deadline_remaining",
    "decode_frame",
    "decode_message",
    "encode_frame",
    "encode_message",
    "execute_batch",
    "frame_size",
    "http_status",
    "plan_batch",
    "status_name",
]
