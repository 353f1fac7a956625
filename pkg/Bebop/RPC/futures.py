"""
Server-side futures.

A future wraps a unary call or a batch, runs it in the background and
pushes its terminal result to resolve streams. Storage is pluggable:
persisting a completed result and notifying live subscribers are
separate store methods, and the manager always persists first.

States: PENDING -> COMPLETED, PENDING -> CANCELLED; both are terminal.
"""

from __future__ import annotations

import asyncio
import uuid
from abc import ABC, abstractmethod
from collections import OrderedDict
from dataclasses import dataclass, field
from enum import Enum
from typing import AsyncIterator, Awaitable, Callable, Dict, List, Optional, Set, Tuple

from Bebop.RPC.context import SYSTEM_CLOCK, Clock, RpcContext
from Bebop.RPC.errors import RpcError
from Bebop.RPC.messages import (
    FutureCancelRequest,
    FutureDispatchRequest,
    FutureFailure,
    FutureHandle,
    FutureResolveRequest,
    FutureResult,
    FutureSuccess,
)
from Bebop.RPC.result import CallResult
from Bebop.RPC.status import StatusCode
from Bebop.Utils.Config import settings
from Bebop.Utils.Log import get_logger

logger = get_logger(__name__)

FutureBody = Callable[[RpcContext], Awaitable[CallResult]]


class FutureState(Enum):
    PENDING = "pending"
    COMPLETED = "completed"
    CANCELLED = "cancelled"

    @property
    def terminal(self) -> bool:
        return self is not FutureState.PENDING


@dataclass
class FutureRecord:
    id: uuid.UUID
    owner: str
    idempotency_key: Optional[uuid.UUID] = None
    discard_result: bool = False
    state: FutureState = FutureState.PENDING
    result: Optional[FutureResult] = None
    task: Optional[asyncio.Task] = field(default=None, repr=False, compare=False)
    context: Optional[RpcContext] = field(default=None, repr=False, compare=False)


# =============================================================================
# Subscriptions
# =============================================================================

class FutureSubscription:
    """One resolve stream: the owner, an optional id filter and a delivery queue."""

    def __init__(self, owner: str, ids: Optional[Set[uuid.UUID]] = None):
        self.owner = owner
        self.ids = ids or None
        self.queue: asyncio.Queue = asyncio.Queue()
        self.delivered: Set[uuid.UUID] = set()

    def wants(self, record: FutureRecord) -> bool:
        if record.owner != self.owner:
            return False
        return self.ids is None or record.id in self.ids

    def offer(self, result: FutureResult) -> None:
        self.queue.put_nowait(result)


# =============================================================================
# Storage
# =============================================================================

class FutureStore(ABC):
    """Where completed results live and how live subscribers hear about them."""

    @abstractmethod
    async def persist_result(self, record: FutureRecord) -> None:
        """Commit a terminal record; called before `notify_subscribers`."""

    @abstractmethod
    async def notify_subscribers(self, record: FutureRecord) -> None:
        """Push the record's result to every matching live subscription."""

    @abstractmethod
    async def load_result(self, future_id: uuid.UUID) -> Optional[FutureRecord]:
        """A previously persisted record, or None."""

    @abstractmethod
    async def evict(self) -> List[uuid.UUID]:
        """Apply the retention policy; returns the ids dropped."""

    @abstractmethod
    def subscribe(self, subscription: FutureSubscription) -> None:
        ...

    @abstractmethod
    def unsubscribe(self, subscription: FutureSubscription) -> None:
        ...


class InMemoryFutureStore(FutureStore):
    """Keeps the most recent `retention` completed results."""

    def __init__(self, retention: Optional[int] = None):
        self.retention = retention if retention is not None else settings.future_retention
        self._results: "OrderedDict[uuid.UUID, FutureRecord]" = OrderedDict()
        self._subscriptions: List[FutureSubscription] = []

    async def persist_result(self, record: FutureRecord) -> None:
        self._results[record.id] = record
        self._results.move_to_end(record.id)

    async def notify_subscribers(self, record: FutureRecord) -> None:
        for subscription in list(self._subscriptions):
            if subscription.wants(record):
                subscription.offer(record.result)

    async def load_result(self, future_id: uuid.UUID) -> Optional[FutureRecord]:
        return self._results.get(future_id)

    async def evict(self) -> List[uuid.UUID]:
        dropped = []
        while len(self._results) > self.retention:
            future_id, _ = self._results.popitem(last=False)
            dropped.append(future_id)
        return dropped

    def subscribe(self, subscription: FutureSubscription) -> None:
        self._subscriptions.append(subscription)

    def unsubscribe(self, subscription: FutureSubscription) -> None:
        if subscription in self._subscriptions:
            self._subscriptions.remove(subscription)

    def __len__(self) -> int:
        return len(self._results)


# =============================================================================
# Manager
# =============================================================================

def _failure(record_id: uuid.UUID, status: int, message: str) -> FutureResult:
    return FutureResult(record_id, FutureFailure(int(status), message))


class FutureManager:
    """
    Dispatch, resolve and cancel.

    Args:
        body_for: Builds the background work for a dispatch request; raises
            RpcError(INVALID_ARGUMENT) for malformed requests
        store: Result storage; in-memory with settings retention by default
        clock: Wall clock for inner deadlines
    """

    def __init__(
        self,
        body_for: Callable[[FutureDispatchRequest], FutureBody],
        store: Optional[FutureStore] = None,
        clock: Clock = SYSTEM_CLOCK,
    ):
        self.body_for = body_for
        self.store = store or InMemoryFutureStore()
        self.clock = clock
        self._records: Dict[uuid.UUID, FutureRecord] = {}
        self._keys: Dict[Tuple[str, uuid.UUID], uuid.UUID] = {}

    def get(self, future_id: uuid.UUID) -> Optional[FutureRecord]:
        return self._records.get(future_id)

    # -------------------------------------------------------------------------
    # Dispatch
    # -------------------------------------------------------------------------

    async def dispatch(self, request: FutureDispatchRequest, caller: str) -> FutureHandle:
        """
        Start a future, or return the existing handle for a repeated idempotency key.

        Raises:
            RpcError: INVALID_ARGUMENT for a malformed inner call
        """
        key = request.idempotency_key
        if key is not None:
            existing = self._keys.get((caller, key))
            if existing is not None:
                logger.debug(f"Idempotent dispatch for {caller}: returning {existing}")
                return FutureHandle(existing)

        body = self.body_for(request)
        record = FutureRecord(uuid.uuid4(), caller, key, request.discard_result)
        record.context = RpcContext(deadline=request.deadline, peer=caller, clock=self.clock)
        self._records[record.id] = record
        if key is not None:
            self._keys[(caller, key)] = record.id
        record.task = asyncio.ensure_future(self._run(record, body))
        logger.info(f"Dispatched future {record.id} for {caller}")
        return FutureHandle(record.id)

    async def _run(self, record: FutureRecord, body: FutureBody) -> None:
        context = record.context
        try:
            if context.expired:
                outcome = CallResult.fail(StatusCode.DEADLINE_EXCEEDED, "deadline exceeded before future started")
            else:
                outcome = await asyncio.wait_for(body(context), timeout=context.timeout_seconds())
        except asyncio.CancelledError:
            return
        except Exception as exc:
            outcome = CallResult.from_exception(exc)
        if record.state is not FutureState.PENDING:
            return
        if outcome.success:
            result = FutureResult(record.id, FutureSuccess(outcome.payload, dict(outcome.metadata)))
        else:
            result = _failure(record.id, outcome.status, outcome.error)
        await self._finish(record, FutureState.COMPLETED, result)

    async def _finish(self, record: FutureRecord, state: FutureState, result: FutureResult) -> None:
        record.state = state
        record.result = result
        if record.discard_result:
            await self.store.notify_subscribers(record)
            self._forget(record)
            return
        await self.store.persist_result(record)
        await self.store.notify_subscribers(record)
        for future_id in await self.store.evict():
            dropped = self._records.get(future_id)
            if dropped is not None:
                self._forget(dropped)
        logger.debug(f"Future {record.id} {state.value}")

    def _forget(self, record: FutureRecord) -> None:
        self._records.pop(record.id, None)
        if record.idempotency_key is not None:
            key = (record.owner, record.idempotency_key)
            if self._keys.get(key) == record.id:
                del self._keys[key]

    # -------------------------------------------------------------------------
    # Resolve
    # -------------------------------------------------------------------------

    async def _lookup(self, future_id: uuid.UUID) -> Optional[FutureRecord]:
        record = self._records.get(future_id)
        if record is not None:
            return record
        try:
            return await self.store.load_result(future_id)
        except Exception as exc:
            raise RpcError(StatusCode.INTERNAL, f"future storage failed: {exc}") from exc

    async def resolve(self, request: FutureResolveRequest, caller: str) -> AsyncIterator[FutureResult]:
        """
        Stream terminal results of the caller's futures.

        With ids, already finished results come first and the stream ends
        once every requested future was delivered; without ids it follows
        every future the caller owns until the consumer stops.

        Raises:
            RpcError: PERMISSION_DENIED for another caller's future,
                NOT_FOUND for an unknown id
        """
        ids = list(dict.fromkeys(request.ids))
        subscription = FutureSubscription(caller, set(ids))
        self.store.subscribe(subscription)
        try:
            ready: List[FutureResult] = []
            for future_id in ids:
                record = await self._lookup(future_id)
                if record is None:
                    raise RpcError(StatusCode.NOT_FOUND, f"unknown future {future_id}")
                if record.owner != caller:
                    raise RpcError(StatusCode.PERMISSION_DENIED, f"future {future_id} belongs to another caller")
                if record.state.terminal and record.result is not None:
                    ready.append(record.result)
            for result in ready:
                subscription.delivered.add(result.id)
                yield result
            while not ids or len(subscription.delivered) < len(ids):
                result = await subscription.queue.get()
                if result.id in subscription.delivered:
                    continue
                subscription.delivered.add(result.id)
                yield result
        finally:
            self.store.unsubscribe(subscription)

    # -------------------------------------------------------------------------
    # Cancel
    # -------------------------------------------------------------------------

    async def cancel(self, request: FutureCancelRequest, caller: str) -> None:
        """
        Cancel a pending future; finished ones are left as they are.

        Raises:
            RpcError: NOT_FOUND for unknown ids, PERMISSION_DENIED for another caller's future
        """
        record = await self._lookup(request.id)
        if record is None:
            raise RpcError(StatusCode.NOT_FOUND, f"unknown future {request.id}")
        if record.owner != caller:
            raise RpcError(StatusCode.PERMISSION_DENIED, f"future {request.id} belongs to another caller")
        if record.state.terminal:
            return
        if record.context is not None:
            record.context.cancel()
        if record.task is not None:
            record.task.cancel()
        if record.idempotency_key is not None:
            self._keys.pop((record.owner, record.idempotency_key), None)
        await self._finish(record, FutureState.CANCELLED, _failure(record.id, StatusCode.CANCELLED, "future cancelled"))
        logger.info(f"Cancelled future {record.id}")

    async def close(self) -> None:
        tasks = [r.task for r in self._records.values() if r.task is not None and not r.task.done()]
        for task in tasks:
            task.cancel()
        await asyncio.gather(*tasks, return_exceptions=True)


__all__ = [
    "FutureManager",
    "FutureRecord",
    "FutureState",
    "FutureStore",
    "FutureSubscription",
    "InMemoryFutureStore",
]
