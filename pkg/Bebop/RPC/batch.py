"""
Batch pipelining.

A batch is a list of calls where each call either carries its own payload
or forwards the result of an earlier call. `plan_batch` layers the calls
by dependency depth; `execute_batch` runs each layer concurrently and
feeds results forward, all inside one client round trip.
"""

import asyncio
from dataclasses import dataclass, field
from typing import Awaitable, Callable, Dict, List, Optional, Sequence

from Bebop.DESCRIPTOR.routing import RESERVED_IDS
from Bebop.RPC.context import RpcContext
from Bebop.RPC.errors import InvalidReference, MethodNotBatchable
from Bebop.RPC.messages import OWN_PAYLOAD, BatchCall, BatchResult
from Bebop.RPC.registry import MethodRegistry
from Bebop.RPC.result import CallResult
from Bebop.RPC.status import StatusCode
from Bebop.Utils.Log import get_logger

logger = get_logger(__name__)

Invoker = Callable[[int, bytes, RpcContext], Awaitable[CallResult]]


@dataclass
class BatchPlan:
    """
    Attributes:
        layers: Call indices per layer; a call's layer is its longest dependency chain
        depends_on: Call index -> index it forwards from
    """

    layers: List[List[int]] = field(default_factory=list)
    depends_on: Dict[int, int] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return sum(len(layer) for layer in self.layers)

    def layer_of(self, index: int) -> int:
        for number, layer in enumerate(self.layers):
            if index in layer:
                return number
        raise KeyError(index)


def plan_batch(calls: Sequence[BatchCall], registry: Optional[MethodRegistry] = None) -> BatchPlan:
    """
    Partition calls into dependency layers.

    Args:
        calls: Batch calls; `input_from` refers to a position in this list
        registry: When given, methods that cannot be batched are rejected

    Raises:
        InvalidReference: `input_from` below -1 or not before the call
        MethodNotBatchable: Built-in, client-stream or duplex method
    """
    depth: List[int] = []
    plan = BatchPlan()
    for index, call in enumerate(calls):
        source = call.input_from
        if source < OWN_PAYLOAD or source >= index:
            raise InvalidReference(f"call {index} forwards from {source}; only earlier calls may be referenced", index)
        if call.method_id in RESERVED_IDS:
            raise MethodNotBatchable(f"call {index}: built-in method {call.method_id} cannot be batched", call.method_id)
        if registry is not None:
            registration = registry.get(call.method_id)
            if registration is not None and not registration.method_type.batchable:
                raise MethodNotBatchable(
                    f"call {index}: {registration.path} is {registration.method_type.value} and cannot be batched",
                    call.method_id,
                )
        if source == OWN_PAYLOAD:
            level = 0
        else:
            plan.depends_on[index] = source
            level = depth[source] + 1
        depth.append(level)
        while len(plan.layers) <= level:
            plan.layers.append([])
        plan.layers[level].append(index)
    return plan


# =============================================================================
# Execution
# =============================================================================

def _forwarded(result: CallResult) -> Optional[bytes]:
    """A result can feed a dependent only when it produced exactly one message."""
    return result.responses[0] if result.success and len(result.responses) == 1 else None


async def execute_batch(
    plan: BatchPlan,
    calls: Sequence[BatchCall],
    invoke: Invoker,
    context: RpcContext,
) -> List[BatchResult]:
    """
    Run a planned batch.

    Every call of a layer is started before any is awaited. A failed call
    fails its dependents with INVALID_ARGUMENT; once the deadline passes,
    every call that has not finished fails with DEADLINE_EXCEEDED.

    Returns:
        One BatchResult per call, in call order
    """
    results: Dict[int, CallResult] = {}

    for layer in plan.layers:
        pending: Dict[int, bytes] = {}
        for index in layer:
            source = plan.depends_on.get(index)
            if source is None:
                pending[index] = calls[index].payload or b""
                continue
            upstream = results[source]
            if upstream.status == StatusCode.DEADLINE_EXCEEDED:
                results[index] = CallResult.fail(StatusCode.DEADLINE_EXCEEDED, "deadline exceeded before call started")
                continue
            payload = _forwarded(upstream)
            if payload is None:
                reason = "failed" if not upstream.success else f"produced {len(upstream.responses)} responses"
                results[index] = CallResult.fail(StatusCode.INVALID_ARGUMENT, f"dependency call {source} {reason}")
                continue
            pending[index] = payload

        if not pending:
            continue
        if context.expired:
            for index in pending:
                results[index] = CallResult.fail(StatusCode.DEADLINE_EXCEEDED, "deadline exceeded before call started")
            continue

        tasks = {
            index: asyncio.ensure_future(invoke(calls[index].method_id, payload, context.derive(calls[index].method_id)))
            for index, payload in pending.items()
        }
        done, not_done = await asyncio.wait(tasks.values(), timeout=context.timeout_seconds())
        for task in not_done:
            task.cancel()
        for index, task in tasks.items():
            if task in done:
                results[index] = task.result()
            else:
                results[index] = CallResult.fail(StatusCode.DEADLINE_EXCEEDED, "deadline exceeded during batch")
        if not_done:
            await asyncio.gather(*not_done, return_exceptions=True)

    failed = sum(not result.success for result in results.values())
    logger.debug(f"Batch of {len(calls)} call(s) in {len(plan.layers)} layer(s): {failed} failed")
    return [
        BatchResult(call_id=call.call_id, status=results[i].status, responses=results[i].responses, error=results[i].error)
        for i, call in enumerate(calls)
    ]


__all__ = ["BatchPlan", "Invoker", "execute_batch", "plan_batch"]
