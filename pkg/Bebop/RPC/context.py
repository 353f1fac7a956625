"""Per-call context handed to every handler."""

import asyncio
from dataclasses import dataclass, field
from typing import Dict, Optional

from Bebop.RPC.frame import deadline_remaining
from Bebop.WIRE.temporal import WireDuration, WireTimestamp


class Clock:
    """Wall clock used for deadline checks."""

    def now(self) -> WireTimestamp:
        return WireTimestamp.now()


class ManualClock(Clock):
    """A clock that only moves when told to."""

    def __init__(self, start: Optional[WireTimestamp] = None):
        self._now = start or WireTimestamp.now()

    def now(self) -> WireTimestamp:
        return self._now

    def advance(self, duration: WireDuration) -> None:
        self._now = self._now.plus(duration)

    def set(self, instant: WireTimestamp) -> None:
        self._now = instant


SYSTEM_CLOCK = Clock()


@dataclass
class RpcContext:
    """
    Attributes:
        method_id: Routing ID of the call
        deadline: Absolute cutoff, None for no deadline
        metadata: Request metadata from the CallHeader or HTTP headers
        cursor: Resume position sent by the client; 0 on a fresh call
        peer: Caller identity (authenticated identity or remote address)
        response_metadata: Filled by the handler; returned with future results
    """

    method_id: int = 0
    deadline: Optional[WireTimestamp] = None
    metadata: Dict[str, bytes] = field(default_factory=dict)
    cursor: int = 0
    peer: str = ""
    response_metadata: Dict[str, bytes] = field(default_factory=dict)
    clock: Clock = field(default=SYSTEM_CLOCK, repr=False)
    cancelled: asyncio.Event = field(default_factory=asyncio.Event, repr=False)

    def remaining(self) -> Optional[WireDuration]:
        """Time left before the deadline, None without one."""
        if self.deadline is None:
            return None
        return deadline_remaining(self.deadline, self.clock.now())

    @property
    def expired(self) -> bool:
        left = self.remaining()
        return left is not None and left.is_expired

    def timeout_seconds(self) -> Optional[float]:
        left = self.remaining()
        return None if left is None else max(left.to_seconds(), 0.0)

    def cancel(self) -> None:
        self.cancelled.set()

    @property
    def is_cancelled(self) -> bool:
        return self.cancelled.is_set()

    def derive(self, method_id: int, deadline: Optional[WireTimestamp] = None) -> "RpcContext":
        """Context for a nested call (batch entry, future body) made on behalf of this caller."""
        return RpcContext(
            method_id=method_id,
            deadline=deadline if deadline is not None else self.deadline,
            metadata=dict(self.metadata),
            peer=self.peer,
            clock=self.clock,
        )


__all__ = ["Clock", "ManualClock", "RpcContext", "SYSTEM_CLOCK"]
