"""
In-process frame link.

Frames travel as encoded bytes, so both ends exercise the real codec.
Each end keeps a virtual clock: a frame is stamped with the sender's
time plus the link latency, and receiving it moves the receiver's clock
forward to the stamp. Round trips can then be measured without sleeping.
"""

import asyncio
import itertools
from typing import Optional, Tuple

from Bebop.RPC.context import ManualClock
from Bebop.RPC.frame import Frame, decode_frame
from Bebop.TRANSPORT.base import Connection
from Bebop.TRANSPORT.errors import ConnectionClosed
from Bebop.Utils.Log import get_logger
from Bebop.WIRE.temporal import WireDuration, WireTimestamp

logger = get_logger(__name__)

_addresses = itertools.count(1)
_CLOSED = None


class VirtualClock(ManualClock):
    """A clock moved only by traffic on a loopback link."""

    def advance_to(self, instant: WireTimestamp) -> None:
        if instant.total_nanos > self.now().total_nanos:
            self.set(instant)


class _Link:
    """State shared by both ends: open flag and the disconnect countdown."""

    def __init__(self, latency: WireDuration):
        self.latency = latency
        self.open = True
        self.frames_left: Optional[int] = None
        self.ends: Tuple["LoopbackConnection", ...] = ()

    def cut(self) -> None:
        if not self.open:
            return
        self.open = False
        for end in self.ends:
            end.inbox.put_nowait(_CLOSED)
        logger.debug("Loopback link cut")


class LoopbackConnection(Connection):
    """
    One end of a loopback link.

    Attributes:
        peer: Address of the other end as this end sees it
        clock: This end's virtual clock
        sent_bytes: Total encoded bytes sent from this end
        sent_frames: Frames sent from this end
    """

    def __init__(self, link: _Link, peer: str, clock: VirtualClock):
        self._link = link
        self.peer = peer
        self.clock = clock
        self.inbox: asyncio.Queue = asyncio.Queue()
        self.remote: Optional["LoopbackConnection"] = None
        self.sent_bytes = 0
        self.sent_frames = 0

    @property
    def closed(self) -> bool:
        return not self._link.open

    def disconnect_after(self, frames: int) -> None:
        """Cut the link once `frames` more frames have been sent from either end."""
        self._link.frames_left = frames
        if frames <= 0:
            self._link.cut()

    async def send(self, frame: Frame) -> None:
        if not self._link.open:
            raise ConnectionClosed(f"loopback link to {self.peer} is closed")
        data = frame.encode()
        stamp = self.clock.now().plus(self._link.latency)
        self.sent_bytes += len(data)
        self.sent_frames += 1
        self.remote.inbox.put_nowait((stamp, data))
        if self._link.frames_left is not None:
            self._link.frames_left -= 1
            if self._link.frames_left <= 0:
                self._link.cut()

    async def receive(self) -> Frame:
        item = await self.inbox.get()
        if item is _CLOSED:
            self.inbox.put_nowait(_CLOSED)
            raise ConnectionClosed(f"loopback link to {self.peer} is closed")
        stamp, data = item
        self.clock.advance_to(stamp)
        return decode_frame(data)

    async def close(self) -> None:
        self._link.cut()


def loopback_pair(
    latency: Optional[WireDuration] = None,
    client_address: Optional[str] = None,
    start: Optional[WireTimestamp] = None,
) -> Tuple[LoopbackConnection, LoopbackConnection]:
    """
    Create a connected (client, server) pair.

    Args:
        latency: One-way delay added to every frame on the virtual clocks
        client_address: Identity the server sees; a fresh `loopback:N` by default
        start: Initial virtual time of both ends; the wall clock by default

    Returns:
        (client end, server end)
    """
    number = next(_addresses)
    link = _Link(latency or WireDuration())
    origin = start or WireTimestamp.now()
    client = LoopbackConnection(link, f"loopback-server:{number}", VirtualClock(origin))
    server = LoopbackConnection(link, client_address or f"loopback:{number}", VirtualClock(origin))
    client.remote, server.remote = server, client
    link.ends = (client, server)
    return client, server


__all__ = ["LoopbackConnection", "VirtualClock", "loopback_pair"]
