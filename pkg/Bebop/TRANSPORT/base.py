"""
Connection interface shared by the binary transports.

A connection moves whole frames. Frames on one stream id arrive in the
order they were sent; frames of different streams may interleave.
"""

from abc import ABC, abstractmethod

from Bebop.RPC.context import SYSTEM_CLOCK, Clock
from Bebop.RPC.frame import Frame


class Connection(ABC):
    """
    One end of a frame link.

    Attributes:
        peer: Identity of the remote end (authenticated name or address)
        clock: Clock used for deadline checks on this connection
    """

    peer: str = ""
    clock: Clock = SYSTEM_CLOCK

    @abstractmethod
    async def send(self, frame: Frame) -> None:
        """
        Raises:
            ConnectionClosed: If the link is down
        """

    @abstractmethod
    async def receive(self) -> Frame:
        """
        Next inbound frame.

        Raises:
            ConnectionClosed: Once the link is down and nothing is buffered
            WireError: If the peer sent an undecodable frame
        """

    @abstractmethod
    async def close(self) -> None:
        ...

    @property
    @abstractmethod
    def closed(self) -> bool:
        ...

    async def __aenter__(self) -> "Connection":
        return self

    async def __aexit__(self, *exc_info) -> None:
        await self.close()


__all__ = ["Connection"]
