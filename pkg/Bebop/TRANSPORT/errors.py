"""Errors raised by transports."""

from Bebop.Utils.errors import BebopError


class TransportError(BebopError):
    """Base class for connection failures."""


class ConnectionClosed(TransportError):
    """The connection is gone; no further frames can be sent or received."""


class ConnectionRefused(TransportError):
    """The remote end could not be reached."""


__all__ = ["ConnectionClosed", "ConnectionRefused", "TransportError"]
