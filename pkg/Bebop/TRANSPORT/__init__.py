"""Frame transports: in-process loopback, TCP and the HTTP unary mapping."""

from Bebop.TRANSPORT.base import Connection
from Bebop.TRANSPORT.errors import ConnectionClosed, ConnectionRefused, TransportError
from Bebop.TRANSPORT.http import create_http_app, http_unary_call
from Bebop.TRANSPORT.loopback import LoopbackConnection, VirtualClock, loopback_pair
from Bebop.TRANSPORT.tcp import TcpConnection, connect_tcp, serve_tcp

__all__ = [
    "Connection",
    "ConnectionClosed",
    "ConnectionRefused",
    "LoopbackConnection",
    "TcpConnection",
    "TransportError",
    "VirtualClock",
    "connect_tcp",
    "create_http_app",
    "http_unary_call",
    "loopback_pair",
    "serve_tcp",
]
