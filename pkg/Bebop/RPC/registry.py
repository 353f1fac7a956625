"""
Method registry.

Maps routing IDs to registrations. Lookup is a single integer dictionary access;
the path index is only consulted by the HTTP gateway.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional

from Bebop.DESCRIPTOR.model import MethodDescriptor
from Bebop.DESCRIPTOR.routing import RESERVED_IDS, method_routing_id, parse_method_path
from Bebop.DYNAMIC.binding import decode_record, encode_record
from Bebop.DYNAMIC.codec import decode_value, encode_value
from Bebop.DYNAMIC.table import TypeRef, TypeTable
from Bebop.RPC.errors import RegistryError, RpcError
from Bebop.RPC.status import StatusCode
from Bebop.Utils.Log import get_logger

logger = get_logger(__name__)


class MethodType(Enum):
    UNARY = "unary"
    SERVER_STREAM = "server_stream"
    CLIENT_STREAM = "client_stream"
    DUPLEX = "duplex"

    @property
    def request_stream(self) -> bool:
        return self in (MethodType.CLIENT_STREAM, MethodType.DUPLEX)

    @property
    def response_stream(self) -> bool:
        return self in (MethodType.SERVER_STREAM, MethodType.DUPLEX)

    @property
    def batchable(self) -> bool:
        return not self.request_stream

    @classmethod
    def of(cls, request_stream: bool, response_stream: bool) -> "MethodType":
        if request_stream:
            return cls.DUPLEX if response_stream else cls.CLIENT_STREAM
        return cls.SERVER_STREAM if response_stream else cls.UNARY


# =============================================================================
# Message codecs
# =============================================================================

@dataclass(frozen=True)
class MessageCodec:
    """How a registration turns payload bytes into handler arguments and back."""

    decode: Callable[[bytes], Any]
    encode: Callable[[Any], bytes]

    @classmethod
    def raw(cls) -> "MessageCodec":
        return _RAW

    @classmethod
    def for_record(cls, record_cls: type, table: Optional[TypeTable] = None) -> "MessageCodec":
        """Requests decoded into `@bebop_record` instances."""
        return cls(lambda data: decode_record(record_cls, data, table), lambda obj: encode_record(obj, table))

    @classmethod
    def for_type(cls, type_ref: TypeRef, table: TypeTable) -> "MessageCodec":
        """Requests decoded into dynamic values of `type_ref`."""
        return cls(lambda data: decode_value(type_ref, data, table), lambda value: encode_value(type_ref, value, table))


_RAW = MessageCodec(bytes, bytes)


@dataclass
class MethodRegistration:
    """
    Attributes:
        routing_id: Hash of `path`, or a reserved ID for built-ins
        path: `/Service/Method`
        method_type: Which of the four call shapes the handler implements
        handler: Coroutine function (unary, client-stream) or async generator
            function (server-stream, duplex)
        request: Codec for requests
        response: Codec for responses
    """

    routing_id: int
    path: str
    method_type: MethodType
    handler: Callable[..., Any]
    request: MessageCodec = field(default_factory=MessageCodec.raw)
    response: MessageCodec = field(default_factory=MessageCodec.raw)
    builtin: bool = False


# =============================================================================
# Registry
# =============================================================================

class MethodRegistry:
    """
    Registered methods by routing ID.

    Example:
        >>> registry = MethodRegistry()
        >>> registry.add("/Echo/Echo", MethodType.UNARY, echo)
        >>> registry.get(method_routing_id("Echo", "Echo"))
    """

    def __init__(self) -> None:
        self._methods: Dict[int, MethodRegistration] = {}
        self._paths: Dict[str, int] = {}
        logger.debug("MethodRegistry initialized")

    # -------------------------------------------------------------------------
    # Registration
    # -------------------------------------------------------------------------

    def register(self, registration: MethodRegistration) -> MethodRegistration:
        """
        Register a method.

        Raises:
            RegistryError: If the ID is reserved (for non built-ins) or already taken
        """
        routing_id = registration.routing_id
        if routing_id in RESERVED_IDS and not registration.builtin:
            raise RegistryError(f"routing ID {routing_id} of {registration.path} is reserved")
        existing = self._methods.get(routing_id)
        if existing is not None:
            raise RegistryError(
                f"routing ID {routing_id:#010x} of {registration.path} is already used by {existing.path}",
                {"routing_id": routing_id, "methods": [existing.path, registration.path]},
            )
        self._methods[routing_id] = registration
        self._paths[registration.path] = routing_id
        logger.info(f"Registered method: {registration.path} ({registration.method_type.value}, id {routing_id:#010x})")
        return registration

    def add(
        self,
        path: str,
        method_type: MethodType,
        handler: Callable[..., Any],
        request: Optional[MessageCodec] = None,
        response: Optional[MessageCodec] = None,
    ) -> MethodRegistration:
        """Register `handler` under `/Service/Method`; the routing ID is hashed from the path."""
        service, method = parse_method_path(path)
        return self.register(
            MethodRegistration(
                method_routing_id(service, method),
                path,
                method_type,
                handler,
                request or MessageCodec.raw(),
                response or MessageCodec.raw(),
            )
        )

    def add_descriptor(
        self,
        service_name: str,
        method: MethodDescriptor,
        handler: Callable[..., Any],
        table: TypeTable,
    ) -> MethodRegistration:
        """Register a handler for a compiled method; payloads are dynamic values."""
        return self.register(
            MethodRegistration(
                method.routing_id,
                f"/{service_name}/{method.name}",
                MethodType.of(method.request_stream, method.response_stream),
                handler,
                MessageCodec.for_type(method.request_fqn, table),
                MessageCodec.for_type(method.response_fqn, table),
            )
        )

    def unregister(self, routing_id: int) -> bool:
        registration = self._methods.pop(routing_id, None)
        if registration is not None:
            self._paths.pop(registration.path, None)
            logger.info(f"Unregistered method: {registration.path}")
            return True
        return False

    # -------------------------------------------------------------------------
    # Retrieval
    # -------------------------------------------------------------------------

    def get(self, routing_id: int) -> Optional[MethodRegistration]:
        return self._methods.get(routing_id)

    def get_or_raise(self, routing_id: int) -> MethodRegistration:
        """
        Raises:
            RpcError: UNIMPLEMENTED for unknown IDs
        """
        registration = self._methods.get(routing_id)
        if registration is None:
            raise RpcError(StatusCode.UNIMPLEMENTED, f"no method with routing ID {routing_id:#010x}")
        return registration

    def get_by_path(self, path: str) -> Optional[MethodRegistration]:
        """Lookup for text-routed transports; None for unknown paths."""
        routing_id = self._paths.get(path)
        return None if routing_id is None else self._methods.get(routing_id)

    def exists(self, routing_id: int) -> bool:
        return routing_id in self._methods

    def list_all(self) -> List[MethodRegistration]:
        return list(self._methods.values())

    def list_paths(self) -> List[str]:
        return [registration.path for registration in self._methods.values()]

    def __len__(self) -> int:
        return len(self._methods)


__all__ = ["MessageCodec", "MethodRegistration", "MethodRegistry", "MethodType"]
