"""Errors raised while building descriptors."""

from typing import Any, Dict, Optional

from Bebop.Utils.errors import BebopError


class DescriptorError(BebopError):
    """Base exception for descriptor construction failures."""


class ReservedCollision(DescriptorError):
    """A method routing ID is reserved or shared with another method."""

    def __init__(self, message: str, routing_id: int, methods: Optional[list] = None, details: Optional[Dict[str, Any]] = None):
        self.routing_id = routing_id
        self.methods = methods or []
        super().__init__(message, {"routing_id": routing_id, "methods": self.methods, **(details or {})})
