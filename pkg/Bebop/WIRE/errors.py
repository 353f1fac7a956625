"""Errors raised while reading or writing Bebop wire data."""

from typing import Any, Dict, Optional

from Bebop.Utils.errors import BebopError


class WireError(BebopError):
    """Base exception for wire-format failures."""

    def __init__(self, message: str, offset: Optional[int] = None, details: Optional[Dict[str, Any]] = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at byte {offset})"
        super().__init__(message, details)


class Truncated(WireError):
    """Input ended before the value did."""


class MissingTerminator(WireError):
    """A string was not followed by its 0x00 terminator."""


class InvalidUtf8(WireError):
    """String content is not valid UTF-8."""


class MissingEndMarker(WireError):
    """A message body ended without its 0x00 end marker."""


class DiscriminatorUnknown(WireError):
    """A union discriminator names no branch of the schema."""


class DepthExceeded(WireError):
    """Nesting went deeper than the decode limits allow."""


class ElementLimitExceeded(WireError):
    """More elements were decoded than the decode limits allow."""


class DuplicateMapKey(WireError):
    """The same key appeared twice in an encoded map."""


class TypeMismatch(WireError):
    """A value does not conform to the type it is encoded as."""


class TagOutOfRange(WireError):
    """A message field tag outside 1..255."""
