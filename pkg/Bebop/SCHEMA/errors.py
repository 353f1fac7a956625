"""Errors raised while reading `.bop` schema files. Every one carries a source span."""

from dataclasses import dataclass
from typing import Any, Dict, Optional

from Bebop.Utils.errors import BebopError


@dataclass(frozen=True)
class Span:
    """A region of a schema file; lines and columns are 1-based, offsets 0-based."""

    file: str
    line: int
    column: int
    end_line: int
    end_column: int
    start: int = 0
    end: int = 0

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"

    def to(self, other: "Span") -> "Span":
        """Span from the start of `self` to the end of `other`."""
        return Span(self.file, self.line, self.column, other.end_line, other.end_column, self.start, other.end)

    @classmethod
    def unknown(cls, file: str = "<unknown>") -> "Span":
        return cls(file, 1, 1, 1, 1)


class SchemaError(BebopError):
    """Base exception for schema errors; `str()` renders `file:line:col: message`."""

    def __init__(self, message: str, span: Optional[Span] = None, details: Optional[Dict[str, Any]] = None):
        self.span = span or Span.unknown()
        self.reason = message
        super().__init__(f"{self.span}: {message}", details)


class InvalidUtf8Source(SchemaError):
    """Schema text is not valid UTF-8."""


class InvalidEscape(SchemaError):
    """Unknown or malformed escape sequence in a string literal."""


class UnterminatedString(SchemaError):
    """String literal runs to the end of the file."""


class SchemaSyntaxError(SchemaError):
    """Token stream does not match the grammar."""


class DuplicateTag(SchemaError):
    """Two message fields, or two union branches, share a number."""


class TagOutOfRange(SchemaError):
    """Message tag outside 1..255 or union discriminator outside 0..255."""


class MissingZeroEnumMember(SchemaError):
    """Enum without a member whose value is 0."""


class InvalidMapKeyType(SchemaError):
    """Map key is not an integer, bool, string, uuid or enum."""


class FixedArrayTooLarge(SchemaError):
    """Fixed array length above 65535."""


class DuplicateDefinition(SchemaError):
    """Two definitions resolve to the same fully-qualified name."""


class DuplicateMember(SchemaError):
    """Two fields, members, branches or methods with the same name."""


class InvalidEnumValue(SchemaError):
    """Enum member value does not fit the enum's base type."""


class UnresolvedType(SchemaError):
    """A type name that names no visible type definition."""


class ImportCycle(SchemaError):
    """A file imports itself, directly or transitively."""


class ImportNotFound(SchemaError):
    """No loader search path contains the imported file."""


class MethodNameCollision(SchemaError):
    """Two methods of one service, own or included, share a name."""


class CompositionCycle(SchemaError):
    """A service includes itself through `with`."""


class UndefinedEnvVar(SchemaError):
    """`$(VAR)` names a variable missing from the environment."""


class InvalidServiceType(SchemaError):
    """Method request or response is not a struct, message or union."""


class RecursiveStruct(SchemaError):
    """A struct contains itself by value."""


class DecoratorError(SchemaError):
    """Decorator usage that its declaration does not allow."""


class InvalidLiteral(SchemaError):
    """Constant or decorator literal that does not fit its declared type."""
