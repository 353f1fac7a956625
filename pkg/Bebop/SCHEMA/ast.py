"""
Syntax tree for `.bop` files.

Spans and resolver-filled attributes are excluded from equality so two
trees compare equal when their schema content is the same, wherever it
came from.
"""

from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import List, Optional, Union

from Bebop.SCHEMA.errors import Span
from Bebop.WIRE.kinds import PrimitiveKind


def _span():
    return field(default=None, compare=False, repr=False)


# =============================================================================
# Enumerations shared with the descriptor layer
# =============================================================================

class DefinitionKind(IntEnum):
    UNKNOWN = 0
    ENUM = 1
    STRUCT = 2
    MESSAGE = 3
    UNION = 4
    SERVICE = 5
    CONST = 6
    DECORATOR = 7

    @property
    def keyword(self) -> str:
        return "#decorator" if self is DefinitionKind.DECORATOR else self.name.lower()

    @property
    def is_type(self) -> bool:
        return self in (DefinitionKind.ENUM, DefinitionKind.STRUCT, DefinitionKind.MESSAGE, DefinitionKind.UNION)


class Visibility(IntEnum):
    EXPORTED = 0
    LOCAL = 1


class DecoratorTarget(Enum):
    ENUM = "ENUM"
    STRUCT = "STRUCT"
    MESSAGE = "MESSAGE"
    UNION = "UNION"
    FIELD = "FIELD"
    SERVICE = "SERVICE"
    METHOD = "METHOD"
    BRANCH = "BRANCH"
    ALL = "ALL"


class LiteralKind(Enum):
    INT = "int"
    FLOAT = "float"
    STRING = "string"
    BYTES = "bytes"
    BOOL = "bool"


# =============================================================================
# Type expressions
# =============================================================================

class TypeExpr:
    """Base of the type expression variants."""

    span: Optional[Span]


@dataclass
class PrimitiveType(TypeExpr):
    kind: PrimitiveKind
    span: Optional[Span] = _span()


@dataclass
class StringType(TypeExpr):
    span: Optional[Span] = _span()


@dataclass
class NamedType(TypeExpr):
    """Reference to a definition; `target` is the fully-qualified name bound by the resolver."""

    name: str
    span: Optional[Span] = _span()
    target: Optional[str] = field(default=None, compare=False, repr=False)


@dataclass
class ArrayType(TypeExpr):
    """`T[]` when `length` is None, `T[N]` otherwise."""

    element: TypeExpr
    length: Optional[int] = None
    span: Optional[Span] = _span()


@dataclass
class MapType(TypeExpr):
    key: TypeExpr
    value: TypeExpr
    span: Optional[Span] = _span()


# =============================================================================
# Literals and decorators
# =============================================================================

@dataclass
class Literal:
    kind: LiteralKind
    value: Union[int, float, str, bytes, bool]
    span: Optional[Span] = _span()

    def __eq__(self, other):
        if not isinstance(other, Literal):
            return NotImplemented
        if other.kind is not self.kind:
            return False
        # nan literals compare equal to each other
        if self.kind is LiteralKind.FLOAT and self.value != self.value:
            return other.value != other.value
        return self.value == other.value


@dataclass
class DecoratorArgument:
    """`name` is None for positional arguments."""

    value: Literal
    name: Optional[str] = None
    span: Optional[Span] = _span()


@dataclass
class DecoratorUsage:
    """`bound_arguments` holds every argument by parameter name once the resolver has checked it."""

    name: str
    arguments: List[DecoratorArgument] = field(default_factory=list)
    span: Optional[Span] = _span()
    declaration: Optional[str] = field(default=None, compare=False, repr=False)
    bound_arguments: Optional[List[DecoratorArgument]] = field(default=None, compare=False, repr=False)


@dataclass
class DecoratorParam:
    name: str
    type: TypeExpr
    required: bool
    span: Optional[Span] = _span()


# =============================================================================
# Definition bodies
# =============================================================================

@dataclass
class Field:
    """Struct field (no tag) or message field (tag 1..255)."""

    name: str
    type: TypeExpr
    tag: Optional[int] = None
    documentation: str = ""
    decorators: List[DecoratorUsage] = field(default_factory=list)
    span: Optional[Span] = _span()


@dataclass
class EnumMember:
    name: str
    value: int
    documentation: str = ""
    decorators: List[DecoratorUsage] = field(default_factory=list)
    span: Optional[Span] = _span()


@dataclass
class EnumBody:
    base: PrimitiveKind = PrimitiveKind.UINT32
    members: List[EnumMember] = field(default_factory=list)
    explicit_base: bool = False


@dataclass
class StructBody:
    fields: List[Field] = field(default_factory=list)
    mutable: bool = False


@dataclass
class MessageBody:
    fields: List[Field] = field(default_factory=list)


@dataclass
class UnionBranch:
    """`inline` branches own a nested definition named after the branch."""

    name: str
    discriminator: int
    type: NamedType
    inline: bool = False
    documentation: str = ""
    decorators: List[DecoratorUsage] = field(default_factory=list)
    span: Optional[Span] = _span()


@dataclass
class UnionBody:
    branches: List[UnionBranch] = field(default_factory=list)


@dataclass
class Method:
    name: str
    request: NamedType
    response: NamedType
    request_stream: bool = False
    response_stream: bool = False
    documentation: str = ""
    decorators: List[DecoratorUsage] = field(default_factory=list)
    span: Optional[Span] = _span()


@dataclass
class ServiceBody:
    methods: List[Method] = field(default_factory=list)
    includes: List[NamedType] = field(default_factory=list)


@dataclass
class ConstBody:
    type: TypeExpr
    value: Literal


@dataclass
class DecoratorBody:
    targets: List[DecoratorTarget] = field(default_factory=list)
    params: List[DecoratorParam] = field(default_factory=list)
    validate_source: Optional[str] = None
    export_source: Optional[str] = None


Body = Union[EnumBody, StructBody, MessageBody, UnionBody, ServiceBody, ConstBody, DecoratorBody]


# =============================================================================
# Definitions and files
# =============================================================================

@dataclass
class Definition:
    kind: DefinitionKind
    name: str
    body: Body
    visibility: Visibility = Visibility.EXPORTED
    documentation: str = ""
    decorators: List[DecoratorUsage] = field(default_factory=list)
    nested: List["Definition"] = field(default_factory=list)
    explicit_visibility: bool = field(default=False, compare=False, repr=False)
    span: Optional[Span] = _span()
    fqn: Optional[str] = field(default=None, compare=False, repr=False)

    def walk(self):
        """Yield this definition and every nested one, depth first."""
        yield self
        for child in self.nested:
            yield from child.walk()


@dataclass
class Import:
    path: str
    span: Optional[Span] = _span()


@dataclass
class SchemaAst:
    path: str = field(default="<input>", compare=False)
    edition: Optional[str] = None
    package: Optional[str] = None
    imports: List[Import] = field(default_factory=list)
    definitions: List[Definition] = field(default_factory=list)

    def walk(self):
        for definition in self.definitions:
            yield from definition.walk()
