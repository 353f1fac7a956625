"""
Descriptor records.

Python classes for the messages in `bebop/descriptor.bop`. The builder
produces them directly from a resolved program; `Bebop.DESCRIPTOR.codec`
serializes them with the Bebop wire format.

Message fields left at None are absent on the wire.
"""

from dataclasses import dataclass, field
from enum import IntEnum
from typing import Dict, Iterator, List, Optional, Union

from Bebop.DESCRIPTOR.records import bebop_record
from Bebop.SCHEMA.ast import DefinitionKind, Visibility
from Bebop.WIRE.kinds import PrimitiveKind

_PACKAGE = "bebop.descriptor"

bebop_record(f"{_PACKAGE}.DefinitionKind")(DefinitionKind)
bebop_record(f"{_PACKAGE}.Visibility")(Visibility)


@bebop_record(f"{_PACKAGE}.TypeKind")
class TypeKind(IntEnum):
    UNKNOWN = 0
    BOOL = 1
    BYTE = 2
    INT8 = 3
    INT16 = 4
    UINT16 = 5
    INT32 = 6
    UINT32 = 7
    INT64 = 8
    UINT64 = 9
    INT128 = 10
    UINT128 = 11
    FLOAT16 = 12
    BFLOAT16 = 13
    FLOAT32 = 14
    FLOAT64 = 15
    STRING = 16
    UUID = 17
    TIMESTAMP = 18
    DURATION = 19
    ARRAY = 20
    FIXED_ARRAY = 21
    MAP = 22
    DEFINED = 23

    @classmethod
    def of_primitive(cls, kind: PrimitiveKind) -> "TypeKind":
        return cls[kind.name]

    @property
    def primitive(self) -> Optional[PrimitiveKind]:
        """The wire primitive for fixed-width kinds, None for the rest."""
        return _PRIMITIVE_OF.get(self)


_PRIMITIVE_OF: Dict[TypeKind, PrimitiveKind] = {TypeKind[kind.name]: kind for kind in PrimitiveKind}


# =============================================================================
# Type references
# =============================================================================

@bebop_record(f"{_PACKAGE}.TypeDescriptor")
@dataclass
class TypeDescriptor:
    kind: TypeKind = TypeKind.UNKNOWN
    element: Optional["TypeDescriptor"] = None
    fixed_length: Optional[int] = None
    key: Optional["TypeDescriptor"] = None
    value: Optional["TypeDescriptor"] = None
    defined_fqn: Optional[str] = None

    @classmethod
    def primitive(cls, kind: Union[PrimitiveKind, str]) -> "TypeDescriptor":
        if isinstance(kind, str):
            kind = PrimitiveKind.from_name(kind)
        return cls(TypeKind.of_primitive(kind))

    @classmethod
    def string(cls) -> "TypeDescriptor":
        return cls(TypeKind.STRING)

    @classmethod
    def array(cls, element: "TypeDescriptor", length: Optional[int] = None) -> "TypeDescriptor":
        if length is None:
            return cls(TypeKind.ARRAY, element=element)
        return cls(TypeKind.FIXED_ARRAY, element=element, fixed_length=length)

    @classmethod
    def map(cls, key: "TypeDescriptor", value: "TypeDescriptor") -> "TypeDescriptor":
        return cls(TypeKind.MAP, key=key, value=value)

    @classmethod
    def defined(cls, fqn: str) -> "TypeDescriptor":
        return cls(TypeKind.DEFINED, defined_fqn=fqn)

    def __str__(self) -> str:
        if self.kind is TypeKind.DEFINED:
            return self.defined_fqn or "?"
        if self.kind is TypeKind.ARRAY:
            return f"{self.element}[]"
        if self.kind is TypeKind.FIXED_ARRAY:
            return f"{self.element}[{self.fixed_length}]"
        if self.kind is TypeKind.MAP:
            return f"map[{self.key}, {self.value}]"
        if self.kind is TypeKind.STRING:
            return "string"
        primitive = self.kind.primitive
        return primitive.value if primitive else self.kind.name.lower()


# =============================================================================
# Decorators
# =============================================================================

@bebop_record(f"{_PACKAGE}.DecoratorArgument")
@dataclass
class DecoratorArgument:
    name: str = ""
    value: str = ""


@bebop_record(f"{_PACKAGE}.DecoratorUsage")
@dataclass
class DecoratorUsage:
    fqn: str = ""
    arguments: List[DecoratorArgument] = field(default_factory=list)


# =============================================================================
# Definition bodies
# =============================================================================

@bebop_record(f"{_PACKAGE}.EnumMember")
@dataclass
class EnumMember:
    name: str = ""
    value: int = 0
    documentation: str = ""
    decorators: List[DecoratorUsage] = field(default_factory=list)


@bebop_record(f"{_PACKAGE}.EnumDef")
@dataclass
class EnumDef:
    base: TypeKind = TypeKind.UINT32
    members: List[EnumMember] = field(default_factory=list)

    def member_value(self, member: EnumMember) -> int:
        """Signed value of a member, undoing the two's complement storage."""
        low, _ = self.base.primitive.integer_range
        bits = self.base.primitive.size * 8
        if low < 0 and member.value >= 1 << (bits - 1):
            return member.value - (1 << bits)
        return member.value

    def member_names(self) -> Dict[int, str]:
        """Value to first member name, in declaration order."""
        names: Dict[int, str] = {}
        for member in self.members:
            names.setdefault(self.member_value(member), member.name)
        return names


def enum_pattern(value: int, base: PrimitiveKind) -> int:
    """Bit pattern stored in `EnumMember.value` for a member of `base`."""
    return value & ((1 << (base.size * 8)) - 1)


@bebop_record(f"{_PACKAGE}.FieldDescriptor")
@dataclass
class FieldDescriptor:
    name: str = ""
    type: TypeDescriptor = field(default_factory=TypeDescriptor)
    tag: Optional[int] = None
    documentation: str = ""
    decorators: List[DecoratorUsage] = field(default_factory=list)


@bebop_record(f"{_PACKAGE}.StructDef")
@dataclass
class StructDef:
    fields: List[FieldDescriptor] = field(default_factory=list)
    mutable: bool = False


@bebop_record(f"{_PACKAGE}.MessageDef")
@dataclass
class MessageDef:
    fields: List[FieldDescriptor] = field(default_factory=list)


@bebop_record(f"{_PACKAGE}.UnionBranch")
@dataclass
class UnionBranch:
    discriminator: int = 0
    name: str = ""
    type_fqn: str = ""
    inline: bool = False
    documentation: str = ""
    decorators: List[DecoratorUsage] = field(default_factory=list)


@bebop_record(f"{_PACKAGE}.UnionDef")
@dataclass
class UnionDef:
    branches: List[UnionBranch] = field(default_factory=list)


@bebop_record(f"{_PACKAGE}.MethodDescriptor")
@dataclass
class MethodDescriptor:
    name: str = ""
    request_fqn: str = ""
    response_fqn: str = ""
    request_stream: bool = False
    response_stream: bool = False
    routing_id: int = 0
    documentation: str = ""
    decorators: List[DecoratorUsage] = field(default_factory=list)
    origin: str = ""

    @property
    def method_type(self) -> str:
        """`unary`, `server_stream`, `client_stream` or `duplex`."""
        if self.request_stream and self.response_stream:
            return "duplex"
        if self.request_stream:
            return "client_stream"
        if self.response_stream:
            return "server_stream"
        return "unary"


@bebop_record(f"{_PACKAGE}.ServiceDef")
@dataclass
class ServiceDef:
    methods: List[MethodDescriptor] = field(default_factory=list)
    includes: List[str] = field(default_factory=list)


@bebop_record(f"{_PACKAGE}.ConstDef")
@dataclass
class ConstDef:
    type: TypeDescriptor = field(default_factory=TypeDescriptor)
    value: bytes = b""


@bebop_record(f"{_PACKAGE}.DecoratorParam")
@dataclass
class DecoratorParam:
    name: str = ""
    type: TypeDescriptor = field(default_factory=TypeDescriptor)
    required: bool = False


@bebop_record(f"{_PACKAGE}.DecoratorDef")
@dataclass
class DecoratorDef:
    targets: List[str] = field(default_factory=list)
    params: List[DecoratorParam] = field(default_factory=list)
    validate_source: Optional[str] = None
    export_source: Optional[str] = None


# =============================================================================
# Definitions, schemas, sets
# =============================================================================

@bebop_record(f"{_PACKAGE}.DefinitionDescriptor")
@dataclass
class DefinitionDescriptor:
    kind: DefinitionKind = DefinitionKind.UNKNOWN
    name: str = ""
    fqn: str = ""
    documentation: str = ""
    visibility: Visibility = Visibility.EXPORTED
    decorators: List[DecoratorUsage] = field(default_factory=list)
    nested: List["DefinitionDescriptor"] = field(default_factory=list)
    enum_def: Optional[EnumDef] = None
    struct_def: Optional[StructDef] = None
    message_def: Optional[MessageDef] = None
    union_def: Optional[UnionDef] = None
    service_def: Optional[ServiceDef] = None
    const_def: Optional[ConstDef] = None
    decorator_def: Optional[DecoratorDef] = None

    @property
    def body(self):
        """The kind-specific body, whichever one is set."""
        return (
            self.enum_def
            or self.struct_def
            or self.message_def
            or self.union_def
            or self.service_def
            or self.const_def
            or self.decorator_def
        )

    def walk(self) -> Iterator["DefinitionDescriptor"]:
        yield self
        for child in self.nested:
            yield from child.walk()


@bebop_record(f"{_PACKAGE}.SchemaDescriptor")
@dataclass
class SchemaDescriptor:
    name: str = ""
    package: Optional[str] = None
    definitions: List[DefinitionDescriptor] = field(default_factory=list)
    edition: Optional[str] = None
    imports: List[str] = field(default_factory=list)

    def walk(self) -> Iterator[DefinitionDescriptor]:
        for definition in self.definitions:
            yield from definition.walk()


@bebop_record(f"{_PACKAGE}.DescriptorSet")
@dataclass
class DescriptorSet:
    schemas: List[SchemaDescriptor] = field(default_factory=list)

    def walk(self) -> Iterator[DefinitionDescriptor]:
        """Every definition of every schema, nested ones included."""
        for schema in self.schemas:
            yield from schema.walk()

    def find(self, fqn: str) -> Optional[DefinitionDescriptor]:
        return next((definition for definition in self.walk() if definition.fqn == fqn), None)

    def schema(self, name: str) -> Optional[SchemaDescriptor]:
        return next((schema for schema in self.schemas if schema.name == name), None)
