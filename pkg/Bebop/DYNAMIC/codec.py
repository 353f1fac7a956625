"""
Schema-driven encoder and decoder.

Values follow the shapes in `Bebop.DYNAMIC.values`:

    primitives   bool / int / float / uuid.UUID / WireTimestamp / WireDuration
    string       str
    byte arrays  bytes (bytearray and int lists accepted on encode)
    arrays       list (numeric arrays decode to a zero-copy PrimitiveArray)
    maps         dict, encoded in iteration order
    enums        int
    structs      StructValue or any mapping with every field
    messages     MessageValue or any mapping; missing or None fields are absent
    unions       UnionValue

Messages are written with ascending tags. On decode, the first tag the
reader's schema does not know ends the message: values carry no wire-type
bits, so the rest of the body cannot be parsed and is skipped using the
length prefix.
"""

from collections.abc import Mapping
from typing import Any, Optional, Union

from Bebop.DESCRIPTOR.model import TypeDescriptor, TypeKind
from Bebop.DYNAMIC.limits import DecodeLimits
from Bebop.DYNAMIC.table import TypeRef, TypeTable
from Bebop.DYNAMIC.values import MessageValue, StructValue, UnionValue
from Bebop.SCHEMA.ast import DefinitionKind
from Bebop.WIRE.errors import (
    DepthExceeded,
    DiscriminatorUnknown,
    DuplicateMapKey,
    ElementLimitExceeded,
    MissingEndMarker,
    TagOutOfRange,
    Truncated,
    TypeMismatch,
)
from Bebop.WIRE.kinds import PrimitiveKind
from Bebop.WIRE.reader import ByteReader
from Bebop.WIRE.writer import ByteWriter

_EMPTY_TABLE = TypeTable()


# =============================================================================
# Encoding
# =============================================================================

class Encoder:
    """Writes dynamic values; one instance can serve many calls."""

    def __init__(self, table: Optional[TypeTable] = None):
        self.table = table or _EMPTY_TABLE

    def write(self, writer: ByteWriter, type_desc: TypeDescriptor, value: Any) -> None:
        kind = type_desc.kind
        primitive = kind.primitive
        if primitive is not None:
            writer.write_fixed(primitive, value)
        elif kind is TypeKind.STRING:
            if not isinstance(value, str):
                raise TypeMismatch(f"expected str, got {type(value).__name__}")
            writer.write_string(value)
        elif kind is TypeKind.ARRAY:
            self._write_elements(writer, type_desc.element, value, prefixed=True)
        elif kind is TypeKind.FIXED_ARRAY:
            if len(value) != type_desc.fixed_length:
                raise TypeMismatch(f"{type_desc} needs exactly {type_desc.fixed_length} elements, got {len(value)}")
            self._write_elements(writer, type_desc.element, value, prefixed=False)
        elif kind is TypeKind.MAP:
            if not isinstance(value, Mapping):
                raise TypeMismatch(f"expected a mapping for {type_desc}, got {type(value).__name__}")
            writer.write_uint32(len(value))
            for key, item in value.items():
                self.write(writer, type_desc.key, key)
                self.write(writer, type_desc.value, item)
        elif kind is TypeKind.DEFINED:
            self.write_defined(writer, type_desc.defined_fqn, value)
        else:
            raise TypeMismatch(f"cannot encode type kind {kind.name}")

    def _write_elements(self, writer: ByteWriter, element: TypeDescriptor, values: Any, prefixed: bool) -> None:
        try:
            count = len(values)
        except TypeError:
            raise TypeMismatch(f"expected a sequence of {element}, got {type(values).__name__}") from None
        if prefixed:
            writer.write_uint32(count)
        primitive = element.kind.primitive
        if primitive is PrimitiveKind.BYTE and isinstance(values, (bytes, bytearray, memoryview)):
            writer.write_bytes(values)
        elif primitive is not None:
            writer.write_array(primitive, values)
        else:
            for item in values:
                self.write(writer, element, item)

    def write_defined(self, writer: ByteWriter, fqn: str, value: Any) -> None:
        definition = self.table.get(fqn)
        kind = definition.kind
        if kind is DefinitionKind.ENUM:
            if isinstance(value, bool) or not isinstance(value, int):
                raise TypeMismatch(f"{fqn} values are integers, got {type(value).__name__}")
            writer.write_fixed(definition.enum_def.base.primitive, int(value))
        elif kind is DefinitionKind.STRUCT:
            if not isinstance(value, Mapping):
                raise TypeMismatch(f"expected a struct value for {fqn}, got {type(value).__name__}")
            for fld in definition.struct_def.fields:
                if fld.name not in value:
                    raise TypeMismatch(f"{fqn} value is missing field {fld.name!r}")
                self.write(writer, fld.type, value[fld.name])
        elif kind is DefinitionKind.MESSAGE:
            self._write_message(writer, fqn, value)
        elif kind is DefinitionKind.UNION:
            if not isinstance(value, UnionValue):
                raise TypeMismatch(f"expected a UnionValue for {fqn}, got {type(value).__name__}")
            branch = self.table.union_branches(fqn).get(value.discriminator)
            if branch is None:
                raise DiscriminatorUnknown(f"{fqn} has no branch with discriminator {value.discriminator}")
            handle = writer.reserve_length()
            writer.write_byte(value.discriminator)
            self.write_defined(writer, branch.type_fqn, value.value)
            writer.patch_length(handle)
        else:
            raise TypeMismatch(f"{fqn} is a {kind.keyword} and has no values")

    def _write_message(self, writer: ByteWriter, fqn: str, value: Any) -> None:
        if not isinstance(value, Mapping):
            raise TypeMismatch(f"expected a message value for {fqn}, got {type(value).__name__}")
        fields = self.table.message_fields(fqn)
        known = {f.name for f in fields}
        unknown = [name for name in value if name not in known]
        if unknown:
            raise TypeMismatch(f"{fqn} has no field {unknown[0]!r}")
        handle = writer.reserve_length()
        for fld in fields:
            item = value.get(fld.name)
            if item is None:
                continue
            if not 1 <= fld.tag <= 255:
                raise TagOutOfRange(f"{fqn}.{fld.name} has tag {fld.tag}")
            writer.write_byte(fld.tag)
            self.write(writer, fld.type, item)
        writer.write_byte(0)
        writer.patch_length(handle)


# =============================================================================
# Decoding
# =============================================================================

class Decoder:
    """Reads dynamic values for one top-level decode; tracks depth and element budget."""

    def __init__(self, table: Optional[TypeTable] = None, limits: Optional[DecodeLimits] = None):
        self.table = table or _EMPTY_TABLE
        self.limits = limits or DecodeLimits.default()
        self.elements = 0

    def _enter(self, reader: ByteReader, depth: int) -> int:
        depth += 1
        if depth > self.limits.max_depth:
            raise DepthExceeded(f"nesting deeper than {self.limits.max_depth}", offset=reader.position)
        return depth

    def _count(self, reader: ByteReader, count: int, element: TypeDescriptor) -> None:
        self.elements += count
        if self.elements > self.limits.max_elements:
            raise ElementLimitExceeded(f"more than {self.limits.max_elements} elements", offset=reader.position)
        size = self.table.fixed_size(element)
        if size and count * size > reader.remaining:
            raise Truncated(f"{count} elements of {element} exceed input", offset=reader.position)

    def read(self, reader: ByteReader, type_desc: TypeDescriptor, depth: int = 0) -> Any:
        kind = type_desc.kind
        primitive = kind.primitive
        if primitive is not None:
            return reader.read_fixed(primitive)
        if kind is TypeKind.STRING:
            return reader.read_string()
        if kind is TypeKind.ARRAY or kind is TypeKind.FIXED_ARRAY:
            count = reader.read_uint32() if kind is TypeKind.ARRAY else type_desc.fixed_length
            element = type_desc.element
            self._count(reader, count, element)
            element_primitive = element.kind.primitive
            if element_primitive is not None:
                return reader.read_array_view(element_primitive, count)
            depth = self._enter(reader, depth)
            return [self.read(reader, element, depth) for _ in range(count)]
        if kind is TypeKind.MAP:
            count = reader.read_uint32()
            self._count(reader, count, type_desc.key)
            depth = self._enter(reader, depth)
            result = {}
            for _ in range(count):
                offset = reader.position
                key = self.read(reader, type_desc.key, depth)
                if key in result:
                    raise DuplicateMapKey(f"map key {key!r} appears twice", offset=offset)
                result[key] = self.read(reader, type_desc.value, depth)
            return result
        if kind is TypeKind.DEFINED:
            return self.read_defined(reader, type_desc.defined_fqn, depth)
        raise TypeMismatch(f"cannot decode type kind {kind.name}")

    def read_defined(self, reader: ByteReader, fqn: str, depth: int = 0) -> Any:
        definition = self.table.get(fqn)
        kind = definition.kind
        if kind is DefinitionKind.ENUM:
            return reader.read_fixed(definition.enum_def.base.primitive)
        depth = self._enter(reader, depth)
        if kind is DefinitionKind.STRUCT:
            return StructValue({f.name: self.read(reader, f.type, depth) for f in definition.struct_def.fields}, fqn)
        if kind is DefinitionKind.MESSAGE:
            body = reader.sub_reader(reader.read_uint32())
            tags = self.table.message_tags(fqn)
            fields = {}
            while True:
                if body.at_end():
                    raise MissingEndMarker(f"{fqn} body ended without its end marker", offset=body.position)
                tag = body.read_byte()
                if tag == 0:
                    break
                fld = tags.get(tag)
                if fld is None:
                    body.seek_end()
                    break
                fields[fld.name] = self.read(body, fld.type, depth)
            return MessageValue(fields, fqn)
        if kind is DefinitionKind.UNION:
            body = reader.sub_reader(reader.read_uint32())
            offset = body.position
            discriminator = body.read_byte()
            branch = self.table.union_branches(fqn).get(discriminator)
            if branch is None:
                raise DiscriminatorUnknown(f"{fqn} has no branch with discriminator {discriminator}", offset=offset)
            return UnionValue(discriminator, self.read_defined(body, branch.type_fqn, depth), branch.name)
        raise TypeMismatch(f"{fqn} is a {kind.keyword} and has no values")


# =============================================================================
# Skipping
# =============================================================================

def _skip(decoder: Decoder, reader: ByteReader, type_desc: TypeDescriptor, depth: int = 0) -> None:
    table = decoder.table
    size = table.fixed_size(type_desc)
    if size is not None:
        reader.skip(size)
        return
    kind = type_desc.kind
    if kind is TypeKind.STRING:
        reader.skip(reader.read_uint32() + 1)
    elif kind is TypeKind.ARRAY or kind is TypeKind.FIXED_ARRAY:
        count = reader.read_uint32() if kind is TypeKind.ARRAY else type_desc.fixed_length
        element = type_desc.element
        decoder._count(reader, count, element)
        element_size = table.fixed_size(element)
        if element_size is not None:
            reader.skip(count * element_size)
            return
        depth = decoder._enter(reader, depth)
        for _ in range(count):
            _skip(decoder, reader, element, depth)
    elif kind is TypeKind.MAP:
        count = reader.read_uint32()
        decoder._count(reader, count, type_desc.key)
        depth = decoder._enter(reader, depth)
        for _ in range(count):
            _skip(decoder, reader, type_desc.key, depth)
            _skip(decoder, reader, type_desc.value, depth)
    elif kind is TypeKind.DEFINED:
        definition = table.get(type_desc.defined_fqn)
        if definition.kind in (DefinitionKind.MESSAGE, DefinitionKind.UNION):
            reader.skip(reader.read_uint32())
        else:
            depth = decoder._enter(reader, depth)
            for fld in definition.struct_def.fields:
                _skip(decoder, reader, fld.type, depth)
    else:
        raise TypeMismatch(f"cannot skip type kind {kind.name}")


# =============================================================================
# Module API
# =============================================================================

def encode_value(type_ref: TypeRef, value: Any, table: Optional[TypeTable] = None) -> bytes:
    """
    Encode `value` as `type_ref`.

    Args:
        type_ref: TypeDescriptor, DefinitionDescriptor or fqn
        value: Dynamic value conforming to the type
        table: Definitions referenced by the type

    Returns:
        Encoded bytes

    Raises:
        TypeMismatch: If the value does not conform
        DiscriminatorUnknown: If a union value names no branch
    """
    writer = ByteWriter()
    write_value(writer, type_ref, value, table)
    return writer.getvalue()


def write_value(writer: ByteWriter, type_ref: TypeRef, value: Any, table: Optional[TypeTable] = None) -> None:
    table = table or _EMPTY_TABLE
    Encoder(table).write(writer, table.type_of(type_ref), value)


def decode_value(
    type_ref: TypeRef,
    data: Union[bytes, bytearray, memoryview, ByteReader],
    table: Optional[TypeTable] = None,
    limits: Optional[DecodeLimits] = None,
) -> Any:
    """
    Decode one value of `type_ref`.

    Args:
        type_ref: TypeDescriptor, DefinitionDescriptor or fqn
        data: Input buffer, or a reader positioned at the value (advanced past it)
        table: Definitions referenced by the type
        limits: Depth and element bounds; defaults from settings

    Raises:
        WireError: Truncated, MissingEndMarker, DiscriminatorUnknown,
            DepthExceeded, ElementLimitExceeded, DuplicateMapKey, ...
    """
    table = table or _EMPTY_TABLE
    reader = data if isinstance(data, ByteReader) else ByteReader(data)
    return Decoder(table, limits).read(reader, table.type_of(type_ref))


def skip_value(
    type_ref: TypeRef,
    reader: ByteReader,
    table: Optional[TypeTable] = None,
    limits: Optional[DecodeLimits] = None,
) -> None:
    """
    Advance `reader` past one value without building it; messages and unions skip by prefix.

    Element counts and nesting are held to the same `limits` as `decode_value`.
    """
    table = table or _EMPTY_TABLE
    _skip(Decoder(table, limits), reader, table.type_of(type_ref))


__all__ = ["Decoder", "Encoder", "decode_value", "encode_value", "skip_value", "write_value"]
