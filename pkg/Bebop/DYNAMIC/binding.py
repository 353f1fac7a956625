"""
Record binding: Python classes <-> dynamic values.

Classes registered with `@bebop_record(fqn)` stand in for definitions:
dataclasses for structs and messages (fields matched by name), IntEnums
for enums. A union is represented by the record of the branch it holds;
the branch is found by the record's fqn.

The built-in protocol schemas (descriptor meta-schema, RPC control
messages, plugin protocol) ship inside the package and are compiled on
first use by `builtin_table()`.
"""

import dataclasses
from enum import IntEnum
from functools import lru_cache
from typing import Any, Mapping, Optional, Sequence, Type, TypeVar

from Bebop.DESCRIPTOR.builder import build_descriptor_set
from Bebop.DESCRIPTOR.model import TypeDescriptor, TypeKind
from Bebop.DESCRIPTOR.records import record_class, record_fqn
from Bebop.DYNAMIC.codec import decode_value, encode_value
from Bebop.DYNAMIC.limits import DecodeLimits
from Bebop.DYNAMIC.table import TypeTable
from Bebop.DYNAMIC.values import MessageValue, StructValue, UnionValue, _FieldValues
from Bebop.SCHEMA.ast import DefinitionKind
from Bebop.SCHEMA.loaders import MemoryLoader
from Bebop.SCHEMA.resolver import resolve_files
from Bebop.Utils.Log import get_logger
from Bebop.WIRE.arrays import PrimitiveArray
from Bebop.WIRE.errors import TypeMismatch

logger = get_logger(__name__)

R = TypeVar("R")

BUILTIN_SCHEMAS = ("bebop/descriptor.bop", "bebop/rpc.bop", "bebop/plugin.bop")


@lru_cache(maxsize=1)
def builtin_table() -> TypeTable:
    """Definitions of the bundled protocol schemas."""
    program = resolve_files(list(BUILTIN_SCHEMAS), MemoryLoader({}), environ={})
    table = TypeTable.from_descriptor_set(build_descriptor_set(program, include_imports=True))
    logger.debug(f"Compiled built-in schemas: {len(table)} definitions")
    return table


def table_from_sources(files: Mapping[str, str], roots: Optional[Sequence[str]] = None) -> TypeTable:
    """
    Compile in-memory `.bop` sources into a TypeTable.

    Args:
        files: Source text by path; imports between them resolve by path
        roots: Files to compile; every file by default
    """
    program = resolve_files(list(roots or files), MemoryLoader(dict(files)), environ={})
    return TypeTable.from_descriptor_set(build_descriptor_set(program, include_imports=True))


# =============================================================================
# Record -> value
# =============================================================================

def to_value(obj: Any, type_desc: TypeDescriptor, table: TypeTable) -> Any:
    """Convert records (and containers of records) into dynamic values."""
    kind = type_desc.kind
    if kind is TypeKind.DEFINED:
        return _defined_to_value(obj, type_desc.defined_fqn, table)
    if kind in (TypeKind.ARRAY, TypeKind.FIXED_ARRAY):
        element = type_desc.element
        if element.kind.primitive is not None:
            return obj
        return [to_value(item, element, table) for item in obj]
    if kind is TypeKind.MAP:
        return {to_value(k, type_desc.key, table): to_value(v, type_desc.value, table) for k, v in obj.items()}
    return obj


def _defined_to_value(obj: Any, fqn: str, table: TypeTable) -> Any:
    if isinstance(obj, (_FieldValues, UnionValue)):
        return obj
    definition = table.get(fqn)
    kind = definition.kind
    if kind is DefinitionKind.ENUM:
        return int(obj)
    if kind is DefinitionKind.UNION:
        obj_fqn = record_fqn(type(obj))
        for branch in definition.union_def.branches:
            if branch.type_fqn == obj_fqn:
                return UnionValue(branch.discriminator, _defined_to_value(obj, obj_fqn, table), branch.name)
        raise TypeMismatch(f"{type(obj).__name__} is not a branch of {fqn}")
    if not dataclasses.is_dataclass(obj):
        raise TypeMismatch(f"expected a record for {fqn}, got {type(obj).__name__}")
    if kind is DefinitionKind.STRUCT:
        return StructValue({f.name: to_value(getattr(obj, f.name), f.type, table) for f in definition.struct_def.fields}, fqn)
    if kind is DefinitionKind.MESSAGE:
        fields = {}
        for fld in table.message_fields(fqn):
            item = getattr(obj, fld.name, None)
            if item is not None:
                fields[fld.name] = to_value(item, fld.type, table)
        return MessageValue(fields, fqn)
    raise TypeMismatch(f"{fqn} is a {kind.keyword} and has no values")


# =============================================================================
# Value -> record
# =============================================================================

def from_value(value: Any, type_desc: TypeDescriptor, table: TypeTable) -> Any:
    """Convert dynamic values into registered records; unregistered definitions stay dynamic."""
    kind = type_desc.kind
    if kind is TypeKind.DEFINED:
        return _defined_from_value(value, type_desc.defined_fqn, table)
    if kind in (TypeKind.ARRAY, TypeKind.FIXED_ARRAY):
        if isinstance(value, PrimitiveArray):
            return value.tolist()
        if isinstance(value, (bytes, bytearray)):
            return bytes(value)
        return [from_value(item, type_desc.element, table) for item in value]
    if kind is TypeKind.MAP:
        return {from_value(k, type_desc.key, table): from_value(v, type_desc.value, table) for k, v in value.items()}
    return value


def _defined_from_value(value: Any, fqn: str, table: TypeTable) -> Any:
    definition = table.get(fqn)
    kind = definition.kind
    if kind is DefinitionKind.UNION:
        branch = table.union_branches(fqn)[value.discriminator]
        return _defined_from_value(value.value, branch.type_fqn, table)
    cls = record_class(fqn)
    if cls is None:
        return value
    if kind is DefinitionKind.ENUM:
        if issubclass(cls, IntEnum):
            try:
                return cls(value)
            except ValueError:
                return value
        return value
    fields = definition.struct_def.fields if kind is DefinitionKind.STRUCT else definition.message_def.fields
    accepted = {f.name for f in dataclasses.fields(cls)}
    kwargs = {
        fld.name: from_value(value[fld.name], fld.type, table)
        for fld in fields
        if fld.name in value and fld.name in accepted
    }
    return cls(**kwargs)


# =============================================================================
# Encoding records
# =============================================================================

def _fqn_of(cls: type) -> str:
    fqn = record_fqn(cls)
    if fqn is None:
        raise TypeMismatch(f"{cls.__name__} is not bound to a definition (use @bebop_record)")
    return fqn


def encode_record(obj: Any, table: Optional[TypeTable] = None) -> bytes:
    """
    Encode a registered record.

    Args:
        obj: Instance of a `@bebop_record` class
        table: Definitions; defaults to the built-in protocol schemas

    Raises:
        TypeMismatch: If the record does not fit its definition
    """
    table = builtin_table() if table is None else table
    fqn = _fqn_of(type(obj))
    return encode_value(fqn, _defined_to_value(obj, fqn, table), table)


def decode_record(
    cls: Type[R],
    data,
    table: Optional[TypeTable] = None,
    limits: Optional[DecodeLimits] = None,
) -> R:
    """Decode bytes (or a positioned ByteReader) into an instance of `cls`."""
    table = builtin_table() if table is None else table
    fqn = _fqn_of(cls)
    return _defined_from_value(decode_value(fqn, data, table, limits), fqn, table)


__all__ = [
    "BUILTIN_SCHEMAS",
    "builtin_table",
    "decode_record",
    "encode_record",
    "from_value",
    "table_from_sources",
    "to_value",
]
