"""
JSON-compatible debug form of dynamic values.

Used by `bebopc encode` / `bebopc decode`. Not a compatibility surface:
    uuid        canonical string
    byte[]      hex string
    maps        list of [key, value] pairs
    unions      {"Branch": value}
    enums       member name (unknown values stay integers)
    timestamp   {"seconds", "nanos", "offset_ms"} (an ISO 8601 string is accepted)
    duration    {"seconds", "nanos"} (a string like "1h30m" is accepted)
    float nan/inf  "nan", "inf", "-inf"
"""

import math
import uuid
from collections.abc import Mapping
from typing import Any, Optional

from Bebop.DESCRIPTOR.model import TypeDescriptor, TypeKind
from Bebop.DYNAMIC.table import TypeRef, TypeTable
from Bebop.DYNAMIC.values import MessageValue, StructValue, UnionValue
from Bebop.SCHEMA.ast import DefinitionKind
from Bebop.SCHEMA.literals import parse_duration, parse_timestamp
from Bebop.WIRE.errors import TypeMismatch
from Bebop.WIRE.kinds import PrimitiveKind
from Bebop.WIRE.temporal import WireDuration, WireTimestamp

_EMPTY_TABLE = TypeTable()


def _float_out(value: float) -> Any:
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


def _float_in(value: Any) -> float:
    if isinstance(value, str) and value in ("nan", "inf", "-inf"):
        return float(value)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise TypeMismatch(f"expected a number, got {value!r}")
    return float(value)


# =============================================================================
# Value -> debug
# =============================================================================

def to_debug(value: Any, type_ref: TypeRef, table: Optional[TypeTable] = None) -> Any:
    """
    Convert a dynamic value to plain JSON data.

    Args:
        value: Dynamic value of `type_ref`
        type_ref: TypeDescriptor, DefinitionDescriptor or fqn
        table: Definitions referenced by the type
    """
    table = table or _EMPTY_TABLE
    return _out(value, table.type_of(type_ref), table)


def _out(value: Any, type_desc: TypeDescriptor, table: TypeTable) -> Any:
    kind = type_desc.kind
    primitive = kind.primitive
    if primitive is not None:
        if primitive is PrimitiveKind.UUID:
            return str(value)
        if primitive is PrimitiveKind.TIMESTAMP:
            return {"seconds": value.seconds, "nanos": value.nanos, "offset_ms": value.offset_ms}
        if primitive is PrimitiveKind.DURATION:
            return {"seconds": value.seconds, "nanos": value.nanos}
        if primitive.is_float:
            return _float_out(value)
        return value
    if kind is TypeKind.STRING:
        return value
    if kind in (TypeKind.ARRAY, TypeKind.FIXED_ARRAY):
        if type_desc.element.kind is TypeKind.BYTE:
            return bytes(value).hex()
        return [_out(item, type_desc.element, table) for item in value]
    if kind is TypeKind.MAP:
        return [[_out(k, type_desc.key, table), _out(v, type_desc.value, table)] for k, v in value.items()]
    return _out_defined(value, type_desc.defined_fqn, table)


def _out_defined(value: Any, fqn: str, table: TypeTable) -> Any:
    definition = table.get(fqn)
    kind = definition.kind
    if kind is DefinitionKind.ENUM:
        return definition.enum_def.member_names().get(value, value)
    if kind is DefinitionKind.STRUCT:
        return {f.name: _out(value[f.name], f.type, table) for f in definition.struct_def.fields}
    if kind is DefinitionKind.MESSAGE:
        return {
            f.name: _out(value[f.name], f.type, table)
            for f in table.message_fields(fqn)
            if value.get(f.name) is not None
        }
    if kind is DefinitionKind.UNION:
        branch = table.union_branches(fqn)[value.discriminator]
        return {branch.name: _out_defined(value.value, branch.type_fqn, table)}
    raise TypeMismatch(f"{fqn} is a {kind.keyword} and has no values")


# =============================================================================
# Debug -> value
# =============================================================================

def from_debug(type_ref: TypeRef, data: Any, table: Optional[TypeTable] = None) -> Any:
    """
    Build a dynamic value from its debug form.

    Raises:
        TypeMismatch: If `data` does not fit the type
    """
    table = table or _EMPTY_TABLE
    return _in(data, table.type_of(type_ref), table)


def _in(data: Any, type_desc: TypeDescriptor, table: TypeTable) -> Any:
    kind = type_desc.kind
    primitive = kind.primitive
    try:
        if primitive is not None:
            if primitive is PrimitiveKind.UUID:
                return uuid.UUID(data)
            if primitive is PrimitiveKind.TIMESTAMP:
                return parse_timestamp(data) if isinstance(data, str) else WireTimestamp(**data)
            if primitive is PrimitiveKind.DURATION:
                return parse_duration(data) if isinstance(data, str) else WireDuration(**data)
            if primitive.is_float:
                return _float_in(data)
            return data
        if kind is TypeKind.STRING:
            if not isinstance(data, str):
                raise TypeMismatch(f"expected a string, got {data!r}")
            return data
        if kind in (TypeKind.ARRAY, TypeKind.FIXED_ARRAY):
            if type_desc.element.kind is TypeKind.BYTE and isinstance(data, str):
                return bytes.fromhex(data)
            return [_in(item, type_desc.element, table) for item in data]
        if kind is TypeKind.MAP:
            pairs = data.items() if isinstance(data, Mapping) else data
            return {_in(k, type_desc.key, table): _in(v, type_desc.value, table) for k, v in pairs}
    except (TypeError, ValueError, AttributeError) as exc:
        raise TypeMismatch(f"cannot read {data!r} as {type_desc}: {exc}") from exc
    return _in_defined(data, type_desc.defined_fqn, table)


def _in_defined(data: Any, fqn: str, table: TypeTable) -> Any:
    definition = table.get(fqn)
    kind = definition.kind
    if kind is DefinitionKind.ENUM:
        if isinstance(data, str):
            for member in definition.enum_def.members:
                if member.name == data:
                    return definition.enum_def.member_value(member)
            raise TypeMismatch(f"{fqn} has no member {data!r}")
        return data
    if not isinstance(data, Mapping):
        raise TypeMismatch(f"expected an object for {fqn}, got {data!r}")
    if kind is DefinitionKind.STRUCT:
        missing = [f.name for f in definition.struct_def.fields if f.name not in data]
        if missing:
            raise TypeMismatch(f"{fqn} value is missing field {missing[0]!r}")
        return StructValue({f.name: _in(data[f.name], f.type, table) for f in definition.struct_def.fields}, fqn)
    if kind is DefinitionKind.MESSAGE:
        fields = {f.name: f for f in definition.message_def.fields}
        unknown = [name for name in data if name not in fields]
        if unknown:
            raise TypeMismatch(f"{fqn} has no field {unknown[0]!r}")
        return MessageValue({name: _in(item, fields[name].type, table) for name, item in data.items()}, fqn)
    if kind is DefinitionKind.UNION:
        if len(data) != 1:
            raise TypeMismatch(f"a {fqn} value names exactly one branch")
        (name, item), = data.items()
        for branch in definition.union_def.branches:
            if branch.name == name:
                return UnionValue(branch.discriminator, _in_defined(item, branch.type_fqn, table), branch.name)
        raise TypeMismatch(f"{fqn} has no branch {name!r}")
    raise TypeMismatch(f"{fqn} is a {kind.keyword} and has no values")


__all__ = ["from_debug", "to_debug"]
