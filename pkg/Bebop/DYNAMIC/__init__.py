"""Schema-driven values: codec, debug form and record binding."""

from Bebop.DYNAMIC.binding import builtin_table, decode_record, encode_record, from_value, table_from_sources, to_value
from Bebop.DYNAMIC.codec import decode_value, encode_value, skip_value, write_value
from Bebop.DYNAMIC.debug import from_debug, to_debug
from Bebop.DYNAMIC.limits import DecodeLimits
from Bebop.DYNAMIC.table import TypeRef, TypeTable
from Bebop.DYNAMIC.values import MessageValue, StructValue, UnionValue

__all__ = [
    "DecodeLimits",
    "MessageValue",
    "StructValue",
    "TypeRef",
    "TypeTable",
    "UnionValue",
    "builtin_table",
    "decode_record",
    "decode_value",
    "encode_record",
    "encode_value",
    "from_debug",
    "from_value",
    "skip_value",
    "table_from_sources",
    "to_debug",
    "to_value",
    "write_value",
]
