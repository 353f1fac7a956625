"""
Reference byte vectors.

Each vector pairs a value with its exact encoding. `check_golden` encodes
every value, compares byte-for-byte and decodes the bytes back.
"""

import uuid
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, List, Optional

from Bebop.DESCRIPTOR.model import TypeDescriptor
from Bebop.DYNAMIC.binding import table_from_sources
from Bebop.DYNAMIC.codec import decode_value, encode_value
from Bebop.DYNAMIC.table import TypeRef, TypeTable
from Bebop.DYNAMIC.values import MessageValue, StructValue, UnionValue
from Bebop.Utils.Log import get_logger
from Bebop.WIRE.errors import WireError
from Bebop.WIRE.kinds import PrimitiveKind
from Bebop.WIRE.temporal import WireDuration, WireTimestamp

logger = get_logger(__name__)

GOLDEN_SCHEMA = """\
edition = "2026"

package golden

struct Point {
    x: float32;
    y: float32;
}

message Request {
    id(1): uint32;
    name(2): string;
}

union Shape {
    Circle(1): { radius: float32; };
}

struct Coord {
    x: float32;
    y: float32;
}

message Location {
    name(1): string;
    pos(2): Coord;
    alt(3): float32;
}

struct Embedding {
    id: uuid;
    values: bfloat16[];
}
"""

SAMPLE_UUID = uuid.UUID("550e8400-e29b-41d4-a716-446655440000")


@lru_cache(maxsize=1)
def golden_table() -> TypeTable:
    return table_from_sources({"golden.bop": GOLDEN_SCHEMA})


@dataclass(frozen=True)
class GoldenVector:
    name: str
    type_ref: TypeRef
    value: Any
    hex: str

    @property
    def expected(self) -> bytes:
        return bytes.fromhex(self.hex)


@dataclass
class GoldenCheck:
    """Outcome of one vector: encoded bytes, and whether both directions matched."""

    vector: GoldenVector
    actual: bytes = b""
    encoded_ok: bool = False
    decoded_ok: bool = False
    error: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.encoded_ok and self.decoded_ok


def _primitive(kind: PrimitiveKind) -> TypeDescriptor:
    return TypeDescriptor.primitive(kind)


GOLDEN_VECTORS: List[GoldenVector] = [
    GoldenVector("string", TypeDescriptor.string(), "hello", "05000000 68656c6c6f 00"),
    GoldenVector(
        "int32_array",
        TypeDescriptor.array(_primitive(PrimitiveKind.INT32)),
        [1, 2, 3],
        "03000000 01000000 02000000 03000000",
    ),
    GoldenVector("fixed_byte_array", TypeDescriptor.array(_primitive(PrimitiveKind.BYTE), 4), b"\xde\xad\xbe\xef", "deadbeef"),
    GoldenVector(
        "map",
        TypeDescriptor.map(_primitive(PrimitiveKind.BYTE), _primitive(PrimitiveKind.INT32)),
        {1: 100, 2: 200},
        "02000000 01 64000000 02 c8000000",
    ),
    GoldenVector("struct", "golden.Point", StructValue({"x": 1.0, "y": 2.0}), "0000803f 00000040"),
    GoldenVector(
        "message",
        "golden.Request",
        MessageValue({"id": 42, "name": "test"}),
        "10000000 01 2a000000 02 04000000 74657374 00 00",
    ),
    GoldenVector(
        "union",
        "golden.Shape",
        UnionValue(1, StructValue({"radius": 5.0})),
        "05000000 01 0000a040",
    ),
    GoldenVector(
        "nested_message",
        "golden.Location",
        MessageValue({"name": "HQ", "pos": StructValue({"x": 1.0, "y": 2.0}), "alt": 100.0}),
        "17000000 01 02000000 4851 00 02 0000803f 00000040 03 0000c842 00",
    ),
    # nanos carries the raw int32 on the wire: 0x3b9aca00
    GoldenVector(
        "timestamp",
        _primitive(PrimitiveKind.TIMESTAMP),
        WireTimestamp(1000, 1_000_000_000, 32_400_000),
        "e803000000000000 00ca9a3b 8062ee01",
    ),
    GoldenVector("duration", _primitive(PrimitiveKind.DURATION), WireDuration(60, 0), "3c00000000000000 00000000"),
    GoldenVector("uuid", _primitive(PrimitiveKind.UUID), SAMPLE_UUID, "550e8400e29b41d4a716446655440000"),
    GoldenVector(
        "embedding",
        "golden.Embedding",
        StructValue({"id": SAMPLE_UUID, "values": [1.0, 2.0, 3.0, 4.0]}),
        "550e8400e29b41d4a716446655440000 04000000 803f 0040 4040 8040",
    ),
]


def check_vector(vector: GoldenVector, table: Optional[TypeTable] = None) -> GoldenCheck:
    table = golden_table() if table is None else table
    check = GoldenCheck(vector)
    try:
        check.actual = encode_value(vector.type_ref, vector.value, table)
        check.encoded_ok = check.actual == vector.expected
        check.decoded_ok = decode_value(vector.type_ref, vector.expected, table) == vector.value
    except WireError as exc:
        check.error = exc.message
    if not check.passed:
        logger.warning(f"Golden vector {vector.name} failed: expected {vector.expected.hex()}, got {check.actual.hex()}")
    return check


def check_golden(vectors: Optional[List[GoldenVector]] = None) -> List[GoldenCheck]:
    """Run every vector; the result has one entry per vector in order."""
    table = golden_table()
    return [check_vector(vector, table) for vector in (GOLDEN_VECTORS if vectors is None else vectors)]


__all__ = ["GOLDEN_SCHEMA", "GOLDEN_VECTORS", "GoldenCheck", "GoldenVector", "check_golden", "check_vector", "golden_table"]
