"""
Benchmark workloads.

Schema shapes follow the usual serialization benchmark categories: ML
vectors and tensors, telemetry events, API records and recursive
structures. Values are generated from a fixed seed so every run encodes
the same bytes.
"""

import random
import uuid
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable, Dict, List

from Bebop.DYNAMIC.binding import table_from_sources
from Bebop.DYNAMIC.table import TypeTable
from Bebop.DYNAMIC.values import MessageValue, StructValue, UnionValue
from Bebop.WIRE.temporal import WireTimestamp

BENCH_SCHEMA = """\
edition = "2026"

package bench

/// A vector with an identifier.
struct Embedding {
    id: uuid;
    values: bfloat16[];
}

/// A slice of model weights.
struct TensorShard {
    shape: uint32[];
    data: bfloat16[];
}

message Event {
    id(1): uuid;
    at(2): timestamp;
    kind(3): string;
    source(4): string;
    payload(5): byte[];
}

struct Person {
    id: uint32;
    name: string;
    email: string;
    age: uint16;
    active: bool;
}

enum OrderStatus : byte {
    PENDING = 0;
    SHIPPED = 1;
    DELIVERED = 2;
}

struct LineItem {
    sku: string;
    quantity: uint32;
    price: float64;
}

message Order {
    id(1): uuid;
    customer(2): Person;
    items(3): LineItem[];
    status(4): OrderStatus;
    tags(5): map[string, string];
    created(6): timestamp;
}

message TreeNode {
    value(1): int32;
    left(2): TreeNode;
    right(3): TreeNode;
}

union JsonValue {
    Null(1): {}
    Bool(2): { value: bool; }
    Number(3): { value: float64; }
    Text(4): { value: string; }
    List(5): { items: JsonValue[]; }
    Object(6): { entries: map[string, JsonValue]; }
}
"""

SCHEMA_PATH = "bench.bop"
SMALL_EMBEDDING_ID = uuid.UUID("550e8400-e29b-41d4-a716-446655440000")
TENSOR_SHARD_BYTES = 64 * 1024


@lru_cache(maxsize=1)
def bench_table() -> TypeTable:
    return table_from_sources({SCHEMA_PATH: BENCH_SCHEMA})


@dataclass(frozen=True)
class Workload:
    """
    Attributes:
        name: CLI name
        fqn: Definition the value encodes as
        description: One line for reports
        build: Produces the value from a seeded generator
    """

    name: str
    fqn: str
    description: str
    build: Callable[[random.Random], Any]

    def value(self, seed: int = 0) -> Any:
        return self.build(random.Random(seed))


# -----------------------------------------------------------------------------
# Value builders
# -----------------------------------------------------------------------------

def _uuid(rng: random.Random) -> uuid.UUID:
    return uuid.UUID(int=rng.getrandbits(128), version=4)


def _floats(rng: random.Random, count: int) -> List[float]:
    # bfloat16 keeps 8 significant bits; quarter steps below 64 survive exactly
    return [rng.randint(-255, 255) / 4 for _ in range(count)]


def _embedding(count: int) -> Callable[[random.Random], StructValue]:
    def build(rng: random.Random) -> StructValue:
        return StructValue({"id": _uuid(rng), "values": _floats(rng, count)}, "bench.Embedding")

    return build


def _embedding_small(rng: random.Random) -> StructValue:
    return StructValue({"id": SMALL_EMBEDDING_ID, "values": [1.0, 2.0, 3.0, 4.0]}, "bench.Embedding")


def _tensor_shard(rng: random.Random) -> StructValue:
    count = TENSOR_SHARD_BYTES // 2
    return StructValue({"shape": [128, count // 128], "data": _floats(rng, count)}, "bench.TensorShard")


def _event(payload_size: int) -> Callable[[random.Random], MessageValue]:
    def build(rng: random.Random) -> MessageValue:
        return MessageValue(
            {
                "id": _uuid(rng),
                "at": WireTimestamp(1_700_000_000 + rng.randint(0, 86_400), rng.randint(0, 999_999_999)),
                "kind": "page_view",
                "source": "web-frontend-eu-west-1",
                "payload": rng.randbytes(payload_size),
            },
            "bench.Event",
        )

    return build


def _person(rng: random.Random) -> StructValue:
    number = rng.randint(1, 99_999)
    return StructValue(
        {
            "id": number,
            "name": f"Person {number}",
            "email": f"person{number}@example.com",
            "age": rng.randint(18, 90),
            "active": rng.random() < 0.5,
        },
        "bench.Person",
    )


def _order(item_count: int) -> Callable[[random.Random], MessageValue]:
    def build(rng: random.Random) -> MessageValue:
        items = [
            StructValue(
                {"sku": f"SKU-{rng.randint(0, 999_999):06d}", "quantity": rng.randint(1, 20), "price": rng.randint(99, 99_999) / 100},
                "bench.LineItem",
            )
            for _ in range(item_count)
        ]
        return MessageValue(
            {
                "id": _uuid(rng),
                "customer": _person(rng),
                "items": items,
                "status": rng.randint(0, 2),
                "tags": {f"tag{i}": f"value{rng.randint(0, 999)}" for i in range(8)},
                "created": WireTimestamp(1_700_000_000 + rng.randint(0, 86_400)),
            },
            "bench.Order",
        )

    return build


def _tree(depth: int) -> Callable[[random.Random], MessageValue]:
    def node(rng: random.Random, level: int) -> MessageValue:
        fields: Dict[str, Any] = {"value": rng.randint(-(1 << 31), (1 << 31) - 1)}
        if level < depth:
            fields["left"] = node(rng, level + 1)
            fields["right"] = node(rng, level + 1)
        return MessageValue(fields, "bench.TreeNode")

    return lambda rng: node(rng, 1)


def tree_size(depth: int) -> int:
    """Nodes of a complete binary tree with `depth` levels."""
    return (1 << depth) - 1


def _json(rng: random.Random, depth: int = 0) -> UnionValue:
    choice = rng.randint(1, 6) if depth < 4 else rng.randint(1, 4)
    if choice == 1:
        return UnionValue(1, StructValue({}, "bench.JsonValue.Null"))
    if choice == 2:
        return UnionValue(2, StructValue({"value": rng.random() < 0.5}, "bench.JsonValue.Bool"))
    if choice == 3:
        return UnionValue(3, StructValue({"value": rng.randint(-10_000, 10_000) / 8}, "bench.JsonValue.Number"))
    if choice == 4:
        return UnionValue(4, StructValue({"value": f"text-{rng.randint(0, 1 << 20)}"}, "bench.JsonValue.Text"))
    if choice == 5:
        items = [_json(rng, depth + 1) for _ in range(rng.randint(1, 4))]
        return UnionValue(5, StructValue({"items": items}, "bench.JsonValue.List"))
    entries = {f"key{i}": _json(rng, depth + 1) for i in range(rng.randint(1, 4))}
    return UnionValue(6, StructValue({"entries": entries}, "bench.JsonValue.Object"))


def _json_document(rng: random.Random) -> UnionValue:
    entries = {f"field{i}": _json(rng, 1) for i in range(8)}
    return UnionValue(6, StructValue({"entries": entries}, "bench.JsonValue.Object"))


WORKLOADS: Dict[str, Workload] = {
    workload.name: workload
    for workload in (
        Workload("embedding_small", "bench.Embedding", "uuid + 4 bfloat16", _embedding_small),
        Workload("embedding768", "bench.Embedding", "uuid + 768 bfloat16", _embedding(768)),
        Workload("embedding1536", "bench.Embedding", "uuid + 1536 bfloat16", _embedding(1536)),
        Workload("tensor_shard", "bench.TensorShard", "64 KB of bfloat16 weights", _tensor_shard),
        Workload("event_small", "bench.Event", "telemetry event, 64 byte payload", _event(64)),
        Workload("event_large", "bench.Event", "telemetry event, 4 KB payload", _event(4096)),
        Workload("person_small", "bench.Person", "contact record", _person),
        Workload("order_large", "bench.Order", "order with 100 line items", _order(100)),
        Workload("tree_deep", "bench.TreeNode", "binary tree, depth 10, 1023 nodes", _tree(10)),
        Workload("json_value", "bench.JsonValue", "JSON document as a recursive union", _json_document),
    )
}


def get_workload(name: str) -> Workload:
    try:
        return WORKLOADS[name]
    except KeyError:
        raise KeyError(f"unknown workload {name!r}; choose from {', '.join(WORKLOADS)}") from None


__all__ = ["BENCH_SCHEMA", "WORKLOADS", "Workload", "bench_table", "get_workload", "tree_size"]
