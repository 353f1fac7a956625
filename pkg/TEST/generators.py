"""
Seeded generators for random schemas and matching values.

`SchemaGenerator` builds definitions bottom-up (a definition only refers
to earlier ones), renders them as `.bop` source and keeps a parallel
`GenType` model the oracles can walk without touching Bebop itself.
"""

import random
import uuid
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from Bebop.DYNAMIC.values import MessageValue, StructValue, UnionValue
from Bebop.WIRE.temporal import WireDuration, WireTimestamp

PACKAGE = "gen"

INTEGER_RANGES = {
    "byte": (0, 2**8 - 1),
    "int8": (-(2**7), 2**7 - 1),
    "int16": (-(2**15), 2**15 - 1),
    "uint16": (0, 2**16 - 1),
    "int32": (-(2**31), 2**31 - 1),
    "uint32": (0, 2**32 - 1),
    "int64": (-(2**63), 2**63 - 1),
    "uint64": (0, 2**64 - 1),
    "int128": (-(2**127), 2**127 - 1),
    "uint128": (0, 2**128 - 1),
}
FLOATS = ("float16", "bfloat16", "float32", "float64")
OTHER_PRIMITIVES = ("bool", "uuid", "timestamp", "duration")
PRIMITIVES = tuple(INTEGER_RANGES) + FLOATS + OTHER_PRIMITIVES
KEY_PRIMITIVES = tuple(INTEGER_RANGES) + ("bool", "uuid")
ENUM_BASES = ("byte", "uint16", "int32", "uint32", "uint64")

_ALPHABET = "abcxyzABC019 _-é漢字😀"


# =============================================================================
# Type model
# =============================================================================

@dataclass
class GenField:
    name: str
    type: "GenType"
    tag: int = 0


@dataclass
class GenBranch:
    discriminator: int
    name: str
    type: "GenType"


@dataclass
class GenType:
    """One node of a generated type: a type expression or a definition."""

    kind: str
    name: str = ""
    element: Optional["GenType"] = None
    key: Optional["GenType"] = None
    value: Optional["GenType"] = None
    length: int = 0
    fields: List[GenField] = field(default_factory=list)
    branches: List[GenBranch] = field(default_factory=list)
    base: str = "uint32"
    members: List[int] = field(default_factory=list)

    @property
    def fqn(self) -> str:
        return f"{PACKAGE}.{self.name}"

    @property
    def is_definition(self) -> bool:
        return self.kind in ("struct", "message", "enum", "union")

    def render(self) -> str:
        """Schema spelling of this type when used as a field type."""
        if self.kind == "primitive":
            return self.name
        if self.kind == "string":
            return "string"
        if self.kind == "array":
            return f"{self.element.render()}[]"
        if self.kind == "fixed_array":
            return f"{self.element.render()}[{self.length}]"
        if self.kind == "map":
            return f"map[{self.key.render()}, {self.value.render()}]"
        return self.name


@dataclass
class GenSchema:
    source: str
    definitions: List[GenType]

    @property
    def path(self) -> str:
        return "gen.bop"

    @property
    def value_types(self) -> List[GenType]:
        """Definitions that carry values (everything generated does)."""
        return list(self.definitions)


# =============================================================================
# Schema generation
# =============================================================================

class SchemaGenerator:
    """Random schemas from a seeded `random.Random`."""

    def __init__(self, rng: random.Random, max_depth: int = 2):
        self.rng = rng
        self.max_depth = max_depth
        self._definitions: List[GenType] = []

    def primitive(self) -> GenType:
        return GenType("primitive", self.rng.choice(PRIMITIVES))

    def type_expr(self, depth: int = 0) -> GenType:
        rng = self.rng
        roll = rng.random()
        if depth >= self.max_depth or roll < 0.35:
            return self.primitive()
        if roll < 0.45:
            return GenType("string")
        if roll < 0.6:
            return GenType("array", element=self.type_expr(depth + 1))
        if roll < 0.68:
            return GenType("fixed_array", element=self.primitive(), length=rng.randint(1, 4))
        if roll < 0.8:
            return GenType("map", key=self.key_type(), value=self.type_expr(depth + 1))
        if self._definitions:
            return rng.choice(self._definitions)
        return self.primitive()

    def key_type(self) -> GenType:
        enums = [d for d in self._definitions if d.kind == "enum"]
        roll = self.rng.random()
        if enums and roll < 0.2:
            return self.rng.choice(enums)
        if roll < 0.45:
            return GenType("string")
        return GenType("primitive", self.rng.choice(KEY_PRIMITIVES))

    def _enum(self, index: int) -> GenType:
        members = sorted({0} | {self.rng.randint(1, 200) for _ in range(self.rng.randint(0, 4))})
        return GenType("enum", f"E{index}", base=self.rng.choice(ENUM_BASES), members=members)

    def _struct(self, index: int) -> GenType:
        count = self.rng.randint(1, 4)
        fields = [GenField(f"f{i}", self.type_expr()) for i in range(count)]
        return GenType("struct", f"S{index}", fields=fields)

    def _message(self, index: int) -> GenType:
        count = self.rng.randint(0, 5)
        tags = self.rng.sample(range(1, 256), count)
        fields = [GenField(f"m{i}", self.type_expr(), tag) for i, tag in enumerate(tags)]
        return GenType("message", f"M{index}", fields=fields)

    def _union(self, index: int) -> Optional[GenType]:
        candidates = [d for d in self._definitions if d.kind in ("struct", "message")]
        if not candidates:
            return None
        count = self.rng.randint(1, min(3, len(candidates)))
        discriminators = self.rng.sample(range(1, 256), count)
        branches = [
            GenBranch(disc, f"B{disc}", target)
            for disc, target in zip(discriminators, self.rng.sample(candidates, count))
        ]
        return GenType("union", f"U{index}", branches=branches)

    def generate(self, count: int = 6) -> GenSchema:
        self._definitions = []
        makers = (self._enum, self._struct, self._message, self._union)
        index = 0
        while len(self._definitions) < count:
            index += 1
            definition = self.rng.choice(makers)(index)
            if definition is not None:
                self._definitions.append(definition)
        return GenSchema(render_schema(self._definitions), list(self._definitions))


def render_schema(definitions: List[GenType]) -> str:
    lines = ['edition = "2026"', f"package {PACKAGE}", ""]
    for definition in definitions:
        if definition.kind == "enum":
            lines.append(f"enum {definition.name} : {definition.base} {{")
            lines.extend(f"    V{value} = {value};" for value in definition.members)
        elif definition.kind == "struct":
            lines.append(f"struct {definition.name} {{")
            lines.extend(f"    {f.name}: {f.type.render()};" for f in definition.fields)
        elif definition.kind == "message":
            lines.append(f"message {definition.name} {{")
            lines.extend(f"    {f.name}({f.tag}): {f.type.render()};" for f in definition.fields)
        else:
            lines.append(f"union {definition.name} {{")
            lines.extend(f"    {b.name}({b.discriminator}): {b.type.name};" for b in definition.branches)
        lines.append("}")
        lines.append("")
    return "\n".join(lines)


# =============================================================================
# Value generation
# =============================================================================

class ValueGenerator:
    """Values shaped the way the dynamic decoder returns them."""

    def __init__(self, rng: random.Random, max_items: int = 4):
        self.rng = rng
        self.max_items = max_items

    def primitive(self, name: str) -> Any:
        rng = self.rng
        if name in INTEGER_RANGES:
            return rng.randint(*INTEGER_RANGES[name])
        if name == "bool":
            return rng.random() < 0.5
        # floats stay exactly representable in their width
        if name == "float16":
            return rng.randint(-2047, 2047) / 4
        if name == "bfloat16":
            return rng.randint(-255, 255) / 4
        if name == "float32":
            return rng.randint(-(10**6), 10**6) / 8
        if name == "float64":
            return rng.uniform(-1e9, 1e9)
        if name == "uuid":
            return uuid.UUID(int=rng.getrandbits(128))
        if name == "timestamp":
            return WireTimestamp(
                rng.randint(-(2**40), 2**40),
                rng.randint(0, 999_999_999),
                rng.randint(-12 * 3_600_000, 14 * 3_600_000),
            )
        if name == "duration":
            seconds = rng.randint(0, 2**40)
            nanos = rng.randint(0, 999_999_999)
            return WireDuration(-seconds, -nanos) if rng.random() < 0.5 else WireDuration(seconds, nanos)
        raise ValueError(name)

    def string(self) -> str:
        return "".join(self.rng.choice(_ALPHABET) for _ in range(self.rng.randint(0, 12)))

    def value(self, gen: GenType) -> Any:
        rng = self.rng
        kind = gen.kind
        if kind == "primitive":
            return self.primitive(gen.name)
        if kind == "string":
            return self.string()
        if kind in ("array", "fixed_array"):
            count = gen.length if kind == "fixed_array" else rng.randint(0, self.max_items)
            if gen.element.kind == "primitive" and gen.element.name == "byte":
                return bytes(rng.getrandbits(8) for _ in range(count))
            return [self.value(gen.element) for _ in range(count)]
        if kind == "map":
            result: Dict[Any, Any] = {}
            for _ in range(rng.randint(0, self.max_items)):
                key = self.value(gen.key)
                if key not in result:
                    result[key] = self.value(gen.value)
            return result
        if kind == "enum":
            return rng.choice(gen.members)
        if kind == "struct":
            return StructValue({f.name: self.value(f.type) for f in gen.fields})
        if kind == "message":
            return MessageValue({f.name: self.value(f.type) for f in gen.fields if rng.random() < 0.7})
        if kind == "union":
            branch = rng.choice(gen.branches)
            return UnionValue(branch.discriminator, self.value(branch.type), branch.name)
        raise ValueError(kind)
