"""
Tests for descriptors: routing IDs, definition ordering, the `.bopd`
codec and the evolution checker (directly and through `bebopc check`).
"""

import random

import pytest
from typer.testing import CliRunner

from Bebop.CLI.Main import app
from Bebop.DESCRIPTOR import (
    RESERVED_IDS,
    DescriptorSet,
    ReservedCollision,
    build_descriptor_set,
    check_evolution,
    check_routing_ids,
    has_breaking,
    method_routing_id,
    murmur3_lowbias32,
)
from Bebop.DESCRIPTOR.codec import decode_descriptor_set, encode_descriptor_set, read_descriptor_file, write_descriptor_file
from Bebop.SCHEMA import FileSystemLoader, MemoryLoader, resolve_files

from generators import SchemaGenerator
from oracles import textbook_murmur3_lowbias32

runner = CliRunner()

HEADER = 'edition = "2026"\npackage evo\n\n'

PACKAGE_EXAMPLE = {
    "app.bop": (
        'edition = "2026"\n'
        "package my.app\n\n"
        'import "bebop/decorators.bop"\n'
        'import "shared/types.bop"\n\n'
        "/// Documentation comment\n"
        "struct Point {\n"
        "    x: float32;\n"
        "    y: float32;\n"
        "}\n"
    ),
    "shared/types.bop": 'edition = "2026"\npackage shared\n\nenum Unit { NONE = 0; }\n',
}


def describe(files, roots=None, include_imports=False) -> DescriptorSet:
    program = resolve_files(list(roots or files), MemoryLoader(files), environ={})
    return build_descriptor_set(program, include_imports=include_imports)


def find_colliding_methods():
    """Two method names under service S whose routing IDs collide."""
    seen = {}
    index = 0
    while True:
        name = f"M{index}"
        routing_id = textbook_murmur3_lowbias32(f"/S/{name}".encode("utf-8"))
        if routing_id in seen:
            return seen[routing_id], name
        seen[routing_id] = name
        index += 1


# =============================================================================
# Routing IDs
# =============================================================================

class TestRoutingIds:
    """MurmurHash3 with the lowbias32 finalizer."""

    @pytest.mark.parametrize(
        "service, method",
        [
            ("ChatService", "Send"),
            ("ChatService", "Subscribe"),
            ("A", "B"),
            ("Ünïcode", "Méthod"),
            ("Long" * 10, "Name" * 7),
        ],
    )
    def test_matches_oracle(self, service, method):
        expected = textbook_murmur3_lowbias32(f"/{service}/{method}".encode("utf-8"))
        assert method_routing_id(service, method) == expected

    def test_every_tail_length(self, rng):
        for length in range(0, 24):
            data = bytes(rng.getrandbits(8) for _ in range(length))
            assert murmur3_lowbias32(data) == textbook_murmur3_lowbias32(data)

    def test_deterministic(self):
        assert method_routing_id("ChatService", "Send") == method_routing_id("ChatService", "Send")
        assert 0 <= method_routing_id("ChatService", "Send") < 2**32

    def test_reserved_ids_are_rejected(self):
        for reserved in sorted(RESERVED_IDS):
            with pytest.raises(ReservedCollision) as excinfo:
                check_routing_ids([("/Svc/Call", reserved)])
            assert excinfo.value.routing_id == reserved

    def test_colliding_methods_fail_the_build(self):
        print("\n🧪 Searching for a routing ID collision...")
        first, second = find_colliding_methods()
        assert method_routing_id("S", first) == method_routing_id("S", second)
        source = (
            HEADER
            + "message Empty {}\n"
            + f"service S {{\n    {first}(Empty): Empty;\n    {second}(Empty): Empty;\n}}\n"
        )
        with pytest.raises(ReservedCollision) as excinfo:
            describe({"svc.bop": source})
        assert excinfo.value.methods == [f"/S/{first}", f"/S/{second}"]
        print(f"✅ {first} and {second} collide")

    def test_descriptor_carries_routing_ids(self):
        source = HEADER + "message Empty {}\nservice ChatService {\n    Send(Empty): Empty;\n}\n"
        service = describe({"chat.bop": source}).find("evo.ChatService")
        method = service.service_def.methods[0]
        assert method.routing_id == textbook_murmur3_lowbias32(b"/ChatService/Send")
        assert method.method_type == "unary"


# =============================================================================
# Building
# =============================================================================

class TestBuilder:
    """Definition order, fqns and documentation."""

    def test_dependencies_come_first(self):
        source = HEADER + "struct B { a: A; }\nstruct A { x: int32; }\nstruct C { b: B; }\n"
        schema = describe({"order.bop": source}).schemas[0]
        assert [d.name for d in schema.definitions] == ["A", "B", "C"]

    def test_independent_definitions_keep_source_order(self):
        source = HEADER + "struct Z {}\nstruct Y {}\nstruct X {}\n"
        schema = describe({"order.bop": source}).schemas[0]
        assert [d.name for d in schema.definitions] == ["Z", "Y", "X"]

    def test_recursive_message_is_stable(self):
        source = HEADER + "message Tree {\n    value(1): int32;\n    children(2): Tree[];\n}\nstruct Uses { t: Tree; }\n"
        first = describe({"tree.bop": source})
        second = describe({"tree.bop": source})
        assert [d.name for d in first.schemas[0].definitions] == ["Tree", "Uses"]
        assert encode_descriptor_set(first) == encode_descriptor_set(second)

    def test_mutual_recursion_keeps_source_order(self):
        source = HEADER + "message Ping { pong(1): Pong; }\nmessage Pong { ping(1): Ping; }\n"
        schema = describe({"pp.bop": source}).schemas[0]
        assert [d.name for d in schema.definitions] == ["Ping", "Pong"]

    def test_long_reference_chain(self):
        chain = "".join(f"struct S{i} {{ next: S{i + 1}; }}\n" for i in range(1500))
        source = HEADER + chain + "struct S1500 { x: int32; }\n"
        schema = describe({"chain.bop": source}).schemas[0]
        assert [d.name for d in schema.definitions] == [f"S{i}" for i in range(1500, -1, -1)]

    def test_long_message_cycle_keeps_source_order(self):
        chain = "".join(f"message M{i} {{ next(1): M{(i + 1) % 1500}; }}\n" for i in range(1500))
        schema = describe({"ring.bop": HEADER + chain}).schemas[0]
        assert [d.name for d in schema.definitions] == [f"M{i}" for i in range(1500)]

    def test_names_do_not_depend_on_working_directory(self, tmp_path, monkeypatch):
        project = tmp_path.resolve() / "project"
        (project / "shared").mkdir(parents=True)
        (project / "shared" / "types.bop").write_text('edition = "2026"\npackage shared\n\nenum Unit { NONE = 0; }\n')
        (project / "point.bop").write_text(
            HEADER + 'import "shared/types.bop"\n\nstruct Point { x: float32; }\n'
        )

        encoded = []
        for cwd, root in ((tmp_path, "project/point.bop"), (project / "shared", "../point.bop")):
            monkeypatch.chdir(cwd)
            program = resolve_files([root], FileSystemLoader(), environ={})
            descriptors = build_descriptor_set(program)
            schema = descriptors.schemas[0]
            assert schema.name == "point.bop"
            assert schema.imports == ["shared/types.bop"]
            encoded.append(encode_descriptor_set(descriptors))
        assert encoded[0] == encoded[1]

    def test_package_example(self):
        descriptors = describe(PACKAGE_EXAMPLE, roots=["app.bop"])
        assert len(descriptors.schemas) == 1
        schema = descriptors.schemas[0]
        assert schema.package == "my.app"
        assert [d.fqn for d in schema.definitions] == ["my.app.Point"]
        assert schema.definitions[0].documentation == "Documentation comment"
        assert schema.imports == ["bebop/decorators.bop", "shared/types.bop"]

    def test_include_imports(self):
        descriptors = describe(PACKAGE_EXAMPLE, roots=["app.bop"], include_imports=True)
        names = [schema.name for schema in descriptors.schemas]
        assert "app.bop" in names and "shared/types.bop" in names
        assert descriptors.find("shared.Unit") is not None


# =============================================================================
# .bopd codec
# =============================================================================

class TestDescriptorCodec:
    """DescriptorSet encoded with the descriptor meta-schema."""

    def test_empty_set(self):
        data = encode_descriptor_set(DescriptorSet())
        assert int.from_bytes(data[:4], "little") == len(data) - 4
        assert data[-1] == 0
        assert decode_descriptor_set(data) == DescriptorSet()

    def test_package_example_roundtrip(self):
        descriptors = describe(PACKAGE_EXAMPLE, roots=["app.bop"], include_imports=True)
        assert decode_descriptor_set(encode_descriptor_set(descriptors)) == descriptors

    def test_every_kind_roundtrips(self):
        source = (
            HEADER
            + 'import "bebop/decorators.bop"\n'
            + "/// Colors\nenum Color : int16 { NONE = 0; DARK = -1; }\n"
            + "mut struct P { x: float32; tags: map[string, uuid[2]]; }\n"
            + "message M {\n    @deprecated(\"gone\")\n    a(1): Color;\n    b(200): P[];\n}\n"
            + "union U { Inline(1): { v: bfloat16[]; }; Other(2): M; }\n"
            + "service Base { Ping(M): M; }\n"
            + "service Svc with Base { Watch(M): stream U; Upload(stream M): P; }\n"
            + "const timestamp EPOCH = \"1970-01-01T00:00:00Z\";\n"
            + "#decorator(note) {\n    targets = STRUCT | FIELD\n    param text!: string\n}\n"
        )
        descriptors = describe({"all.bop": source})
        assert decode_descriptor_set(encode_descriptor_set(descriptors)) == descriptors
        color = descriptors.find("evo.Color")
        assert color.enum_def.member_names() == {0: "NONE", -1: "DARK"}

    def test_file_roundtrip(self, tmp_path):
        descriptors = describe(PACKAGE_EXAMPLE, roots=["app.bop"])
        path = tmp_path / "app.bopd"
        written = write_descriptor_file(path, descriptors)
        assert written == path.stat().st_size
        assert read_descriptor_file(path) == descriptors

    def test_generated_schemas_roundtrip(self):
        schemas = SchemaGenerator(random.Random(11))
        for _ in range(25):
            schema = schemas.generate()
            descriptors = describe({schema.path: schema.source})
            encoded = encode_descriptor_set(descriptors)
            assert decode_descriptor_set(encoded) == descriptors
            assert encode_descriptor_set(describe({schema.path: schema.source})) == encoded


# =============================================================================
# Evolution
# =============================================================================

EVOLUTION_MATRIX = [
    # message
    ("message_add_field", "message M { a(1): int32; }", "message M { a(1): int32; b(5): string; }", 0),
    (
        "message_deprecate_field",
        "message M { a(1): int32; }",
        'import "bebop/decorators.bop"\nmessage M { @deprecated("old") a(1): int32; }',
        0,
    ),
    ("message_rename_field", "message M { a(1): int32; }", "message M { renamed(1): int32; }", 0),
    ("message_change_type", "message M { a(1): int32; }", "message M { a(1): string; }", 1),
    ("message_change_tag", "message M { a(1): int32; }", "message M { a(2): int32; }", 1),
    # struct
    ("struct_add_field", "struct P { x: int32; }", "struct P { x: int32; y: int32; }", 1),
    ("struct_remove_field", "struct P { x: int32; y: int32; }", "struct P { x: int32; }", 1),
    ("struct_reorder_fields", "struct P { x: int32; y: string; }", "struct P { y: string; x: int32; }", 1),
    ("struct_change_type", "struct P { x: int32; }", "struct P { x: int64; }", 1),
    # union
    (
        "union_add_branch",
        "struct A {}\nstruct B {}\nunion U { First(1): A; }",
        "struct A {}\nstruct B {}\nunion U { First(1): A; Second(2): B; }",
        0,
    ),
    (
        "union_remove_branch",
        "struct A {}\nstruct B {}\nunion U { First(1): A; Second(2): B; }",
        "struct A {}\nstruct B {}\nunion U { First(1): A; }",
        1,
    ),
    (
        "union_change_branch_type",
        "struct A {}\nstruct B {}\nunion U { First(1): A; }",
        "struct A {}\nstruct B {}\nunion U { First(1): B; }",
        1,
    ),
    # enum
    ("enum_add_value", "enum E : uint8 { A = 0; }", "enum E : uint8 { A = 0; B = 1; }", 0),
    ("enum_remove_value", "enum E : uint8 { A = 0; B = 1; }", "enum E : uint8 { A = 0; }", 1),
    ("enum_change_base", "enum E : uint8 { A = 0; }", "enum E : uint32 { A = 0; }", 1),
]


class TestEvolution:
    """Safe and breaking changes, reported by `bebopc check`."""

    @pytest.mark.parametrize("name, old, new, exit_code", EVOLUTION_MATRIX, ids=[row[0] for row in EVOLUTION_MATRIX])
    def test_matrix(self, schema_dir, name, old, new, exit_code):
        old_path = schema_dir(f"v1/{name}.bop", HEADER + old + "\n")
        new_path = schema_dir(f"v2/{name}.bop", HEADER + new + "\n")
        result = runner.invoke(app, ["check", str(old_path), str(new_path)])
        assert result.exit_code == exit_code, result.output
        assert ("breaking" if exit_code else "safe") in result.output

    def test_matrix_has_every_row(self):
        assert len(EVOLUTION_MATRIX) == 15

    def test_identical_schemas(self, schema_dir):
        path = schema_dir("same.bop", HEADER + "message M { a(1): int32; }\n")
        result = runner.invoke(app, ["check", str(path), str(path)])
        assert result.exit_code == 0
        assert "No changes" in result.output

    def test_self_check_never_breaks(self):
        schemas = SchemaGenerator(random.Random(23))
        for _ in range(25):
            schema = schemas.generate()
            descriptors = describe({schema.path: schema.source})
            assert check_evolution(descriptors, descriptors) == []

    def test_struct_rename_is_breaking(self):
        old = describe({"p.bop": HEADER + "struct P { x: int32; }"})
        new = describe({"p.bop": HEADER + "struct P { renamed: int32; }"})
        changes = check_evolution(old, new)
        assert has_breaking(changes)
        assert changes[0].subject == "evo.P.x"

    def test_removed_definition_is_breaking(self):
        old = describe({"p.bop": HEADER + "struct P {}\nstruct Q {}"})
        new = describe({"p.bop": HEADER + "struct P {}"})
        assert [str(change) for change in check_evolution(old, new)] == [
            "breaking: evo.Q: struct removed (Existing references break)"
        ]

    def test_schema_error_exits_one(self, schema_dir):
        good = schema_dir("good.bop", HEADER + "struct P {}\n")
        bad = schema_dir("bad.bop", HEADER + "struct P { x: Missing; }\n")
        result = runner.invoke(app, ["check", str(good), str(bad)])
        assert result.exit_code == 1
        assert "bad.bop:" in result.output
