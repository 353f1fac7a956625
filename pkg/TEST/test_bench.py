"""
Tests for the benchmark package: varint size analysis, workloads, the
runner and the bebop-bench command line.
"""

import csv
import io
from fractions import Fraction

import pytest
from typer.testing import CliRunner

from Bebop.BENCH.runner import (
    CSV_COLUMNS,
    MIN_ITERATIONS,
    BenchConfig,
    BenchConfigError,
    Timing,
    bench_workload,
    render_csv,
    run_bench,
)
from Bebop.BENCH.varint import (
    DEFAULT_POINTS,
    MAX_UINT32,
    decode_varint,
    encode_varint,
    expected_varint_size,
    varint_crossover,
    varint_size,
    varint_table,
)
from Bebop.BENCH.workloads import SMALL_EMBEDDING_ID, TENSOR_SHARD_BYTES, WORKLOADS, bench_table, get_workload, tree_size
from Bebop.CLI.Main import bench_app
from Bebop.DESCRIPTOR.model import TypeDescriptor
from Bebop.DYNAMIC.codec import decode_value, encode_value
from Bebop.WIRE.kinds import PrimitiveKind
from oracles import brute_force_varint_size

runner = CliRunner()

BFLOAT16_ARRAY = TypeDescriptor.array(TypeDescriptor.primitive(PrimitiveKind.BFLOAT16))


# =============================================================================
# Varint analysis
# =============================================================================

class TestVarint:
    """LEB128 sizes and the expected-size formula."""

    @pytest.mark.parametrize(
        "value, size",
        [(0, 1), (127, 1), (128, 2), (16383, 2), (16384, 3), ((1 << 21) - 1, 3), (1 << 28, 5), (MAX_UINT32, 5)],
    )
    def test_varint_size(self, value, size):
        assert varint_size(value) == size
        assert len(encode_varint(value)) == size

    def test_encoding(self):
        assert encode_varint(300) == b"\xac\x02"
        assert decode_varint(b"\x00\xac\x02", 1) == (300, 3)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            varint_size(-1)
        with pytest.raises(ValueError):
            encode_varint(-1)

    def test_truncated_decode(self):
        with pytest.raises(ValueError):
            decode_varint(b"\x80\x80")

    @pytest.mark.parametrize("n", [1, 127, 128, 16384, 10**6])
    def test_expected_size_matches_brute_force(self, n):
        assert float(expected_varint_size(n)) == brute_force_varint_size(n)

    def test_exact_fractions(self):
        assert expected_varint_size(0) == 1
        assert expected_varint_size(127) == 1
        assert expected_varint_size(128) == Fraction(130, 129)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            expected_varint_size(MAX_UINT32 + 1)

    def test_crossover_above_two_to_the_28(self):
        print("\n🧪 Searching for the varint/fixed crossover...")
        crossover = varint_crossover()
        assert crossover > 1 << 28
        # values below 2^28 save 3, 2 or 1 bytes; five-byte values must outweigh those savings
        saved = 3 * 128 + 2 * (16384 - 128) + 1 * ((1 << 21) - 16384)
        assert crossover == (1 << 28) + saved
        assert expected_varint_size(crossover) > 4
        assert expected_varint_size(crossover - 1) <= 4
        print(f"✅ Crossover at N = {crossover:,}")

    def test_table(self):
        rows = varint_table()
        assert [row.n for row in rows] == list(DEFAULT_POINTS)
        assert rows[0].varint_wins
        assert not rows[-1].varint_wins


# =============================================================================
# Workloads
# =============================================================================

class TestWorkloads:
    """Wire sizes follow the layout arithmetic."""

    def test_bare_bfloat16_array(self):
        values = get_workload("embedding1536").value()["values"]
        assert len(encode_value(BFLOAT16_ARRAY, values)) == 4 + 2 * 1536 == 3076

    @pytest.mark.parametrize(
        "name, size",
        [
            ("embedding_small", 28),
            ("embedding768", 16 + 4 + 2 * 768),
            ("embedding1536", 3092),
            ("tensor_shard", (4 + 2 * 4) + (4 + TENSOR_SHARD_BYTES)),
        ],
    )
    def test_record_sizes(self, name, size):
        workload = get_workload(name)
        assert len(encode_value(workload.fqn, workload.value(), bench_table())) == size

    def test_small_embedding_bytes(self):
        data = encode_value("bench.Embedding", get_workload("embedding_small").value(), bench_table())
        assert data[:16] == SMALL_EMBEDDING_ID.bytes
        assert data[16:].hex() == "04000000" "803f" "0040" "4040" "8040"

    @pytest.mark.parametrize("name", sorted(WORKLOADS))
    def test_reencode_is_stable(self, name):
        workload = get_workload(name)
        table = bench_table()
        data = encode_value(workload.fqn, workload.value(), table)
        assert encode_value(workload.fqn, decode_value(workload.fqn, data, table), table) == data

    def test_values_are_seeded(self):
        workload = get_workload("order_large")
        table = bench_table()
        assert encode_value(workload.fqn, workload.value(), table) == encode_value(workload.fqn, workload.value(), table)

    def test_tree_has_1023_nodes(self):
        def count(node):
            return 1 + sum(count(node[side]) for side in ("left", "right") if side in node)

        assert tree_size(10) == 1023
        assert count(get_workload("tree_deep").value()) == 1023

    def test_unknown_workload(self):
        with pytest.raises(KeyError):
            get_workload("nope")


# =============================================================================
# Runner
# =============================================================================

class TestRunner:
    """Configuration, measurement and rendering."""

    def test_minimum_iterations(self):
        assert BenchConfig().iterations >= MIN_ITERATIONS
        with pytest.raises(BenchConfigError) as excinfo:
            BenchConfig.build(iterations=MIN_ITERATIONS - 1)
        assert "iterations" in excinfo.value.message

    def test_unknown_workload_rejected(self):
        with pytest.raises(BenchConfigError) as excinfo:
            BenchConfig.build(workloads=["embedding768", "nope"])
        assert "nope" in excinfo.value.message

    def test_empty_run(self):
        report = run_bench(BenchConfig.build(workloads=[]))
        assert report.empty
        assert render_csv(report) == ",".join(CSV_COLUMNS) + "\n"

    def test_workload_report(self):
        report = bench_workload("embedding1536", BenchConfig.build(iterations=10, warmup=0, memcpy_ratio=True))
        assert report.wire_bytes == 3092
        assert report.json_bytes > report.wire_bytes
        assert len(report.decode.samples) == 10
        assert report.memcpy is not None and report.memcpy_ratio is not None
        assert report.decode_speedup > 0

    def test_csv(self):
        config = BenchConfig.build(workloads=["embedding_small", "person_small"], iterations=10, warmup=0)
        rows = list(csv.DictReader(io.StringIO(render_csv(run_bench(config)))))
        assert [row["workload"] for row in rows] == ["embedding_small", "person_small"]
        assert rows[0]["wire_bytes"] == "28"
        assert rows[0]["memcpy_ratio"] == ""
        assert all(float(row["decode_ns"]) > 0 for row in rows)

    def test_varint_section(self):
        report = run_bench(BenchConfig.build(varint=True))
        assert not report.empty
        assert len(report.varint) == len(DEFAULT_POINTS)

    def test_timing_statistics(self):
        assert Timing([]).mean == 0.0
        assert Timing([5]).cv == 0.0
        assert Timing([10, 10, 10]).cv == 0.0
        assert Timing([1, 3]).median == 2


# =============================================================================
# bebop-bench
# =============================================================================

class TestBenchCli:
    """The bebop-bench command line."""

    def test_csv_output(self):
        result = runner.invoke(bench_app, ["-w", "embedding_small", "-n", "10", "-f", "csv"])
        assert result.exit_code == 0, result.output
        rows = list(csv.DictReader(io.StringIO(result.stdout)))
        assert rows[0]["workload"] == "embedding_small"
        assert rows[0]["wire_bytes"] == "28"

    def test_table_output(self):
        result = runner.invoke(bench_app, ["--workloads", "person_small", "--iterations", "10"])
        assert result.exit_code == 0, result.output
        assert "Bebop vs JSON" in result.output

    def test_memcpy_ratio_column(self):
        result = runner.invoke(bench_app, ["-w", "tensor_shard", "-n", "10", "-f", "csv", "--memcpy-ratio"])
        assert result.exit_code == 0, result.output
        (row,) = csv.DictReader(io.StringIO(result.stdout))
        assert float(row["memcpy_ratio"]) > 0

    def test_empty_selection(self):
        result = runner.invoke(bench_app, ["--workloads", ""])
        assert result.exit_code == 0
        assert "No workloads selected" in result.output

    @pytest.mark.parametrize(
        "args",
        [
            ["-w", "embedding_small", "-n", "3"],
            ["-w", "nope"],
            ["-w", "embedding_small", "-f", "xml"],
        ],
    )
    def test_usage_errors(self, args):
        assert runner.invoke(bench_app, args).exit_code == 2

    def test_varint_command(self):
        result = runner.invoke(bench_app, ["varint", "127", "128"])
        assert result.exit_code == 0, result.output
        assert "2^28 + 2,113,664" in result.output

    def test_golden_command(self):
        print("\n🧪 Running bebop-bench golden...")
        result = runner.invoke(bench_app, ["golden"])
        assert result.exit_code == 0, result.output
        assert result.output.count("pass") == 12
        print("✅ All golden vectors pass")
