"""Benchmarks: reference vectors, workloads, timing runner and varint analysis."""

from Bebop.BENCH.golden import GOLDEN_VECTORS, GoldenCheck, GoldenVector, check_golden
from Bebop.BENCH.runner import (
    BenchConfig,
    BenchConfigError,
    BenchReport,
    WorkloadReport,
    render_csv,
    render_table,
    render_varint_table,
    run_bench,
)
from Bebop.BENCH.varint import encode_varint, expected_varint_size, varint_crossover, varint_size, varint_table
from Bebop.BENCH.workloads import WORKLOADS, Workload, bench_table, get_workload

__all__ = [
    "GOLDEN_VECTORS",
    "WORKLOADS",
    "BenchConfig",
    "BenchConfigError",
    "BenchReport",
    "GoldenCheck",
    "GoldenVector",
    "Workload",
    "WorkloadReport",
    "bench_table",
    "check_golden",
    "encode_varint",
    "expected_varint_size",
    "get_workload",
    "render_csv",
    "render_table",
    "render_varint_table",
    "run_bench",
    "varint_crossover",
    "varint_size",
    "varint_table",
]
