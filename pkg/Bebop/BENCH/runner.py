"""
Benchmark runner.

Times Bebop encode and decode of each workload against a JSON text
baseline carrying the same values (the debug form through `json`).
Warmup iterations are discarded; the rest report mean and coefficient
of variation in nanoseconds.
"""

import csv
import io
import json
import statistics
import time
from dataclasses import dataclass, field
from typing import Any, Callable, List, Optional

from pydantic import BaseModel, Field, ValidationError, field_validator
from rich.table import Table

from Bebop.BENCH.varint import VarintRow, varint_table
from Bebop.BENCH.workloads import WORKLOADS, bench_table, get_workload
from Bebop.DYNAMIC.codec import decode_value, encode_value
from Bebop.DYNAMIC.debug import to_debug
from Bebop.Utils.Config import settings
from Bebop.Utils.errors import BebopError
from Bebop.Utils.Log import get_logger

logger = get_logger(__name__)

MIN_ITERATIONS = 10


class BenchConfigError(BebopError):
    """Invalid benchmark configuration."""


class BenchConfig(BaseModel):
    """
    What to run and how often.

    Attributes:
        workloads: Workload names; empty runs nothing
        iterations: Timed repetitions per measurement, at least 10
        warmup: Untimed repetitions before timing
        memcpy_ratio: Also time a raw copy of the encoded bytes
        varint: Include the varint size table in the report
    """

    workloads: List[str] = Field(default_factory=list)
    iterations: int = Field(default_factory=lambda: max(settings.bench_iterations, MIN_ITERATIONS), ge=MIN_ITERATIONS)
    warmup: int = Field(default_factory=lambda: settings.bench_warmup, ge=0)
    memcpy_ratio: bool = False
    varint: bool = False

    @field_validator("workloads")
    @classmethod
    def _known(cls, names: List[str]) -> List[str]:
        unknown = [name for name in names if name not in WORKLOADS]
        if unknown:
            raise ValueError(f"unknown workloads: {', '.join(unknown)}")
        return names

    @classmethod
    def build(cls, **kwargs: Any) -> "BenchConfig":
        """Validate, raising BenchConfigError instead of pydantic's error."""
        try:
            return cls(**kwargs)
        except ValidationError as exc:
            problems = "; ".join(f"{'.'.join(map(str, e['loc']))}: {e['msg']}" for e in exc.errors())
            raise BenchConfigError(f"invalid benchmark configuration: {problems}", {"errors": exc.errors()}) from exc


@dataclass
class Timing:
    """Samples in nanoseconds."""

    samples: List[int]

    @property
    def mean(self) -> float:
        return statistics.mean(self.samples) if self.samples else 0.0

    @property
    def median(self) -> float:
        return statistics.median(self.samples) if self.samples else 0.0

    @property
    def cv(self) -> float:
        """Coefficient of variation; zero with fewer than two samples."""
        if len(self.samples) < 2 or self.mean == 0:
            return 0.0
        return statistics.stdev(self.samples) / self.mean


@dataclass
class WorkloadReport:
    name: str
    description: str
    wire_bytes: int
    json_bytes: int
    encode: Timing
    decode: Timing
    json_encode: Timing
    json_decode: Timing
    memcpy: Optional[Timing] = None

    @property
    def decode_speedup(self) -> float:
        """JSON parse time over Bebop decode time."""
        return self.json_decode.mean / self.decode.mean if self.decode.mean else 0.0

    @property
    def memcpy_ratio(self) -> Optional[float]:
        if self.memcpy is None or not self.memcpy.mean:
            return None
        return self.decode.mean / self.memcpy.mean


@dataclass
class BenchReport:
    config: BenchConfig
    workloads: List[WorkloadReport] = field(default_factory=list)
    varint: List[VarintRow] = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return not self.workloads and not self.varint


def _time(operation: Callable[[], Any], iterations: int, warmup: int) -> Timing:
    for _ in range(warmup):
        operation()
    samples = []
    for _ in range(iterations):
        start = time.perf_counter_ns()
        operation()
        samples.append(time.perf_counter_ns() - start)
    return Timing(samples)


def bench_workload(name: str, config: BenchConfig) -> WorkloadReport:
    """Measure one workload."""
    workload = get_workload(name)
    table = bench_table()
    value = workload.value()
    data = encode_value(workload.fqn, value, table)
    debug = to_debug(value, workload.fqn, table)
    text = json.dumps(debug)

    iterations, warmup = config.iterations, config.warmup
    report = WorkloadReport(
        name=workload.name,
        description=workload.description,
        wire_bytes=len(data),
        json_bytes=len(text.encode("utf-8")),
        encode=_time(lambda: encode_value(workload.fqn, value, table), iterations, warmup),
        decode=_time(lambda: decode_value(workload.fqn, data, table), iterations, warmup),
        json_encode=_time(lambda: json.dumps(debug), iterations, warmup),
        json_decode=_time(lambda: json.loads(text), iterations, warmup),
    )
    if config.memcpy_ratio:
        report.memcpy = _time(lambda: bytearray(data), iterations, warmup)
    logger.debug(f"Benchmarked {name}: {report.wire_bytes} bytes, decode {report.decode.mean:.0f} ns")
    return report


def run_bench(config: BenchConfig) -> BenchReport:
    """
    Run every configured workload in order.

    Args:
        config: Validated configuration

    Returns:
        BenchReport; no workloads and no varint table gives an empty report
    """
    report = BenchReport(config)
    for name in config.workloads:
        report.workloads.append(bench_workload(name, config))
    if config.varint:
        report.varint = varint_table()
    logger.info(f"Benchmark finished: {len(report.workloads)} workloads, {config.iterations} iterations each")
    return report


# =============================================================================
# Rendering
# =============================================================================

CSV_COLUMNS = (
    "workload",
    "wire_bytes",
    "json_bytes",
    "encode_ns",
    "encode_cv",
    "decode_ns",
    "decode_cv",
    "json_encode_ns",
    "json_encode_cv",
    "json_decode_ns",
    "json_decode_cv",
    "memcpy_ratio",
)


def render_csv(report: BenchReport) -> str:
    """One row per workload; times are means in nanoseconds, `memcpy_ratio` empty unless measured."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in report.workloads:
        ratio = row.memcpy_ratio
        writer.writerow(
            [
                row.name,
                row.wire_bytes,
                row.json_bytes,
                f"{row.encode.mean:.0f}",
                f"{row.encode.cv:.4f}",
                f"{row.decode.mean:.0f}",
                f"{row.decode.cv:.4f}",
                f"{row.json_encode.mean:.0f}",
                f"{row.json_encode.cv:.4f}",
                f"{row.json_decode.mean:.0f}",
                f"{row.json_decode.cv:.4f}",
                "" if ratio is None else f"{ratio:.3f}",
            ]
        )
    return out.getvalue()


def _ns(timing: Timing) -> str:
    return f"{timing.mean:,.0f} ±{timing.cv * 100:.1f}%"


def render_table(report: BenchReport) -> Table:
    table = Table(title="Bebop vs JSON", show_lines=False)
    table.add_column("Workload", style="cyan")
    table.add_column("Bytes", justify="right")
    table.add_column("JSON bytes", justify="right")
    table.add_column("Encode ns", justify="right")
    table.add_column("Decode ns", justify="right")
    table.add_column("JSON enc ns", justify="right")
    table.add_column("JSON dec ns", justify="right")
    table.add_column("Decode speedup", justify="right", style="green")
    with_memcpy = any(row.memcpy is not None for row in report.workloads)
    if with_memcpy:
        table.add_column("Decode/memcpy", justify="right")
    for row in report.workloads:
        cells = [
            row.name,
            str(row.wire_bytes),
            str(row.json_bytes),
            _ns(row.encode),
            _ns(row.decode),
            _ns(row.json_encode),
            _ns(row.json_decode),
            f"{row.decode_speedup:.1f}x",
        ]
        if with_memcpy:
            ratio = row.memcpy_ratio
            cells.append("-" if ratio is None else f"{ratio:.2f}")
        table.add_row(*cells)
    return table


def render_varint_table(rows: List[VarintRow]) -> Table:
    table = Table(title="Expected varint size vs fixed 4 bytes")
    table.add_column("N", justify="right", style="cyan")
    table.add_column("Varint bytes", justify="right")
    table.add_column("Fixed bytes", justify="right")
    table.add_column("Smaller")
    for row in rows:
        table.add_row(f"{row.n:,}", f"{float(row.expected):.4f}", str(row.fixed), "varint" if row.varint_wins else "fixed")
    return table


__all__ = [
    "CSV_COLUMNS",
    "MIN_ITERATIONS",
    "BenchConfig",
    "BenchConfigError",
    "BenchReport",
    "Timing",
    "WorkloadReport",
    "bench_workload",
    "render_csv",
    "render_table",
    "render_varint_table",
    "run_bench",
]
