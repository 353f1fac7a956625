"""
Command handlers for bebopc and bebop-bench.

Each handler returns the process exit code: 0 success, 1 diagnostics,
2 usage. Main.py only parses arguments and forwards them here.
"""

import json
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import typer
from rich import box
from rich.console import Console
from rich.markup import escape
from rich.table import Table

from Bebop import __version__
from Bebop.BENCH.golden import check_golden
from Bebop.BENCH.runner import BenchConfig, BenchConfigError, render_csv, render_table, render_varint_table, run_bench
from Bebop.BENCH.varint import FIXED_WIDTH, varint_crossover, varint_table
from Bebop.COMPILER.compiler import build, check, compile_schemas, parse_plugin_flags
from Bebop.COMPILER.errors import PluginError, PluginReportedError, UnsafeOutputPath
from Bebop.DESCRIPTOR.errors import DescriptorError
from Bebop.DESCRIPTOR.evolution import has_breaking
from Bebop.DESCRIPTOR.routing import method_routing_id, parse_method_path
from Bebop.DYNAMIC.codec import decode_value, encode_value
from Bebop.DYNAMIC.debug import from_debug, to_debug
from Bebop.DYNAMIC.table import TypeTable
from Bebop.SCHEMA.errors import SchemaError
from Bebop.Utils.Log import get_logger
from Bebop.WIRE.errors import WireError

logger = get_logger(__name__)
console = Console(soft_wrap=True)

EXIT_OK = 0
EXIT_DIAGNOSTICS = 1
EXIT_USAGE = 2


def _error(message: str) -> None:
    console.print(f"[red]❌ {escape(message)}[/red]")


def _diagnostic(exc: SchemaError) -> None:
    console.print(f"{escape(str(exc.span))}: [red]error[/red]: {escape(exc.reason)}")


def split_build_args(args: Sequence[str]) -> Tuple[List[str], List[str]]:
    """Separate schema paths from `--<name>_out` / `--<name>_opt` flags."""
    files = [arg for arg in args if not arg.startswith("--")]
    flags = [arg for arg in args if arg.startswith("--")]
    return files, flags


# =============================================================================
# bebopc
# =============================================================================

async def handle_build(
    args: Sequence[str],
    descriptor_out: Optional[Path] = None,
    include_imports: bool = False,
    import_paths: Sequence[Path] = (),
) -> int:
    """
    Compile schemas, write descriptors and run plugins.

    Args:
        args: Schema files mixed with `--<name>_out=DIR` / `--<name>_opt=VALUE`
        descriptor_out: `.bopd` output path
        include_imports: Describe imported files in the descriptor output
        import_paths: Extra import search directories
    """
    files, flags = split_build_args(args)
    if not files:
        _error("no schema files given")
        return EXIT_USAGE
    try:
        plugin_flags = parse_plugin_flags(flags)
    except ValueError as exc:
        _error(str(exc))
        return EXIT_USAGE

    try:
        result = await build(
            files,
            outputs=plugin_flags["out"],
            options=plugin_flags["opt"],
            descriptor_out=descriptor_out,
            include_imports=include_imports,
            import_paths=import_paths,
        )
    except SchemaError as exc:
        _diagnostic(exc)
        return EXIT_DIAGNOSTICS
    except PluginReportedError as exc:
        _error(exc.message)
        for diagnostic in exc.details.get("diagnostics", []):
            console.print(escape(str(diagnostic)))
        return EXIT_DIAGNOSTICS
    except (PluginError, UnsafeOutputPath, DescriptorError) as exc:
        _error(exc.message)
        logger.debug(f"Build failed: {exc.details}")
        return EXIT_DIAGNOSTICS

    if result.descriptor_path is not None:
        console.print(f"[green]✓[/green] Wrote {escape(str(result.descriptor_path))}")
    for run in result.plugin_runs:
        for diagnostic in run.diagnostics:
            console.print(escape(str(diagnostic)))
        console.print(f"[green]✓[/green] {run.name}: {len(run.written)} file(s) in {escape(str(run.out_dir))}")
    if result.descriptor_path is None and not result.plugin_runs:
        console.print(f"[green]✓[/green] {len(result.compilation.root_names)} schema(s) OK")
    return EXIT_OK


def handle_check(old: Sequence[Path], new: Sequence[Path], import_paths: Sequence[Path] = ()) -> int:
    """Print the evolution report; exit 0 iff nothing is breaking."""
    try:
        changes = check(old, new, import_paths)
    except SchemaError as exc:
        _diagnostic(exc)
        return EXIT_DIAGNOSTICS

    if not changes:
        console.print("[green]✓ No changes[/green]")
        return EXIT_OK
    table = Table(box=box.SIMPLE, show_header=True)
    table.add_column("Verdict")
    table.add_column("Subject", style="cyan")
    table.add_column("Change")
    for change in changes:
        verdict = "[red]breaking[/red]" if change.breaking else "[green]safe[/green]"
        note = f" ({change.reason})" if change.reason else ""
        table.add_row(verdict, escape(change.subject), escape(f"{change.change}{note}"))
    console.print(table)
    return EXIT_DIAGNOSTICS if has_breaking(changes) else EXIT_OK


def handle_hash(path: str) -> int:
    try:
        service, method = parse_method_path(path)
    except ValueError as exc:
        _error(str(exc))
        return EXIT_USAGE
    routing_id = method_routing_id(service, method)
    typer.echo(f"{routing_id} 0x{routing_id:08x}")
    return EXIT_OK


def _load_table(schema: Path, import_paths: Sequence[Path]) -> TypeTable:
    return TypeTable.from_descriptor_set(compile_schemas([schema], import_paths).descriptors)


def handle_encode(schema: Path, type_name: str, value: str, import_paths: Sequence[Path] = ()) -> int:
    """Encode a debug-form JSON value and print it as hex."""
    try:
        table = _load_table(schema, import_paths)
        data = encode_value(type_name, from_debug(type_name, json.loads(value), table), table)
    except SchemaError as exc:
        _diagnostic(exc)
        return EXIT_DIAGNOSTICS
    except json.JSONDecodeError as exc:
        _error(f"--value is not JSON: {exc}")
        return EXIT_USAGE
    except LookupError as exc:
        _error(str(exc.args[0]) if exc.args else str(exc))
        return EXIT_USAGE
    except WireError as exc:
        _error(exc.message)
        return EXIT_DIAGNOSTICS
    typer.echo(data.hex())
    return EXIT_OK


def handle_decode(schema: Path, type_name: str, hex_data: str, import_paths: Sequence[Path] = ()) -> int:
    """Decode hex input and print the debug form as JSON."""
    try:
        data = bytes.fromhex(hex_data)
    except ValueError as exc:
        _error(f"--hex is not hexadecimal: {exc}")
        return EXIT_USAGE
    try:
        table = _load_table(schema, import_paths)
        value = decode_value(type_name, data, table)
    except SchemaError as exc:
        _diagnostic(exc)
        return EXIT_DIAGNOSTICS
    except LookupError as exc:
        _error(str(exc.args[0]) if exc.args else str(exc))
        return EXIT_USAGE
    except WireError as exc:
        _error(exc.message)
        return EXIT_DIAGNOSTICS
    typer.echo(json.dumps(to_debug(value, type_name, table), indent=2))
    return EXIT_OK


def handle_version() -> int:
    typer.echo(f"bebopc {__version__}")
    return EXIT_OK


# =============================================================================
# bebop-bench
# =============================================================================

def handle_bench(
    workloads: Sequence[str],
    iterations: Optional[int] = None,
    output_format: str = "table",
    memcpy_ratio: bool = False,
) -> int:
    if output_format not in ("table", "csv"):
        _error(f"unknown format {output_format!r}; use table or csv")
        return EXIT_USAGE
    options = {"workloads": list(workloads), "memcpy_ratio": memcpy_ratio}
    if iterations is not None:
        options["iterations"] = iterations
    try:
        config = BenchConfig.build(**options)
    except BenchConfigError as exc:
        _error(exc.message)
        return EXIT_USAGE

    report = run_bench(config)
    if output_format == "csv":
        typer.echo(render_csv(report), nl=False)
    elif report.empty:
        console.print("[yellow]No workloads selected[/yellow]")
    else:
        console.print(render_table(report))
    return EXIT_OK


def handle_varint(points: Sequence[int] = ()) -> int:
    try:
        rows = varint_table(points) if points else varint_table()
    except ValueError as exc:
        _error(str(exc))
        return EXIT_USAGE
    console.print(render_varint_table(rows))
    crossover = varint_crossover()
    console.print(f"Varint exceeds {FIXED_WIDTH} bytes on average from N = {crossover:,} (2^28 + {crossover - (1 << 28):,})")
    return EXIT_OK


def handle_golden() -> int:
    checks = check_golden()
    table = Table(title="Golden vectors", box=box.SIMPLE)
    table.add_column("Vector", style="cyan")
    table.add_column("Bytes", justify="right")
    table.add_column("Result")
    for result in checks:
        outcome = "[green]✓ pass[/green]" if result.passed else f"[red]❌ {escape(result.error or 'mismatch')}[/red]"
        table.add_row(result.vector.name, str(len(result.vector.expected)), outcome)
    console.print(table)
    failed = [result for result in checks if not result.passed]
    if failed:
        _error(f"{len(failed)} of {len(checks)} vectors failed")
        return EXIT_DIAGNOSTICS
    return EXIT_OK
