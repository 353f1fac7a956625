"""
bebopc - Bebop schema compiler
bebop-bench - serialization benchmarks and size analysis

Main entry points; argument parsing only, handlers live in commands.py.
"""

import asyncio
from pathlib import Path
from typing import List, Optional

import typer
from rich.console import Console

from Bebop.Utils.Log import get_logger

logger = get_logger(__name__)
console = Console()

app = typer.Typer(
    name="bebopc",
    help="bebopc - compile Bebop schemas, run code generator plugins and check schema evolution",
    add_completion=False,
    pretty_exceptions_enable=False,
    no_args_is_help=True,
)

bench_app = typer.Typer(
    name="bebop-bench",
    help="bebop-bench - Bebop vs JSON benchmarks, golden vectors and varint size analysis",
    add_completion=False,
    pretty_exceptions_enable=False,
)


def _fail(command: str, exc: Exception) -> None:
    console.print(f"[red]❌ Error in {command} command: {str(exc)}[/red]")
    logger.exception(f"{command} command failed")
    raise typer.Exit(1)


@app.command("build", context_settings={"allow_extra_args": True, "ignore_unknown_options": True})
def build(
    args: List[str] = typer.Argument(..., help="Schema files and --<name>_out=DIR / --<name>_opt=VALUE plugin flags"),
    descriptor_out: Optional[Path] = typer.Option(None, "--descriptor_out", "--descriptor-out", help="Write the compiled descriptor set here"),
    include_imports: bool = typer.Option(False, "--include-imports", help="Describe imported files in the descriptor output"),
    import_path: List[Path] = typer.Option([], "--import-path", "-I", help="Extra directory searched for imports"),
):
    """
    Compile schemas and run code generators.

    Examples:
        bebopc build point.bop --descriptor_out=point.bopd
        bebopc build chat.bop --python_out=./gen --python_opt=async
    """
    from Bebop.CLI.commands import handle_build

    try:
        code = asyncio.run(handle_build(args, descriptor_out, include_imports, import_path))
    except Exception as e:
        _fail("build", e)
    raise typer.Exit(code)


@app.command("check")
def check(
    old: Path = typer.Argument(..., help="Previous schema version"),
    new: Path = typer.Argument(..., help="New schema version"),
    import_path: List[Path] = typer.Option([], "--import-path", "-I", help="Extra directory searched for imports"),
):
    """
    Report schema changes as safe or breaking; exits 1 if anything breaks.

    Examples:
        bebopc check v1/chat.bop v2/chat.bop
    """
    from Bebop.CLI.commands import handle_check

    try:
        code = handle_check([old], [new], import_path)
    except Exception as e:
        _fail("check", e)
    raise typer.Exit(code)


@app.command("hash")
def hash_path(path: str = typer.Argument(..., help="Method path shaped /Service/Method")):
    """
    Print the routing ID of a method path in decimal and hex.

    Examples:
        bebopc hash /ChatService/Send
    """
    from Bebop.CLI.commands import handle_hash

    raise typer.Exit(handle_hash(path))


@app.command("encode")
def encode(
    schema: Path = typer.Argument(..., help="Schema file defining the type"),
    type_name: str = typer.Option(..., "--type", "-t", help="Fully qualified type name"),
    value: str = typer.Option(..., "--value", "-v", help="Value in JSON debug form"),
    import_path: List[Path] = typer.Option([], "--import-path", "-I", help="Extra directory searched for imports"),
):
    """
    Encode a JSON value and print the bytes as hex.

    Examples:
        bebopc encode point.bop --type geo.Point --value '{"x": 1, "y": 2}'
    """
    from Bebop.CLI.commands import handle_encode

    try:
        code = handle_encode(schema, type_name, value, import_path)
    except Exception as e:
        _fail("encode", e)
    raise typer.Exit(code)


@app.command("decode")
def decode(
    schema: Path = typer.Argument(..., help="Schema file defining the type"),
    type_name: str = typer.Option(..., "--type", "-t", help="Fully qualified type name"),
    hex_data: str = typer.Option(..., "--hex", help="Encoded bytes as hex"),
    import_path: List[Path] = typer.Option([], "--import-path", "-I", help="Extra directory searched for imports"),
):
    """
    Decode hex bytes and print the value as JSON.

    Examples:
        bebopc decode point.bop --type geo.Point --hex 0000803f00000040
    """
    from Bebop.CLI.commands import handle_decode

    try:
        code = handle_decode(schema, type_name, hex_data, import_path)
    except Exception as e:
        _fail("decode", e)
    raise typer.Exit(code)


@app.command("version")
def version():
    """Show the compiler version."""
    from Bebop.CLI.commands import handle_version

    raise typer.Exit(handle_version())


# =============================================================================
# bebop-bench
# =============================================================================

@bench_app.callback(invoke_without_command=True)
def bench(
    ctx: typer.Context,
    workloads: Optional[str] = typer.Option(None, "--workloads", "-w", help="Comma-separated workload names"),
    iterations: Optional[int] = typer.Option(None, "--iterations", "-n", help="Timed iterations per measurement (at least 10)"),
    output_format: str = typer.Option("table", "--format", "-f", help="table or csv"),
    memcpy_ratio: bool = typer.Option(False, "--memcpy-ratio", help="Also report decode time over a raw byte copy"),
):
    """
    Time Bebop encode and decode against a JSON baseline.

    Examples:
        bebop-bench --workloads embedding1536,tree_deep --iterations 20
        bebop-bench --workloads tensor_shard --memcpy-ratio --format csv
    """
    if ctx.invoked_subcommand is not None:
        return
    from Bebop.BENCH.workloads import WORKLOADS
    from Bebop.CLI.commands import handle_bench

    names = [name.strip() for name in workloads.split(",") if name.strip()] if workloads is not None else list(WORKLOADS)
    try:
        code = handle_bench(names, iterations, output_format, memcpy_ratio)
    except Exception as e:
        _fail("bench", e)
    raise typer.Exit(code)


@bench_app.command("varint")
def varint(points: List[int] = typer.Argument(None, help="Values of N to tabulate; a default spread when omitted")):
    """Expected varint size against fixed 4-byte integers."""
    from Bebop.CLI.commands import handle_varint

    raise typer.Exit(handle_varint(points or ()))


@bench_app.command("golden")
def golden():
    """Check every reference byte vector."""
    from Bebop.CLI.commands import handle_golden

    raise typer.Exit(handle_golden())


def main():
    """Entry point for bebopc."""
    app()


def bench_main():
    """Entry point for bebop-bench."""
    bench_app()


if __name__ == "__main__":
    main()
