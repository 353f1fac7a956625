"""
Compiler facade used by `bebopc`.

compile_schemas   parse + resolve + describe a set of root files
build             compile, write the descriptor set, run plugins
check             evolution report between two schema versions
"""

import asyncio
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Union

from Bebop.COMPILER.plugins import PluginRun, PluginRunner
from Bebop.COMPILER.protocol import CodeGeneratorRequest, Version
from Bebop.DESCRIPTOR.builder import build_descriptor_set, display_base, schema_display_name
from Bebop.DESCRIPTOR.codec import write_descriptor_file
from Bebop.DESCRIPTOR.evolution import EvolutionChange, check_evolution
from Bebop.DESCRIPTOR.model import DescriptorSet
from Bebop.SCHEMA.loaders import FileSystemLoader
from Bebop.SCHEMA.resolver import ResolvedProgram, resolve_files
from Bebop.Utils.Log import get_logger

logger = get_logger(__name__)

PathLike = Union[str, Path]


@dataclass
class Compilation:
    """A resolved program and its descriptors (imports included)."""

    program: ResolvedProgram
    descriptors: DescriptorSet

    @property
    def root_names(self) -> List[str]:
        base = display_base(self.program.roots)
        return [schema_display_name(key, base) for key in self.program.roots]

    def root_descriptors(self) -> DescriptorSet:
        """Descriptors of the root files only."""
        roots = set(self.root_names)
        return DescriptorSet([schema for schema in self.descriptors.schemas if schema.name in roots])

    def plugin_request(self, parameter: Optional[str] = None) -> CodeGeneratorRequest:
        return CodeGeneratorRequest(
            files_to_generate=self.root_names,
            parameter=parameter,
            compiler_version=Version.current(),
            schemas=self.descriptors.schemas,
        )


@dataclass
class BuildResult:
    compilation: Compilation
    descriptor_path: Optional[Path] = None
    plugin_runs: List[PluginRun] = field(default_factory=list)


def compile_schemas(
    paths: Sequence[PathLike],
    import_paths: Sequence[PathLike] = (),
    environ: Optional[Mapping[str, str]] = None,
) -> Compilation:
    """
    Parse, resolve and describe root schema files.

    Args:
        paths: Root `.bop` files
        import_paths: Extra directories searched for imports
        environ: Variables for `$(VAR)` substitution

    Raises:
        SchemaError: Any parse or resolve diagnostic
        ReservedCollision: If two methods share a routing ID
    """
    program = resolve_files([str(p) for p in paths], FileSystemLoader(import_paths), environ)
    descriptors = build_descriptor_set(program, include_imports=True)
    logger.info(f"Compiled {len(paths)} root schema(s), {len(descriptors.schemas)} file(s) in total")
    return Compilation(program, descriptors)


async def build(
    paths: Sequence[PathLike],
    outputs: Optional[Mapping[str, PathLike]] = None,
    options: Optional[Mapping[str, str]] = None,
    descriptor_out: Optional[PathLike] = None,
    include_imports: bool = False,
    import_paths: Sequence[PathLike] = (),
    runner: Optional[PluginRunner] = None,
) -> BuildResult:
    """
    Compile schemas, write the descriptor set and run every requested plugin.

    Args:
        paths: Root schema files
        outputs: Plugin name -> output directory (`--<name>_out`)
        options: Plugin name -> parameter string (`--<name>_opt`)
        descriptor_out: Where to write the `.bopd` file
        include_imports: Describe imported files in the `.bopd` output too
        import_paths: Extra import search directories
        runner: Plugin runner; a default one reads the timeout from settings

    Raises:
        SchemaError: Parse or resolve failure
        PluginError: A plugin was missing, crashed or reported an error
    """
    compilation = compile_schemas(paths, import_paths)
    result = BuildResult(compilation)

    if descriptor_out is not None:
        descriptors = compilation.descriptors if include_imports else compilation.root_descriptors()
        result.descriptor_path = Path(descriptor_out)
        result.descriptor_path.parent.mkdir(parents=True, exist_ok=True)
        write_descriptor_file(result.descriptor_path, descriptors)

    outputs = dict(outputs or {})
    if outputs:
        runner = runner or PluginRunner()
        options = options or {}
        runs = await asyncio.gather(
            *(
                runner.run(name, Path(out_dir), compilation.plugin_request(options.get(name)))
                for name, out_dir in outputs.items()
            )
        )
        result.plugin_runs = list(runs)
    return result


def check(
    old_paths: Sequence[PathLike],
    new_paths: Sequence[PathLike],
    import_paths: Sequence[PathLike] = (),
) -> List[EvolutionChange]:
    """Evolution report for the definitions of two schema versions."""
    old = compile_schemas(old_paths, import_paths).root_descriptors()
    new = compile_schemas(new_paths, import_paths).root_descriptors()
    return check_evolution(old, new)


def parse_plugin_flags(flags: Sequence[str]) -> Dict[str, Dict[str, str]]:
    """
    Split `--<name>_out=DIR` / `--<name>_opt=VALUE` flags.

    Returns:
        {"out": {name: dir}, "opt": {name: value}}

    Raises:
        ValueError: For any other flag shape
    """
    parsed: Dict[str, Dict[str, str]] = {"out": {}, "opt": {}}
    for flag in flags:
        if not flag.startswith("--") or "=" not in flag:
            raise ValueError(f"unrecognized option {flag!r}")
        key, value = flag[2:].split("=", 1)
        for suffix in ("_out", "_opt"):
            if key.endswith(suffix) and len(key) > len(suffix):
                parsed[suffix[1:]][key[: -len(suffix)]] = value
                break
        else:
            raise ValueError(f"unrecognized option {flag!r}")
    return parsed


__all__ = ["BuildResult", "Compilation", "build", "check", "compile_schemas", "parse_plugin_flags"]
