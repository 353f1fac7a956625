"""
Code generator plugin runner.

A plugin is a standalone executable named `bebopc-gen-<name>` found on
PATH. It is started without a shell, receives one framed
CodeGeneratorRequest on stdin and must answer with one framed
CodeGeneratorResponse on stdout before the timeout.
"""

from __future__ import annotations

import asyncio
import shutil
from dataclasses import dataclass, field
from pathlib import Path, PurePosixPath
from typing import Dict, List, Optional

from Bebop.COMPILER.errors import (
    PluginNotFound,
    PluginProtocolError,
    PluginReportedError,
    UnsafeOutputPath,
)
from Bebop.COMPILER.protocol import (
    CodeGeneratorRequest,
    CodeGeneratorResponse,
    Diagnostic,
    GeneratedFile,
    decode_response,
    encode_request,
)
from Bebop.Utils.Config import settings
from Bebop.Utils.errors import BebopError
from Bebop.Utils.Log import get_logger

logger = get_logger(__name__)

PLUGIN_PREFIX = "bebopc-gen-"
MAX_STDERR_SIZE: int = 16 * 1024


@dataclass
class PluginRun:
    """What one plugin produced and where its files went."""

    name: str
    out_dir: Path
    written: List[Path] = field(default_factory=list)
    diagnostics: List[Diagnostic] = field(default_factory=list)
    stderr: str = ""


def find_plugin(name: str, path: Optional[str] = None) -> str:
    """
    Locate `bebopc-gen-<name>` on the executable search path.

    Args:
        name: Plugin name from `--<name>_out`
        path: Search path; defaults to $PATH

    Raises:
        PluginNotFound: If no executable matches
    """
    executable = shutil.which(f"{PLUGIN_PREFIX}{name}", path=path)
    if executable is None:
        raise PluginNotFound(f"plugin executable {PLUGIN_PREFIX}{name} not found on PATH", name)
    return executable


def safe_output_path(out_dir: Path, name: str) -> Path:
    """
    Target path for a generated file, confined to `out_dir`.

    Raises:
        UnsafeOutputPath: For empty, absolute or `..` names
    """
    relative = PurePosixPath(name.replace("\\", "/"))
    if not name or relative.is_absolute() or ".." in relative.parts or (relative.parts and ":" in relative.parts[0]):
        raise UnsafeOutputPath(name, str(out_dir))
    root = out_dir.resolve()
    target = (root / Path(*relative.parts)).resolve()
    if target != root and root not in target.parents:
        raise UnsafeOutputPath(name, str(out_dir))
    return target


class PluginRunner:
    """
    Runs plugins and writes their files.

    Plugins may run concurrently; writes into the same output directory
    are serialized.
    """

    def __init__(self, timeout: Optional[float] = None, path: Optional[str] = None):
        self.timeout = timeout if timeout is not None else settings.plugin_timeout
        self.path = path
        self._locks: Dict[Path, asyncio.Lock] = {}

    def _lock_for(self, out_dir: Path) -> asyncio.Lock:
        key = out_dir.resolve()
        lock = self._locks.get(key)
        if lock is None:
            lock = self._locks[key] = asyncio.Lock()
        return lock

    async def invoke(self, name: str, request: CodeGeneratorRequest) -> tuple[CodeGeneratorResponse, str]:
        """
        Send `request` to plugin `name` and return its response and stderr.

        Raises:
            PluginNotFound: No executable
            PluginProtocolError: Crash, timeout, or undecodable response
            PluginReportedError: The response carries an error
        """
        executable = find_plugin(name, self.path)
        payload = encode_request(request)
        logger.info(f"Running plugin {name}: {executable}")

        try:
            process = await asyncio.create_subprocess_exec(
                executable,
                stdin=asyncio.subprocess.PIPE,
                stdout=asyncio.subprocess.PIPE,
                stderr=asyncio.subprocess.PIPE,
            )
        except OSError as exc:
            raise PluginProtocolError(f"cannot start plugin {name}: {exc}", name) from exc

        try:
            stdout, stderr = await asyncio.wait_for(process.communicate(payload), timeout=self.timeout)
        except asyncio.TimeoutError:
            process.kill()
            await process.wait()
            raise PluginProtocolError(f"plugin {name} timed out after {self.timeout}s", name) from None

        stderr_text = stderr[:MAX_STDERR_SIZE].decode("utf-8", errors="replace")
        if process.returncode != 0:
            raise PluginProtocolError(
                f"plugin {name} exited with code {process.returncode}",
                name,
                {"exit_code": process.returncode, "stderr": stderr_text},
            )
        try:
            response = decode_response(stdout)
        except BebopError as exc:
            raise PluginProtocolError(f"plugin {name} sent an undecodable response: {exc}", name) from exc

        if response.error:
            raise PluginReportedError(f"plugin {name} failed: {response.error}", name, {"diagnostics": response.diagnostics})
        logger.debug(f"Plugin {name} returned {len(response.files)} file(s)")
        return response, stderr_text

    async def write_files(self, out_dir: Path, files: List[GeneratedFile]) -> List[Path]:
        # validate every name before touching the disk
        targets = [(safe_output_path(out_dir, generated.name), generated) for generated in files]
        async with self._lock_for(out_dir):
            written = []
            for target, generated in targets:
                target.parent.mkdir(parents=True, exist_ok=True)
                target.write_text(generated.content, encoding="utf-8", newline="")
                written.append(target)
        return written

    async def run(self, name: str, out_dir: Path, request: CodeGeneratorRequest) -> PluginRun:
        response, stderr = await self.invoke(name, request)
        written = await self.write_files(Path(out_dir), response.files)
        logger.info(f"Plugin {name} wrote {len(written)} file(s) to {out_dir}")
        return PluginRun(name, Path(out_dir), written, response.diagnostics, stderr)


__all__ = ["PLUGIN_PREFIX", "PluginRun", "PluginRunner", "find_plugin", "safe_output_path"]
