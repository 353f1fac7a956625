"""Errors raised by the compiler facade and the plugin runner."""

from typing import Any, Dict, Optional

from Bebop.Utils.errors import BebopError


class CompilerError(BebopError):
    """Base exception for compiler failures outside schema diagnostics."""


class PluginError(CompilerError):
    """Base exception for code generator plugin failures."""

    def __init__(self, message: str, plugin: str, details: Optional[Dict[str, Any]] = None):
        self.plugin = plugin
        super().__init__(message, {"plugin": plugin, **(details or {})})


class PluginNotFound(PluginError):
    """No `bebopc-gen-<name>` executable on the search path."""


class PluginProtocolError(PluginError):
    """The plugin crashed, timed out, or answered with an undecodable response."""


class PluginReportedError(PluginError):
    """The plugin answered with a non-empty `error` field."""


class UnsafeOutputPath(CompilerError):
    """A generated file name would land outside its output directory."""

    def __init__(self, name: str, out_dir: str):
        self.name = name
        self.out_dir = out_dir
        super().__init__(f"refusing to write {name!r} outside {out_dir}", {"name": name, "out_dir": out_dir})
