"""Schema compiler facade and code generator plugin protocol."""

from Bebop.COMPILER.compiler import BuildResult, Compilation, build, check, compile_schemas, parse_plugin_flags
from Bebop.COMPILER.errors import (
    CompilerError,
    PluginError,
    PluginNotFound,
    PluginProtocolError,
    PluginReportedError,
    UnsafeOutputPath,
)
from Bebop.COMPILER.plugins import PluginRun, PluginRunner, find_plugin
from Bebop.COMPILER.protocol import (
    CodeGeneratorRequest,
    CodeGeneratorResponse,
    Diagnostic,
    GeneratedFile,
    Severity,
    SourceSpan,
    Version,
)

__all__ = [
    "BuildResult",
    "CodeGeneratorRequest",
    "CodeGeneratorResponse",
    "Compilation",
    "CompilerError",
    "Diagnostic",
    "GeneratedFile",
    "PluginError",
    "PluginNotFound",
    "PluginProtocolError",
    "PluginReportedError",
    "PluginRun",
    "PluginRunner",
    "Severity",
    "SourceSpan",
    "UnsafeOutputPath",
    "Version",
    "build",
    "check",
    "compile_schemas",
    "find_plugin",
    "parse_plugin_flags",
]
