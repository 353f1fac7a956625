"""
Code generator plugin protocol records (`bebop/plugin.bop`).

The compiler writes one length-prefixed CodeGeneratorRequest to the
plugin's stdin and reads one length-prefixed CodeGeneratorResponse from
its stdout.
"""

from dataclasses import dataclass, field
from enum import IntEnum
from typing import List, Optional

from Bebop import __version__
from Bebop.DESCRIPTOR.model import SchemaDescriptor
from Bebop.DESCRIPTOR.records import bebop_record
from Bebop.DYNAMIC.binding import decode_record, encode_record
from Bebop.DYNAMIC.limits import DecodeLimits
from Bebop.SCHEMA.errors import Span
from Bebop.WIRE.errors import Truncated
from Bebop.WIRE.reader import ByteReader
from Bebop.WIRE.writer import ByteWriter

_PACKAGE = "bebop.plugin"


@bebop_record(f"{_PACKAGE}.Version")
@dataclass
class Version:
    major: int = 0
    minor: int = 0
    patch: int = 0

    @classmethod
    def current(cls) -> "Version":
        major, minor, patch = (int(part) for part in __version__.split(".")[:3])
        return cls(major, minor, patch)

    def __str__(self) -> str:
        return f"{self.major}.{self.minor}.{self.patch}"


@bebop_record(f"{_PACKAGE}.Severity")
class Severity(IntEnum):
    ERROR = 0
    WARNING = 1
    INFO = 2


@bebop_record(f"{_PACKAGE}.SourceSpan")
@dataclass
class SourceSpan:
    file: str = ""
    start_line: int = 0
    start_column: int = 0
    end_line: int = 0
    end_column: int = 0

    @classmethod
    def from_span(cls, span: Span) -> "SourceSpan":
        return cls(span.file, span.line, span.column, span.end_line, span.end_column)

    def __str__(self) -> str:
        return f"{self.file}:{self.start_line}:{self.start_column}"


@bebop_record(f"{_PACKAGE}.CodeGeneratorRequest")
@dataclass
class CodeGeneratorRequest:
    files_to_generate: List[str] = field(default_factory=list)
    parameter: Optional[str] = None
    compiler_version: Optional[Version] = None
    schemas: List[SchemaDescriptor] = field(default_factory=list)


@bebop_record(f"{_PACKAGE}.GeneratedFile")
@dataclass
class GeneratedFile:
    name: str = ""
    content: str = ""


@bebop_record(f"{_PACKAGE}.Diagnostic")
@dataclass
class Diagnostic:
    severity: Severity = Severity.ERROR
    message: str = ""
    span: Optional[SourceSpan] = None

    def __str__(self) -> str:
        where = f"{self.span}: " if self.span else ""
        return f"{where}{self.severity.name.lower()}: {self.message}"


@bebop_record(f"{_PACKAGE}.CodeGeneratorResponse")
@dataclass
class CodeGeneratorResponse:
    error: Optional[str] = None
    files: List[GeneratedFile] = field(default_factory=list)
    diagnostics: List[Diagnostic] = field(default_factory=list)


# =============================================================================
# Framing
# =============================================================================

def frame_message(body: bytes) -> bytes:
    """Prefix one encoded message with its uint32 length."""
    writer = ByteWriter()
    writer.write_uint32(len(body))
    writer.write_bytes(body)
    return writer.getvalue()


def unframe_message(data: bytes) -> bytes:
    """
    Inverse of `frame_message`.

    Raises:
        Truncated: If fewer bytes follow the prefix than it announces
    """
    reader = ByteReader(data)
    length = reader.read_uint32()
    if length > reader.remaining:
        raise Truncated(f"framed message announces {length} bytes, {reader.remaining} present", offset=0)
    return reader.read_bytes(length)


def encode_request(request: CodeGeneratorRequest) -> bytes:
    return frame_message(encode_record(request))


def decode_request(data: bytes, limits: Optional[DecodeLimits] = None) -> CodeGeneratorRequest:
    return decode_record(CodeGeneratorRequest, unframe_message(data), limits=limits)


def encode_response(response: CodeGeneratorResponse) -> bytes:
    return frame_message(encode_record(response))


def decode_response(data: bytes, limits: Optional[DecodeLimits] = None) -> CodeGeneratorResponse:
    return decode_record(CodeGeneratorResponse, unframe_message(data), limits=limits)


__all__ = [
    "CodeGeneratorRequest",
    "CodeGeneratorResponse",
    "Diagnostic",
    "GeneratedFile",
    "Severity",
    "SourceSpan",
    "Version",
    "decode_request",
    "decode_response",
    "encode_request",
    "encode_response",
    "frame_message",
    "unframe_message",
]
