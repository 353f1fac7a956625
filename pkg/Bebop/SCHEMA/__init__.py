"""Schema language front end: lexer, parser, resolver and printer."""

from Bebop.SCHEMA.ast import DefinitionKind, SchemaAst, Visibility
from Bebop.SCHEMA.errors import SchemaError, Span
from Bebop.SCHEMA.lexer import tokenize
from Bebop.SCHEMA.loaders import FileSystemLoader, MemoryLoader, SchemaLoader
from Bebop.SCHEMA.parser import parse, parse_source
from Bebop.SCHEMA.printer import print_schema
from Bebop.SCHEMA.resolver import ResolvedProgram, resolve, resolve_files

__all__ = [
    "DefinitionKind",
    "FileSystemLoader",
    "MemoryLoader",
    "ResolvedProgram",
    "SchemaAst",
    "SchemaError",
    "SchemaLoader",
    "Span",
    "Visibility",
    "parse",
    "parse_source",
    "print_schema",
    "resolve",
    "resolve_files",
    "tokenize",
]
