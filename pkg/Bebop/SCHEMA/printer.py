"""
Canonical `.bop` printer.

`parse_source(print_schema(ast))` yields a tree equal to `ast`; layout,
comments other than `///` and optional semicolons are not preserved.
"""

import math
from typing import List

from Bebop.SCHEMA.ast import (
    ArrayType,
    ConstBody,
    DecoratorBody,
    DecoratorUsage,
    Definition,
    DefinitionKind,
    EnumBody,
    Field,
    Literal,
    LiteralKind,
    MapType,
    NamedType,
    PrimitiveType,
    SchemaAst,
    ServiceBody,
    StringType,
    TypeExpr,
    UnionBody,
    Visibility,
)
from Bebop.WIRE.kinds import PrimitiveKind

_INDENT = "    "

_STRING_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t", "\0": "\\0"}


def format_type(type_expr: TypeExpr) -> str:
    if isinstance(type_expr, PrimitiveType):
        return type_expr.kind.value
    if isinstance(type_expr, StringType):
        return "string"
    if isinstance(type_expr, NamedType):
        return type_expr.name
    if isinstance(type_expr, ArrayType):
        size = "" if type_expr.length is None else str(type_expr.length)
        return f"{format_type(type_expr.element)}[{size}]"
    if isinstance(type_expr, MapType):
        return f"map[{format_type(type_expr.key)}, {format_type(type_expr.value)}]"
    raise TypeError(f"unknown type expression {type_expr!r}")


def format_string(value: str) -> str:
    escaped = []
    for ch in value:
        if ch in _STRING_ESCAPES:
            escaped.append(_STRING_ESCAPES[ch])
        elif ord(ch) < 0x20 or ord(ch) == 0x7F:
            escaped.append(f"\\u{{{ord(ch):x}}}")
        else:
            escaped.append(ch)
    return '"' + "".join(escaped) + '"'


def format_bytes(value: bytes) -> str:
    out = []
    for byte in value:
        if byte in (0x22, 0x5C) or not 0x20 <= byte < 0x7F:
            out.append(f"\\x{byte:02x}")
        else:
            out.append(chr(byte))
    return 'b"' + "".join(out) + '"'


def format_literal(literal: Literal) -> str:
    """Literal text that lexes back to the same value."""
    value = literal.value
    if literal.kind is LiteralKind.STRING:
        return format_string(value)
    if literal.kind is LiteralKind.BYTES:
        return format_bytes(value)
    if literal.kind is LiteralKind.BOOL:
        return "true" if value else "false"
    if literal.kind is LiteralKind.INT:
        return str(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    text = repr(float(value))
    return text if ("." in text or "e" in text) else text + ".0"


def format_decorator(usage: DecoratorUsage) -> str:
    if not usage.arguments:
        return f"@{usage.name}"
    args = []
    for argument in usage.arguments:
        text = format_literal(argument.value)
        args.append(f"{argument.name}: {text}" if argument.name else text)
    return f"@{usage.name}({', '.join(args)})"


class SchemaPrinter:
    def __init__(self) -> None:
        self.lines: List[str] = []

    def _emit(self, depth: int, text: str) -> None:
        self.lines.append(_INDENT * depth + text if text else "")

    def _preamble(self, depth: int, documentation: str, decorators: List[DecoratorUsage]) -> None:
        if documentation:
            for line in documentation.split("\n"):
                self._emit(depth, f"/// {line}" if line else "///")
        for usage in decorators:
            self._emit(depth, format_decorator(usage))

    def print(self, ast: SchemaAst) -> str:
        if ast.edition is not None:
            self._emit(0, f"edition = {format_string(ast.edition)}")
        if ast.package is not None:
            self._emit(0, f"package {ast.package}")
        if ast.edition is not None or ast.package is not None:
            self._emit(0, "")
        for imp in ast.imports:
            self._emit(0, f"import {format_string(imp.path)}")
        if ast.imports:
            self._emit(0, "")
        for index, definition in enumerate(ast.definitions):
            if index:
                self._emit(0, "")
            self.definition(definition, 0, top_level=True)
        return "\n".join(self.lines) + "\n"

    def definition(self, definition: Definition, depth: int, top_level: bool) -> None:
        self._preamble(depth, definition.documentation, definition.decorators)
        default = Visibility.EXPORTED if top_level else Visibility.LOCAL
        prefix = ""
        if definition.visibility is not default:
            prefix = "local " if definition.visibility is Visibility.LOCAL else "export "
        body = definition.body

        if definition.kind is DefinitionKind.ENUM:
            explicit = body.explicit_base or body.base is not PrimitiveKind.UINT32
            base = f" : {body.base.value}" if explicit else ""
            self._emit(depth, f"{prefix}enum {definition.name}{base} {{")
            self._enum_members(body, depth + 1)
            self._emit(depth, "}")
        elif definition.kind in (DefinitionKind.STRUCT, DefinitionKind.MESSAGE):
            keyword = "struct"
            if definition.kind is DefinitionKind.MESSAGE:
                keyword = "message"
            elif body.mutable:
                keyword = "mut struct"
            self._emit(depth, f"{prefix}{keyword} {definition.name} {{")
            self._record(body, definition.nested, depth + 1)
            self._emit(depth, "}")
        elif definition.kind is DefinitionKind.UNION:
            self._emit(depth, f"{prefix}union {definition.name} {{")
            self._union(definition, depth + 1)
            self._emit(depth, "}")
        elif definition.kind is DefinitionKind.SERVICE:
            self._service(definition, prefix, depth)
        elif definition.kind is DefinitionKind.CONST:
            const: ConstBody = body
            self._emit(depth, f"{prefix}const {format_type(const.type)} {definition.name} = {format_literal(const.value)};")
        elif definition.kind is DefinitionKind.DECORATOR:
            self._decorator(definition, prefix, depth)

    def _enum_members(self, body: EnumBody, depth: int) -> None:
        for member in body.members:
            self._preamble(depth, member.documentation, member.decorators)
            self._emit(depth, f"{member.name} = {member.value};")

    def _fields(self, fields: List[Field], depth: int) -> None:
        for fld in fields:
            self._preamble(depth, fld.documentation, fld.decorators)
            tag = f"({fld.tag})" if fld.tag is not None else ""
            self._emit(depth, f"{fld.name}{tag}: {format_type(fld.type)};")

    def _record(self, body, nested: List[Definition], depth: int) -> None:
        for child in nested:
            self.definition(child, depth, top_level=False)
        self._fields(body.fields, depth)

    def _union(self, definition: Definition, depth: int) -> None:
        body: UnionBody = definition.body
        inline = {branch.name for branch in body.branches if branch.inline}
        for child in definition.nested:
            if child.name not in inline:
                self.definition(child, depth, top_level=False)
        by_name = {child.name: child for child in definition.nested}
        for branch in body.branches:
            self._preamble(depth, branch.documentation, branch.decorators)
            head = f"{branch.name}({branch.discriminator}):"
            if not branch.inline:
                self._emit(depth, f"{head} {branch.type.name};")
                continue
            child = by_name[branch.name]
            keyword = "message " if child.kind is DefinitionKind.MESSAGE else ""
            self._emit(depth, f"{head} {keyword}{{")
            self._record(child.body, child.nested, depth + 1)
            self._emit(depth, "};")

    def _service(self, definition: Definition, prefix: str, depth: int) -> None:
        body: ServiceBody = definition.body
        includes = ""
        if body.includes:
            includes = " with " + ", ".join(ref.name for ref in body.includes)
        self._emit(depth, f"{prefix}service {definition.name}{includes} {{")
        for method in body.methods:
            self._preamble(depth + 1, method.documentation, method.decorators)
            request = ("stream " if method.request_stream else "") + method.request.name
            response = ("stream " if method.response_stream else "") + method.response.name
            self._emit(depth + 1, f"{method.name}({request}): {response};")
        self._emit(depth, "}")

    def _decorator(self, definition: Definition, prefix: str, depth: int) -> None:
        body: DecoratorBody = definition.body
        self._emit(depth, f"{prefix}#decorator({definition.name}) {{")
        self._emit(depth + 1, "targets = " + " | ".join(target.value for target in body.targets))
        for param in body.params:
            marker = "!" if param.required else "?"
            self._emit(depth + 1, f"param {param.name}{marker}: {format_type(param.type)}")
        if body.validate_source is not None:
            self._emit(depth + 1, f"validate [[{body.validate_source}]]")
        if body.export_source is not None:
            self._emit(depth + 1, f"export [[{body.export_source}]]")
        self._emit(depth, "}")


def print_schema(ast: SchemaAst) -> str:
    """Render `ast` as canonical `.bop` text."""
    return SchemaPrinter().print(ast)
