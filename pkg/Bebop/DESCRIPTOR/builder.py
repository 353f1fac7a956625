"""
Descriptor builder.

Turns a ResolvedProgram into a DescriptorSet. Within each schema (and
within each definition's nested list) definitions are ordered so that
dependencies come first; members of a dependency cycle are kept together
in source order.
"""

import os
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Set

from Bebop.DESCRIPTOR.model import (
    ConstDef,
    DecoratorArgument,
    DecoratorDef,
    DecoratorParam,
    DecoratorUsage,
    DefinitionDescriptor,
    DescriptorSet,
    EnumDef,
    EnumMember,
    FieldDescriptor,
    MessageDef,
    MethodDescriptor,
    SchemaDescriptor,
    ServiceDef,
    StructDef,
    TypeDescriptor,
    TypeKind,
    UnionBranch,
    UnionDef,
    enum_pattern,
)
from Bebop.DESCRIPTOR.routing import check_routing_ids, method_routing_id
from Bebop.SCHEMA import ast
from Bebop.SCHEMA.printer import format_literal
from Bebop.SCHEMA.resolver import ResolvedProgram
from Bebop.Utils.Log import get_logger
from Bebop.WIRE.writer import ByteWriter

logger = get_logger(__name__)


# =============================================================================
# Type and decorator conversion
# =============================================================================

def type_descriptor(type_expr: ast.TypeExpr) -> TypeDescriptor:
    """TypeDescriptor for a bound type expression."""
    if isinstance(type_expr, ast.PrimitiveType):
        return TypeDescriptor.primitive(type_expr.kind)
    if isinstance(type_expr, ast.StringType):
        return TypeDescriptor.string()
    if isinstance(type_expr, ast.ArrayType):
        return TypeDescriptor.array(type_descriptor(type_expr.element), type_expr.length)
    if isinstance(type_expr, ast.MapType):
        return TypeDescriptor.map(type_descriptor(type_expr.key), type_descriptor(type_expr.value))
    if isinstance(type_expr, ast.NamedType):
        return TypeDescriptor.defined(type_expr.target or type_expr.name)
    raise TypeError(f"unknown type expression {type_expr!r}")


def _decorators(usages: List[ast.DecoratorUsage]) -> List[DecoratorUsage]:
    result = []
    for usage in usages:
        arguments = usage.bound_arguments if usage.bound_arguments is not None else usage.arguments
        result.append(
            DecoratorUsage(
                fqn=usage.declaration or usage.name,
                arguments=[DecoratorArgument(arg.name or "", format_literal(arg.value)) for arg in arguments],
            )
        )
    return result


def encode_constant(type_expr: ast.TypeExpr, value) -> bytes:
    """Wire bytes of a constant; constants are primitives, strings or byte arrays."""
    writer = ByteWriter()
    if isinstance(type_expr, ast.StringType):
        writer.write_string(value)
    elif isinstance(type_expr, ast.ArrayType):
        if type_expr.length is None:
            writer.write_uint32(len(value))
        writer.write_bytes(value)
    else:
        writer.write_fixed(type_expr.kind, value)
    return writer.getvalue()


# =============================================================================
# Dependency order
# =============================================================================

def _type_refs(type_expr: ast.TypeExpr) -> Iterator[str]:
    if isinstance(type_expr, ast.NamedType):
        if type_expr.target:
            yield type_expr.target
    elif isinstance(type_expr, ast.ArrayType):
        yield from _type_refs(type_expr.element)
    elif isinstance(type_expr, ast.MapType):
        yield from _type_refs(type_expr.key)
        yield from _type_refs(type_expr.value)


def _references(definition: ast.Definition) -> Iterator[str]:
    """Every fqn `definition` (or anything nested in it) depends on."""
    for item in definition.walk():
        body = item.body
        if isinstance(body, (ast.StructBody, ast.MessageBody)):
            for fld in body.fields:
                yield from _type_refs(fld.type)
        elif isinstance(body, ast.UnionBody):
            for branch in body.branches:
                yield from _type_refs(branch.type)
        elif isinstance(body, ast.ServiceBody):
            for included in body.includes:
                if included.target:
                    yield included.target
            for method in body.methods:
                yield from _type_refs(method.request)
                yield from _type_refs(method.response)


def order_definitions(definitions: List[ast.Definition]) -> List[ast.Definition]:
    """
    Sort sibling definitions so dependencies precede dependents.

    Strongly connected groups (recursive types) are emitted together with
    their members in source order; independent definitions keep source order.
    """
    position = {definition.fqn: index for index, definition in enumerate(definitions)}
    owner: Dict[str, str] = {}
    for definition in definitions:
        for item in definition.walk():
            owner[item.fqn] = definition.fqn

    edges: Dict[str, List[str]] = {}
    for definition in definitions:
        targets: List[str] = []
        for ref in _references(definition):
            sibling = owner.get(ref)
            if sibling and sibling != definition.fqn and sibling not in targets:
                targets.append(sibling)
        edges[definition.fqn] = sorted(targets, key=position.__getitem__)

    # Tarjan emits each component after every component it can reach; the
    # walk keeps its own stack so long reference chains stay off the call stack.
    index_of: Dict[str, int] = {}
    low: Dict[str, int] = {}
    stack: List[str] = []
    on_stack: Set[str] = set()
    ordered: List[str] = []

    def open_node(node: str) -> None:
        index_of[node] = low[node] = len(index_of)
        stack.append(node)
        on_stack.add(node)

    def connect(root: str) -> None:
        open_node(root)
        work = [(root, iter(edges[root]))]
        while work:
            node, targets = work[-1]
            for target in targets:
                if target not in index_of:
                    open_node(target)
                    work.append((target, iter(edges[target])))
                    break
                if target in on_stack:
                    low[node] = min(low[node], index_of[target])
            else:
                work.pop()
                if work:
                    parent = work[-1][0]
                    low[parent] = min(low[parent], low[node])
                if low[node] == index_of[node]:
                    component = []
                    while True:
                        member = stack.pop()
                        on_stack.discard(member)
                        component.append(member)
                        if member == node:
                            break
                    ordered.extend(sorted(component, key=position.__getitem__))

    for definition in definitions:
        if definition.fqn not in index_of:
            connect(definition.fqn)

    by_fqn = {definition.fqn: definition for definition in definitions}
    return [by_fqn[fqn] for fqn in ordered]


# =============================================================================
# Builder
# =============================================================================

class DescriptorBuilder:
    """Builds descriptors for one resolved program."""

    def __init__(self, program: ResolvedProgram):
        self.program = program
        self.base = display_base(program.roots)
        self._routes: List[tuple] = []

    def build(self, include_imports: bool = False) -> DescriptorSet:
        keys = list(self.program.files) if include_imports else [k for k in self.program.files if k in self.program.roots]
        schemas = [self.schema(key) for key in keys]
        check_routing_ids(self._routes)
        logger.debug(f"Built descriptors for {len(schemas)} schema(s)")
        return DescriptorSet(schemas)

    def schema(self, key: str) -> SchemaDescriptor:
        schema_ast = self.program.files[key]
        return SchemaDescriptor(
            name=schema_display_name(key, self.base),
            package=schema_ast.package,
            definitions=[self.definition(d) for d in order_definitions(schema_ast.definitions)],
            edition=schema_ast.edition,
            imports=[schema_display_name(child, self.base) for child in self.program.imports.get(key, [])],
        )

    def definition(self, definition: ast.Definition) -> DefinitionDescriptor:
        descriptor = DefinitionDescriptor(
            kind=definition.kind,
            name=definition.name,
            fqn=definition.fqn,
            documentation=definition.documentation,
            visibility=definition.visibility,
            decorators=_decorators(definition.decorators),
            nested=[self.definition(child) for child in order_definitions(definition.nested)],
        )
        body = definition.body
        kind = definition.kind
        if kind is ast.DefinitionKind.ENUM:
            descriptor.enum_def = EnumDef(
                base=TypeKind.of_primitive(body.base),
                members=[
                    EnumMember(m.name, enum_pattern(m.value, body.base), m.documentation, _decorators(m.decorators))
                    for m in body.members
                ],
            )
        elif kind is ast.DefinitionKind.STRUCT:
            descriptor.struct_def = StructDef([self._field(f) for f in body.fields], body.mutable)
        elif kind is ast.DefinitionKind.MESSAGE:
            descriptor.message_def = MessageDef([self._field(f) for f in body.fields])
        elif kind is ast.DefinitionKind.UNION:
            descriptor.union_def = UnionDef(
                [
                    UnionBranch(
                        b.discriminator, b.name, b.type.target or b.type.name, b.inline, b.documentation, _decorators(b.decorators)
                    )
                    for b in body.branches
                ]
            )
        elif kind is ast.DefinitionKind.SERVICE:
            descriptor.service_def = self._service(definition)
        elif kind is ast.DefinitionKind.CONST:
            value = self.program.constants[definition.fqn]
            descriptor.const_def = ConstDef(type_descriptor(body.type), encode_constant(body.type, value))
        elif kind is ast.DefinitionKind.DECORATOR:
            descriptor.decorator_def = DecoratorDef(
                targets=[target.value for target in body.targets],
                params=[DecoratorParam(p.name, type_descriptor(p.type), p.required) for p in body.params],
                validate_source=body.validate_source,
                export_source=body.export_source,
            )
        return descriptor

    def _field(self, fld: ast.Field) -> FieldDescriptor:
        return FieldDescriptor(fld.name, type_descriptor(fld.type), fld.tag, fld.documentation, _decorators(fld.decorators))

    def _service(self, definition: ast.Definition) -> ServiceDef:
        methods = []
        for method in self.program.service_methods.get(definition.fqn, []):
            routing_id = method_routing_id(definition.name, method.name)
            self._routes.append((f"/{definition.name}/{method.name}", routing_id))
            methods.append(
                MethodDescriptor(
                    name=method.name,
                    request_fqn=method.request,
                    response_fqn=method.response,
                    request_stream=method.request_stream,
                    response_stream=method.response_stream,
                    routing_id=routing_id,
                    documentation=method.documentation,
                    decorators=_decorators(method.decorators),
                    origin=method.origin,
                )
            )
        includes = [ref.target for ref in definition.body.includes]
        return ServiceDef(methods, includes)


def display_base(roots: List[str]) -> Optional[Path]:
    """Directory that file-system schema names are made relative to: that of the first root."""
    for key in roots:
        path = Path(key)
        if path.is_absolute():
            return path.parent
    return None


def schema_display_name(key: str, base: Optional[Path] = None) -> str:
    """
    Schema name as recorded in descriptors.

    File-system keys are written relative to `base` so the same inputs give
    the same descriptor bytes wherever the compiler runs; in-memory and
    bundled keys are used as they are.
    """
    path = Path(key)
    if not path.is_absolute():
        return key
    if base is None:
        return path.as_posix()
    try:
        return Path(os.path.relpath(path, base)).as_posix()
    except ValueError:
        return path.as_posix()


def build_descriptor_set(program: ResolvedProgram, include_imports: bool = False) -> DescriptorSet:
    """
    Compile a resolved program into a DescriptorSet.

    Args:
        program: Output of the resolver
        include_imports: Also describe every imported file, dependencies first

    Returns:
        DescriptorSet with one SchemaDescriptor per file

    Raises:
        ReservedCollision: If a routing ID is reserved or shared
    """
    return DescriptorBuilder(program).build(include_imports)


__all__ = [
    "DescriptorBuilder",
    "build_descriptor_set",
    "display_base",
    "encode_constant",
    "order_definitions",
    "schema_display_name",
    "type_descriptor",
]
