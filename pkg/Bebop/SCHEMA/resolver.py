"""
Resolver: loads imports, binds names and checks cross-definition rules.

Binding happens in place: `NamedType.target`, `Definition.fqn` and
`DecoratorUsage.bound_arguments` are filled on the parsed trees.
"""

import os
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Mapping, Optional, Sequence, Set, Tuple

from Bebop.SCHEMA.ast import (
    ArrayType,
    ConstBody,
    DecoratorArgument,
    DecoratorBody,
    DecoratorTarget,
    DecoratorUsage,
    Definition,
    DefinitionKind,
    EnumBody,
    MapType,
    MessageBody,
    NamedType,
    SchemaAst,
    ServiceBody,
    StringType,
    StructBody,
    TypeExpr,
    UnionBody,
    Visibility,
    Literal,
    LiteralKind,
)
from Bebop.SCHEMA.errors import (
    CompositionCycle,
    DecoratorError,
    DuplicateDefinition,
    ImportCycle,
    ImportNotFound,
    InvalidLiteral,
    InvalidMapKeyType,
    InvalidServiceType,
    MethodNameCollision,
    RecursiveStruct,
    Span,
    UndefinedEnvVar,
    UnresolvedType,
)
from Bebop.SCHEMA.literals import coerce_literal, substitute_env
from Bebop.SCHEMA.loaders import FileSystemLoader, SchemaLoader, load_bundled
from Bebop.SCHEMA.parser import parse_source
from Bebop.Utils.Log import get_logger

logger = get_logger(__name__)

PRELUDE_PATH = "bebop/decorators.bop"

_TARGET_FOR_KIND = {
    DefinitionKind.ENUM: DecoratorTarget.ENUM,
    DefinitionKind.STRUCT: DecoratorTarget.STRUCT,
    DefinitionKind.MESSAGE: DecoratorTarget.MESSAGE,
    DefinitionKind.UNION: DecoratorTarget.UNION,
    DefinitionKind.SERVICE: DecoratorTarget.SERVICE,
}

_SERVICE_PAYLOAD_KINDS = (DefinitionKind.STRUCT, DefinitionKind.MESSAGE, DefinitionKind.UNION)


# =============================================================================
# Resolved program
# =============================================================================

@dataclass
class DefinitionInfo:
    definition: Definition
    fqn: str
    file: str
    parent: Optional[str] = None

    @property
    def kind(self) -> DefinitionKind:
        return self.definition.kind

    @property
    def exported(self) -> bool:
        return self.definition.visibility is Visibility.EXPORTED


@dataclass
class ResolvedMethod:
    """A service method after `with` composition; `origin` is the declaring service."""

    name: str
    request: str
    response: str
    request_stream: bool
    response_stream: bool
    origin: str
    documentation: str = ""
    decorators: List[DecoratorUsage] = field(default_factory=list)


@dataclass
class ResolvedProgram:
    """Every loaded file, dependencies first, with the bound symbol table."""

    files: Dict[str, SchemaAst]
    roots: List[str]
    definitions: Dict[str, DefinitionInfo]
    imports: Dict[str, List[str]]
    constants: Dict[str, Any] = field(default_factory=dict)
    service_methods: Dict[str, List[ResolvedMethod]] = field(default_factory=dict)

    def get(self, fqn: str) -> Definition:
        return self.definitions[fqn].definition

    def definitions_in(self, file: str) -> List[DefinitionInfo]:
        """Definitions of one file in source order, parents before nested ones."""
        return [info for info in self.definitions.values() if info.file == file]

    def types(self) -> Iterator[DefinitionInfo]:
        return (info for info in self.definitions.values() if info.kind.is_type)


# =============================================================================
# Resolver
# =============================================================================

class Resolver:
    """Builds a ResolvedProgram from root files; one instance per compilation."""

    def __init__(self, loader: Optional[SchemaLoader] = None, environ: Optional[Mapping[str, str]] = None):
        self.loader = loader or FileSystemLoader()
        self.environ = os.environ if environ is None else environ
        self.files: Dict[str, SchemaAst] = {}
        self.imports: Dict[str, List[str]] = {}
        self.definitions: Dict[str, DefinitionInfo] = {}
        self.builtin_decorators: Dict[str, DefinitionInfo] = {}
        self._closure: Dict[str, Set[str]] = {}
        self._load_prelude()

    # -------------------------------------------------------------------------
    # Loading
    # -------------------------------------------------------------------------

    def _load_prelude(self) -> None:
        source = load_bundled(PRELUDE_PATH)
        if source is None:  # pragma: no cover - packaging error
            logger.warning("Bundled decorator prelude is missing")
            return
        prelude = parse_source(source, PRELUDE_PATH)
        for definition in prelude.definitions:
            fqn = f"{prelude.package}.{definition.name}"
            definition.fqn = fqn
            self.builtin_decorators[definition.name] = DefinitionInfo(definition, fqn, PRELUDE_PATH)

    def add_root(self, ast: SchemaAst) -> str:
        """Register an already parsed root file and load its imports."""
        self._load_tree(ast.path, ast, [])
        return ast.path

    def add_root_path(self, path: str) -> str:
        try:
            key, source = self.loader.load(path)
        except FileNotFoundError:
            raise ImportNotFound(f"schema file {path!r} not found", Span.unknown(path)) from None
        if key not in self.files:
            self._load_tree(key, parse_source(source, key), [])
        return key

    def _load_tree(self, key: str, ast: SchemaAst, stack: List[str]) -> None:
        if key in self.files:
            return
        stack.append(key)
        children: List[str] = []
        for imp in ast.imports:
            try:
                child_key, source = self.loader.load(imp.path, importer=key)
            except FileNotFoundError:
                raise ImportNotFound(f"cannot find import {imp.path!r}", imp.span) from None
            if child_key in stack:
                chain = " -> ".join(stack[stack.index(child_key):] + [child_key])
                raise ImportCycle(f"import cycle: {chain}", imp.span)
            children.append(child_key)
            if child_key not in self.files:
                self._load_tree(child_key, parse_source(source, child_key), stack)
        stack.pop()
        self.files[key] = ast
        self.imports[key] = children

    def _import_closure(self, key: str) -> Set[str]:
        if key not in self._closure:
            seen: Set[str] = set()
            pending = list(self.imports.get(key, []))
            while pending:
                child = pending.pop()
                if child not in seen:
                    seen.add(child)
                    pending.extend(self.imports.get(child, []))
            self._closure[key] = seen
        return self._closure[key]

    # -------------------------------------------------------------------------
    # Symbol table
    # -------------------------------------------------------------------------

    def _register(self) -> None:
        for key, ast in self.files.items():
            prefix = ast.package or ""
            for definition in ast.definitions:
                self._register_definition(definition, key, prefix, None)

    def _register_definition(self, definition: Definition, file: str, prefix: str, parent: Optional[str]) -> None:
        fqn = f"{prefix}.{definition.name}" if prefix else definition.name
        if fqn in self.definitions:
            other = self.definitions[fqn].definition
            raise DuplicateDefinition(f"{fqn} is already defined at {other.span}", definition.span)
        definition.fqn = fqn
        self.definitions[fqn] = DefinitionInfo(definition, fqn, file, parent)
        for child in definition.nested:
            self._register_definition(child, file, fqn, fqn)

    def _visible(self, info: DefinitionInfo, file: str) -> bool:
        if info.file == file:
            return True
        if info.file not in self._import_closure(file):
            return False
        current: Optional[DefinitionInfo] = info
        while current is not None:
            if not current.exported:
                return False
            current = self.definitions.get(current.parent) if current.parent else None
        return True

    def lookup(self, name: str, scope: str, file: str, span: Optional[Span]) -> DefinitionInfo:
        """Innermost scope first, then a unique short-name match among imported definitions."""
        hidden: Optional[DefinitionInfo] = None
        parts = scope.split(".") if scope else []
        for cut in range(len(parts), -1, -1):
            candidate = ".".join(parts[:cut] + [name])
            info = self.definitions.get(candidate)
            if info is None:
                continue
            if self._visible(info, file):
                return info
            hidden = hidden or info

        if "." not in name:
            matches = [
                info
                for info in self.definitions.values()
                if info.parent is None and info.fqn.rsplit(".", 1)[-1] == name and self._visible(info, file)
            ]
            if len(matches) == 1:
                return matches[0]
            if len(matches) > 1:
                options = ", ".join(sorted(info.fqn for info in matches))
                raise UnresolvedType(f"{name!r} is ambiguous; qualify it as one of {options}", span)

        if hidden is not None:
            raise UnresolvedType(f"{hidden.fqn} is local to {hidden.file} and cannot be used here", span)
        raise UnresolvedType(f"unknown type {name!r}", span)

    # -------------------------------------------------------------------------
    # Binding
    # -------------------------------------------------------------------------

    def _bind_type(self, type_expr: TypeExpr, scope: str, file: str) -> None:
        if isinstance(type_expr, NamedType):
            info = self.lookup(type_expr.name, scope, file, type_expr.span)
            if not info.kind.is_type:
                raise UnresolvedType(f"{info.fqn} is a {info.kind.keyword}, not a type", type_expr.span)
            type_expr.target = info.fqn
        elif isinstance(type_expr, ArrayType):
            self._bind_type(type_expr.element, scope, file)
        elif isinstance(type_expr, MapType):
            self._bind_type(type_expr.key, scope, file)
            self._bind_type(type_expr.value, scope, file)
            if isinstance(type_expr.key, NamedType) and self.definitions[type_expr.key.target].kind is not DefinitionKind.ENUM:
                raise InvalidMapKeyType(f"{type_expr.key.target} cannot key a map; only enums may", type_expr.key.span)

    def _bind_definition(self, info: DefinitionInfo) -> None:
        definition = info.definition
        body = definition.body
        scope = info.fqn
        if isinstance(body, (StructBody, MessageBody)):
            for fld in body.fields:
                self._bind_type(fld.type, scope, info.file)
        elif isinstance(body, UnionBody):
            for branch in body.branches:
                self._bind_type(branch.type, scope, info.file)
        elif isinstance(body, ServiceBody):
            for included in body.includes:
                target = self.lookup(included.name, scope, info.file, included.span)
                if target.kind is not DefinitionKind.SERVICE:
                    raise InvalidServiceType(f"{target.fqn} is a {target.kind.keyword}, not a service", included.span)
                included.target = target.fqn
            for method in body.methods:
                for ref in (method.request, method.response):
                    target = self.lookup(ref.name, scope, info.file, ref.span)
                    if target.kind not in _SERVICE_PAYLOAD_KINDS:
                        raise InvalidServiceType(
                            f"{method.name} uses {target.fqn}, a {target.kind.keyword}; request and response "
                            "must be named struct, message, or union definitions",
                            ref.span,
                        )
                    ref.target = target.fqn

    # -------------------------------------------------------------------------
    # Checks
    # -------------------------------------------------------------------------

    def _struct_edges(self, type_expr: TypeExpr) -> Iterator[str]:
        """Structs a value of `type_expr` contains by value."""
        while isinstance(type_expr, ArrayType) and type_expr.length is not None:
            type_expr = type_expr.element
        if isinstance(type_expr, NamedType) and self.definitions[type_expr.target].kind is DefinitionKind.STRUCT:
            yield type_expr.target

    def _check_struct_recursion(self) -> None:
        graph: Dict[str, List[Tuple[str, Optional[Span]]]] = {}
        for info in self.definitions.values():
            if info.kind is DefinitionKind.STRUCT:
                graph[info.fqn] = [
                    (target, fld.span) for fld in info.definition.body.fields for target in self._struct_edges(fld.type)
                ]
        # 1 while on the current path, 2 once every struct it reaches is clean.
        state: Dict[str, int] = {}
        for root in graph:
            if root in state:
                continue
            state[root] = 1
            path = [root]
            work = [iter(graph[root])]
            while work:
                for target, span in work[-1]:
                    if state.get(target) == 1:
                        cycle = " -> ".join(path[path.index(target):] + [target])
                        raise RecursiveStruct(
                            f"struct contains itself by value ({cycle}); use a message, union, array or map to break the cycle",
                            span,
                        )
                    if target not in state:
                        state[target] = 1
                        path.append(target)
                        work.append(iter(graph.get(target, [])))
                        break
                else:
                    work.pop()
                    state[path.pop()] = 2

    def _flatten_services(self) -> Dict[str, List["ResolvedMethod"]]:
        flattened: Dict[str, List[ResolvedMethod]] = {}
        visiting: Set[str] = set()

        def methods_of(fqn: str, span: Optional[Span]) -> List[ResolvedMethod]:
            if fqn in flattened:
                return flattened[fqn]
            if fqn in visiting:
                raise CompositionCycle(f"service {fqn} includes itself", span)
            visiting.add(fqn)
            definition = self.definitions[fqn].definition
            body: ServiceBody = definition.body
            merged: Dict[str, ResolvedMethod] = {}
            for method in body.methods:
                merged[method.name] = ResolvedMethod(
                    method.name,
                    method.request.target,
                    method.response.target,
                    method.request_stream,
                    method.response_stream,
                    fqn,
                    method.documentation,
                    method.decorators,
                )
            for included in body.includes:
                for method in methods_of(included.target, included.span):
                    existing = merged.get(method.name)
                    if existing is None:
                        merged[method.name] = method
                    elif existing.origin != method.origin:
                        raise MethodNameCollision(
                            f"{fqn} gets method {method.name!r} from both {existing.origin} and {method.origin}",
                            included.span,
                        )
            visiting.discard(fqn)
            flattened[fqn] = list(merged.values())
            return flattened[fqn]

        for info in self.definitions.values():
            if info.kind is DefinitionKind.SERVICE:
                methods_of(info.fqn, info.definition.span)
        return flattened

    def _evaluate_constants(self) -> Dict[str, Any]:
        constants: Dict[str, Any] = {}
        for info in self.definitions.values():
            if info.kind is not DefinitionKind.CONST:
                continue
            body: ConstBody = info.definition.body
            literal = body.value
            if isinstance(body.type, StringType) and literal.kind is LiteralKind.STRING:
                try:
                    literal = Literal(literal.kind, substitute_env(literal.value, self.environ), literal.span)
                except KeyError as exc:
                    raise UndefinedEnvVar(f"environment variable {exc.args[0]!r} is not set", literal.span) from None
            try:
                constants[info.fqn] = coerce_literal(body.type, literal)
            except ValueError as exc:
                raise InvalidLiteral(f"constant {info.definition.name}: {exc}", literal.span) from None
        return constants

    # -------------------------------------------------------------------------
    # Decorators
    # -------------------------------------------------------------------------

    def _decorator_sites(self) -> Iterator[Tuple[DecoratorUsage, DecoratorTarget, DefinitionInfo]]:
        for info in self.definitions.values():
            definition = info.definition
            target = _TARGET_FOR_KIND.get(definition.kind)
            for usage in definition.decorators:
                yield usage, target, info
            body = definition.body
            if isinstance(body, (StructBody, MessageBody)):
                for fld in body.fields:
                    for usage in fld.decorators:
                        yield usage, DecoratorTarget.FIELD, info
            elif isinstance(body, EnumBody):
                for member in body.members:
                    for usage in member.decorators:
                        yield usage, DecoratorTarget.FIELD, info
            elif isinstance(body, UnionBody):
                for branch in body.branches:
                    for usage in branch.decorators:
                        yield usage, DecoratorTarget.BRANCH, info
            elif isinstance(body, ServiceBody):
                for method in body.methods:
                    for usage in method.decorators:
                        yield usage, DecoratorTarget.METHOD, info

    def _find_decorator(self, usage: DecoratorUsage, info: DefinitionInfo) -> DefinitionInfo:
        try:
            found = self.lookup(usage.name, info.fqn, info.file, usage.span)
        except UnresolvedType:
            found = None
        if found is not None and found.kind is DefinitionKind.DECORATOR:
            return found
        short = usage.name.rsplit(".", 1)[-1]
        builtin = self.builtin_decorators.get(short)
        if builtin is not None and usage.name in (short, builtin.fqn):
            return builtin
        raise DecoratorError(f"unknown decorator @{usage.name}", usage.span)

    def _check_decorators(self) -> None:
        for usage, target, info in self._decorator_sites():
            declaration = self._find_decorator(usage, info)
            body: DecoratorBody = declaration.definition.body
            if DecoratorTarget.ALL not in body.targets and target not in body.targets:
                where = target.value if target else info.kind.keyword
                allowed = ", ".join(t.value for t in body.targets)
                raise DecoratorError(f"@{usage.name} cannot be applied to {where} (allowed: {allowed})", usage.span)

            params = {param.name: param for param in body.params}
            bound: Dict[str, DecoratorArgument] = {}
            for position, argument in enumerate(usage.arguments):
                if argument.name is None:
                    if position >= len(body.params):
                        raise DecoratorError(f"@{usage.name} takes at most {len(body.params)} arguments", argument.span)
                    name = body.params[position].name
                else:
                    name = argument.name
                    if name not in params:
                        raise DecoratorError(f"@{usage.name} has no parameter {name!r}", argument.span)
                if name in bound:
                    raise DecoratorError(f"@{usage.name} parameter {name!r} given twice", argument.span)
                try:
                    coerce_literal(params[name].type, argument.value)
                except ValueError as exc:
                    raise DecoratorError(f"@{usage.name}({name}): {exc}", argument.span) from None
                bound[name] = DecoratorArgument(argument.value, name, argument.span)

            for param in body.params:
                if param.required and param.name not in bound:
                    raise DecoratorError(f"@{usage.name} requires parameter {param.name!r}", usage.span)
            usage.declaration = declaration.fqn
            usage.bound_arguments = [bound[p.name] for p in body.params if p.name in bound]

    # -------------------------------------------------------------------------
    # Entry point
    # -------------------------------------------------------------------------

    def resolve(self, roots: Sequence[str]) -> ResolvedProgram:
        self._register()
        for info in list(self.definitions.values()):
            self._bind_definition(info)
        self._check_struct_recursion()
        service_methods = self._flatten_services()
        constants = self._evaluate_constants()
        self._check_decorators()
        logger.debug(f"Resolved {len(self.definitions)} definitions across {len(self.files)} files")
        return ResolvedProgram(
            files=dict(self.files),
            roots=list(roots),
            definitions=dict(self.definitions),
            imports=dict(self.imports),
            constants=constants,
            service_methods=service_methods,
        )


def resolve(
    ast: SchemaAst,
    loader: Optional[SchemaLoader] = None,
    environ: Optional[Mapping[str, str]] = None,
) -> ResolvedProgram:
    """
    Resolve one parsed root file and everything it imports.

    Args:
        ast: Root file from `parse`
        loader: Import loader; defaults to the file system
        environ: Variables for `$(VAR)` substitution; defaults to the process environment

    Returns:
        ResolvedProgram with every named reference bound
    """
    resolver = Resolver(loader, environ)
    root = resolver.add_root(ast)
    return resolver.resolve([root])


def resolve_files(
    paths: Sequence[str],
    loader: Optional[SchemaLoader] = None,
    environ: Optional[Mapping[str, str]] = None,
) -> ResolvedProgram:
    """Load, parse and resolve several root files into one program."""
    resolver = Resolver(loader, environ)
    roots = [resolver.add_root_path(path) for path in paths]
    return resolver.resolve(roots)
