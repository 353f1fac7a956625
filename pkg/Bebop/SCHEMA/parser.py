"""
Recursive-descent parser for `.bop` files.

The parser checks everything that can be decided from one file alone:
tag and discriminator ranges, duplicates, enum zero members, map key
types and fixed array sizes. Name binding happens in the resolver.
"""

from typing import Dict, List, Optional, Tuple, Union

from Bebop.SCHEMA.ast import (
    ArrayType,
    ConstBody,
    DecoratorArgument,
    DecoratorBody,
    DecoratorParam,
    DecoratorTarget,
    DecoratorUsage,
    Definition,
    DefinitionKind,
    EnumBody,
    EnumMember,
    Field,
    Import,
    Literal,
    LiteralKind,
    MapType,
    MessageBody,
    Method,
    NamedType,
    PrimitiveType,
    SchemaAst,
    ServiceBody,
    StringType,
    StructBody,
    TypeExpr,
    UnionBody,
    UnionBranch,
    Visibility,
)
from Bebop.SCHEMA.errors import (
    DuplicateMember,
    DuplicateTag,
    FixedArrayTooLarge,
    InvalidEnumValue,
    InvalidMapKeyType,
    MissingZeroEnumMember,
    SchemaSyntaxError,
    Span,
    TagOutOfRange,
)
from Bebop.SCHEMA.lexer import tokenize
from Bebop.SCHEMA.tokens import Token, TokenKind
from Bebop.Utils.Log import get_logger
from Bebop.WIRE.kinds import PrimitiveKind

logger = get_logger(__name__)

CURRENT_EDITION = "2026"
MAX_FIXED_ARRAY = 65535


class Parser:
    """Parses one token list into a SchemaAst."""

    def __init__(self, tokens: List[Token], path: str = "<input>"):
        self.path = path
        self.tokens: List[Token] = []
        self._docs: Dict[int, str] = {}
        pending: List[str] = []
        for token in tokens:
            if token.kind is TokenKind.DOC:
                pending.append(token.value)
                continue
            if pending:
                self._docs[len(self.tokens)] = "\n".join(pending)
                pending = []
            self.tokens.append(token)
        self.index = 0

    # -------------------------------------------------------------------------
    # Token helpers
    # -------------------------------------------------------------------------

    def _peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.index + ahead, len(self.tokens) - 1)]

    def _advance(self) -> Token:
        token = self.tokens[self.index]
        if token.kind is not TokenKind.EOF:
            self.index += 1
        return token

    def _docs_here(self) -> str:
        return self._docs.get(self.index, "")

    def _error(self, message: str, token: Optional[Token] = None) -> SchemaSyntaxError:
        token = token or self._peek()
        return SchemaSyntaxError(message, token.span)

    def _at_punct(self, symbol: str, ahead: int = 0) -> bool:
        return self._peek(ahead).is_punct(symbol)

    def _at_keyword(self, word: str, ahead: int = 0) -> bool:
        return self._peek(ahead).is_keyword(word)

    def _accept_punct(self, symbol: str) -> bool:
        if self._at_punct(symbol):
            self._advance()
            return True
        return False

    def _expect_punct(self, symbol: str, context: str = "") -> Token:
        token = self._peek()
        if not token.is_punct(symbol):
            where = f" {context}" if context else ""
            raise self._error(f"expected '{symbol}'{where}, found {token.describe()}")
        return self._advance()

    def _expect_keyword(self, word: str) -> Token:
        token = self._peek()
        if not token.is_keyword(word):
            raise self._error(f"expected '{word}', found {token.describe()}")
        return self._advance()

    def _expect_name(self, what: str = "a name") -> Token:
        token = self._peek()
        if not token.is_name:
            raise self._error(f"expected {what}, found {token.describe()}")
        return self._advance()

    def _dotted_name(self, what: str = "a name") -> Tuple[str, Span]:
        first = self._expect_name(what)
        parts = [first.text]
        last = first
        while self._at_punct(".") and self._peek(1).is_name:
            self._advance()
            last = self._advance()
            parts.append(last.text)
        return ".".join(parts), first.span.to(last.span)

    # -------------------------------------------------------------------------
    # File structure
    # -------------------------------------------------------------------------

    def parse(self) -> SchemaAst:
        ast = SchemaAst(path=self.path)

        if self._at_keyword("edition") and self._at_punct("=", 1):
            self._advance()
            self._advance()
            token = self._peek()
            if token.kind is not TokenKind.STRING:
                raise self._error("edition must be a string literal")
            self._advance()
            ast.edition = token.value
            self._accept_punct(";")
            if ast.edition != CURRENT_EDITION:
                logger.warning(f"{token.span}: unknown edition {ast.edition!r}, reading as {CURRENT_EDITION}")

        if self._at_keyword("package") and self._peek(1).is_name:
            self._advance()
            ast.package, _ = self._dotted_name("a package name")
            self._accept_punct(";")

        while self._at_keyword("import") and self._peek(1).kind is TokenKind.STRING:
            start = self._advance()
            token = self._advance()
            ast.imports.append(Import(token.value, start.span.to(token.span)))
            self._accept_punct(";")

        while self._peek().kind is not TokenKind.EOF:
            if self._at_keyword("import"):
                raise self._error("imports must come before definitions")
            if self._at_keyword("package") or self._at_keyword("edition"):
                raise self._error("edition and package must come first in the file")
            ast.definitions.append(self._definition(top_level=True))
        return ast

    # -------------------------------------------------------------------------
    # Definitions
    # -------------------------------------------------------------------------

    def _definition(
        self,
        top_level: bool,
        docs: Optional[str] = None,
        decorators: Optional[List[DecoratorUsage]] = None,
    ) -> Definition:
        if docs is None:
            docs = self._docs_here()
        if decorators is None:
            decorators = self._decorator_usages()

        visibility = Visibility.EXPORTED if top_level else Visibility.LOCAL
        explicit = False
        if self._at_keyword("local"):
            self._advance()
            visibility, explicit = Visibility.LOCAL, True
        elif self._at_keyword("export"):
            self._advance()
            visibility, explicit = Visibility.EXPORTED, True

        token = self._peek()
        if token.is_keyword("enum"):
            definition = self._enum()
        elif token.is_keyword("mut"):
            self._advance()
            definition = self._struct(mutable=True, start=token)
        elif token.is_keyword("struct"):
            definition = self._struct(mutable=False, start=token)
        elif token.is_keyword("message"):
            definition = self._message()
        elif token.is_keyword("union"):
            definition = self._union()
        elif token.is_keyword("service"):
            definition = self._service()
        elif token.is_keyword("const"):
            definition = self._const()
        elif token.is_punct("#"):
            definition = self._decorator_declaration()
        else:
            raise self._error(f"expected a definition, found {token.describe()}")

        definition.visibility = visibility
        definition.explicit_visibility = explicit
        definition.documentation = docs
        definition.decorators = decorators
        self._accept_punct(";")
        return definition

    def _starts_member(self) -> bool:
        """True when the next tokens read `name :` or `name (`; keywords are allowed as member names."""
        token = self._peek()
        return token.kind in (TokenKind.IDENTIFIER, TokenKind.KEYWORD) and (self._at_punct(":", 1) or self._at_punct("(", 1))

    def _enum(self) -> Definition:
        start = self._expect_keyword("enum")
        name = self._expect_name("an enum name")
        body = EnumBody()
        if self._accept_punct(":"):
            base_token = self._expect_name("an integer base type")
            base = PrimitiveKind.from_name(base_token.text)
            if base is None or not base.is_integer:
                raise SchemaSyntaxError(f"enum base must be an integer type, not {base_token.text!r}", base_token.span)
            body.base = base
            body.explicit_base = True

        self._expect_punct("{", "to open the enum body")
        seen: Dict[str, EnumMember] = {}
        while not self._accept_punct("}"):
            docs = self._docs_here()
            decorators = self._decorator_usages()
            member_name = self._expect_name("an enum member name")
            self._expect_punct("=", f"after enum member {member_name.text}")
            value_token = self._peek()
            if value_token.kind is not TokenKind.NUMBER or isinstance(value_token.value, float):
                raise self._error("enum member values must be integers")
            self._advance()
            self._expect_punct(";", "after enum member")
            if member_name.text in seen:
                raise DuplicateMember(f"enum member {member_name.text!r} declared twice", member_name.span)
            low, high = body.base.integer_range
            value = value_token.value
            if value < 0 and not body.base.is_signed:
                raise InvalidEnumValue(
                    f"negative value {value} needs a signed base type, {name.text} is {body.base.value}",
                    value_token.span,
                )
            if not low <= value <= high:
                raise InvalidEnumValue(f"{value} does not fit in {body.base.value}", value_token.span)
            member = EnumMember(member_name.text, value, docs, decorators, member_name.span.to(value_token.span))
            seen[member.name] = member
            body.members.append(member)

        if not any(member.value == 0 for member in body.members):
            raise MissingZeroEnumMember(f"enum {name.text} needs a member with value 0", name.span)
        return Definition(DefinitionKind.ENUM, name.text, body, span=start.span.to(name.span))

    def _struct(self, mutable: bool, start: Token) -> Definition:
        self._expect_keyword("struct")
        name = self._expect_name("a struct name")
        fields, nested = self._record_body(tagged=False, owner=name.text)
        body = StructBody(fields=fields, mutable=mutable)
        return Definition(DefinitionKind.STRUCT, name.text, body, nested=nested, span=start.span.to(name.span))

    def _message(self) -> Definition:
        start = self._expect_keyword("message")
        name = self._expect_name("a message name")
        fields, nested = self._record_body(tagged=True, owner=name.text)
        return Definition(DefinitionKind.MESSAGE, name.text, MessageBody(fields), nested=nested, span=start.span.to(name.span))

    def _record_body(self, tagged: bool, owner: str) -> Tuple[List[Field], List[Definition]]:
        """Fields and nested definitions between braces, for structs and messages."""
        self._expect_punct("{", f"to open the body of {owner}")
        fields: List[Field] = []
        nested: List[Definition] = []
        names: Dict[str, Field] = {}
        tags: Dict[int, Field] = {}
        while not self._accept_punct("}"):
            docs = self._docs_here()
            decorators = self._decorator_usages()
            if not self._starts_member():
                nested.append(self._definition(top_level=False, docs=docs, decorators=decorators))
                continue

            name = self._advance()
            tag = None
            tag_token = None
            if self._at_punct("("):
                if not tagged:
                    raise self._error(f"struct fields have no tags; declare {owner} as a message to use them")
                self._advance()
                tag_token = self._peek()
                if tag_token.kind is not TokenKind.NUMBER or isinstance(tag_token.value, float):
                    raise self._error("field tag must be an integer")
                self._advance()
                self._expect_punct(")", "after field tag")
                tag = tag_token.value
            elif tagged:
                raise self._error(f"message field {name.text!r} needs a tag, e.g. {name.text}(1): ...")

            self._expect_punct(":", f"after field {name.text}")
            field_type = self._type()
            self._expect_punct(";", f"after field {name.text}")

            if name.text in names:
                raise DuplicateMember(f"field {name.text!r} declared twice in {owner}", name.span)
            if tag is not None:
                if not 1 <= tag <= 255:
                    raise TagOutOfRange(f"tag {tag} of {owner}.{name.text} is outside 1..255", tag_token.span)
                if tag in tags:
                    raise DuplicateTag(
                        f"tag {tag} of {owner}.{name.text} already used by {tags[tag].name}", tag_token.span
                    )
            field = Field(name.text, field_type, tag, docs, decorators, name.span)
            names[field.name] = field
            if tag is not None:
                tags[tag] = field
            fields.append(field)
        return fields, nested

    def _union(self) -> Definition:
        start = self._expect_keyword("union")
        name = self._expect_name("a union name")
        self._expect_punct("{", "to open the union body")
        body = UnionBody()
        nested: List[Definition] = []
        names: Dict[str, UnionBranch] = {}
        discriminators: Dict[int, UnionBranch] = {}
        while not self._accept_punct("}"):
            docs = self._docs_here()
            decorators = self._decorator_usages()
            if not (self._peek().is_name and self._at_punct("(", 1)):
                nested.append(self._definition(top_level=False, docs=docs, decorators=decorators))
                continue

            branch_name = self._advance()
            self._advance()
            number = self._peek()
            if number.kind is not TokenKind.NUMBER or isinstance(number.value, float):
                raise self._error("union discriminator must be an integer")
            self._advance()
            self._expect_punct(")", "after discriminator")
            self._expect_punct(":", f"after branch {branch_name.text}")

            inline = True
            if self._at_punct("{"):
                fields, inner = self._record_body(tagged=False, owner=branch_name.text)
                nested.append(
                    Definition(
                        DefinitionKind.STRUCT, branch_name.text, StructBody(fields), Visibility.LOCAL,
                        nested=inner, span=branch_name.span,
                    )
                )
            elif self._at_keyword("message") and self._at_punct("{", 1):
                self._advance()
                fields, inner = self._record_body(tagged=True, owner=branch_name.text)
                nested.append(
                    Definition(
                        DefinitionKind.MESSAGE, branch_name.text, MessageBody(fields), Visibility.LOCAL,
                        nested=inner, span=branch_name.span,
                    )
                )
            elif self._at_keyword("struct") and self._at_punct("{", 1):
                self._advance()
                fields, inner = self._record_body(tagged=False, owner=branch_name.text)
                nested.append(
                    Definition(
                        DefinitionKind.STRUCT, branch_name.text, StructBody(fields), Visibility.LOCAL,
                        nested=inner, span=branch_name.span,
                    )
                )
            else:
                inline = False
            if inline:
                nested[-1].documentation = docs
                branch_type = NamedType(branch_name.text, branch_name.span)
            else:
                type_name, type_span = self._dotted_name("a branch type")
                branch_type = NamedType(type_name, type_span)
            self._accept_punct(";")

            if not 0 <= number.value <= 255:
                raise TagOutOfRange(f"discriminator {number.value} of {name.text}.{branch_name.text} is outside 0..255", number.span)
            if number.value in discriminators:
                raise DuplicateTag(
                    f"discriminator {number.value} already used by {discriminators[number.value].name}", number.span
                )
            if branch_name.text in names:
                raise DuplicateMember(f"branch {branch_name.text!r} declared twice in {name.text}", branch_name.span)
            branch = UnionBranch(branch_name.text, number.value, branch_type, inline, docs, decorators, branch_name.span)
            names[branch.name] = branch
            discriminators[branch.discriminator] = branch
            body.branches.append(branch)

        return Definition(DefinitionKind.UNION, name.text, body, nested=nested, span=start.span.to(name.span))

    def _service(self) -> Definition:
        start = self._expect_keyword("service")
        name = self._expect_name("a service name")
        body = ServiceBody()
        if self._at_keyword("with"):
            self._advance()
            while True:
                included, span = self._dotted_name("a service name")
                body.includes.append(NamedType(included, span))
                if not self._accept_punct(","):
                    break

        self._expect_punct("{", "to open the service body")
        seen: Dict[str, Method] = {}
        while not self._accept_punct("}"):
            docs = self._docs_here()
            decorators = self._decorator_usages()
            method_name = self._expect_name("a method name")
            self._expect_punct("(", f"after method {method_name.text}")
            request_stream, request = self._method_type()
            self._expect_punct(")", "after request type")
            self._expect_punct(":", "before response type")
            response_stream, response = self._method_type()
            self._expect_punct(";", f"after method {method_name.text}")
            if method_name.text in seen:
                raise DuplicateMember(f"method {method_name.text!r} declared twice in {name.text}", method_name.span)
            method = Method(
                method_name.text, request, response, request_stream, response_stream, docs, decorators, method_name.span
            )
            seen[method.name] = method
            body.methods.append(method)
        return Definition(DefinitionKind.SERVICE, name.text, body, span=start.span.to(name.span))

    def _method_type(self) -> Tuple[bool, NamedType]:
        stream = False
        if self._at_keyword("stream") and self._peek(1).is_name:
            self._advance()
            stream = True
        token = self._peek()
        if not token.is_name or token.is_keyword("map"):
            raise self._error("method request and response must be named struct, message, or union definitions")
        type_name, span = self._dotted_name("a type name")
        if type_name == "string" or PrimitiveKind.from_name(type_name) is not None or self._at_punct("["):
            raise SchemaSyntaxError(
                f"{type_name!r} cannot be used here: method request and response must be named struct, "
                "message, or union definitions",
                span,
            )
        return stream, NamedType(type_name, span)

    def _const(self) -> Definition:
        start = self._expect_keyword("const")
        const_type = self._type()
        name = self._expect_name("a constant name")
        self._expect_punct("=", f"after constant {name.text}")
        value = self._literal()
        self._expect_punct(";", f"after constant {name.text}")
        return Definition(DefinitionKind.CONST, name.text, ConstBody(const_type, value), span=start.span.to(name.span))

    def _decorator_declaration(self) -> Definition:
        start = self._expect_punct("#")
        word = self._expect_name("'decorator'")
        if word.text != "decorator":
            raise SchemaSyntaxError(f"expected '#decorator', found '#{word.text}'", word.span)
        self._expect_punct("(")
        name = self._expect_name("a decorator name")
        self._expect_punct(")")
        self._expect_punct("{", "to open the decorator body")
        body = DecoratorBody()
        params: Dict[str, DecoratorParam] = {}
        while not self._accept_punct("}"):
            token = self._peek()
            if token.kind is TokenKind.IDENTIFIER and token.text == "targets":
                self._advance()
                self._expect_punct("=", "after targets")
                while True:
                    target = self._expect_name("a decorator target")
                    try:
                        body.targets.append(DecoratorTarget(target.text))
                    except ValueError:
                        valid = ", ".join(t.value for t in DecoratorTarget)
                        raise SchemaSyntaxError(f"unknown target {target.text!r}; valid targets: {valid}", target.span)
                    if not (self._accept_punct("|") or self._accept_punct(",")):
                        break
            elif token.kind is TokenKind.IDENTIFIER and token.text == "param":
                self._advance()
                param_name = self._expect_name("a parameter name")
                if self._accept_punct("!"):
                    required = True
                elif self._accept_punct("?"):
                    required = False
                else:
                    raise self._error("parameter name must end with '!' (required) or '?' (optional)")
                self._expect_punct(":")
                param_type = self._type()
                if not isinstance(param_type, (PrimitiveType, StringType)):
                    raise SchemaSyntaxError("decorator parameters must have a primitive or string type", param_type.span)
                if param_name.text in params:
                    raise DuplicateMember(f"parameter {param_name.text!r} declared twice", param_name.span)
                param = DecoratorParam(param_name.text, param_type, required, param_name.span)
                params[param.name] = param
                body.params.append(param)
            elif (token.kind is TokenKind.IDENTIFIER and token.text == "validate") or token.is_keyword("export"):
                self._advance()
                block = self._peek()
                if block.kind is not TokenKind.RAW_BLOCK:
                    raise self._error(f"expected a [[ ... ]] block after {token.text}")
                self._advance()
                if token.text == "validate":
                    body.validate_source = block.value
                else:
                    body.export_source = block.value
            else:
                raise self._error(f"expected targets, param, validate or export, found {token.describe()}")
            self._accept_punct(";")

        if not body.targets:
            body.targets.append(DecoratorTarget.ALL)
        return Definition(DefinitionKind.DECORATOR, name.text, body, span=start.span.to(name.span))

    # -------------------------------------------------------------------------
    # Types, literals, decorator usages
    # -------------------------------------------------------------------------

    def _type(self) -> TypeExpr:
        token = self._peek()
        if token.is_keyword("map") and self._at_punct("[", 1):
            self._advance()
            self._advance()
            key = self._type()
            self._expect_punct(",", "between map key and value types")
            value = self._type()
            end = self._expect_punct("]", "to close the map type")
            if isinstance(key, PrimitiveType):
                if not key.kind.is_map_key:
                    raise InvalidMapKeyType(f"{key.kind.value} cannot key a map", key.span)
            elif not isinstance(key, (StringType, NamedType)):
                raise InvalidMapKeyType("map keys must be integers, bool, string, uuid or enums", key.span)
            result: TypeExpr = MapType(key, value, token.span.to(end.span))
        else:
            type_name, span = self._dotted_name("a type")
            if type_name == "string":
                result = StringType(span)
            elif PrimitiveKind.from_name(type_name) is not None:
                result = PrimitiveType(PrimitiveKind.from_name(type_name), span)
            else:
                result = NamedType(type_name, span)

        while self._at_punct("["):
            open_bracket = self._advance()
            length = None
            if self._peek().kind is TokenKind.NUMBER:
                size = self._advance()
                if isinstance(size.value, float) or size.value < 1:
                    raise SchemaSyntaxError("fixed array length must be a positive integer", size.span)
                if size.value > MAX_FIXED_ARRAY:
                    raise FixedArrayTooLarge(
                        f"fixed array length {size.value} exceeds the maximum of {MAX_FIXED_ARRAY}", size.span
                    )
                length = size.value
            end = self._expect_punct("]", "to close the array type")
            result = ArrayType(result, length, (result.span or open_bracket.span).to(end.span))
        return result

    def _literal(self) -> Literal:
        token = self._peek()
        if token.kind is TokenKind.STRING:
            kind = LiteralKind.STRING
        elif token.kind is TokenKind.BYTES:
            kind = LiteralKind.BYTES
        elif token.kind is TokenKind.NUMBER:
            kind = LiteralKind.FLOAT if isinstance(token.value, float) else LiteralKind.INT
        elif token.is_keyword("true") or token.is_keyword("false"):
            self._advance()
            return Literal(LiteralKind.BOOL, token.text == "true", token.span)
        else:
            raise self._error(f"expected a literal, found {token.describe()}")
        self._advance()
        return Literal(kind, token.value, token.span)

    def _decorator_usages(self) -> List[DecoratorUsage]:
        usages: List[DecoratorUsage] = []
        while self._at_punct("@"):
            at = self._advance()
            name, span = self._dotted_name("a decorator name")
            usage = DecoratorUsage(name, span=at.span.to(span))
            if self._accept_punct("("):
                while not self._accept_punct(")"):
                    arg_name = None
                    start = self._peek()
                    if start.is_name and self._at_punct(":", 1):
                        arg_name = self._advance().text
                        self._advance()
                    value = self._literal()
                    usage.arguments.append(DecoratorArgument(value, arg_name, start.span.to(value.span)))
                    if not self._accept_punct(","):
                        self._expect_punct(")", "to close the decorator arguments")
                        break
            usages.append(usage)
        return usages


def parse(tokens: List[Token], path: str = "<input>") -> SchemaAst:
    """Parse a token list from `tokenize`."""
    return Parser(tokens, path).parse()


def parse_source(source: Union[bytes, str], path: str = "<input>") -> SchemaAst:
    """Tokenize and parse one schema file."""
    return parse(tokenize(source, path), path)
