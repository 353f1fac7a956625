"""Token kinds produced by the schema lexer."""

from dataclasses import dataclass, field
from enum import Enum, auto
from typing import Any

from Bebop.SCHEMA.errors import Span


class TokenKind(Enum):
    IDENTIFIER = auto()
    KEYWORD = auto()
    STRING = auto()
    NUMBER = auto()
    BYTES = auto()
    PUNCT = auto()
    DOC = auto()
    RAW_BLOCK = auto()
    EOF = auto()


KEYWORDS = frozenset(
    {
        "edition",
        "package",
        "import",
        "enum",
        "struct",
        "message",
        "union",
        "service",
        "const",
        "mut",
        "local",
        "export",
        "with",
        "stream",
        "map",
        "true",
        "false",
    }
)

# Keywords that also work as plain names (fields, params, members).
SOFT_KEYWORDS = frozenset({"stream", "map", "edition", "package", "with", "import", "const", "mut"})


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    span: Span = field(compare=False)
    value: Any = None

    def is_punct(self, symbol: str) -> bool:
        return self.kind is TokenKind.PUNCT and self.text == symbol

    def is_keyword(self, word: str) -> bool:
        return self.kind is TokenKind.KEYWORD and self.text == word

    @property
    def is_name(self) -> bool:
        return self.kind is TokenKind.IDENTIFIER or (self.kind is TokenKind.KEYWORD and self.text in SOFT_KEYWORDS)

    def describe(self) -> str:
        if self.kind is TokenKind.EOF:
            return "end of file"
        return repr(self.text)
