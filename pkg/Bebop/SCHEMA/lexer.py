"""
Schema lexer.

Turns `.bop` text into a flat token list. Line and block comments are
dropped here; `///` documentation comments survive as DOC tokens so the
parser can attach them to the next definition.
"""

import bisect
import re
from typing import List, Optional, Union

from Bebop.SCHEMA.errors import InvalidEscape, InvalidUtf8Source, SchemaSyntaxError, Span, UnterminatedString
from Bebop.SCHEMA.tokens import KEYWORDS, Token, TokenKind

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_CODEPOINT = re.compile(r"\{([0-9a-fA-F]{1,6})\}")
_NUMBER = re.compile(
    r"""
    -?0[xX][0-9a-fA-F]+
    | -?(?:\d+\.\d+|\d+)(?:[eE][+-]?\d+)?
    """,
    re.VERBOSE,
)
_PUNCT = set("{}()[];:,=.@#<>!?|-")

_SIMPLE_ESCAPES = {
    "\\": "\\",
    "n": "\n",
    "r": "\r",
    "t": "\t",
    "0": "\0",
    '"': '"',
    "'": "'",
}


class Lexer:
    """Single-pass scanner over one schema file."""

    def __init__(self, source: str, file: str = "<input>"):
        self.source = source
        self.file = file
        self.pos = 0
        self._line_starts = [0] + [m.end() for m in re.finditer("\n", source)]
        self.tokens: List[Token] = []

    # -------------------------------------------------------------------------
    # Spans
    # -------------------------------------------------------------------------

    def _location(self, offset: int):
        line = bisect.bisect_right(self._line_starts, offset) - 1
        return line + 1, offset - self._line_starts[line] + 1

    def span(self, start: int, end: Optional[int] = None) -> Span:
        end = start if end is None else end
        line, column = self._location(start)
        end_line, end_column = self._location(end)
        return Span(self.file, line, column, end_line, end_column, start, end)

    def _emit(self, kind: TokenKind, start: int, value=None) -> None:
        self.tokens.append(Token(kind, self.source[start:self.pos], self.span(start, self.pos), value))

    # -------------------------------------------------------------------------
    # Scanning
    # -------------------------------------------------------------------------

    def tokenize(self) -> List[Token]:
        src = self.source
        length = len(src)
        while True:
            self._skip_trivia()
            if self.pos >= length:
                break
            start = self.pos
            ch = src[start]

            if src.startswith("///", start) and not src.startswith("////", start):
                end = src.find("\n", start)
                end = length if end == -1 else end
                text = src[start + 3:end].rstrip()
                if text.startswith(" "):
                    text = text[1:]
                self.pos = end
                self._emit(TokenKind.DOC, start, text)
            elif ch in "\"'":
                self._emit(TokenKind.STRING, start, self._read_quoted(binary=False))
            elif ch == "b" and start + 1 < length and src[start + 1] in "\"'":
                self.pos += 1
                self._emit(TokenKind.BYTES, start, self._read_quoted(binary=True))
            elif src.startswith("[[", start):
                end = src.find("]]", start + 2)
                if end == -1:
                    raise SchemaSyntaxError("unterminated [[ block", self.span(start))
                self.pos = end + 2
                self._emit(TokenKind.RAW_BLOCK, start, src[start + 2:end])
            elif ch.isdigit() or (ch == "-" and start + 1 < length and src[start + 1].isdigit()):
                self._read_number()
            elif ch == "-" and _IDENT.match(src, start + 1) and _IDENT.match(src, start + 1).group() == "inf":
                self.pos = start + 4
                self._emit(TokenKind.NUMBER, start, float("-inf"))
            elif _IDENT.match(src, start):
                word = _IDENT.match(src, start).group()
                self.pos = start + len(word)
                if word == "inf":
                    self._emit(TokenKind.NUMBER, start, float("inf"))
                elif word == "nan":
                    self._emit(TokenKind.NUMBER, start, float("nan"))
                elif word in KEYWORDS:
                    self._emit(TokenKind.KEYWORD, start, word)
                else:
                    self._emit(TokenKind.IDENTIFIER, start, word)
            elif ch in _PUNCT:
                self.pos += 1
                self._emit(TokenKind.PUNCT, start, ch)
            else:
                raise SchemaSyntaxError(f"unexpected character {ch!r}", self.span(start, start + 1))

        self.tokens.append(Token(TokenKind.EOF, "", self.span(length)))
        return self.tokens

    def _skip_trivia(self) -> None:
        src = self.source
        length = len(src)
        while self.pos < length:
            ch = src[self.pos]
            if ch in " \t\r\n\ufeff":
                self.pos += 1
            elif src.startswith("///", self.pos) and not src.startswith("////", self.pos):
                return
            elif src.startswith("//", self.pos):
                end = src.find("\n", self.pos)
                self.pos = length if end == -1 else end
            elif src.startswith("/*", self.pos):
                end = src.find("*/", self.pos + 2)
                if end == -1:
                    raise SchemaSyntaxError("unterminated block comment", self.span(self.pos))
                self.pos = end + 2
            else:
                return

    def _read_number(self) -> None:
        start = self.pos
        match = _NUMBER.match(self.source, start)
        text = match.group()
        self.pos = match.end()
        if _IDENT.match(self.source, self.pos):
            raise SchemaSyntaxError(f"malformed number {text + _IDENT.match(self.source, self.pos).group()!r}", self.span(start, self.pos))
        lowered = text.lower()
        if "0x" in lowered:
            value: Union[int, float] = int(lowered, 16)
        elif "." in text or "e" in lowered:
            value = float(text)
        else:
            value = int(text)
        self._emit(TokenKind.NUMBER, start, value)

    def _read_quoted(self, binary: bool):
        """Read a quoted literal starting at `self.pos`; escapes are scanned left to right."""
        src = self.source
        quote = src[self.pos]
        open_at = self.pos
        self.pos += 1
        out: list = []
        while True:
            if self.pos >= len(src):
                raise UnterminatedString("string literal is never closed", self.span(open_at))
            ch = src[self.pos]
            if ch == quote:
                if src.startswith(quote, self.pos + 1):
                    out.append(quote)
                    self.pos += 2
                    continue
                self.pos += 1
                break
            if ch == "\\":
                out.append(self._read_escape(binary))
                continue
            out.append(ch)
            self.pos += 1

        if not binary:
            return "".join(out)
        data = bytearray()
        for piece in out:
            if isinstance(piece, int):
                data.append(piece)
            else:
                data += piece.encode("utf-8")
        return bytes(data)

    def _read_escape(self, binary: bool):
        src = self.source
        start = self.pos
        if start + 1 >= len(src):
            raise UnterminatedString("string literal is never closed", self.span(start))
        code = src[start + 1]
        if code in _SIMPLE_ESCAPES:
            self.pos += 2
            return _SIMPLE_ESCAPES[code]
        if code == "x" and binary:
            digits = src[start + 2:start + 4]
            if len(digits) != 2 or not all(c in "0123456789abcdefABCDEF" for c in digits):
                raise InvalidEscape("\\x needs exactly two hex digits", self.span(start, start + 4))
            self.pos += 4
            return int(digits, 16)
        if code == "u":
            match = _CODEPOINT.match(src, start + 2)
            if not match:
                raise InvalidEscape("\\u needs 1-6 hex digits in braces", self.span(start, start + 2))
            codepoint = int(match.group(1), 16)
            if codepoint > 0x10FFFF or 0xD800 <= codepoint <= 0xDFFF:
                raise InvalidEscape(f"U+{codepoint:X} is not a Unicode scalar value", self.span(start, match.end()))
            self.pos = match.end()
            return chr(codepoint)
        raise InvalidEscape(f"unknown escape \\{code}", self.span(start, start + 2))


def decode_source(data: Union[bytes, str], file: str = "<input>") -> str:
    """Decode schema bytes as UTF-8, failing with the offending position."""
    if isinstance(data, str):
        return data
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        prefix = data[:exc.start]
        line = prefix.count(b"\n") + 1
        column = exc.start - (prefix.rfind(b"\n") + 1) + 1
        span = Span(file, line, column, line, column + 1, exc.start, exc.start + 1)
        raise InvalidUtf8Source(f"invalid UTF-8 byte 0x{data[exc.start]:02x}", span) from exc


def tokenize(source: Union[bytes, str], file: str = "<input>") -> List[Token]:
    """
    Tokenize one schema file.

    Args:
        source: File content, as bytes (validated as UTF-8) or str
        file: Name used in spans

    Returns:
        Tokens ending with an EOF token
    """
    return Lexer(decode_source(source, file), file).tokenize()
