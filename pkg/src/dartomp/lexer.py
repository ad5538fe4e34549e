"""Tokenizer for the supported C subset.

Preprocessor lines are folded at this level: ``#pragma`` lines (with backslash
continuations joined and whitespace collapsed) become single pragma tokens,
``#define``/``#include`` lines are captured as raw directive records and never
reach the parser.  Token spans always refer to the original, unjoined text so
later rewriting stays byte-accurate.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from .diagnostics import Diagnostic, LexError, UnsupportedConstructError, warning_at
from .source import SourceFile, Span


class TokenKind(Enum):
    IDENT = "identifier"
    KEYWORD = "keyword"
    INT = "integer-literal"
    FLOAT = "float-literal"
    STRING = "string-literal"
    PUNCT = "punctuator"
    PRAGMA = "pragma-line"


KEYWORDS = {
    "int", "float", "double", "char", "void", "const", "struct",
    "if", "else", "switch", "case", "default",
    "for", "while", "do", "return", "break", "continue",
}

_PUNCT2 = {
    "==", "!=", "<=", ">=", "&&", "||", "++", "--",
    "+=", "-=", "*=", "/=", "%=", "->",
}
_PUNCT1 = set("()[]{};,.+-*/%<>=!&|^~?:")

_IDENT_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_IDENT_CONT = _IDENT_START | set("0123456789")
_DIGITS = set("0123456789")


@dataclass
class Token:
    kind: TokenKind
    lexeme: str
    span: Span
    line: int
    value: int | float | str | None = None

    def __repr__(self) -> str:  # compact for test failures
        return f"Token({self.kind.name}, {self.lexeme!r}, {self.span.start}..{self.span.end})"


@dataclass
class RawDirective:
    """A non-pragma preprocessor line (``#define``, ``#include``, ...)."""

    text: str  # whitespace-normalized, continuations joined
    span: Span
    line: int


@dataclass
class LexResult:
    tokens: list[Token]
    directives: list[RawDirective]
    warnings: list[Diagnostic] = field(default_factory=list)


def lex(src: SourceFile) -> LexResult:
    text = src.text
    n = len(text)
    i = 0
    line = 1
    at_line_start = True
    tokens: list[Token] = []
    directives: list[RawDirective] = []
    warnings: list[Diagnostic] = []

    def err(offset: int, msg: str) -> LexError:
        return LexError.at(src, offset, msg)

    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            i += 1
            at_line_start = True
            continue
        if c in " \t\r":
            i += 1
            continue
        if c == "/" and i + 1 < n and text[i + 1] == "/":
            while i < n and text[i] != "\n":
                i += 1
            at_line_start = False
            continue
        if c == "/" and i + 1 < n and text[i + 1] == "*":
            close = text.find("*/", i + 2)
            if close < 0:
                raise err(i, "unterminated comment")
            line += text.count("\n", i, close)
            i = close + 2
            at_line_start = False
            continue
        if c == "#":
            if not at_line_start:
                raise err(i, "'#' is only supported at the start of a line")
            start = i
            start_line = line
            parts: list[str] = []
            while True:
                eol = text.find("\n", i)
                if eol < 0:
                    eol = n
                segment = text[i:eol]
                if segment.rstrip().endswith("\\"):
                    parts.append(segment.rstrip()[:-1])
                    line += 1
                    i = eol + 1
                    if i >= n:
                        raise err(start, "line continuation at end of file")
                    continue
                parts.append(segment)
                i = eol
                break
            joined = " ".join(" ".join(parts).split())
            span = Span(start, i)
            if joined.startswith("#pragma") or joined.startswith("# pragma"):
                tokens.append(Token(TokenKind.PRAGMA, joined, span, start_line))
            else:
                directives.append(RawDirective(joined, span, start_line))
            at_line_start = False
            continue

        at_line_start = False
        if c in _IDENT_START:
            j = i + 1
            while j < n and text[j] in _IDENT_CONT:
                j += 1
            word = text[i:j]
            kind = TokenKind.KEYWORD if word in KEYWORDS else TokenKind.IDENT
            tokens.append(Token(kind, word, Span(i, j), line))
            i = j
            continue
        if c in _DIGITS or (c == "." and i + 1 < n and text[i + 1] in _DIGITS):
            if c == "0" and i + 1 < n and text[i + 1] in "xX":
                j = i + 2
                while j < n and text[j] in "0123456789abcdefABCDEF":
                    j += 1
                word = text[i:j]
                tokens.append(Token(TokenKind.INT, word, Span(i, j), line,
                                    value=int(word, 16)))
                i = j
                continue
            j = i
            is_float = False
            while j < n and text[j] in _DIGITS:
                j += 1
            if j < n and text[j] == ".":
                is_float = True
                j += 1
                while j < n and text[j] in _DIGITS:
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k] in _DIGITS:
                    is_float = True
                    j = k
                    while j < n and text[j] in _DIGITS:
                        j += 1
            if j < n and text[j] in "fF" and is_float:
                j += 1
            word = text[i:j]
            if is_float:
                tokens.append(Token(TokenKind.FLOAT, word, Span(i, j), line,
                                    value=float(word.rstrip("fF"))))
            else:
                tokens.append(Token(TokenKind.INT, word, Span(i, j), line, value=int(word)))
            i = j
            continue
        if c == '"':
            j = i + 1
            while j < n:
                if text[j] == "\\":
                    j += 2
                    continue
                if text[j] == "\n":
                    raise err(i, "unterminated string literal")
                if text[j] == '"':
                    break
                j += 1
            if j >= n:
                raise err(i, "unterminated string literal")
            j += 1
            tokens.append(Token(TokenKind.STRING, text[i:j], Span(i, j), line,
                                value=text[i + 1 : j - 1]))
            i = j
            continue
        if c == "'":
            raise UnsupportedConstructError.at(src, i, "character literals unsupported")
        two = text[i : i + 2]
        if two in _PUNCT2:
            tokens.append(Token(TokenKind.PUNCT, two, Span(i, i + 2), line))
            i += 2
            continue
        if c in _PUNCT1:
            tokens.append(Token(TokenKind.PUNCT, c, Span(i, i + 1), line))
            i += 1
            continue
        raise err(i, f"unexpected character {c!r}")

    return LexResult(tokens, directives, warnings)


def tokenize(src: SourceFile) -> list[Token]:
    return lex(src).tokens


_DEFINE_RE = re.compile(r"#\s*define\s+([A-Za-z_]\w*)(\(?)\s*(.*)$")
_INCLUDE_RE = re.compile(r"#\s*include\b")


@dataclass
class Preprocessed:
    tokens: list[Token]
    defines: dict[str, int]
    warnings: list[Diagnostic]


def expand_defines(src: SourceFile, lexed: LexResult | None = None) -> Preprocessed:
    """Apply object-like integer macros to the token stream.

    Identifier tokens matching a ``#define NAME value`` that textually precedes
    them become integer-literal tokens carrying the defined value; the lexeme
    and span stay those of the original identifier so rewriting is unaffected.
    ``#include`` lines are skipped with a warning; function-like macros and any
    other preprocessor directive are outside the subset.
    """
    if lexed is None:
        lexed = lex(src)
    defines: dict[str, int] = {}
    define_pos: dict[str, int] = {}
    warnings = list(lexed.warnings)

    for d in lexed.directives:
        m = _DEFINE_RE.match(d.text)
        if m:
            name, paren, value_text = m.groups()
            if paren:
                raise UnsupportedConstructError(
                    f"function-like macro {name} unsupported", src.path, d.line, 1)
            value_text = value_text.strip()
            if value_text in defines:
                defines[name] = defines[value_text]
            else:
                try:
                    defines[name] = int(value_text, 0)
                except ValueError:
                    raise UnsupportedConstructError(
                        f"macro {name} is not an integer constant; only object-like "
                        "integer defines are supported", src.path, d.line, 1)
            define_pos[name] = d.span.start
            continue
        if _INCLUDE_RE.match(d.text):
            warnings.append(warning_at(src, d.span.start, f"include skipped: {d.text}"))
            continue
        raise UnsupportedConstructError(
            f"unsupported preprocessor directive: {d.text}", src.path, d.line, 1)

    out: list[Token] = []
    for tok in lexed.tokens:
        if (tok.kind is TokenKind.IDENT and tok.lexeme in defines
                and define_pos[tok.lexeme] < tok.span.start):
            out.append(Token(TokenKind.INT, tok.lexeme, tok.span, tok.line,
                             value=defines[tok.lexeme]))
        else:
            out.append(tok)
    return Preprocessed(out, defines, warnings)
