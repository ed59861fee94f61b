"""Tokenizer for the SVA fragment."""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import LexError
from .nodes import UNBOUNDED

KEYWORDS = frozenset(
    {
        "disable", "iff", "posedge", "negedge", "edge",
        "throughout", "within", "intersect", "and", "or", "not",
        "until", "s_until", "until_with", "s_until_with",
        "eventually", "s_eventually", "s_always",
        "assert", "assume", "cover", "property", "endproperty", "else",
    }
)

# Longest lexemes first.
OPERATORS = (
    "|->", "|=>", "[->", "[+]", "===", "!==", "==?", "!=?", "<->", "<<<", ">>>",
    "##", "[*", "[=", "->", "==", "!=", "<=", ">=", "&&", "||", "<<", ">>",
    "~&", "~|", "~^", "^~", "**", "::", "+:", "-:",
    "(", ")", "[", "]", "{", "}", ",", ":", ";", "@", ".", "?",
    "!", "~", "&", "|", "^", "+", "-", "*", "/", "%", "<", ">", "=", "'",
)

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_$]*")
_ESCAPED = re.compile(r"\\\S+")
_SYSIDENT = re.compile(r"\$[A-Za-z_][A-Za-z0-9_$]*")
_NUMBER = re.compile(
    r"(?:(\d[\d_]*)\s*)?'([sS]?)([bBoOdDhH])\s*([0-9a-fA-FxXzZ?_]+)"
    r"|'([01xXzZ])(?![A-Za-z0-9_])"
    r"|(\d[\d_]*)"
)
_DELAY_CONST = re.compile(
    r"##\s*(?:(\d+)(?![\d'A-Za-z_])|\[\s*(\d+)\s*:\s*(\d+|\$)\s*\]|\[\s*([*+])\s*\])"
)
_REPEAT_CONST = re.compile(r"\[\s*(\*|=|->)\s*(\d+)\s*(?::\s*(\d+|\$)\s*)?\]|\[\s*([*+])\s*\]")
_REPEAT_KIND = {"*": "consecutive", "=": "nonconsecutive", "->": "goto"}
_BASES = {"b": 2, "o": 8, "d": 10, "h": 16}


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT KEYWORD SYSIDENT NUMBER STRING OP DELAY REPEAT DOLLAR MACRO COMMENT EOF
    text: str
    pos: int
    value: object = None

    @property
    def trivia(self) -> bool:
        return self.kind == "COMMENT"

    @property
    def end(self) -> int:
        return self.pos + len(self.text)


def _bound(text: str):
    return UNBOUNDED if text == "$" else int(text)


def literal_value(text: str) -> int:
    """Numeric value of a Verilog literal; x/z digits read as 0."""
    m = _NUMBER.fullmatch(text.strip())
    if m is None:
        raise ValueError(text)
    if m.group(6) is not None:
        return int(m.group(6).replace("_", ""))
    if m.group(5) is not None:
        return 1 if m.group(5) == "1" else 0
    digits = re.sub(r"[xXzZ?]", "0", m.group(4).replace("_", ""))
    return int(digits, _BASES[m.group(3).lower()])


def tokenize(src: str, keep_trivia: bool = True) -> list[Token]:
    """Split ``src`` into tokens, ending with an EOF token.

    Raises LexError at the first character that cannot start a token.
    """
    tokens: list[Token] = []
    i, n = 0, len(src)
    while i < n:
        ch = src[i]
        if ch.isspace():
            i += 1
            continue
        if src.startswith("//", i):
            j = src.find("\n", i)
            j = n if j < 0 else j
            if keep_trivia:
                tokens.append(Token("COMMENT", src[i:j], i))
            i = j
            continue
        if src.startswith("/*", i):
            j = src.find("*/", i + 2)
            if j < 0:
                raise LexError(i, "unterminated block comment")
            if keep_trivia:
                tokens.append(Token("COMMENT", src[i : j + 2], i))
            i = j + 2
            continue
        if ch == '"':
            j = i + 1
            while j < n and src[j] != '"':
                j += 2 if src[j] == "\\" else 1
            if j >= n:
                raise LexError(i, "unterminated string")
            tokens.append(Token("STRING", src[i : j + 1], i))
            i = j + 1
            continue
        if ch == "`":
            m = _IDENT.match(src, i + 1)
            if not m:
                raise LexError(i, "bad macro")
            tokens.append(Token("MACRO", src[i : m.end()], i, m.group()))
            i = m.end()
            continue
        if ch == "\\":
            m = _ESCAPED.match(src, i)
            if not m:
                raise LexError(i, "empty escaped identifier")
            tokens.append(Token("IDENT", m.group(), i, m.group()))
            i = m.end()
            continue
        if ch == "$":
            m = _SYSIDENT.match(src, i)
            if m:
                tokens.append(Token("SYSIDENT", m.group(), i, m.group()[1:]))
                i = m.end()
            else:
                tokens.append(Token("DOLLAR", "$", i))
                i += 1
            continue
        if ch.isalpha() or ch == "_":
            m = _IDENT.match(src, i)
            word = m.group()
            kind = "KEYWORD" if word in KEYWORDS else "IDENT"
            tokens.append(Token(kind, word, i, word))
            i = m.end()
            continue
        if ch.isdigit() or (ch == "'" and i + 1 < n and src[i + 1] not in "("):
            m = _NUMBER.match(src, i)
            if m:
                try:
                    value = literal_value(m.group())
                except ValueError:
                    raise LexError(i, "digit out of range for literal base") from None
                tokens.append(Token("NUMBER", m.group(), i, value))
                i = m.end()
                continue
            raise LexError(i, "malformed literal")
        if src.startswith("##", i):
            m = _DELAY_CONST.match(src, i)
            if m:
                if m.group(1) is not None:
                    value = (int(m.group(1)), int(m.group(1)))
                elif m.group(2) is not None:
                    value = (int(m.group(2)), _bound(m.group(3)))
                else:
                    value = (0 if m.group(4) == "*" else 1, UNBOUNDED)
                tokens.append(Token("DELAY", m.group(), i, value))
                i = m.end()
                continue
        if ch == "[":
            m = _REPEAT_CONST.match(src, i)
            if m:
                if m.group(1) is not None:
                    lo = int(m.group(2))
                    hi = _bound(m.group(3)) if m.group(3) is not None else lo
                    value = (_REPEAT_KIND[m.group(1)], lo, hi)
                else:
                    value = ("consecutive", 0 if m.group(4) == "*" else 1, UNBOUNDED)
                tokens.append(Token("REPEAT", m.group(), i, value))
                i = m.end()
                continue
        if src.startswith("@@", i):
            raise LexError(i, "unknown operator")
        for op in OPERATORS:
            if src.startswith(op, i):
                tokens.append(Token("OP", op, i))
                i += len(op)
                break
        else:
            raise LexError(i)
    tokens.append(Token("EOF", "", n))
    return tokens

