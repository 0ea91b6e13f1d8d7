"""Tokenizer for the annotated-loop language."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List

from .errors import ParseError

KEYWORDS = {
    "and", "or", "not", "implies", "iff", "mod", "old", "forall", "exists",
    "in", "true", "false", "True", "False",
    "if", "then", "elseif", "else", "end", "from", "invariant", "until",
    "loop", "variant", "across", "as", "do", "require", "ensure", "local",
    "create",
}

# Longest first so that "//" wins over "/".
OPERATORS = [":=", "..", "//", "/=", "<=", ">=", "++",
             "+", "-", "*", "/", "^", "=", "<", ">", "(", ")", "[", "]",
             ",", ";", ":", "."]

# A line break right after one of these never ends a clause.
CONTINUATION = {"+", "-", "*", "/", "//", "^", "=", "/=", "<", "<=", ">", ">=",
                "++", ",", "(", "[", ":=", "..", ":", "and", "or", "implies",
                "iff", "not", "mod", "old", ".", "until", "variant", "if", "elseif",
                "forall", "exists", "in"}

_NUM = re.compile(r"\d+(\.\d+([eE][+-]?\d+)?|[eE][+-]?\d+)?")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


@dataclass(frozen=True)
class Token:
    kind: str  # INT REAL IDENT KW OP NL EOF
    text: str
    line: int
    col: int


def tokenize(text: str) -> List[Token]:
    toks: List[Token] = []
    depth = 0
    line, col, i = 1, 1, 0
    n = len(text)

    def newline_ok() -> bool:
        if depth > 0 or not toks:
            return False
        last = toks[-1]
        if last.kind == "NL":
            return False
        return not (last.kind in ("OP", "KW") and last.text in CONTINUATION)

    while i < n:
        ch = text[i]
        if ch == "\n":
            if newline_ok():
                toks.append(Token("NL", "\n", line, col))
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("--", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch.isdigit():
            m = _NUM.match(text, i)
            s = m.group(0)
            kind = "REAL" if ("." in s or "e" in s or "E" in s) else "INT"
            toks.append(Token(kind, s, line, col))
            i += len(s)
            col += len(s)
            continue
        m = _IDENT.match(text, i)
        if m:
            s = m.group(0)
            toks.append(Token("KW" if s in KEYWORDS else "IDENT", s, line, col))
            i += len(s)
            col += len(s)
            continue
        for op in OPERATORS:
            if text.startswith(op, i):
                if op in ("(", "["):
                    depth += 1
                elif op in (")", "]"):
                    depth = max(0, depth - 1)
                toks.append(Token("OP", op, line, col))
                i += len(op)
                col += len(op)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)
    if toks and toks[-1].kind == "NL":
        toks.pop()
    toks.append(Token("EOF", "", line, col))
    return toks
