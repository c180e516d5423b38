"""Tokenizer for the ML-like concrete syntax."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List


class ParseError(Exception):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {msg}" if line else msg)
        self.msg = msg
        self.line = line
        self.col = col


KEYWORDS = {
    "let", "rec", "and", "in", "fun", "fix", "if", "then", "else", "ref",
    "not", "true", "false", "fail", "raise", "try", "with", "handle",
    "return", "gensym", "assert", "effect",
}

SYMBOLS = [
    "->", ":=", "==", "<>", "<=", ">=", "&&", "||",
    "(", ")", ",", ";", "{", "}", "[", "]", ":", "=", "<", ">", "+", "-",
    "*", "!", ".",
]


@dataclass(frozen=True)
class Token:
    kind: str  # INT | IDENT | KW | SYM | EOF
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r]+)"
    r"|(?P<nl>\n)"
    r"|(?P<comment>\#[^\n]*)"
    r"|(?P<int>\d+)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_']*)"
    r"|(?P<sym>" + "|".join(re.escape(s) for s in SYMBOLS) + ")"
)


def tokenize(text: str) -> List[Token]:
    toks: List[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        s = m.group()
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "int":
            toks.append(Token("INT", s, line, col))
        elif kind == "ident":
            toks.append(Token("KW" if s in KEYWORDS else "IDENT", s, line, col))
        elif kind == "sym":
            toks.append(Token("SYM", s, line, col))
        pos = m.end()
    toks.append(Token("EOF", "", line, pos - line_start + 1))
    return toks
