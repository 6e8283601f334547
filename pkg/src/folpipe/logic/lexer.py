"""Tokenizer accepting Unicode and Prover9-style ASCII lexemes in the same input."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

from folpipe.logic.errors import ParseCause, ParseFailure


class Tok(enum.Enum):
    IDENT = "identifier"
    LPAREN = "("
    RPAREN = ")"
    COMMA = ","
    DOT = "."
    FORALL = "forall"
    EXISTS = "exists"
    NOT = "not"
    AND = "and"
    OR = "or"
    IMPLIES = "implies"
    IFF = "iff"
    XOR = "xor"
    END = "end"


@dataclass(frozen=True)
class Token:
    kind: Tok
    value: str
    start: int
    end: int


KEYWORDS = {"all": Tok.FORALL, "forall": Tok.FORALL, "exists": Tok.EXISTS, "xor": Tok.XOR}

# longest lexemes first
SYMBOLS = [
    ("<->", Tok.IFF),
    ("->", Tok.IMPLIES),
    ("∀", Tok.FORALL),
    ("∃", Tok.EXISTS),
    ("¬", Tok.NOT),
    ("-", Tok.NOT),
    ("∧", Tok.AND),
    ("&", Tok.AND),
    ("∨", Tok.OR),
    ("|", Tok.OR),
    ("→", Tok.IMPLIES),
    ("↔", Tok.IFF),
    ("⊕", Tok.XOR),
    ("(", Tok.LPAREN),
    (")", Tok.RPAREN),
    (",", Tok.COMMA),
    (".", Tok.DOT),
]

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUMBER = re.compile(r"[0-9][0-9.,]*[0-9]|[0-9]")
# comparison / arithmetic symbols that are not logical connectives
_OPERATOR = re.compile(r"!=|>=|<=|=>|==|[<>=!+*/^~]")
_SPACE = re.compile(r"\s+")


class Lexer:
    """Pull-based lexer: errors surface only when the parser reaches the offending token."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self._peeked: Token | None = None

    def peek(self) -> Token:
        if self._peeked is None:
            self._peeked = self._scan()
        return self._peeked

    def next(self) -> Token:
        tok = self.peek()
        self._peeked = None
        return tok

    def _scan(self) -> Token:
        text = self.text
        m = _SPACE.match(text, self.pos)
        if m:
            self.pos = m.end()
        start = self.pos
        if start >= len(text):
            return Token(Tok.END, "", start, start)
        m = _IDENT.match(text, start)
        if m:
            self.pos = m.end()
            word = m.group()
            return Token(KEYWORDS.get(word, Tok.IDENT), word, start, self.pos)
        for lex, kind in SYMBOLS:
            if text.startswith(lex, start):
                self.pos = start + len(lex)
                return Token(kind, lex, start, self.pos)
        m = _OPERATOR.match(text, start)
        if m:
            raise ParseFailure(ParseCause.UNKNOWN_OPERATOR, (start, m.end()), text)
        m = _NUMBER.match(text, start)
        end = m.end() if m else start + 1
        raise ParseFailure(ParseCause.SPECIAL_TOKEN, (start, end), text)


def tokenize(text: str) -> list[Token]:
    """Eagerly lex ``text``; raises ParseFailure on the first bad token."""
    lexer = Lexer(text)
    out = []
    while True:
        tok = lexer.next()
        out.append(tok)
        if tok.kind is Tok.END:
            return out
