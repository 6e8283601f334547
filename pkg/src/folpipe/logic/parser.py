"""Recursive-descent (precedence climbing) parser for the Prover9-flavoured dialect.

Precedence, tightest first: negation and quantifiers, then ``∧``, ``∨``, ``⊕``,
``→`` (right-associative) and ``↔``. Quantifiers scope over the single unary
formula that follows them, so ``∀x (P(x) → Q(x))`` needs its parentheses.
"""

from __future__ import annotations

import re

from folpipe.logic.errors import ParseCause, ParseFailure
from folpipe.logic.lexer import Lexer, Tok, Token
from folpipe.logic.syntax import (
    And,
    Atom,
    Const,
    Exists,
    ForAll,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Var,
    Xor,
)

MAX_LENGTH = 64 * 1024
MAX_DEPTH = 200

VARIABLE_NAME = re.compile(r"[a-z][A-Za-z0-9_]*\Z")
# an unbound identifier of this shape is read as a free variable, not a constant
FREE_VARIABLE_NAME = re.compile(r"[a-z][0-9]*\Z")

_BINARY = {
    Tok.AND: (5, And, False),
    Tok.OR: (4, Or, False),
    Tok.XOR: (3, Xor, False),
    Tok.IMPLIES: (2, Implies, True),
    Tok.IFF: (1, Iff, False),
}


def is_free_variable_name(name: str) -> bool:
    return FREE_VARIABLE_NAME.match(name) is not None


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.lexer = Lexer(text)
        self.scope: list[str] = []
        self.depth = 0
        self.quantifier_spans: list[tuple[int, int]] = []

    def fail(self, cause: ParseCause, tok: Token, detail: str = "") -> ParseFailure:
        end = tok.end if tok.end > tok.start else len(self.text)
        return ParseFailure(cause, (tok.start, end), self.text, detail)

    def enter(self, tok: Token):
        self.depth += 1
        if self.depth > MAX_DEPTH:
            raise self.fail(ParseCause.TOO_DEEP, tok)

    def formula(self) -> Formula:
        f = self.expr(0)
        tok = self.lexer.peek()
        if tok.kind is Tok.END:
            return f
        if tok.kind is Tok.RPAREN:
            raise self.fail(ParseCause.UNBALANCED_PAREN, tok, "no matching '('")
        raise ParseFailure(ParseCause.TRAILING_TEXT, (tok.start, len(self.text)), self.text)

    def expr(self, min_prec: int) -> Formula:
        left = self.unary()
        while True:
            tok = self.lexer.peek()
            entry = _BINARY.get(tok.kind)
            if entry is None or entry[0] < min_prec:
                return left
            prec, node, right_assoc = entry
            self.lexer.next()
            right = self.expr(prec if right_assoc else prec + 1)
            left = node(left, right)

    def unary(self) -> Formula:
        tok = self.lexer.peek()
        if tok.kind is Tok.NOT:
            self.lexer.next()
            self.enter(tok)
            body = self.unary()
            self.depth -= 1
            return Not(body)
        if tok.kind in (Tok.FORALL, Tok.EXISTS):
            self.lexer.next()
            self.enter(tok)
            var_tok = self.lexer.next()
            if var_tok.kind is Tok.END:
                raise self.fail(ParseCause.UNEXPECTED_END, var_tok, "quantifier without variable")
            if var_tok.kind is not Tok.IDENT or not VARIABLE_NAME.match(var_tok.value):
                raise self.fail(ParseCause.UNEXPECTED_TOKEN, var_tok, "expected a variable")
            self.quantifier_spans.append((tok.start, var_tok.end))
            if self.lexer.peek().kind is Tok.DOT:
                self.lexer.next()
            self.scope.append(var_tok.value)
            body = self.unary()
            self.scope.pop()
            self.depth -= 1
            node = ForAll if tok.kind is Tok.FORALL else Exists
            return node(var_tok.value, body)
        return self.primary()

    def primary(self) -> Formula:
        tok = self.lexer.next()
        if tok.kind is Tok.LPAREN:
            self.enter(tok)
            f = self.expr(0)
            close = self.lexer.next()
            if close.kind is Tok.END:
                raise self.fail(ParseCause.UNBALANCED_PAREN, tok, "'(' is never closed")
            if close.kind is not Tok.RPAREN:
                raise self.fail(ParseCause.UNEXPECTED_TOKEN, close, "expected ')'")
            self.depth -= 1
            return f
        if tok.kind is Tok.IDENT:
            return self.atom(tok)
        if tok.kind is Tok.END:
            raise self.fail(ParseCause.UNEXPECTED_END, tok, "expected a formula")
        raise self.fail(ParseCause.UNEXPECTED_TOKEN, tok, "expected a formula")

    def atom(self, name: Token) -> Atom:
        open_tok = self.lexer.peek()
        if open_tok.kind is not Tok.LPAREN:
            return Atom(name.value, ())
        self.lexer.next()
        if self.lexer.peek().kind is Tok.RPAREN:
            self.lexer.next()
            return Atom(name.value, ())
        args = []
        while True:
            tok = self.lexer.next()
            if tok.kind is Tok.END:
                raise self.fail(ParseCause.UNBALANCED_PAREN, open_tok, "'(' is never closed")
            if tok.kind is not Tok.IDENT:
                raise self.fail(ParseCause.UNEXPECTED_TOKEN, tok, "expected a term")
            args.append(self.term(tok.value))
            sep = self.lexer.next()
            if sep.kind is Tok.RPAREN:
                return Atom(name.value, tuple(args))
            if sep.kind is Tok.COMMA:
                continue
            if sep.kind is Tok.END:
                raise self.fail(ParseCause.UNBALANCED_PAREN, open_tok, "'(' is never closed")
            detail = "function symbols are not supported" if sep.kind is Tok.LPAREN else "expected ',' or ')'"
            raise self.fail(ParseCause.UNEXPECTED_TOKEN, sep, detail)

    def term(self, name: str):
        if name in self.scope or is_free_variable_name(name):
            return Var(name)
        return Const(name)


def parse_formula(text: str, *, max_length: int = MAX_LENGTH) -> Formula:
    """Parse one formula (no ``:::`` gloss).

    Raises
    ------
    ParseFailure
        For every malformed input; no other exception escapes.
    """
    return parse_with_spans(text, max_length=max_length)[0]


def parse_with_spans(text: str, *, max_length: int = MAX_LENGTH) -> tuple[Formula, list[tuple[int, int]]]:
    """Like :func:`parse_formula`, also returning quantifier spans in pre-order."""
    if not isinstance(text, str):
        text = text.decode("utf-8", errors="replace")
    if len(text) > max_length:
        raise ParseFailure(ParseCause.TOO_LONG, (max_length, len(text)), text)
    if not text.strip():
        raise ParseFailure(ParseCause.EMPTY, (0, len(text)), text)
    parser = _Parser(text)
    try:
        return parser.formula(), parser.quantifier_spans
    except RecursionError:
        raise ParseFailure(ParseCause.TOO_DEEP, (0, len(text)), text) from None
