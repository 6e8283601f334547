from __future__ import annotations

from folpipe.logic.syntax import (
    BINARY,
    Atom,
    Dialect,
    Exists,
    ForAll,
    Formula,
    Not,
    lexeme,
)


def render(f: Formula, dialect: Dialect = Dialect.UNICODE) -> str:
    """Render ``f`` so that it re-parses to the same tree.

    Every nested binary connective is parenthesized; only the outermost one is left bare.
    """
    if isinstance(f, BINARY):
        return _binary(f, dialect)
    return _operand(f, dialect)


def _binary(f, dialect: Dialect) -> str:
    op = lexeme(type(f), dialect)
    return f"{_operand(f.left, dialect)} {op} {_operand(f.right, dialect)}"


def _operand(f: Formula, dialect: Dialect) -> str:
    if isinstance(f, Atom):
        if not f.args:
            return f.predicate
        return f"{f.predicate}({', '.join(t.name for t in f.args)})"
    if isinstance(f, BINARY):
        return f"({_binary(f, dialect)})"
    if isinstance(f, Not):
        return lexeme(Not, dialect) + _operand(f.body, dialect)
    if isinstance(f, (ForAll, Exists)):
        q = lexeme(type(f), dialect)
        sep = "" if dialect is Dialect.UNICODE else " "
        return f"{q}{sep}{f.var} {_operand(f.body, dialect)}"
    raise TypeError(f"not a formula: {f!r}")
