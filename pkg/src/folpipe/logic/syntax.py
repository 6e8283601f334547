"""Abstract syntax for function-free first-order formulas."""

from __future__ import annotations

import enum
from collections.abc import Iterator
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Const:
    name: str

    def __str__(self) -> str:
        return self.name


Term = Var | Const


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[Term, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)


@dataclass(frozen=True)
class Not:
    body: Formula


@dataclass(frozen=True)
class And:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Xor:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class ForAll:
    var: str
    body: Formula


@dataclass(frozen=True)
class Exists:
    var: str
    body: Formula


Formula = Atom | Not | And | Or | Implies | Iff | Xor | ForAll | Exists
BINARY = (And, Or, Implies, Iff, Xor)
QUANTIFIERS = (ForAll, Exists)


class Dialect(enum.Enum):
    """Surface lexeme set used when rendering. Parsing accepts both."""

    UNICODE = "unicode"
    ASCII = "ascii"


# operator -> (unicode lexeme, ascii lexeme)
LEXEMES: dict[type, tuple[str, str]] = {
    ForAll: ("∀", "all"),
    Exists: ("∃", "exists"),
    Not: ("¬", "-"),
    And: ("∧", "&"),
    Or: ("∨", "|"),
    Implies: ("→", "->"),
    Iff: ("↔", "<->"),
    Xor: ("⊕", "xor"),
}


def lexeme(op: type, dialect: Dialect) -> str:
    uni, asc = LEXEMES[op]
    return uni if dialect is Dialect.UNICODE else asc


@dataclass(frozen=True)
class Statement:
    """One line of a translation block: the raw formula text, its parse, and the gloss."""

    text: str
    formula: Formula | None = None
    gloss: str | None = None
    error: ParseFailure | None = field(default=None, compare=False)

    @property
    def ok(self) -> bool:
        return self.formula is not None


def subformulas(f: Formula) -> Iterator[Formula]:
    """Pre-order walk over ``f`` and all of its subformulas."""
    stack = [f]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, BINARY):
            stack.append(node.right)
            stack.append(node.left)
        elif isinstance(node, (Not, ForAll, Exists)):
            stack.append(node.body)


def atoms(f: Formula) -> Iterator[Atom]:
    for node in subformulas(f):
        if isinstance(node, Atom):
            yield node


def constants(f: Formula) -> set[str]:
    return {t.name for a in atoms(f) for t in a.args if isinstance(t, Const)}


def depth(f: Formula) -> int:
    if isinstance(f, Atom):
        return 0
    if isinstance(f, BINARY):
        return 1 + max(depth(f.left), depth(f.right))
    return 1 + depth(f.body)


# imported late to avoid a cycle; ParseFailure lives with the parser
from folpipe.logic.errors import ParseFailure
