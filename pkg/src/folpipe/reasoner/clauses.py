"""Clausal normal form: NNF, skolemization and CNF distribution.

Inside clauses a term is an ``int`` (variable), a ``str`` (constant) or a tuple
``(function, arg, ...)`` for skolem functions.

Two renamings keep the clause set polynomial, both triggered only when plain
expansion would exceed ``RENAME_THRESHOLD`` clauses. An operand of ↔ or ⊕ is
replaced by a fresh definition atom over its free variables, with the closed
definition ``∀v (D(v) ↔ operand)`` added alongside. During distribution a
disjunct is renamed the same way; every NNF subformula occurs positively, so
there ``D → sub`` suffices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple

from folpipe.logic.analysis import free_variables
from folpipe.logic.errors import FreeVariableError
from folpipe.logic.syntax import (
    And,
    Atom,
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

SKOLEM_PREFIX = "$sk"  # '$' never lexes as part of an identifier
DEFINITION_PREFIX = "$def"
RENAME_THRESHOLD = 32

CTerm = int | str | tuple


class Literal(NamedTuple):
    positive: bool
    predicate: str
    args: tuple

    def negated(self) -> Literal:
        return Literal(not self.positive, self.predicate, self.args)

    def __str__(self) -> str:
        sign = "" if self.positive else "¬"
        if not self.args:
            return sign + self.predicate
        return f"{sign}{self.predicate}({', '.join(term_str(a) for a in self.args)})"


def term_str(t: CTerm) -> str:
    if isinstance(t, int):
        return f"v{t}"
    if isinstance(t, str):
        return t
    return f"{t[0]}({', '.join(term_str(a) for a in t[1:])})"


def term_weight(t: CTerm) -> int:
    if isinstance(t, tuple):
        return 1 + sum(term_weight(a) for a in t[1:])
    return 1


def literal_weight(lit: Literal) -> int:
    return 1 + sum(term_weight(a) for a in lit.args)


@dataclass(frozen=True)
class Clause:
    """A disjunction of literals; variables are numbered 0.. in order of appearance."""

    literals: tuple[Literal, ...]

    @property
    def weight(self) -> int:
        return sum(literal_weight(lit) for lit in self.literals)

    @property
    def is_empty(self) -> bool:
        return not self.literals

    def __len__(self) -> int:
        return len(self.literals)

    def __str__(self) -> str:
        if not self.literals:
            return "⊥"
        return " ∨ ".join(map(str, self.literals))


def _rename_key(t: CTerm):
    # sort key that ignores variable identity, so renumbering is order-stable
    if isinstance(t, int):
        return (0, "")
    if isinstance(t, str):
        return (1, t)
    return (2, t[0], tuple(_rename_key(a) for a in t[1:]))


def _lit_key(lit: Literal):
    return (lit.predicate, not lit.positive, len(lit.args), tuple(_rename_key(a) for a in lit.args))


def _renumber(t: CTerm, mapping: dict) -> CTerm:
    if isinstance(t, int):
        if t not in mapping:
            mapping[t] = len(mapping)
        return mapping[t]
    if isinstance(t, str):
        return t
    return (t[0], *(_renumber(a, mapping) for a in t[1:]))


def make_clause(literals) -> Clause | None:
    """Canonical clause from literals, or None for a tautology."""
    lits = sorted(set(literals), key=lambda lit: (_lit_key(lit), repr(lit.args)))
    mapping: dict = {}
    lits = [Literal(lit.positive, lit.predicate, tuple(_renumber(a, mapping) for a in lit.args)) for lit in lits]
    uniq = sorted(set(lits), key=lambda lit: (_lit_key(lit), repr(lit.args)))
    present = set(uniq)
    for lit in uniq:
        if lit.negated() in present:
            return None
    return Clause(tuple(uniq))


class SkolemNamer:
    """Fresh skolem symbols, shared by all formulas of one problem."""

    def __init__(self):
        self._n = itertools.count()
        self._d = itertools.count()

    def fresh(self) -> str:
        return f"{SKOLEM_PREFIX}{next(self._n)}"

    def fresh_definition(self) -> str:
        return f"{DEFINITION_PREFIX}{next(self._d)}"


def _is_literal(f: Formula) -> bool:
    return isinstance(f, Atom) or (isinstance(f, Not) and isinstance(f.body, Atom))


def _clause_counts(f: Formula) -> tuple[int, int]:
    """Plain-CNF clause counts of ``f`` and of ``¬f`` (upper bounds, before simplification)."""
    if isinstance(f, Atom):
        return 1, 1
    if isinstance(f, Not):
        p, n = _clause_counts(f.body)
        return n, p
    if isinstance(f, (ForAll, Exists)):
        return _clause_counts(f.body)
    (pl, nl), (pr, nr) = _clause_counts(f.left), _clause_counts(f.right)
    if isinstance(f, And):
        return pl + pr, nl * nr
    if isinstance(f, Or):
        return pl * pr, nl + nr
    if isinstance(f, Implies):
        return nl * pr, pl + nr
    if isinstance(f, Iff):
        return nl * pr + pl * nr, pl * pr + nl * nr
    return pl * pr + nl * nr, nl * pr + pl * nr  # Xor


def _name_operands(f: Formula, namer: SkolemNamer, defs: list, threshold: float) -> Formula:
    """Rename large operands of ↔ and ⊕; their definitions go to ``defs``."""
    if isinstance(f, Atom):
        return f
    if isinstance(f, Not):
        return Not(_name_operands(f.body, namer, defs, threshold))
    if isinstance(f, (ForAll, Exists)):
        return type(f)(f.var, _name_operands(f.body, namer, defs, threshold))
    left = _name_operands(f.left, namer, defs, threshold)
    right = _name_operands(f.right, namer, defs, threshold)
    if isinstance(f, (Iff, Xor)):
        left, right = _define(left, namer, defs, threshold), _define(right, namer, defs, threshold)
    return type(f)(left, right)


def _define(f: Formula, namer: SkolemNamer, defs: list, threshold: float) -> Formula:
    if _is_literal(f) or sum(_clause_counts(f)) <= threshold:
        return f
    free = sorted(free_variables(f))
    atom = Atom(namer.fresh_definition(), tuple(Var(v) for v in free))
    definition: Formula = Iff(atom, f)
    for v in reversed(free):
        definition = ForAll(v, definition)
    defs.append(definition)
    return atom


def _nnf(f: Formula, positive: bool):
    """Negation normal form as nested tuples: ('and'|'or', a, b), ('all'|'ex', var, body), ('lit', sign, atom)."""
    if isinstance(f, Atom):
        return ("lit", positive, f)
    if isinstance(f, Not):
        return _nnf(f.body, not positive)
    if isinstance(f, And):
        op = "and" if positive else "or"
        return (op, _nnf(f.left, positive), _nnf(f.right, positive))
    if isinstance(f, Or):
        op = "or" if positive else "and"
        return (op, _nnf(f.left, positive), _nnf(f.right, positive))
    if isinstance(f, Implies):
        return _nnf(Or(Not(f.left), f.right), positive)
    if isinstance(f, Xor):
        # (a ∨ b) ∧ ¬(a ∧ b)
        return _nnf(And(Or(f.left, f.right), Not(And(f.left, f.right))), positive)
    if isinstance(f, Iff):
        return _nnf(And(Or(Not(f.left), f.right), Or(f.left, Not(f.right))), positive)
    if isinstance(f, ForAll):
        return ("all" if positive else "ex", f.var, _nnf(f.body, positive))
    if isinstance(f, Exists):
        return ("ex" if positive else "all", f.var, _nnf(f.body, positive))
    raise TypeError(f"not a formula: {f!r}")


def _skolemize(node, env: dict, universals: list, counter, namer: SkolemNamer):
    tag = node[0]
    if tag == "lit":
        _, sign, atom = node
        args = []
        for t in atom.args:
            if isinstance(t, Var):
                args.append(env[t.name])
            else:
                args.append(t.name)
        return ("lit", Literal(sign, atom.predicate, tuple(args)))
    if tag in ("and", "or"):
        return (tag, _skolemize(node[1], env, universals, counter, namer),
                _skolemize(node[2], env, universals, counter, namer))
    _, var, body = node
    if tag == "all":
        v = next(counter)
        return _skolemize(body, {**env, var: v}, universals + [v], counter, namer)
    name = namer.fresh()
    term = (name, *universals) if universals else name
    return _skolemize(body, {**env, var: term}, universals, counter, namer)


def _term_vars(t: CTerm, out: dict) -> None:
    if isinstance(t, int):
        out[t] = None
    elif isinstance(t, tuple):
        for a in t[1:]:
            _term_vars(a, out)


def _simplify(lits) -> tuple | None:
    """Duplicate literals dropped, order kept; None for a tautology."""
    uniq = tuple(dict.fromkeys(lits))
    present = set(uniq)
    if any(lit.negated() in present for lit in uniq):
        return None
    return uniq


def _dedupe(clauses) -> list[tuple]:
    return list(dict.fromkeys(c for c in clauses if c is not None))


class _Cnf:
    def __init__(self, namer: SkolemNamer, threshold: int):
        self.namer = namer
        self.threshold = threshold
        self.definitions: list[tuple] = []

    def rename(self, clauses: list[tuple]) -> list[tuple]:
        found: dict = {}
        for clause in clauses:
            for lit in clause:
                for a in lit.args:
                    _term_vars(a, found)
        name = Literal(True, self.namer.fresh_definition(), tuple(found))
        self.definitions.extend(d for c in clauses if (d := _simplify((name.negated(), *c))) is not None)
        return [(name,)]

    def run(self, node) -> list[tuple]:
        tag = node[0]
        if tag == "lit":
            return [(node[1],)]
        left, right = self.run(node[1]), self.run(node[2])
        if tag == "and":
            return _dedupe(left + right)
        if len(left) * len(right) > self.threshold:
            if len(left) >= len(right):
                left = self.rename(left)
            if len(left) * len(right) > self.threshold:
                right = self.rename(right)
        return _dedupe(_simplify(a + b) for a in left for b in right)


def clausify(f: Formula, namer: SkolemNamer | None = None, *, threshold: int = RENAME_THRESHOLD) -> list[Clause]:
    """Satisfiability-preserving clause set for a closed formula.

    ``threshold=0`` disables renaming (plain distribution).

    Raises
    ------
    FreeVariableError
        If ``f`` has free variables.
    """
    free = free_variables(f)
    if free:
        raise FreeVariableError(free)
    namer = namer or SkolemNamer()
    cnf = _Cnf(namer, threshold if threshold > 0 else float("inf"))
    clauses: list[tuple] = []
    defs: list[Formula] = []
    formulas = [_name_operands(f, namer, defs, cnf.threshold)]
    while formulas or defs:
        g = formulas.pop() if formulas else defs.pop(0)
        clauses.extend(cnf.run(_skolemize(_nnf(g, True), {}, [], itertools.count(), namer)))
    out, seen = [], set()
    for lits in [*clauses, *cnf.definitions]:
        clause = make_clause(lits)
        if clause is not None and clause not in seen:
            seen.add(clause)
            out.append(clause)
    return out
