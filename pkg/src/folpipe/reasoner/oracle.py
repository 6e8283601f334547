"""Brute-force entailment by grounding over the constants and enumerating truth assignments.

Independent of clausification and resolution; used to cross-check :func:`prove`.
Ground formulas are split into conjuncts and their atoms into connected components
(atoms sharing a conjunct); each component's truth table is enumerated on its own,
in vectorized chunks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from folpipe.logic.analysis import free_variables
from folpipe.logic.errors import FreeVariableError
from folpipe.logic.syntax import (
    And,
    Atom,
    ForAll,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Var,
    Xor,
    atoms,
    constants,
)
from folpipe.reasoner.prover import Verdict

MAX_ATOMS = 24  # 2**24 assignments per component
CHUNK_BITS = 16


class BoundExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleResult:
    verdict: Verdict
    inconsistent: bool = False
    domain: tuple[str, ...] = ()


class _Grounder:
    def __init__(self, domain):
        self.domain = domain
        self.index: dict[tuple, int] = {}

    def atom_id(self, pred, args) -> int:
        key = (pred, args)
        if key not in self.index:
            self.index[key] = len(self.index)
        return self.index[key]

    def ground(self, f: Formula, env: dict):
        if isinstance(f, Atom):
            args = tuple(env[t.name] if isinstance(t, Var) else t.name for t in f.args)
            return ("atom", self.atom_id(f.predicate, args))
        if isinstance(f, Not):
            return ("not", self.ground(f.body, env))
        if isinstance(f, (And, Or, Implies, Iff, Xor)):
            return (type(f).__name__.lower(), self.ground(f.left, env), self.ground(f.right, env))
        op = "and" if isinstance(f, ForAll) else "or"
        parts = [self.ground(f.body, {**env, f.var: c}) for c in self.domain]
        node = parts[0]
        for p in parts[1:]:
            node = (op, node, p)
        return node


def _atoms_of(node, out: set):
    stack = [node]
    while stack:
        n = stack.pop()
        if n[0] == "atom":
            out.add(n[1])
        else:
            stack.extend(n[1:])
    return out


def _evaluate(node, columns):
    tag = node[0]
    if tag == "atom":
        return columns[node[1]]
    if tag == "not":
        return ~_evaluate(node[1], columns)
    a = _evaluate(node[1], columns)
    b = _evaluate(node[2], columns)
    if tag == "and":
        return a & b
    if tag == "or":
        return a | b
    if tag == "implies":
        return ~a | b
    if tag == "iff":
        return a == b
    if tag == "xor":
        return a != b
    raise ValueError(tag)


def _satisfiable_component(formulas, atom_ids: list[int], max_atoms: int) -> bool:
    k = len(atom_ids)
    if k > max_atoms:
        raise BoundExceeded(f"component with {k} ground atoms exceeds 2^{max_atoms} assignments")
    total = 1 << k
    chunk = min(total, 1 << CHUNK_BITS)
    for start in range(0, total, chunk):
        codes = np.arange(start, start + chunk, dtype=np.int64)
        columns = {aid: ((codes >> bit) & 1).astype(bool) for bit, aid in enumerate(atom_ids)}
        ok = np.ones(chunk, dtype=bool)
        for f in formulas:
            ok &= _evaluate(f, columns)
            if not ok.any():
                break
        if ok.any():
            return True
    return False


def _conjuncts(node, out: list) -> list:
    """Split a ground formula into conjuncts (through ¬¬, ¬∨ and ¬→) so components stay small."""
    stack = [node]
    while stack:
        n = stack.pop()
        if n[0] == "and":
            stack.extend((n[2], n[1]))
        elif n[0] == "not" and n[1][0] == "not":
            stack.append(n[1][1])
        elif n[0] == "not" and n[1][0] == "or":
            stack.extend((("not", n[1][2]), ("not", n[1][1])))
        elif n[0] == "not" and n[1][0] == "implies":
            stack.extend((("not", n[1][2]), n[1][1]))
        else:
            out.append(n)
    return out


def satisfiable(ground_formulas: list, max_atoms: int = MAX_ATOMS) -> bool:
    """Truth-table satisfiability of ground formulas, component by component."""
    ground_formulas = [c for g in ground_formulas for c in _conjuncts(g, [])]
    parent: dict[int, int] = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    atom_sets = [_atoms_of(g, set()) for g in ground_formulas]
    for ids in atom_sets:
        ids = sorted(ids)
        for a in ids[1:]:
            parent[find(a)] = find(ids[0])
        if ids:
            find(ids[0])
    groups: dict = {}
    for g, ids in zip(ground_formulas, atom_sets):
        root = find(min(ids)) if ids else None
        groups.setdefault(root, ([], set()))
        groups[root][0].append(g)
        groups[root][1].update(ids)
    for root in sorted(groups, key=lambda r: -1 if r is None else r):
        formulas, ids = groups[root]
        if not _satisfiable_component(formulas, sorted(ids), max_atoms):
            return False
    return True


def _existentials(f: Formula, positive: bool, under_universal: bool) -> int | None:
    """Existential witnesses needed by ``f`` in NNF; None if one sits below a universal."""
    if isinstance(f, Atom):
        return 0
    if isinstance(f, Not):
        return _existentials(f.body, not positive, under_universal)
    if isinstance(f, (And, Or)):
        parts = [_existentials(f.left, positive, under_universal), _existentials(f.right, positive, under_universal)]
    elif isinstance(f, Implies):
        parts = [_existentials(f.left, not positive, under_universal),
                 _existentials(f.right, positive, under_universal)]
    elif isinstance(f, (Iff, Xor)):
        # each side occurs under both polarities once expanded
        parts = [_existentials(side, pol, under_universal) for side in (f.left, f.right) for pol in (True, False)]
    else:
        universal = isinstance(f, ForAll) == positive
        if not universal and under_universal:
            return None
        inner = _existentials(f.body, positive, under_universal or universal)
        return None if inner is None else inner + (0 if universal else 1)
    if any(p is None for p in parts):
        return None
    return sum(parts)


def witnesses_needed(premises: list[Formula], conclusion: Formula) -> int | None:
    """Fresh elements that make the grounding oracle exact, or None outside the ∃*∀* class.

    When no existential occurs below a universal (in negation normal form, for the
    premises and for both polarities of the conclusion), a satisfiable set has a model
    made of its constants plus one element per existential, so grounding over that
    domain decides entailment exactly.
    """
    counts = [_existentials(p, True, False) for p in premises]
    counts += [_existentials(conclusion, True, False), _existentials(conclusion, False, False)]
    if any(c is None for c in counts):
        return None
    return sum(counts)


def grounding_oracle(
    premises: list[Formula],
    conclusion: Formula,
    *,
    max_constants: int = 6,
    max_predicates: int = 12,
    max_atoms: int = MAX_ATOMS,
    extra_elements: int = 0,
) -> OracleResult:
    """Entailment over the Herbrand domain of the problem's constants.

    With no constants one fresh element is used; ``extra_elements`` adds more
    anonymous elements. Inconsistent premises give True with ``inconsistent`` set.

    Raises
    ------
    BoundExceeded
        Too many constants or predicates, or a component above ``2**max_atoms`` assignments.
    """
    formulas = [*premises, conclusion]
    for f in formulas:
        free = free_variables(f)
        if free:
            raise FreeVariableError(free)
    names = sorted(set().union(*(constants(f) for f in formulas)))
    if len(names) > max_constants:
        raise BoundExceeded(f"{len(names)} constants > {max_constants}")
    preds = {a.predicate for f in formulas for a in atoms(f)}
    if len(preds) > max_predicates:
        raise BoundExceeded(f"{len(preds)} predicates > {max_predicates}")
    fresh = [f"$e{i}" for i in range(extra_elements)]
    if not names and not fresh:
        fresh = ["$e0"]
    domain = tuple(names + fresh)

    g = _Grounder(domain)
    ground_premises = [g.ground(f, {}) for f in premises]
    ground_conclusion = g.ground(conclusion, {})
    if not satisfiable(ground_premises, max_atoms):
        return OracleResult(Verdict.TRUE, inconsistent=True, domain=domain)
    if not satisfiable(ground_premises + [("not", ground_conclusion)], max_atoms):
        return OracleResult(Verdict.TRUE, domain=domain)
    if not satisfiable(ground_premises + [ground_conclusion], max_atoms):
        return OracleResult(Verdict.FALSE, domain=domain)
    return OracleResult(Verdict.UNCERTAIN, domain=domain)
