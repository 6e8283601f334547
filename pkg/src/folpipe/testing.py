"""Seeded random generators for formulas and reasoning instances (property tests, fuzzing)."""

from __future__ import annotations

import random
from dataclasses import dataclass

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
    atoms,
    constants,
)
from folpipe.predicates import PredicateSet, PredicateSignature
from folpipe.reasoner.oracle import witnesses_needed

PREDICATE_NAMES = ["Quiet", "Red", "Young", "Sees", "Likes", "Visits", "Green", "Rough", "Furry", "Chases",
                   "Kind", "Big", "Owns", "Rain"]
CONSTANT_NAMES = ["Anne", "Bob", "Erin", "Fiona", "yale", "emily", "Tiger", "c_1"]
BOUND_NAMES = ["x", "y", "z", "w", "u", "v", "person", "thing"]
FREE_NAMES = ["x", "y", "z", "x1", "y2"]
_BINARY = [And, Or, Implies, Iff, Xor]


def random_formula(
    rng: random.Random,
    depth: int = 8,
    max_arity: int = 4,
    *,
    signatures: dict[str, int] | None = None,
    constants: list[str] | None = None,
    closed: bool = False,
    _scope: tuple[str, ...] = (),
) -> Formula:
    """A random formula of depth at most ``depth``.

    With ``signatures`` each predicate keeps one arity; with ``closed`` only bound
    variables appear in atoms (constants fill in when no variable is in scope).
    """
    constants = constants or CONSTANT_NAMES
    if depth <= 0 or rng.random() < 0.2:
        return _random_atom(rng, max_arity, signatures, constants, closed, _scope)
    r = rng.random()
    if r < 0.15:
        return Not(random_formula(rng, depth - 1, max_arity, signatures=signatures, constants=constants,
                                  closed=closed, _scope=_scope))
    if r < 0.35:
        var = rng.choice(BOUND_NAMES)
        q = rng.choice([ForAll, Exists])
        return q(var, random_formula(rng, depth - 1, max_arity, signatures=signatures, constants=constants,
                                     closed=closed, _scope=_scope + (var,)))
    node = rng.choice(_BINARY)
    kw = {"signatures": signatures, "constants": constants, "closed": closed, "_scope": _scope}
    return node(random_formula(rng, depth - 1, max_arity, **kw), random_formula(rng, depth - 1, max_arity, **kw))


def _random_atom(rng, max_arity, signatures, constants, closed, scope) -> Atom:
    if signatures:
        name = rng.choice(sorted(signatures))
        arity = signatures[name]
    else:
        name = rng.choice(PREDICATE_NAMES)
        arity = rng.randint(0, max_arity)
    args = []
    for _ in range(arity):
        r = rng.random()
        if scope and r < 0.6:
            args.append(Var(rng.choice(scope)))
        elif not closed and r < 0.7:
            free = [n for n in FREE_NAMES if n not in scope]
            args.append(Var(rng.choice(free)))
        else:
            args.append(Const(rng.choice(constants)))
    return Atom(name, tuple(args))


def random_propositional(rng: random.Random, depth: int = 5, n_atoms: int = 4) -> Formula:
    """A random 0-ary formula over atoms A, B, C, ..."""
    names = [chr(ord("A") + i) for i in range(n_atoms)]
    if depth <= 0 or rng.random() < 0.2:
        return Atom(rng.choice(names))
    if rng.random() < 0.2:
        return Not(random_propositional(rng, depth - 1, n_atoms))
    node = rng.choice(_BINARY)
    return node(random_propositional(rng, depth - 1, n_atoms), random_propositional(rng, depth - 1, n_atoms))


@dataclass(frozen=True)
class Instance:
    premises: tuple[Formula, ...]
    conclusion: Formula
    witnesses: int = 0  # fresh elements the grounding oracle needs to be exact

    @property
    def constants(self) -> set[str]:
        return set().union(*(constants(f) for f in (*self.premises, self.conclusion)))


def random_instance(
    rng: random.Random,
    *,
    max_constants: int = 4,
    max_predicates: int = 5,
    max_premises: int = 8,
    max_depth: int = 4,
    max_ground_atoms: int = 24,
) -> Instance:
    """A closed, function-free entailment problem the grounding oracle decides exactly.

    Formulas are drawn until no existential falls below a universal, and the ground
    base over the constants plus the needed witnesses stays within ``max_ground_atoms``.
    """
    while True:
        n_consts = rng.randint(1, max_constants)
        consts = rng.sample(CONSTANT_NAMES, n_consts)
        names = rng.sample([n for n in PREDICATE_NAMES if n != "Rain"], rng.randint(1, max_predicates))
        signatures = {name: rng.choice([0, 1, 1, 1, 2]) for name in names}
        premises = [_bs_formula(rng, signatures, consts, max_depth, conclusion=False)
                    for _ in range(rng.randint(1, max_premises))]
        conclusion = _bs_formula(rng, signatures, consts, min(max_depth, 2), conclusion=True)
        extra = witnesses_needed(premises, conclusion)
        instance = Instance(tuple(premises), conclusion, extra)
        size = len(instance.constants) + extra or 1
        used = {a.predicate: a.arity for f in (*premises, conclusion) for a in atoms(f)}
        if sum(size ** arity for arity in used.values()) <= max_ground_atoms:
            return instance


def _bs_formula(rng, signatures, consts, max_depth, conclusion) -> Formula:
    # rejection sampling into the ∃*∀* class; the conclusion is checked under both polarities
    while True:
        f = _instance_formula(rng, signatures, consts, max_depth)
        check = witnesses_needed([], f) if conclusion else witnesses_needed([f], Atom("Rain"))
        if check is not None:
            return f


def _instance_formula(rng, signatures, consts, max_depth) -> Formula:
    shape = rng.random()
    if shape < 0.3:
        atom = _random_atom(rng, 2, signatures, consts, True, ())
        return Not(atom) if rng.random() < 0.3 else atom
    if shape < 0.7:
        # rule: ∀x (body → head), the common shape of ProofWriter-like data
        body = random_formula(rng, max(0, min(2, max_depth - 2)), 2, signatures=signatures, constants=consts,
                              closed=True, _scope=("x",))
        head = random_formula(rng, max(0, min(1, max_depth - 2)), 2, signatures=signatures, constants=consts,
                              closed=True, _scope=("x",))
        return ForAll("x", Implies(body, head))
    return random_formula(rng, rng.randint(1, max_depth), 2, signatures=signatures, constants=consts, closed=True)


def random_predicate_set(rng: random.Random, pool: int = 8, max_arity: int = 3) -> PredicateSet:
    names = PREDICATE_NAMES[:pool]
    sigs = set()
    for _ in range(rng.randint(0, pool)):
        sigs.add(PredicateSignature(rng.choice(names), rng.randint(0, max_arity)))
    return PredicateSet(sigs)
