"""Given-clause resolution prover with subsumption and resource limits."""

from __future__ import annotations

import enum
import heapq
import itertools
import logging
import time
from dataclasses import dataclass, field

from folpipe.logic.analysis import free_variables
from folpipe.logic.syntax import Formula, Not, Statement
from folpipe.predicates import check_arity_consistency, extract_used_predicates
from folpipe.reasoner.clauses import Clause, Literal, SkolemNamer, clausify, make_clause
from folpipe.taxonomy import ErrorKind, ErrorReport

log = logging.getLogger(__name__)


class Verdict(enum.Enum):
    TRUE = "True"
    FALSE = "False"
    UNCERTAIN = "Uncertain"
    ERROR = "Error"

    @classmethod
    def parse(cls, label: str) -> Verdict:
        key = label.strip().lower()
        aliases = {"true": cls.TRUE, "false": cls.FALSE, "uncertain": cls.UNCERTAIN,
                   "unknown": cls.UNCERTAIN, "error": cls.ERROR}
        if key not in aliases:
            raise ValueError(f"unknown label {label!r}")
        return aliases[key]


@dataclass(frozen=True)
class ProofLimits:
    max_clauses: int = 10_000
    max_seconds: float = 5.0
    max_clause_weight: int = 40

    def __post_init__(self):
        if self.max_clauses <= 0 or self.max_seconds <= 0 or self.max_clause_weight <= 0:
            raise ValueError("proof limits must be positive")

    @classmethod
    def parse(cls, spec: str) -> ProofLimits:
        """``"max_clauses=10000,max_seconds=5"``; omitted fields keep their defaults."""
        kwargs = {}
        for item in filter(None, (s.strip() for s in spec.split(","))):
            key, _, value = item.partition("=")
            key = key.strip()
            if key not in ("max_clauses", "max_seconds", "max_clause_weight"):
                raise ValueError(f"unknown limit {key!r}")
            kwargs[key] = float(value) if key == "max_seconds" else int(value)
        return cls(**kwargs)


class SearchOutcome(enum.Enum):
    REFUTED = "refuted"
    SATURATED = "saturated"
    EXHAUSTED = "exhausted"


@dataclass(frozen=True)
class ProofResult:
    verdict: Verdict
    inconsistent: bool = False
    error: ErrorReport | None = None
    searches: tuple = ()

    @property
    def executed(self) -> bool:
        return self.verdict is not Verdict.ERROR

    @property
    def timed_out(self) -> bool:
        return any(s == SearchOutcome.EXHAUSTED for s in self.searches)


# --- unification -----------------------------------------------------------


def _walk(t, subst):
    while isinstance(t, int) and t in subst:
        t = subst[t]
    return t


def _occurs(v, t, subst) -> bool:
    t = _walk(t, subst)
    if t == v and isinstance(t, int):
        return True
    if isinstance(t, tuple):
        return any(_occurs(v, a, subst) for a in t[1:])
    return False


def unify(a, b, subst: dict) -> dict | None:
    a, b = _walk(a, subst), _walk(b, subst)
    if isinstance(a, int) and isinstance(b, int) and a == b:
        return subst
    if isinstance(a, int):
        if _occurs(a, b, subst):
            return None
        return {**subst, a: b}
    if isinstance(b, int):
        return unify(b, a, subst)
    if isinstance(a, str) or isinstance(b, str):
        return subst if a == b else None
    if a[0] != b[0] or len(a) != len(b):
        return None
    for x, y in zip(a[1:], b[1:]):
        subst = unify(x, y, subst)
        if subst is None:
            return None
    return subst


def _unify_args(xs, ys, subst):
    if len(xs) != len(ys):
        return None
    for x, y in zip(xs, ys):
        subst = unify(x, y, subst)
        if subst is None:
            return None
    return subst


def _apply(t, subst):
    t = _walk(t, subst)
    if isinstance(t, tuple):
        return (t[0], *(_apply(a, subst) for a in t[1:]))
    return t


def _apply_lit(lit: Literal, subst) -> Literal:
    return Literal(lit.positive, lit.predicate, tuple(_apply(a, subst) for a in lit.args))


def _shift(t, offset):
    if isinstance(t, int):
        return t + offset
    if isinstance(t, tuple):
        return (t[0], *(_shift(a, offset) for a in t[1:]))
    return t


def _max_var(t) -> int:
    if isinstance(t, int):
        return t
    if isinstance(t, tuple):
        return max((_max_var(a) for a in t[1:]), default=-1)
    return -1


# --- subsumption -------------------------------------------------------------


def _match(p, t, theta):
    """One-way matching: only variables of ``p`` bind; variables of ``t`` are rigid."""
    if isinstance(p, int):
        if p in theta:
            return theta if theta[p] == t else None
        return {**theta, p: t}
    if isinstance(p, str):
        return theta if p == t else None
    if not isinstance(t, tuple) or t[0] != p[0] or len(t) != len(p):
        return None
    for x, y in zip(p[1:], t[1:]):
        theta = _match(x, y, theta)
        if theta is None:
            return None
    return theta


def subsumes(c: Clause, d: Clause) -> bool:
    if len(c) > len(d):
        return False
    return _subsume_from(c.literals, 0, d.literals, {})


def _subsume_from(cl, i, dl, theta) -> bool:
    if i == len(cl):
        return True
    lit = cl[i]
    for other in dl:
        if other.positive != lit.positive or other.predicate != lit.predicate or len(other.args) != len(lit.args):
            continue
        t = theta
        for x, y in zip(lit.args, other.args):
            t = _match(x, y, t)
            if t is None:
                break
        if t is not None and _subsume_from(cl, i + 1, dl, t):
            return True
    return False


# --- inference ---------------------------------------------------------------


def resolvents(c1: Clause, c2: Clause) -> list[Clause]:
    offset = 1 + max((_max_var(a) for lit in c1.literals for a in lit.args), default=-1)
    lits2 = [Literal(l.positive, l.predicate, tuple(_shift(a, offset) for a in l.args)) for l in c2.literals]
    out = []
    for i, a in enumerate(c1.literals):
        for j, b in enumerate(lits2):
            if a.positive == b.positive or a.predicate != b.predicate:
                continue
            subst = _unify_args(a.args, b.args, {})
            if subst is None:
                continue
            rest = [_apply_lit(l, subst) for k, l in enumerate(c1.literals) if k != i]
            rest += [_apply_lit(l, subst) for k, l in enumerate(lits2) if k != j]
            clause = make_clause(rest)
            if clause is not None:
                out.append(clause)
    return out


def factors(c: Clause) -> list[Clause]:
    out = []
    lits = c.literals
    for i, j in itertools.combinations(range(len(lits)), 2):
        a, b = lits[i], lits[j]
        if a.positive != b.positive or a.predicate != b.predicate:
            continue
        subst = _unify_args(a.args, b.args, {})
        if subst is None:
            continue
        clause = make_clause(_apply_lit(l, subst) for l in lits)
        if clause is not None and len(clause) < len(c):
            out.append(clause)
    return out


@dataclass
class _Search:
    limits: ProofLimits
    deadline: float
    kept: int = 0
    discarded: bool = False
    usable: list = field(default_factory=list)
    sos: list = field(default_factory=list)
    seen: set = field(default_factory=set)
    seq: itertools.count = field(default_factory=itertools.count)

    def forward_subsumed(self, c: Clause) -> bool:
        return any(subsumes(u, c) for u in self.usable)

    def push(self, c: Clause) -> bool:
        """Queue ``c``; returns True when it is the empty clause."""
        if c.is_empty:
            return True
        if c in self.seen:
            return False
        if c.weight > self.limits.max_clause_weight:
            self.discarded = True
            return False
        if self.forward_subsumed(c):
            return False
        self.seen.add(c)
        self.kept += 1
        heapq.heappush(self.sos, (c.weight, next(self.seq), c))
        return False

    def run(self, clauses: list[Clause]) -> SearchOutcome:
        for c in clauses:
            if self.push(c):
                return SearchOutcome.REFUTED
        while self.sos:
            if self.kept > self.limits.max_clauses or time.monotonic() > self.deadline:
                return SearchOutcome.EXHAUSTED
            _, _, given = heapq.heappop(self.sos)
            if self.forward_subsumed(given):
                continue
            self.usable = [u for u in self.usable if not subsumes(given, u)]
            self.usable.append(given)
            new = factors(given)
            for other in self.usable:
                new.extend(resolvents(given, other))
                if time.monotonic() > self.deadline:
                    return SearchOutcome.EXHAUSTED
            for c in new:
                if self.push(c):
                    return SearchOutcome.REFUTED
        return SearchOutcome.EXHAUSTED if self.discarded else SearchOutcome.SATURATED


def refute(clauses: list[Clause], limits: ProofLimits = ProofLimits(), deadline: float | None = None) -> SearchOutcome:
    """Search for the empty clause; smallest weight first, FIFO on ties."""
    if deadline is None:
        deadline = time.monotonic() + limits.max_seconds
    return _Search(limits, deadline).run(clauses)


def validate(formulas: list[Formula]) -> ErrorReport | None:
    """Checks that pre-empt proving: unbound variables and predicates with several arities."""
    for i, f in enumerate(formulas):
        free = free_variables(f)
        if free:
            return ErrorReport(ErrorKind.MISSING_QUANTIFIER, f"unbound variables: {', '.join(sorted(free))}",
                               None, i)
    used = extract_used_predicates([Statement("", f) for f in formulas])
    conflicts = check_arity_consistency(used)
    if conflicts:
        names = ", ".join(str(c) for c in conflicts)
        return ErrorReport(ErrorKind.ARITY_MISMATCH, f"The following symbols are used with multiple arities: {names}")
    return None


def prove(premises: list[Formula], conclusion: Formula, limits: ProofLimits = ProofLimits()) -> ProofResult:
    """Decide whether the premises entail the conclusion, its negation, or neither.

    Two refutation searches always run, first for premises ∪ {¬conclusion}, then for
    premises ∪ {conclusion}. When both succeed the premises are inconsistent; the
    verdict is then True with ``inconsistent`` set.
    """
    error = validate([*premises, conclusion])
    if error is not None:
        return ProofResult(Verdict.ERROR, error=error)
    start = time.monotonic()
    namer = SkolemNamer()
    base = [c for p in premises for c in clausify(p, namer)]
    goals = [clausify(Not(conclusion), namer), clausify(conclusion, namer)]
    outcomes = []
    for k, goal in enumerate(goals):
        remaining = limits.max_seconds - (time.monotonic() - start)
        deadline = time.monotonic() + max(remaining, 0.0) / (len(goals) - k)
        outcomes.append(refute(base + goal, limits, deadline))
    proved, disproved = (o is SearchOutcome.REFUTED for o in outcomes)
    if proved:
        verdict = Verdict.TRUE
    elif disproved:
        verdict = Verdict.FALSE
    else:
        verdict = Verdict.UNCERTAIN
    log.debug("prove: %s / %s -> %s", outcomes[0].value, outcomes[1].value, verdict.value)
    return ProofResult(verdict, inconsistent=proved and disproved, searches=tuple(outcomes))
