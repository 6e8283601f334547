"""Predicate sets, arity consistency, subject/predicate conflicts and coverage/usage metrics."""

from __future__ import annotations

import re
from collections import Counter
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from fractions import Fraction

from folpipe.logic.block import split_declarations, split_gloss
from folpipe.logic.syntax import Const, Statement, atoms

_DECL = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)\s*(?:\(\s*(.*?)\s*\))?\Z")
_ARG = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True, order=True)
class PredicateSignature:
    name: str
    arity: int

    def __post_init__(self):
        if not self.name:
            raise ValueError("predicate name must be non-empty")
        if self.arity < 0:
            raise ValueError("arity must be non-negative")

    def __str__(self) -> str:
        return f"{self.name}/{self.arity}"

    def declaration(self) -> str:
        """``Prereq(x, y)``-style declaration with placeholder variables."""
        if self.arity == 0:
            return self.name
        names = "xyzwvu"
        args = [names[i] if i < len(names) else f"x{i}" for i in range(self.arity)]
        return f"{self.name}({', '.join(args)})"


class PredicateSet:
    """Set of signatures that also remembers how often each one was seen.

    Set operations (``&``, ``|``, ``len``, ``in``) look at signatures only; the
    occurrence counts feed the verifier's majority rule.
    """

    __slots__ = ("_counts",)

    def __init__(self, items: Iterable[PredicateSignature] | Counter | None = None):
        if isinstance(items, Counter):
            counts = Counter({k: v for k, v in items.items() if v > 0})
        else:
            counts = Counter(items or ())
        self._counts = counts

    @classmethod
    def of(cls, *specs: str) -> PredicateSet:
        """``PredicateSet.of("Quiet/1", "Sees/2")``."""
        sigs = []
        for spec in specs:
            name, arity = spec.rsplit("/", 1)
            sigs.append(PredicateSignature(name, int(arity)))
        return cls(sigs)

    def __iter__(self) -> Iterator[PredicateSignature]:
        return iter(sorted(self._counts))

    def __len__(self) -> int:
        return len(self._counts)

    def __contains__(self, sig) -> bool:
        return sig in self._counts

    def __eq__(self, other) -> bool:
        if isinstance(other, PredicateSet):
            return set(self._counts) == set(other._counts)
        if isinstance(other, (set, frozenset)):
            return set(self._counts) == other
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._counts))

    def __and__(self, other: PredicateSet) -> PredicateSet:
        return PredicateSet(Counter({k: v for k, v in self._counts.items() if k in other}))

    def __or__(self, other: PredicateSet) -> PredicateSet:
        return PredicateSet(self._counts + other._counts)

    def __repr__(self) -> str:
        return "PredicateSet({" + ", ".join(map(str, self)) + "})"

    def count(self, sig: PredicateSignature) -> int:
        return self._counts.get(sig, 0)

    @property
    def counts(self) -> Counter:
        return Counter(self._counts)

    @property
    def names(self) -> set[str]:
        return {s.name for s in self._counts}

    def signatures(self) -> frozenset[PredicateSignature]:
        return frozenset(self._counts)

    def to_line(self) -> str:
        """One ``;``-separated line, the form used when embedding predicates in a prompt."""
        return "; ".join(s.declaration() for s in self)


@dataclass(frozen=True)
class DeclarationDefect:
    line: int
    text: str
    detail: str


def parse_declaration(text: str) -> PredicateSignature | None:
    m = _DECL.match(text.strip())
    if m is None:
        return None
    inner = m.group(2)
    if inner is None or inner == "":
        return PredicateSignature(m.group(1), 0)
    args = [a.strip() for a in inner.split(",")]
    if not all(_ARG.match(a) for a in args):
        return None
    return PredicateSignature(m.group(1), len(args))


def parse_predicate_decls(section: Iterable[str], defects: list | None = None) -> PredicateSet:
    """Read the Predicates section; glosses are ignored and ``;``-joined lines are split.

    Malformed lines are skipped. When ``defects`` is a list, one
    :class:`DeclarationDefect` per skipped line is appended to it.
    """
    sigs = []
    for i, item in enumerate(split_declarations(list(section))):
        decl, _ = split_gloss(item)
        sig = parse_declaration(decl)
        if sig is None:
            if defects is not None:
                defects.append(DeclarationDefect(i, decl, "malformed predicate declaration"))
            continue
        sigs.append(sig)
    return PredicateSet(sigs)


def extract_used_predicates(statements: Iterable[Statement]) -> PredicateSet:
    counts: Counter = Counter()
    for st in statements:
        if st.formula is None:
            continue
        for a in atoms(st.formula):
            counts[PredicateSignature(a.predicate, a.arity)] += 1
    return PredicateSet(counts)


@dataclass(frozen=True)
class ArityConflict:
    name: str
    arities: tuple[int, ...]
    occurrences: dict = field(compare=False, default_factory=dict)

    def __str__(self) -> str:
        return f"{self.name}: {{{', '.join(map(str, self.arities))}}}"


def check_arity_consistency(declared: PredicateSet, used: PredicateSet | None = None) -> list[ArityConflict]:
    """One conflict per name seen with two or more arities across ``declared`` and ``used``."""
    combined = declared.counts
    if used is not None:
        combined.update(used.counts)
    by_name: dict[str, Counter] = {}
    for sig, n in combined.items():
        by_name.setdefault(sig.name, Counter())[sig.arity] += n
    return [
        ArityConflict(name, tuple(sorted(ar)), dict(sorted(ar.items())))
        for name, ar in sorted(by_name.items())
        if len(ar) > 1
    ]


@dataclass(frozen=True)
class SubjectPredicateConflict:
    name: str
    predicate: str
    constant: str
    statement_index: int


def detect_subject_predicate_conflict(statements: list[Statement]) -> list[SubjectPredicateConflict]:
    """Names used both as a predicate and as a constant argument (case-insensitive)."""
    predicates: dict[str, str] = {}
    constants: dict[str, tuple[str, int]] = {}
    for i, st in enumerate(statements):
        if st.formula is None:
            continue
        for a in atoms(st.formula):
            predicates.setdefault(a.predicate.lower(), a.predicate)
            for t in a.args:
                if isinstance(t, Const):
                    constants.setdefault(t.name.lower(), (t.name, i))
    out = []
    for key in sorted(predicates.keys() & constants.keys()):
        const, index = constants[key]
        out.append(SubjectPredicateConflict(predicates[key], predicates[key], const, index))
    return out


@dataclass(frozen=True)
class PredicateMetrics:
    coverage: Fraction
    usage: Fraction
    valid: bool
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "coverage": float(self.coverage),
            "usage": float(self.usage),
            "valid": self.valid,
            "degenerate": self.degenerate,
        }

    @classmethod
    def from_dict(cls, d: dict) -> PredicateMetrics:
        return cls(
            Fraction(d["coverage"]).limit_denominator(10_000),
            Fraction(d["usage"]).limit_denominator(10_000),
            bool(d["valid"]),
            bool(d.get("degenerate", False)),
        )


def compute_metrics(px: PredicateSet, py: PredicateSet, valid: bool = True, *, match: str = "arity") -> PredicateMetrics:
    """Coverage = |Px ∩ Py| / |Py| and usage = |Px ∩ Py| / |Px|.

    ``match="arity"`` compares (name, arity) pairs; ``match="name"`` ignores arity.
    An empty denominator yields 1 and sets ``degenerate``.
    """
    if match == "arity":
        xs, ys = set(px.signatures()), set(py.signatures())
    elif match == "name":
        xs, ys = px.names, py.names
    else:
        raise ValueError(f"unknown match mode {match!r}")
    both = len(xs & ys)
    degenerate = not xs or not ys
    coverage = Fraction(both, len(ys)) if ys else Fraction(1)
    usage = Fraction(both, len(xs)) if xs else Fraction(1)
    return PredicateMetrics(coverage, usage, valid, degenerate)
