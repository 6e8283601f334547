"""Classification of translation failures into error groups and kinds, plus heatmap counts."""

from __future__ import annotations

import csv
import enum
import io
import json
import re
from collections import Counter
from collections.abc import Iterable
from dataclasses import dataclass

from folpipe.logic.analysis import (
    free_variables,
    ground_atoms_in_quantifier_scope,
    requantified_implication,
    vacuous_quantifiers,
)
from folpipe.logic.block import TranslationRecord
from folpipe.logic.errors import FormattingFailure, ParseCause, ParseFailure
from folpipe.logic.parser import parse_with_spans
from folpipe.logic.syntax import Statement, atoms
from folpipe.predicates import (
    PredicateSet,
    check_arity_consistency,
    detect_subject_predicate_conflict,
    extract_used_predicates,
    parse_predicate_decls,
)


class ErrorGroup(enum.Enum):
    TOKEN = "Token"
    PARSING = "Parsing"
    TYPE = "Type"
    PREDICATE = "Predicate"
    FORMATTING = "Formatting"


class ErrorKind(enum.Enum):
    MISSING_QUANTIFIER = "MissingQuantifier"
    PARENTHESIS_ERROR = "ParenthesisError"
    COMPLETION_ERROR = "CompletionError"
    QUANTIFIER_LOCATION = "QuantifierLocation"
    MISSING_VARIABLE = "MissingVariable"
    SPECIAL_TOKEN = "SpecialToken"
    UNKNOWN_OPERATOR = "UnknownOperator"
    ARITY_MISMATCH = "ArityMismatch"
    SUBJECT_PREDICATE_CONFLICT = "SubjectPredicateConflict"
    FORMAT_VIOLATION = "FormatViolation"

    @property
    def group(self) -> ErrorGroup:
        return _GROUP_OF[self]


_GROUP_OF = {
    ErrorKind.MISSING_QUANTIFIER: ErrorGroup.PARSING,
    ErrorKind.PARENTHESIS_ERROR: ErrorGroup.PARSING,
    ErrorKind.COMPLETION_ERROR: ErrorGroup.PARSING,
    ErrorKind.QUANTIFIER_LOCATION: ErrorGroup.TYPE,
    ErrorKind.MISSING_VARIABLE: ErrorGroup.TYPE,
    ErrorKind.SPECIAL_TOKEN: ErrorGroup.TOKEN,
    ErrorKind.UNKNOWN_OPERATOR: ErrorGroup.TOKEN,
    ErrorKind.ARITY_MISMATCH: ErrorGroup.PREDICATE,
    ErrorKind.SUBJECT_PREDICATE_CONFLICT: ErrorGroup.PREDICATE,
    ErrorKind.FORMAT_VIOLATION: ErrorGroup.FORMATTING,
}

# headline selection; lexing fails before parsing, parsing before arity checks
PRIORITY = (ErrorGroup.FORMATTING, ErrorGroup.TOKEN, ErrorGroup.PARSING, ErrorGroup.TYPE, ErrorGroup.PREDICATE)

_CAUSE_KIND = {
    ParseCause.EMPTY: ErrorKind.COMPLETION_ERROR,
    ParseCause.TOO_LONG: ErrorKind.COMPLETION_ERROR,
    ParseCause.TOO_DEEP: ErrorKind.PARENTHESIS_ERROR,
    ParseCause.UNBALANCED_PAREN: ErrorKind.PARENTHESIS_ERROR,
    ParseCause.UNEXPECTED_END: ErrorKind.COMPLETION_ERROR,
    ParseCause.TRAILING_TEXT: ErrorKind.COMPLETION_ERROR,
    ParseCause.UNKNOWN_OPERATOR: ErrorKind.UNKNOWN_OPERATOR,
    ParseCause.SPECIAL_TOKEN: ErrorKind.SPECIAL_TOKEN,
}


@dataclass(frozen=True)
class ErrorReport:
    kind: ErrorKind
    detail: str
    section: str | None = None
    statement_index: int | None = None
    span: tuple[int, int] | None = None

    @property
    def group(self) -> ErrorGroup:
        return self.kind.group

    def to_dict(self) -> dict:
        return {
            "group": self.group.value,
            "kind": self.kind.value,
            "section": self.section,
            "statement_index": self.statement_index,
            "span": list(self.span) if self.span else None,
            "detail": self.detail,
        }

    @classmethod
    def from_dict(cls, d: dict) -> ErrorReport:
        span = d.get("span")
        return cls(ErrorKind(d["kind"]), d.get("detail", ""), d.get("section"), d.get("statement_index"),
                   tuple(span) if span else None)


def kind_for_parse_failure(exc: ParseFailure) -> ErrorKind:
    if exc.cause is ParseCause.UNEXPECTED_TOKEN:
        return ErrorKind.PARENTHESIS_ERROR if exc.fragment in ("(", ")", ",") else ErrorKind.COMPLETION_ERROR
    return _CAUSE_KIND[exc.cause]


_FEEDBACK = [
    (re.compile(r"NoneType", re.IGNORECASE), ErrorGroup.TYPE),
    (re.compile(r"used with multiple arities", re.IGNORECASE), ErrorGroup.PREDICATE),
    (re.compile(r"term cannot be constructed", re.IGNORECASE), ErrorGroup.PARSING),
    (re.compile(r"unexpected token", re.IGNORECASE), ErrorGroup.TOKEN),
]
_FEEDBACK_DEFAULT = {
    ErrorGroup.TYPE: ErrorKind.MISSING_VARIABLE,
    ErrorGroup.PREDICATE: ErrorKind.ARITY_MISMATCH,
    ErrorGroup.PARSING: ErrorKind.PARENTHESIS_ERROR,
}
_QUOTED = re.compile(r"""token\s*:?\s*['"]?([^'"\s]+)""", re.IGNORECASE)


def classify_feedback(feedback: str) -> ErrorKind | None:
    """Map a prover error message onto a kind, or None when no pattern matches."""
    for pattern, group in _FEEDBACK:
        if pattern.search(feedback):
            if group is ErrorGroup.TOKEN:
                m = _QUOTED.search(feedback)
                token = m.group(1) if m else ""
                if re.search(r"[0-9$%@#'\"]", token):
                    return ErrorKind.SPECIAL_TOKEN
                return ErrorKind.UNKNOWN_OPERATOR
            return _FEEDBACK_DEFAULT[group]
    return None


def classify_statement(st: Statement, index: int | None = None, section: str | None = None,
                       explained: frozenset[str] = frozenset()) -> list[ErrorReport]:
    """Defects visible in one statement on its own.

    Ground atoms whose predicate is in ``explained`` are not flagged as missing a
    variable; the caller reports them as an arity conflict instead.
    """
    if st.formula is None:
        exc = st.error
        if exc is None:
            return [ErrorReport(ErrorKind.COMPLETION_ERROR, "statement did not parse", section, index)]
        return [ErrorReport(kind_for_parse_failure(exc), str(exc), section, index, exc.span)]
    f = st.formula
    out = []
    free = free_variables(f)
    if free:
        out.append(ErrorReport(ErrorKind.MISSING_QUANTIFIER, f"unbound variables: {', '.join(sorted(free))}",
                               section, index))
    try:
        _, spans = parse_with_spans(st.text)
    except ParseFailure:
        spans = None
    requantified = requantified_implication(f)
    if requantified:
        out.append(ErrorReport(ErrorKind.QUANTIFIER_LOCATION,
                               f"re-quantified across implication: {', '.join(sorted(requantified))}",
                               section, index))
    for vq in vacuous_quantifiers(f, spans):
        out.append(ErrorReport(ErrorKind.MISSING_VARIABLE, f"quantified variable {vq.var} is unused",
                               section, index, vq.span))
    for a in ground_atoms_in_quantifier_scope(f):
        if a.predicate in explained:
            continue
        args = ", ".join(t.name for t in a.args)
        out.append(ErrorReport(ErrorKind.MISSING_VARIABLE, f"constant fact {a.predicate}({args}) under a quantifier",
                               section, index))
    return out


def classify_statements(
    statements: list[Statement],
    declared: PredicateSet | None = None,
    n_premises: int | None = None,
) -> list[ErrorReport]:
    """Per-statement defects followed by cross-statement predicate checks."""
    if n_premises is None:
        n_premises = len(statements)

    def where(i):
        return ("premises", i) if i < n_premises else ("conclusion", 0)

    used = extract_used_predicates(statements)
    conflicts = check_arity_consistency(declared or PredicateSet(), used)
    # a quantified constant fact of a conflicted predicate is that conflict's short use
    explained = frozenset(c.name for c in conflicts)
    reports = []
    for i, st in enumerate(statements):
        section, j = where(i)
        reports.extend(classify_statement(st, j, section, explained))

    for conflict in conflicts:
        first = _first_minority_use(statements, conflict)
        section, j = where(first) if first is not None else ("predicates", None)
        reports.append(ErrorReport(ErrorKind.ARITY_MISMATCH, f"{conflict.name} used with arities {conflict}",
                                   section, j))
    for c in detect_subject_predicate_conflict(statements):
        section, j = where(c.statement_index)
        reports.append(ErrorReport(ErrorKind.SUBJECT_PREDICATE_CONFLICT,
                                   f"{c.constant} is both a constant and the predicate {c.predicate}",
                                   section, j))
    return reports


def _first_minority_use(statements, conflict) -> int | None:
    """Index of the first statement using the name with an arity other than the most common one."""
    majority = max(conflict.occurrences.items(), key=lambda kv: (kv[1], -kv[0]))[0]
    first_any = None
    for i, st in enumerate(statements):
        if st.formula is None:
            continue
        for a in atoms(st.formula):
            if a.predicate == conflict.name:
                if first_any is None:
                    first_any = i
                if a.arity != majority:
                    return i
    return first_any


def classify(
    record_text: str,
    parsed: TranslationRecord | FormattingFailure,
    prover_feedback: str | None = None,
    declared: PredicateSet | None = None,
) -> list[ErrorReport]:
    """All defects of one generation; an empty list means a clean record.

    ``declared`` overrides the record's own Predicates section (the incremental
    pipeline passes the stage-1 set here). Feedback from an external prover only adds
    a report when structural analysis found nothing of the same or any group.
    """
    if isinstance(parsed, FormattingFailure):
        return [ErrorReport(ErrorKind.FORMAT_VIOLATION, parsed.reason)]
    reports = []
    if declared is None:
        defects: list = []
        declared = parse_predicate_decls(parsed.predicate_lines, defects)
        for d in defects:
            kind = ErrorKind.PARENTHESIS_ERROR if d.text.count("(") != d.text.count(")") else ErrorKind.COMPLETION_ERROR
            reports.append(ErrorReport(kind, f"{d.detail}: {d.text!r}", "predicates", d.line))
    reports.extend(classify_statements(parsed.statements, declared, len(parsed.premises)))
    if prover_feedback:
        kind = classify_feedback(prover_feedback)
        if kind is not None and not reports:
            reports.append(ErrorReport(kind, prover_feedback.strip()[:200]))
    return reports


def headline(reports: Iterable[ErrorReport]) -> ErrorReport | None:
    """Highest-priority report: Formatting, then Token, Parsing, Type, Predicate."""
    reports = list(reports)
    if not reports:
        return None
    return min(reports, key=lambda r: PRIORITY.index(r.group))


class ErrorHeatmap:
    """Counts keyed by (dataset, run label, kind). Merging is associative and commutative."""

    def __init__(self, counts: Counter | None = None):
        self.counts: Counter = Counter(counts or {})

    def add(self, dataset: str, run_label: str, kind: ErrorKind, n: int = 1):
        self.counts[(dataset, run_label, kind)] += n

    def touch(self, dataset: str, run_label: str):
        """Register a (dataset, run) pair so it serializes even with zero errors."""
        self.counts[(dataset, run_label, ErrorKind.FORMAT_VIOLATION)] += 0

    def merge(self, other: ErrorHeatmap) -> ErrorHeatmap:
        out = ErrorHeatmap(self.counts)
        for k, v in other.counts.items():
            out.counts[k] += v
        return out

    def __eq__(self, other):
        if not isinstance(other, ErrorHeatmap):
            return NotImplemented
        return self.rows() == other.rows()

    def get(self, dataset: str, run_label: str, kind: ErrorKind) -> int:
        return self.counts.get((dataset, run_label, kind), 0)

    def total(self, dataset: str | None = None, run_label: str | None = None) -> int:
        return sum(v for (d, r, _), v in self.counts.items()
                   if (dataset is None or d == dataset) and (run_label is None or r == run_label))

    def keys(self) -> list[tuple[str, str]]:
        return sorted({(d, r) for d, r, _ in self.counts})

    def rows(self) -> list[dict]:
        out = []
        for dataset, run_label in self.keys():
            for kind in ErrorKind:
                out.append({
                    "dataset": dataset,
                    "run_label": run_label,
                    "group": kind.group.value,
                    "kind": kind.value,
                    "count": self.get(dataset, run_label, kind),
                })
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=["dataset", "run_label", "group", "kind", "count"],
                                lineterminator="\n")
        writer.writeheader()
        writer.writerows(self.rows())
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(self.rows(), indent=2)

    @classmethod
    def from_rows(cls, rows: Iterable[dict]) -> ErrorHeatmap:
        hm = cls()
        for row in rows:
            hm.add(row["dataset"], row["run_label"], ErrorKind(row["kind"]), int(row["count"]))
        return hm

    @classmethod
    def from_csv(cls, text: str) -> ErrorHeatmap:
        return cls.from_rows(csv.DictReader(io.StringIO(text)))


def aggregate(reports: Iterable[tuple[str, str, ErrorReport]]) -> ErrorHeatmap:
    hm = ErrorHeatmap()
    for dataset, run_label, report in reports:
        hm.add(dataset, run_label, report.kind)
    return hm
