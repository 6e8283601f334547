"""Synthetic fine-tuning corpus: format, syntax and semantic filters, then label balancing."""

from __future__ import annotations

import json
import random
import re
from collections import Counter
from collections.abc import Iterable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from folpipe.logic.block import TranslationRecord, match_header, parse_translation_block
from folpipe.logic.errors import FormattingFailure, FreeVariableError
from folpipe.pipeline.clients import GeneratorConfig
from folpipe.pipeline.problems import ReasoningProblem, iter_jsonl, write_jsonl
from folpipe.pipeline.prompts import PromptTemplate
from folpipe.predicates import (
    check_arity_consistency,
    extract_used_predicates,
    parse_predicate_decls,
)
from folpipe.reasoner.clauses import clausify
from folpipe.reasoner.prover import ProofLimits, Verdict, prove
from folpipe.taxonomy import ErrorKind, ErrorReport, classify

STAGES = ("format", "syntax", "semantic")
_FENCE = re.compile(r"^\s*```[\w-]*\s*$")
_CANONICAL = {"predicates": "Predicates:", "premises": "Premises:", "conclusion": "Conclusion:"}


@dataclass(frozen=True)
class CandidateRecord:
    """A labelled problem and one raw generation for it."""

    problem: ReasoningProblem
    output: str

    def __post_init__(self):
        if self.problem.label is None:
            raise ValueError(f"candidate {self.problem.id!r} has no gold label")

    @property
    def id(self) -> str:
        return self.problem.id


@dataclass(frozen=True)
class CorpusRecord:
    id: str
    input: str
    target: str
    label: Verdict

    def to_dict(self) -> dict:
        return {"id": self.id, "input": self.input, "target": self.target, "label": self.label.value}

    @classmethod
    def from_dict(cls, d: dict) -> CorpusRecord:
        return cls(str(d["id"]), d["input"], d["target"], Verdict.parse(d["label"]))

    def candidate(self) -> CandidateRecord:
        """Re-ingest the record as a candidate, for the idempotence check."""
        context, question = split_problem_text(self.input)
        return CandidateRecord(ReasoningProblem(self.id, (context,), question, self.label), self.target)


@dataclass
class FilterResult:
    passed: bool
    stage: str
    reason: str = ""
    reports: list[ErrorReport] = field(default_factory=list)
    steps: list[str] = field(default_factory=list)  # normalization steps taken by the format filter
    text: str = ""
    record: TranslationRecord | None = None
    verdict: Verdict | None = None
    timed_out: bool = False


def problem_text(problem: ReasoningProblem) -> str:
    """The natural-language side S of a corpus pair."""
    return f"Context:\n{' '.join(p.strip() for p in problem.premises)}\n\nQuestion:\n{problem.conclusion.strip()}"


def split_problem_text(text: str) -> tuple[str, str]:
    m = re.fullmatch(r"Context:\n(.*)\n\nQuestion:\n(.*)", text, re.DOTALL)
    if m is None:
        raise ValueError("corpus input is not in Context/Question layout")
    return m.group(1), m.group(2)


def normalize_output(text: str) -> tuple[str, list[str]]:
    """Mechanical clean-up of a generation; returns the text and the steps applied."""
    steps = []
    lines = text.replace("\r\n", "\n").split("\n")
    if any(_FENCE.match(line) for line in lines):
        lines = [line for line in lines if not _FENCE.match(line)]
        steps.append("stripped code fences")
    out = []
    renamed = False
    for line in lines:
        header = match_header(line)
        if header is not None:
            name, rest = header
            canon = _CANONICAL[name]
            if line.strip() != canon or rest:
                renamed = True
            out.append(canon)
            if rest.strip():
                out.append(rest.strip())
        else:
            out.append(line.rstrip())
    if renamed:
        steps.append("normalized section headers")
    collapsed = []
    for line in out:
        if not line.strip() and collapsed and not collapsed[-1].strip():
            continue
        collapsed.append(line)
    if len(collapsed) != len(out):
        steps.append("collapsed blank lines")
    return "\n".join(collapsed).strip() + "\n", steps


def filter_format(c: CandidateRecord) -> FilterResult:
    text, steps = normalize_output(c.output)
    try:
        record = parse_translation_block(text)
    except FormattingFailure as exc:
        return FilterResult(False, "format", exc.reason, [ErrorReport(ErrorKind.FORMAT_VIOLATION, exc.reason)],
                            steps, text)
    return FilterResult(True, "format", steps=steps, text=text, record=record)


def filter_syntax(c: CandidateRecord, formatted: FilterResult | None = None) -> FilterResult:
    """Every statement parses, clausifies and is free of taxonomy defects."""
    formatted = formatted or filter_format(c)
    if not formatted.passed:
        return FilterResult(False, "format", formatted.reason, formatted.reports, formatted.steps, formatted.text)
    record = formatted.record
    reports = classify(formatted.text, record)
    if not reports:
        for i, st in enumerate(record.statements):
            try:
                clausify(st.formula)
            except FreeVariableError as exc:
                section, j = record.locate(i)
                reports.append(ErrorReport(ErrorKind.MISSING_QUANTIFIER, str(exc), section, j))
    if reports:
        kinds = ", ".join(sorted({r.kind.value for r in reports}))
        return FilterResult(False, "syntax", kinds, reports, formatted.steps, formatted.text, record)
    return FilterResult(True, "syntax", steps=formatted.steps, text=formatted.text, record=record)


def filter_semantic(c: CandidateRecord, limits: ProofLimits = ProofLimits(),
                    checked: FilterResult | None = None) -> FilterResult:
    """The prover's verdict on the translation must equal the gold label."""
    checked = checked or filter_syntax(c)
    if not checked.passed:
        return checked
    record = checked.record
    proof = prove([s.formula for s in record.premises], record.conclusion.formula, limits)
    base = {"steps": checked.steps, "text": checked.text, "record": record, "verdict": proof.verdict,
            "timed_out": proof.timed_out and proof.verdict is Verdict.UNCERTAIN}
    if proof.verdict is c.problem.label:
        return FilterResult(True, "semantic", **base)
    if base["timed_out"]:
        reason = f"prover limits reached; gold {c.problem.label.value}"
    else:
        reason = f"verdict {proof.verdict.value} != gold {c.problem.label.value}"
    return FilterResult(False, "semantic", reason, **base)


def to_corpus_record(c: CandidateRecord, result: FilterResult) -> CorpusRecord:
    return CorpusRecord(c.id, problem_text(c.problem), result.record.to_text(), c.problem.label)


def run_filters(c: CandidateRecord, limits: ProofLimits = ProofLimits()) -> FilterResult:
    return filter_semantic(c, limits)


@dataclass
class SynthesisReport:
    corpus: list[CorpusRecord]
    rejections: list[dict]
    counts: dict[str, int]

    def survivor_line(self) -> str:
        return " / ".join(f"{k} {self.counts[k]}" for k in ("input", *STAGES))


def synthesize(candidates: Iterable[CandidateRecord], limits: ProofLimits = ProofLimits(), jobs: int = 1
               ) -> SynthesisReport:
    """Run the filter chain; per-stage survivor counts are cumulative (semantic ⊆ syntax ⊆ format)."""
    candidates = list(candidates)
    if jobs > 1 and len(candidates) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda c: run_filters(c, limits), candidates))
    else:
        results = [run_filters(c, limits) for c in candidates]
    counts = {"input": len(candidates), **{s: 0 for s in STAGES}}
    corpus, rejections = [], []
    for c, r in zip(candidates, results):
        reached = STAGES.index(r.stage) + (1 if r.passed else 0)
        for stage in STAGES[:reached]:
            counts[stage] += 1
        if r.passed:
            corpus.append(to_corpus_record(c, r))
        else:
            row = {"id": c.id, "stage": r.stage, "reason": r.reason}
            if r.timed_out:
                row["timeout"] = True
            rejections.append(row)
    return SynthesisReport(corpus, rejections, counts)


def balance_labels(records: list[CorpusRecord], seed: int) -> list[CorpusRecord]:
    """Downsample every label to the smallest label count; input order is kept."""
    if not records:
        return []
    groups: dict[Verdict, list[int]] = {}
    for i, r in enumerate(records):
        groups.setdefault(r.label, []).append(i)
    m = min(len(ix) for ix in groups.values())
    rng = random.Random(seed)
    keep = set()
    for label in sorted(groups, key=lambda v: v.value):
        ix = list(groups[label])
        rng.shuffle(ix)
        keep.update(ix[:m])
    return [r for i, r in enumerate(records) if i in keep]


def audit_corpus(records: Iterable[CorpusRecord]) -> dict:
    """Automated quality audit: arity conflicts, duplicate or unused declarations, label counts."""
    findings = []
    labels: Counter = Counter()
    n = 0
    for rec in records:
        n += 1
        labels[rec.label.value] += 1
        record = parse_translation_block(rec.target)
        declared = parse_predicate_decls(record.predicate_lines)
        used = extract_used_predicates(record.statements)
        for conflict in check_arity_consistency(declared, used):
            findings.append({"id": rec.id, "check": "arity", "detail": str(conflict)})
        for sig, k in declared.counts.items():
            if k > 1:
                findings.append({"id": rec.id, "check": "duplicate-declaration", "detail": f"{sig} declared {k} times"})
        for sig in sorted(set(used) - set(declared)):
            findings.append({"id": rec.id, "check": "undeclared", "detail": str(sig)})
        for sig in sorted(set(declared) - set(used)):
            findings.append({"id": rec.id, "check": "unused-declaration", "detail": str(sig)})
    return {"records": n, "labels": dict(sorted(labels.items())), "findings": findings}


# --- batch files -------------------------------------------------------------


def batch_requests(problems: Iterable[ReasoningProblem], template: PromptTemplate, gen: GeneratorConfig) -> list[dict]:
    """One chat-completions batch request per problem."""
    rows = []
    for p in problems:
        body = {"model": gen.model, "messages": template.render(p), "temperature": gen.temperature,
                "max_tokens": gen.max_tokens}
        rows.append({"custom_id": p.id, "method": "POST", "url": "/v1/chat/completions", "body": body})
    return rows


def read_outputs(path: str | Path) -> dict[str, str]:
    """Generator outputs keyed by id.

    Accepts batch-response lines (``custom_id`` with a chat-completions body) and
    plain ``{"id": ..., "output": ...}`` lines.
    """
    out = {}
    for row in iter_jsonl(path):
        if "custom_id" in row:
            body = (row.get("response") or {}).get("body") or {}
            try:
                out[str(row["custom_id"])] = body["choices"][0]["message"]["content"]
            except (KeyError, IndexError, TypeError):
                out[str(row["custom_id"])] = ""
        else:
            out[str(row["id"])] = row["output"]
    return out


def load_candidates(problems: Iterable[ReasoningProblem], outputs: dict[str, str]) -> list[CandidateRecord]:
    """Pair problems with outputs; problems without an output get an empty one."""
    return [CandidateRecord(p, outputs.get(p.id, "")) for p in problems]


def read_corpus(path: str | Path) -> list[CorpusRecord]:
    return [CorpusRecord.from_dict(row) for row in iter_jsonl(path)]


def write_corpus(path: str | Path, records: Iterable[CorpusRecord]) -> int:
    return write_jsonl(path, (r.to_dict() for r in records))


def write_json(path: str | Path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, ensure_ascii=False, sort_keys=True) + "\n", encoding="utf-8")


__all__ = [
    "CandidateRecord", "CorpusRecord", "FilterResult", "SynthesisReport", "audit_corpus",
    "balance_labels", "batch_requests", "filter_format", "filter_semantic", "filter_syntax", "load_candidates",
    "normalize_output", "problem_text", "read_corpus", "read_outputs", "run_filters", "synthesize",
    "write_corpus",
]
