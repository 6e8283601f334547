"""Standard and incremental inference over reasoning problems."""

from __future__ import annotations

import enum
import logging
import time
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from folpipe.logic.block import TranslationRecord, match_header, parse_translation_block, split_declarations
from folpipe.logic.errors import FormattingFailure
from folpipe.pipeline.clients import ClientError, GeneratorConfig, LanguageModelClient
from folpipe.pipeline.problems import ReasoningProblem
from folpipe.pipeline.prompts import PromptMode, PromptTemplate
from folpipe.pipeline.verifier import (
    Provenance,
    VerifierOutcome,
    verify_predicates_deterministic,
    verify_predicates_model,
)
from folpipe.predicates import (
    PredicateMetrics,
    PredicateSet,
    compute_metrics,
    extract_used_predicates,
    parse_predicate_decls,
)
from folpipe.reasoner.prover import ProofLimits, Verdict, prove
from folpipe.taxonomy import ErrorKind, ErrorReport, classify

log = logging.getLogger(__name__)

STAGE1_STOP = ("Premises:", "Premise_First-order:")


class RunMode(enum.Enum):
    ICL = "ICL"
    STANDARD = "Standard"
    INCREMENTAL = "Incremental"
    INCREMENTAL_VERIFIER = "Incremental+Verifier"


@dataclass
class StageTrace:
    name: str
    output: str = ""
    prompt_tokens: int = 0
    completion_tokens: int = 0
    finish_reason: str | None = None
    latency: float = 0.0
    error: str | None = None

    def to_dict(self, timing: bool = True) -> dict:
        d = {"name": self.name, "output": self.output, "prompt_tokens": self.prompt_tokens,
             "completion_tokens": self.completion_tokens, "finish_reason": self.finish_reason, "error": self.error}
        if timing:
            d["latency"] = round(self.latency, 6)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> StageTrace:
        return cls(d["name"], d.get("output", ""), d.get("prompt_tokens", 0), d.get("completion_tokens", 0),
                   d.get("finish_reason"), d.get("latency", 0.0), d.get("error"))


@dataclass
class RunResult:
    problem_id: str
    mode: str
    stages: list[StageTrace] = field(default_factory=list)
    text: str = ""  # the final record text that was parsed
    record: TranslationRecord | None = None
    formatting: FormattingFailure | None = None
    reports: list[ErrorReport] = field(default_factory=list)
    declared: PredicateSet | None = None
    metrics: PredicateMetrics | None = None
    verdict: Verdict | None = None
    inconsistent: bool = False
    gold: Verdict | None = None
    verifier: VerifierOutcome | None = None
    transport_error: str | None = None

    @property
    def executed(self) -> bool:
        return self.verdict is not None

    @property
    def correct(self) -> bool | None:
        """None without a gold label; a record that did not execute is never correct."""
        if self.gold is None:
            return None
        return self.verdict is self.gold

    @property
    def tokens(self) -> int:
        return sum(s.completion_tokens for s in self.stages)

    def to_dict(self, timing: bool = True) -> dict:
        return {
            "id": self.problem_id,
            "mode": self.mode,
            "stages": [s.to_dict(timing) for s in self.stages],
            "text": self.text,
            "valid": bool(self.metrics and self.metrics.valid),
            "formatting": self.formatting.reason if self.formatting else None,
            "reports": [r.to_dict() for r in self.reports],
            "declared": self.declared.to_line() if self.declared is not None else None,
            "metrics": self.metrics.to_dict() if self.metrics else None,
            "verdict": self.verdict.value if self.verdict else None,
            "inconsistent": self.inconsistent,
            "gold": self.gold.value if self.gold else None,
            "correct": self.correct,
            "verifier": self.verifier.to_dict() if self.verifier else None,
            "transport_error": self.transport_error,
        }

    @classmethod
    def from_dict(cls, d: dict) -> RunResult:
        """Rebuild from :meth:`to_dict`; the record is re-parsed from ``text``."""
        record, formatting = None, None
        if d.get("formatting") is not None:
            formatting = FormattingFailure(d["formatting"])
        elif d.get("text"):
            record = parse_translation_block(d["text"])
        verifier = None
        if d.get("verifier"):
            v = d["verifier"]
            corrected = parse_predicate_decls([v["corrected"]]) if v.get("corrected") else None
            verifier = VerifierOutcome(Provenance(v["provenance"]), corrected, v.get("warning"))
        return cls(
            problem_id=d["id"],
            mode=d["mode"],
            stages=[StageTrace.from_dict(s) for s in d.get("stages", [])],
            text=d.get("text", ""),
            record=record,
            formatting=formatting,
            reports=[ErrorReport.from_dict(r) for r in d.get("reports", [])],
            declared=parse_predicate_decls([d["declared"]]) if d.get("declared") else None,
            metrics=PredicateMetrics.from_dict(d["metrics"]) if d.get("metrics") else None,
            verdict=Verdict(d["verdict"]) if d.get("verdict") else None,
            inconsistent=d.get("inconsistent", False),
            gold=Verdict(d["gold"]) if d.get("gold") else None,
            verifier=verifier,
            transport_error=d.get("transport_error"),
        )


def _call(client: LanguageModelClient, name: str, messages, max_tokens: int, stop, gen: GeneratorConfig) -> StageTrace:
    trace = StageTrace(name)
    start = time.perf_counter()
    try:
        out = client.complete(messages, max_tokens=max_tokens, stop=stop, temperature=gen.temperature)
    except ClientError as exc:
        trace.error = str(exc)
    else:
        trace.output = out.text
        trace.prompt_tokens = out.prompt_tokens
        trace.completion_tokens = out.completion_tokens
        trace.finish_reason = out.finish_reason
    trace.latency = time.perf_counter() - start
    return trace


def _finish(result: RunResult, problem: ReasoningProblem, text: str, limits: ProofLimits,
            declared: PredicateSet | None = None, extra_reports: Iterable[ErrorReport] = ()) -> RunResult:
    """Parse, classify, score and (when clean) prove one final generation."""
    result.text = text
    try:
        record = parse_translation_block(text)
    except FormattingFailure as exc:
        result.formatting = exc
        result.reports = classify(text, exc)
        return result
    result.record = record
    reports = list(extra_reports) + classify(text, record, declared=declared)
    result.reports = reports
    px = declared if declared is not None else parse_predicate_decls(record.predicate_lines)
    result.declared = px
    valid = record.is_valid(len(problem.premises))
    result.metrics = compute_metrics(px, extract_used_predicates(record.statements), valid)
    if reports:
        return result
    proof = prove([s.formula for s in record.premises], record.conclusion.formula, limits)
    if proof.error is not None:
        result.reports.append(proof.error)
        return result
    result.verdict = proof.verdict
    result.inconsistent = proof.inconsistent
    return result


def run_standard(
    problem: ReasoningProblem,
    client: LanguageModelClient,
    gen: GeneratorConfig,
    template: PromptTemplate,
    *,
    limits: ProofLimits = ProofLimits(),
    mode: RunMode = RunMode.STANDARD,
) -> RunResult:
    """One generation holding predicates, premises and conclusion."""
    if template.mode is not PromptMode.STANDARD:
        raise ValueError(f"run_standard needs a Standard template, got {template.mode.value}")
    result = RunResult(problem.id, mode.value, gold=problem.label)
    trace = _call(client, "generate", template.render(problem), gen.max_tokens, gen.stop, gen)
    result.stages.append(trace)
    if trace.error is not None:
        result.transport_error = trace.error
        result.formatting = FormattingFailure(f"generation failed: {trace.error}")
        result.reports = [ErrorReport(ErrorKind.FORMAT_VIOLATION, result.formatting.reason)]
        return result
    return _finish(result, problem, trace.output, limits)


def stage_budgets(gen: GeneratorConfig) -> tuple[int, int]:
    """Split the standard budget so both stages together never exceed it."""
    first = max(1, int(gen.max_tokens * gen.stage1_share))
    return first, max(1, gen.max_tokens - first)


def _stage1_lines(text: str) -> list[str]:
    lines = []
    for raw in text.splitlines():
        header = match_header(raw)
        line = (header[1] if header is not None else raw).strip()
        if line and not set(line) <= set("-#=`*_ "):
            lines.append(line)
    return split_declarations(lines)


def run_incremental(
    problem: ReasoningProblem,
    client: LanguageModelClient,
    gen: GeneratorConfig,
    template_predicates: PromptTemplate,
    template_fol: PromptTemplate,
    verifier: str | Callable[[ReasoningProblem, PredicateSet], VerifierOutcome] | None = None,
    *,
    limits: ProofLimits = ProofLimits(),
    verifier_template: PromptTemplate | None = None,
    verifier_client: LanguageModelClient | None = None,
) -> RunResult:
    """Predicates first, then FOL given the (possibly corrected) predicates.

    ``verifier`` is None, ``"deterministic"``, ``"model"`` (needs ``verifier_template``)
    or any callable returning a :class:`VerifierOutcome`.
    """
    if template_predicates.mode is not PromptMode.PREDICATES_ONLY:
        raise ValueError("stage 1 needs a PredicatesOnly template")
    if template_fol.mode is not PromptMode.FOL_GIVEN_PREDICATES:
        raise ValueError("stage 2 needs a FolGivenPredicates template")
    mode = RunMode.INCREMENTAL if verifier is None else RunMode.INCREMENTAL_VERIFIER
    result = RunResult(problem.id, mode.value, gold=problem.label)
    budget1, budget2 = stage_budgets(gen)

    trace = _call(client, "predicates", template_predicates.render(problem), budget1, STAGE1_STOP, gen)
    result.stages.append(trace)
    defects: list = []
    lines = _stage1_lines(trace.output) if trace.error is None else []
    predicates = parse_predicate_decls(lines, defects)
    if trace.error is not None or not len(predicates):
        reason = f"predicate stage failed: {trace.error}" if trace.error else "predicate stage produced no predicates"
        result.transport_error = trace.error
        result.formatting = FormattingFailure(reason, ("predicates",))
        result.text = trace.output
        result.reports = [ErrorReport(ErrorKind.FORMAT_VIOLATION, reason, "predicates")]
        return result
    defect_reports = [
        ErrorReport(ErrorKind.PARENTHESIS_ERROR if d.text.count("(") != d.text.count(")")
                    else ErrorKind.COMPLETION_ERROR, f"{d.detail}: {d.text!r}", "predicates", d.line)
        for d in defects
    ]

    if verifier is not None:
        if verifier == "deterministic":
            outcome = verify_predicates_deterministic(problem, predicates)
        elif verifier == "model":
            if verifier_template is None:
                raise ValueError("model verifier needs a Verifier template")
            outcome = verify_predicates_model(problem, predicates, verifier_client or client, gen,
                                              verifier_template, max_tokens=budget1)
        elif callable(verifier):
            outcome = verifier(problem, predicates)
        else:
            raise ValueError(f"unknown verifier {verifier!r}")
        result.verifier = outcome
        predicates = outcome.apply(predicates)

    line = predicates.to_line()
    trace2 = _call(client, "fol", template_fol.render(problem, line), budget2, gen.stop, gen)
    result.stages.append(trace2)
    if trace2.error is not None:
        result.transport_error = trace2.error
        result.formatting = FormattingFailure(f"FOL stage failed: {trace2.error}")
        result.reports = [ErrorReport(ErrorKind.FORMAT_VIOLATION, result.formatting.reason)] + defect_reports
        return result
    stage2 = trace2.output
    if match_header(stage2.lstrip().splitlines()[0] if stage2.strip() else "") is None:
        stage2 = "Premises:\n" + stage2
    text = "Predicates:\n" + "\n".join(s.declaration() for s in predicates) + "\n" + stage2
    return _finish(result, problem, text, limits, declared=predicates, extra_reports=defect_reports)


@dataclass
class Pipeline:
    """Batch runner: one mode, one client, a bounded worker pool."""

    client: LanguageModelClient
    gen: GeneratorConfig
    mode: RunMode = RunMode.STANDARD
    templates: dict = field(default_factory=dict)
    verifier: str | None = None
    verifier_client: LanguageModelClient | None = None
    limits: ProofLimits = ProofLimits()
    jobs: int = 1

    def __post_init__(self):
        from folpipe.pipeline import prompts

        defaults = {
            "standard": prompts.icl_template() if self.mode is RunMode.ICL else prompts.standard_template(),
            "predicates": prompts.predicates_template(),
            "fol": prompts.fol_template(),
            "verifier": prompts.verifier_template(),
        }
        self.templates = {**defaults, **self.templates}
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")
        if self.mode is RunMode.INCREMENTAL_VERIFIER and self.verifier is None:
            self.verifier = "deterministic"
        if self.mode is RunMode.INCREMENTAL and self.verifier is not None:
            self.mode = RunMode.INCREMENTAL_VERIFIER

    def run_one(self, problem: ReasoningProblem) -> RunResult:
        if self.mode in (RunMode.STANDARD, RunMode.ICL):
            return run_standard(problem, self.client, self.gen, self.templates["standard"], limits=self.limits,
                                mode=self.mode)
        return run_incremental(problem, self.client, self.gen, self.templates["predicates"], self.templates["fol"],
                               self.verifier, limits=self.limits, verifier_template=self.templates["verifier"],
                               verifier_client=self.verifier_client)

    def run(self, problems: Iterable[ReasoningProblem]) -> list[RunResult]:
        """Results come back in input order whatever the completion order."""
        problems = list(problems)
        if self.jobs == 1 or len(problems) <= 1:
            return [self.run_one(p) for p in problems]
        with ThreadPoolExecutor(max_workers=self.jobs) as pool:
            return list(pool.map(self.run_one, problems))
