"""Predicate verification between the two incremental stages."""

from __future__ import annotations

import enum
import logging
from collections import Counter
from dataclasses import dataclass

from folpipe.logic.block import match_header
from folpipe.pipeline.clients import ClientError, GeneratorConfig, LanguageModelClient
from folpipe.pipeline.problems import ReasoningProblem
from folpipe.pipeline.prompts import PromptMode, PromptTemplate
from folpipe.predicates import PredicateSet, check_arity_consistency, parse_predicate_decls

log = logging.getLogger(__name__)


class Provenance(enum.Enum):
    DETERMINISTIC = "Deterministic"
    MODEL_BASED = "ModelBased"


@dataclass(frozen=True)
class VerifierOutcome:
    """``corrected`` is None when the verifier judged the set correct."""

    provenance: Provenance
    corrected: PredicateSet | None = None
    warning: str | None = None
    raw: str | None = None

    def __post_init__(self):
        if self.corrected is not None and check_arity_consistency(self.corrected):
            raise ValueError("a corrected predicate set must be free of arity conflicts")

    @property
    def status(self) -> str:
        return "Correct" if self.corrected is None else "Corrected"

    def apply(self, predicates: PredicateSet) -> PredicateSet:
        return predicates if self.corrected is None else self.corrected

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "provenance": self.provenance.value,
            "corrected": self.corrected.to_line() if self.corrected is not None else None,
            "warning": self.warning,
        }


def resolve_arities(predicates: PredicateSet) -> PredicateSet:
    """Keep one arity per name: most occurrences first, then the smaller arity."""
    by_name: dict[str, Counter] = {}
    for sig, n in predicates.counts.items():
        by_name.setdefault(sig.name, Counter())[sig] = n
    keep = Counter()
    for sigs in by_name.values():
        best = max(sigs, key=lambda s: (sigs[s], -s.arity))
        keep[best] = sigs[best]
    return PredicateSet(keep)


def verify_predicates_deterministic(problem: ReasoningProblem | None, predicates: PredicateSet) -> VerifierOutcome:
    if not check_arity_consistency(predicates):
        return VerifierOutcome(Provenance.DETERMINISTIC)
    return VerifierOutcome(Provenance.DETERMINISTIC, resolve_arities(predicates))


def parse_verifier_reply(text: str) -> PredicateSet | None:
    """Predicates from a model reply, or None when the reply is not a clean list."""
    lines = []
    for raw in text.strip().splitlines():
        header = match_header(raw)
        line = header[1] if header is not None else raw
        if line.strip():
            lines.append(line.strip())
    if not lines:
        return None
    defects: list = []
    found = parse_predicate_decls(lines, defects)
    if defects or not len(found):
        return None
    return found


def verify_predicates_model(
    problem: ReasoningProblem,
    predicates: PredicateSet,
    client: LanguageModelClient,
    gen: GeneratorConfig,
    template: PromptTemplate,
    *,
    fallback_deterministic: bool = True,
    max_tokens: int | None = None,
) -> VerifierOutcome:
    """Ask a model to check the predicate set; never lets a bad reply corrupt it."""
    if template.mode is not PromptMode.VERIFIER:
        raise ValueError(f"verifier needs a Verifier template, got {template.mode.value}")
    messages = template.render(problem, predicates.to_line())
    try:
        reply = client.complete(messages, max_tokens=max_tokens or gen.max_tokens, temperature=gen.temperature).text
    except ClientError as exc:
        if fallback_deterministic:
            outcome = verify_predicates_deterministic(problem, predicates)
            return VerifierOutcome(outcome.provenance, outcome.corrected, f"verifier request failed: {exc}")
        return VerifierOutcome(Provenance.MODEL_BASED, warning=f"verifier request failed: {exc}")
    answer = reply.strip().strip('"\'.').strip()
    if answer.lower() == "correct":
        return VerifierOutcome(Provenance.MODEL_BASED, raw=reply)
    found = parse_verifier_reply(reply)
    if found is None:
        log.warning("unparseable verifier reply for %s; keeping predicates", problem.id)
        return VerifierOutcome(Provenance.MODEL_BASED, warning="unparseable verifier reply", raw=reply)
    if check_arity_consistency(found):
        return VerifierOutcome(Provenance.MODEL_BASED, resolve_arities(found),
                               "verifier reply still had arity conflicts", raw=reply)
    return VerifierOutcome(Provenance.MODEL_BASED, found, raw=reply)
