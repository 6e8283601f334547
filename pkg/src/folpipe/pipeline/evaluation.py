"""Dataset-level metrics over run results."""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field
from fractions import Fraction

from folpipe.taxonomy import ErrorHeatmap, aggregate


@dataclass
class EvaluationSummary:
    n: int
    executed: int
    correct: int
    labelled: int
    valid: int
    execution_rate: float
    accuracy: float
    mean_coverage: float
    mean_usage: float
    valid_rate: float
    n_reports: int
    heatmap: ErrorHeatmap = field(default_factory=ErrorHeatmap)
    degenerate: bool = False
    mean_tokens: float = 0.0

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "executed": self.executed,
            "correct": self.correct,
            "labelled": self.labelled,
            "valid": self.valid,
            "execution_rate": self.execution_rate,
            "accuracy": self.accuracy,
            "mean_coverage": self.mean_coverage,
            "mean_usage": self.mean_usage,
            "valid_rate": self.valid_rate,
            "n_reports": self.n_reports,
            "mean_tokens": self.mean_tokens,
            "degenerate": self.degenerate,
            "errors": self.heatmap.rows(),
        }


def _mean(values: list[Fraction]) -> float:
    return float(sum(values, Fraction(0)) / len(values)) if values else 0.0


def evaluate(results: Iterable, dataset: str = "dataset") -> EvaluationSummary:
    """Execution rate, accuracy, predicate metrics, validity and the error heatmap.

    Both rates share the full record count as denominator, so a record that did not
    execute lowers accuracy too. Coverage and usage are averaged over records that
    got past formatting.
    """
    results = list(results)
    n = len(results)
    heatmap = aggregate((dataset, r.mode, rep) for r in results for rep in r.reports)
    for r in results:
        heatmap.touch(dataset, r.mode)
    if n == 0:
        return EvaluationSummary(0, 0, 0, 0, 0, 0.0, 0.0, 0.0, 0.0, 0.0, 0, heatmap, degenerate=True)
    executed = sum(r.executed for r in results)
    correct = sum(r.correct is True for r in results)
    labelled = sum(r.gold is not None for r in results)
    scored = [r.metrics for r in results if r.metrics is not None]
    valid = sum(m.valid for m in scored)
    return EvaluationSummary(
        n=n,
        executed=executed,
        correct=correct,
        labelled=labelled,
        valid=valid,
        execution_rate=executed / n,
        accuracy=correct / n,
        mean_coverage=_mean([m.coverage for m in scored]),
        mean_usage=_mean([m.usage for m in scored]),
        valid_rate=valid / n,
        n_reports=sum(len(r.reports) for r in results),
        heatmap=heatmap,
        degenerate=labelled == 0 or not scored,
        mean_tokens=sum(r.tokens for r in results) / n,
    )
