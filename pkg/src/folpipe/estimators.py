"""scikit-learn wrappers: a FOL reasoner as a classifier and the taxonomy as a transformer.

Both are stateless; ``fit`` only validates input and records the output vocabulary.
Samples are translation blocks (text) or ``(premises, conclusion)`` pairs whose
items are formula strings or parsed formulas.
"""

from __future__ import annotations

from collections.abc import Sequence
from typing import Any

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from folpipe.logic.block import parse_translation_block
from folpipe.logic.errors import FormattingFailure, ParseFailure
from folpipe.logic.parser import parse_formula
from folpipe.logic.syntax import Formula
from folpipe.reasoner.oracle import grounding_oracle
from folpipe.reasoner.prover import ProofLimits, Verdict, prove
from folpipe.taxonomy import ErrorKind, classify

LABELS = np.array([v.value for v in (Verdict.FALSE, Verdict.TRUE, Verdict.UNCERTAIN, Verdict.ERROR)])


def _formula(item) -> Formula:
    return parse_formula(item) if isinstance(item, str) else item


def _as_problem(sample: Any) -> tuple[list[Formula], Formula] | None:
    """(premises, conclusion), or None when the sample does not parse."""
    try:
        if isinstance(sample, str):
            record = parse_translation_block(sample, require_predicates=False)
            if not record.all_parsed:
                return None
            return [s.formula for s in record.premises], record.conclusion.formula
        premises, conclusion = sample
        return [_formula(p) for p in premises], _formula(conclusion)
    except (FormattingFailure, ParseFailure):
        return None


def _check_samples(X) -> list:
    if isinstance(X, (str, bytes)) or not isinstance(X, (Sequence, np.ndarray)):
        raise TypeError("X must be a sequence of samples")
    return list(X)


class FOLReasoner(ClassifierMixin, BaseEstimator):
    """Predicts True/False/Uncertain (or Error for unparseable or invalid samples)."""

    def __init__(self, max_clauses: int = 10_000, max_seconds: float = 5.0, max_clause_weight: int = 40,
                 oracle: bool = False):
        self.max_clauses = max_clauses
        self.max_seconds = max_seconds
        self.max_clause_weight = max_clause_weight
        self.oracle = oracle

    def fit(self, X, y=None):
        X = _check_samples(X)
        if y is not None and len(y) != len(X):
            raise ValueError(f"X has {len(X)} samples but y has {len(y)}")
        self.limits_ = ProofLimits(self.max_clauses, self.max_seconds, self.max_clause_weight)
        self.classes_ = LABELS.copy()
        return self

    def _predict_one(self, sample) -> str:
        problem = _as_problem(sample)
        if problem is None:
            return Verdict.ERROR.value
        premises, conclusion = problem
        if self.oracle:
            return grounding_oracle(premises, conclusion).verdict.value
        return prove(premises, conclusion, self.limits_).verdict.value

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "limits_")
        return np.array([self._predict_one(s) for s in _check_samples(X)], dtype=object)


class TaxonomyTransformer(TransformerMixin, BaseEstimator):
    """Maps each generation to its error counts, one column per error kind."""

    def __init__(self, normalize: bool = False):
        self.normalize = normalize

    def fit(self, X, y=None):
        _check_samples(X)
        self.kinds_ = list(ErrorKind)
        self.n_features_in_ = 1
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "kinds_")
        X = _check_samples(X)
        out = np.zeros((len(X), len(self.kinds_)), dtype=float if self.normalize else int)
        index = {k: i for i, k in enumerate(self.kinds_)}
        for row, text in enumerate(X):
            try:
                parsed = parse_translation_block(text)
            except FormattingFailure as exc:
                parsed = exc
            for report in classify(text, parsed):
                out[row, index[report.kind]] += 1
            if self.normalize and out[row].sum():
                out[row] = out[row] / out[row].sum()
        return out

    def get_feature_names_out(self, input_features=None) -> np.ndarray:
        check_is_fitted(self, "kinds_")
        return np.array([k.value for k in self.kinds_], dtype=object)
