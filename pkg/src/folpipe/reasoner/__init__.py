"""Clausification, resolution proving and the grounding oracle."""

from folpipe.reasoner.clauses import Clause, Literal, SkolemNamer, clausify
from folpipe.reasoner.oracle import BoundExceeded, OracleResult, grounding_oracle, witnesses_needed
from folpipe.reasoner.prover import (
    ProofLimits,
    ProofResult,
    SearchOutcome,
    Verdict,
    prove,
    refute,
)
from folpipe.reasoner.prover9 import prover9_input, to_prover9

__all__ = [
    "BoundExceeded",
    "Clause",
    "Literal",
    "OracleResult",
    "ProofLimits",
    "ProofResult",
    "SearchOutcome",
    "SkolemNamer",
    "Verdict",
    "clausify",
    "grounding_oracle",
    "prove",
    "prover9_input",
    "refute",
    "to_prover9",
    "witnesses_needed",
]
