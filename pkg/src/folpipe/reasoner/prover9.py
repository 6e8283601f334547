"""Export to Prover9 input syntax, for differential runs against a local ``prover9`` binary."""

from __future__ import annotations

import shutil
import subprocess

from folpipe.logic.syntax import (
    And,
    Atom,
    ForAll,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Xor,
)
from folpipe.reasoner.prover import Verdict

_OPS = {And: "&", Or: "|", Implies: "->", Iff: "<->"}


def to_prover9(f: Formula) -> str:
    """ASCII Prover9 formula; xor is expanded since Prover9 has no xor connective."""
    if isinstance(f, Atom):
        if not f.args:
            return f.predicate
        return f"{f.predicate}({', '.join(t.name for t in f.args)})"
    if isinstance(f, Not):
        return f"-({to_prover9(f.body)})"
    if isinstance(f, Xor):
        a, b = to_prover9(f.left), to_prover9(f.right)
        return f"(({a} | {b}) & -({a} & {b}))"
    if isinstance(f, tuple(_OPS)):
        return f"({to_prover9(f.left)} {_OPS[type(f)]} {to_prover9(f.right)})"
    q = "all" if isinstance(f, ForAll) else "exists"
    return f"({q} {f.var} {to_prover9(f.body)})"


def prover9_input(premises: list[Formula], goal: Formula) -> str:
    lines = ["formulas(assumptions)."]
    lines += [f"  {to_prover9(p)}." for p in premises]
    lines += ["end_of_list.", "", "formulas(goals).", f"  {to_prover9(goal)}.", "end_of_list.", ""]
    return "\n".join(lines)


def run_prover9(premises, conclusion, binary: str = "prover9", timeout: float = 10.0) -> Verdict:
    """Two-call protocol against an installed Prover9. Raises FileNotFoundError if absent."""
    exe = shutil.which(binary)
    if exe is None:
        raise FileNotFoundError(binary)

    def proved(goal) -> bool:
        proc = subprocess.run([exe], input=prover9_input(premises, goal), capture_output=True,
                              text=True, timeout=timeout, check=False)
        return "THEOREM PROVED" in proc.stdout

    if proved(conclusion):
        return Verdict.TRUE
    if proved(Not(conclusion)):
        return Verdict.FALSE
    return Verdict.UNCERTAIN
