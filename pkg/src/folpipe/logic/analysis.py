"""Structural checks over parsed formulas."""

from __future__ import annotations

from dataclasses import dataclass

from folpipe.logic.syntax import (
    BINARY,
    Atom,
    Exists,
    ForAll,
    Formula,
    Implies,
    Not,
    Var,
    subformulas,
)


def free_variables(f: Formula) -> set[str]:
    """Variables that occur in atom arguments without an enclosing quantifier."""
    out: set[str] = set()
    _free(f, frozenset(), out)
    return out


def _free(f: Formula, bound: frozenset, out: set):
    stack = [(f, bound)]
    while stack:
        node, bound = stack.pop()
        if isinstance(node, Atom):
            out.update(t.name for t in node.args if isinstance(t, Var) and t.name not in bound)
        elif isinstance(node, BINARY):
            stack.append((node.left, bound))
            stack.append((node.right, bound))
        elif isinstance(node, Not):
            stack.append((node.body, bound))
        else:
            stack.append((node.body, bound | {node.var}))


def is_closed(f: Formula) -> bool:
    return not free_variables(f)


@dataclass(frozen=True)
class VacuousQuantifier:
    quantifier: type
    var: str
    index: int  # pre-order position among the formula's quantifiers
    span: tuple[int, int] | None = None


def quantifier_nodes(f: Formula) -> list:
    return [node for node in subformulas(f) if isinstance(node, (ForAll, Exists))]


def vacuous_quantifiers(f: Formula, spans: list[tuple[int, int]] | None = None) -> list[VacuousQuantifier]:
    """Quantifiers whose variable does not occur free in their body.

    ``spans`` is the list returned by :func:`parse_with_spans`; pre-order of
    quantifier nodes matches their textual order, so spans line up by index.
    """
    out = []
    for i, q in enumerate(quantifier_nodes(f)):
        if q.var not in free_variables(q.body):
            span = spans[i] if spans is not None and i < len(spans) else None
            out.append(VacuousQuantifier(type(q), q.var, i, span))
    return out


def ground_atoms_in_quantifier_scope(f: Formula) -> list[Atom]:
    """Atoms with at least one argument and no variables, sitting under a quantifier.

    ``∀x ∃y (In(indonesia) ∧ Prosecutor(x) …)`` yields ``In(indonesia)``.
    """
    out: list[Atom] = []
    stack = [(f, False)]
    while stack:
        node, quantified = stack.pop()
        if isinstance(node, Atom):
            if quantified and node.args and not any(isinstance(t, Var) for t in node.args) and node not in out:
                out.append(node)
        elif isinstance(node, BINARY):
            stack.append((node.right, quantified))
            stack.append((node.left, quantified))
        elif isinstance(node, Not):
            stack.append((node.body, quantified))
        else:
            stack.append((node.body, True))
    return out


def _leading_quantified_vars(f: Formula) -> set[str]:
    out = set()
    while isinstance(f, (ForAll, Exists, Not)):
        if not isinstance(f, Not):
            out.add(f.var)
        f = f.body
    return out


def requantified_implication(f: Formula) -> set[str]:
    """Variables quantified in both the antecedent and consequent of a top-level implication.

    Outer universal quantifiers are looked through, so ``∀z (∃y A(y) → ∃y B(y))``
    is flagged as well.
    """
    node = f
    while isinstance(node, ForAll):
        node = node.body
    if not isinstance(node, Implies):
        return set()
    return _leading_quantified_vars(node.left) & _leading_quantified_vars(node.right)
