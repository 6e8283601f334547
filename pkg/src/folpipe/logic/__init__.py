"""First-order logic syntax: AST, parser, renderer and structural analyses."""

from folpipe.logic.analysis import (
    VacuousQuantifier,
    free_variables,
    ground_atoms_in_quantifier_scope,
    is_closed,
    requantified_implication,
    vacuous_quantifiers,
)
from folpipe.logic.block import TranslationRecord, parse_statement, parse_translation_block
from folpipe.logic.errors import FormattingFailure, FreeVariableError, ParseCause, ParseFailure
from folpipe.logic.parser import parse_formula, parse_with_spans
from folpipe.logic.render import render
from folpipe.logic.syntax import (
    And,
    Atom,
    Const,
    Dialect,
    Exists,
    ForAll,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Statement,
    Term,
    Var,
    Xor,
)

__all__ = [
    "And",
    "Atom",
    "Const",
    "Dialect",
    "Exists",
    "ForAll",
    "FormattingFailure",
    "Formula",
    "FreeVariableError",
    "Iff",
    "Implies",
    "Not",
    "Or",
    "ParseCause",
    "ParseFailure",
    "Statement",
    "Term",
    "TranslationRecord",
    "VacuousQuantifier",
    "Var",
    "Xor",
    "free_variables",
    "ground_atoms_in_quantifier_scope",
    "is_closed",
    "parse_formula",
    "parse_statement",
    "parse_translation_block",
    "parse_with_spans",
    "render",
    "requantified_implication",
    "vacuous_quantifiers",
]
