import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from folpipe.logic import (
    And,
    Atom,
    Const,
    Dialect,
    ForAll,
    FormattingFailure,
    Implies,
    Not,
    Or,
    ParseCause,
    ParseFailure,
    Var,
    Xor,
    free_variables,
    parse_formula,
    parse_translation_block,
    parse_with_spans,
    render,
    requantified_implication,
    vacuous_quantifiers,
)
from folpipe.logic.syntax import LEXEMES
from folpipe.testing import random_formula


def P(name, *args):
    return Atom(name, tuple(Var(a) if a[0].islower() and len(a) == 1 else Const(a) for a in args))


# --- parser ------------------------------------------------------------------


def test_parse_atom_with_constant():
    assert parse_formula("Quiet(Anne)") == Atom("Quiet", (Const("Anne"),))


def test_parse_rule_in_both_dialects():
    expected = ForAll("x", Implies(P("Red", "x"), P("Young", "x")))
    assert parse_formula("∀x (Red(x) → Young(x))") == expected
    assert parse_formula("all x (Red(x) -> Young(x))") == expected


@pytest.mark.parametrize("text, expected", [
    ("A & B | C", Or(And(Atom("A"), Atom("B")), Atom("C"))),
    ("A -> B -> C", Implies(Atom("A"), Implies(Atom("B"), Atom("C")))),
    ("-A & B", And(Not(Atom("A")), Atom("B"))),
    ("A xor B | C", Xor(Atom("A"), Or(Atom("B"), Atom("C")))),
    ("A ⊕ B", Xor(Atom("A"), Atom("B"))),
])
def test_precedence(text, expected):
    assert parse_formula(text) == expected


def test_quantifier_binds_tightly():
    f = parse_formula("∀x P(x) ∧ Q(x)")
    assert isinstance(f, And) and isinstance(f.left, ForAll)


def test_zero_ary_forms_agree():
    assert parse_formula("P()") == parse_formula("P") == Atom("P")


@pytest.mark.parametrize("text, cause", [
    ("", ParseCause.EMPTY),
    ("P(x", ParseCause.UNBALANCED_PAREN),
    ("P(x))", ParseCause.UNBALANCED_PAREN),
    ("Endowment(yale, 42.3 billion)", ParseCause.SPECIAL_TOKEN),
    ("∀x (Rating(x, y) ∧ y > 4 → Listed(x))", ParseCause.UNKNOWN_OPERATOR),
    ("P(x) Q", ParseCause.TRAILING_TEXT),
])
def test_parse_failure_causes(text, cause):
    with pytest.raises(ParseFailure) as info:
        parse_formula(text)
    assert info.value.cause is cause


def test_special_token_span_points_at_number():
    text = "Endowment(yale, 42.3 billion)"
    with pytest.raises(ParseFailure) as info:
        parse_formula(text)
    start, end = info.value.span
    assert text[start:end] == "42.3"


def test_spans_cover_quantifiers():
    _, spans = parse_with_spans("∀x (Quiet(Anne))")
    assert spans and spans[0][0] == 0


def test_overlong_input_rejected():
    with pytest.raises(ParseFailure) as info:
        parse_formula("P(a) ∧ " * 20000 + "P(a)")
    assert info.value.cause is ParseCause.TOO_LONG


def test_deep_nesting_rejected():
    with pytest.raises(ParseFailure) as info:
        parse_formula("(" * 500 + "P" + ")" * 500)
    assert info.value.cause is ParseCause.TOO_DEEP


@settings(max_examples=300, deadline=None)
@given(st.text(max_size=200))
def test_parser_total_on_arbitrary_text(text):
    try:
        parse_formula(text)
    except ParseFailure:
        pass


@settings(max_examples=100, deadline=None)
@given(st.binary(max_size=300))
def test_parser_total_on_arbitrary_bytes(data):
    try:
        parse_formula(data.decode("utf-8", errors="replace"))
    except ParseFailure:
        pass


# --- render ------------------------------------------------------------------


def test_render_examples():
    assert render(Atom("Quiet", (Const("Anne"),))) == "Quiet(Anne)"
    assert render(ForAll("x", Implies(P("Red", "x"), P("Young", "x")))) == "∀x (Red(x) → Young(x))"
    assert render(Xor(Atom("A"), Atom("B")), Dialect.ASCII) == "A xor B"


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(list(Dialect)))
def test_round_trip_property(seed, dialect):
    f = random_formula(random.Random(seed), depth=6)
    g = parse_formula(render(f, dialect))
    assert g == f
    assert free_variables(g) == free_variables(f)


def test_mixed_dialect_substitution():
    rng = random.Random(7)
    checked = 0
    for _ in range(200):
        f = random_formula(rng, depth=5)
        text = render(f, Dialect.UNICODE)
        for uni, asc in LEXEMES.values():
            i = text.find(uni)
            if i < 0:
                continue
            sep = " " if uni in "∀∃" else ""
            mixed = text[:i] + asc + sep + text[i + len(uni):]
            assert parse_formula(mixed) == f, mixed
            checked += 1
    assert checked > 100


# --- analysis ----------------------------------------------------------------


def test_free_variables_examples():
    assert free_variables(parse_formula("BerkeleyCollege(x) ∧ ResidentialCollegeAt(x, yaleUniversity)")) == {"x"}
    assert free_variables(parse_formula("∀x (Athlete(x) → ¬NeverExercises(x))")) == set()
    assert free_variables(Atom("P")) == set()


def test_vacuous_quantifiers_examples():
    f = "∀x ∃y (In(indonesia) ∧ Prosecutor(x) ∧ SpecialCrime(y) → Investigate(x, y))"
    assert vacuous_quantifiers(parse_formula(f)) == []
    found = vacuous_quantifiers(parse_formula("∀x (Quiet(Anne))"))
    assert [(q.quantifier, q.var) for q in found] == [(ForAll, "x")]
    assert vacuous_quantifiers(parse_formula("∃y (Own(emily, y) ∧ Roommate(y))")) == []


def test_requantified_implication():
    f = parse_formula("∃y (Own(emily, y) ∧ Roommate(y)) → ∃y (Own(emily, y) ∧ LiveIn(emily, apartment))")
    assert requantified_implication(f) == {"y"}
    assert requantified_implication(parse_formula("∃y Roommate(y) → ∃z Own(emily, z)")) == set()


# --- translation blocks ------------------------------------------------------


def test_exemplar_block(exemplar_block, exemplar_problem):
    record = parse_translation_block(exemplar_block)
    assert len(record.predicate_lines) == 7
    assert len(record.premises) == len(exemplar_problem.premises) == 18
    assert record.conclusion.formula == Atom("White", (Const("Anne"),))
    assert record.is_valid(18)
    assert not record.is_valid(17)


def test_block_keeps_bad_lines(exemplar_block):
    record = parse_translation_block(exemplar_block.replace("Quiet(Anne)", "Quiet(Anne", 1))
    assert not record.all_parsed
    bad = [s for s in record.premises if not s.ok]
    assert len(bad) == 1 and bad[0].error.cause is ParseCause.UNBALANCED_PAREN


def test_block_round_trips_through_to_text(exemplar_block):
    record = parse_translation_block(exemplar_block)
    again = parse_translation_block(record.to_text())
    assert [s.formula for s in again.statements] == [s.formula for s in record.statements]
    ascii_again = parse_translation_block(record.to_text(Dialect.ASCII))
    assert [s.formula for s in ascii_again.statements] == [s.formula for s in record.statements]


def test_loop_generation_is_formatting_failure(loop_text):
    with pytest.raises(FormattingFailure) as info:
        parse_translation_block(loop_text)
    assert "missing" in info.value.reason


def test_empty_block():
    with pytest.raises(FormattingFailure):
        parse_translation_block("")


def test_out_of_order_sections():
    with pytest.raises(FormattingFailure):
        parse_translation_block("Premises:\nA\nPredicates:\nA()\nConclusion:\nA\n")


def test_empty_section():
    with pytest.raises(FormattingFailure):
        parse_translation_block("Predicates:\nA()\nPremises:\nConclusion:\nA\n")


def test_alternate_headers_and_glosses():
    text = ("Predicates:\nAdvancesMedicalKnowledge(x);\nPremise_First-order:\n"
            "AdvancesMedicalKnowledge(Braden) ::: Braden advances medical knowledge.;\n"
            "Conclusion_First-order:\nAdvancesMedicalKnowledge(Braden) ::: same\n")
    record = parse_translation_block(text)
    assert record.premises[0].gloss.startswith("Braden advances")
    assert record.all_parsed
