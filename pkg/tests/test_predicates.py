from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from folpipe.logic import parse_statement, parse_translation_block, render
from folpipe.predicates import (
    PredicateSet,
    PredicateSignature,
    check_arity_consistency,
    compute_metrics,
    detect_subject_predicate_conflict,
    extract_used_predicates,
    parse_predicate_decls,
)

EXEMPLAR_USED = PredicateSet.of("Quiet/1", "Furry/1", "Green/1", "Red/1", "Rough/1", "White/1", "Young/1")

signatures = st.builds(PredicateSignature, st.sampled_from(["A", "B", "C", "D", "E"]), st.integers(0, 2))
predicate_sets = st.lists(signatures, max_size=8).map(PredicateSet)


def test_parse_declarations():
    assert parse_predicate_decls(["Quiet(x) ::: x is quiet"]) == PredicateSet.of("Quiet/1")
    assert parse_predicate_decls(["Prereq(x, y)"]) == PredicateSet.of("Prereq/2")
    assert parse_predicate_decls([""]) == PredicateSet()


def test_semicolon_declarations():
    found = parse_predicate_decls(["AdvancesMedicalKnowledge(x);", "Prereq(x, y); Student(x)"])
    assert found == PredicateSet.of("AdvancesMedicalKnowledge/1", "Prereq/2", "Student/1")


def test_malformed_declaration_reported():
    defects = []
    found = parse_predicate_decls(["Quiet(x)", "Broken(x", "Sees(x, 42)"], defects)
    assert found == PredicateSet.of("Quiet/1")
    assert [d.text for d in defects] == ["Broken(x", "Sees(x, 42)"]


def test_extract_fig6(exemplar_block):
    record = parse_translation_block(exemplar_block)
    assert extract_used_predicates(record.statements) == EXEMPLAR_USED
    assert extract_used_predicates([]) == PredicateSet()


def test_extract_keeps_both_arities():
    used = extract_used_predicates([parse_statement("Sees(Tiger, Mouse)"),
                                    parse_statement("∀x (Visits(x, Rabbit) ∧ Sees(Mouse) → Visits(x, Tiger))")])
    assert PredicateSignature("Sees", 2) in used and PredicateSignature("Sees", 1) in used


def test_arity_conflicts():
    [c] = check_arity_consistency(PredicateSet.of("HaveLongVacation/0", "HaveLongVacation/1"))
    assert (c.name, c.arities) == ("HaveLongVacation", (0, 1))
    assert check_arity_consistency(PredicateSet.of("Quiet/1"), PredicateSet.of("Quiet/1")) == []
    [c] = check_arity_consistency(PredicateSet.of("CanTake/1", "CanTake/2"))
    assert c.arities == (1, 2)


def test_arity_conflict_counts_occurrences():
    declared = parse_predicate_decls(["CanTake(x); CanTake(x, y); CanTake(a, b)"])
    [c] = check_arity_consistency(declared)
    assert c.occurrences == {1: 1, 2: 2}


def test_subject_predicate_conflict():
    [c] = detect_subject_predicate_conflict([parse_statement("Platypus(platypus) ∧ ¬Teeth(platypus)")])
    assert c.predicate == "Platypus" and c.constant == "platypus"
    assert detect_subject_predicate_conflict([parse_statement("Quiet(Anne)")]) == []
    assert detect_subject_predicate_conflict([parse_statement("Mammal(platypus)")]) == []


def test_metrics_examples():
    px = PredicateSet.of("A/1", "B/1", "C/1")
    py = PredicateSet.of("A/1", "B/1", "D/2")
    m = compute_metrics(px, py)
    assert (m.coverage, m.usage) == (Fraction(2, 3), Fraction(2, 3))
    same = compute_metrics(px, px)
    assert (same.coverage, same.usage, same.degenerate) == (1, 1, False)


def test_metrics_empty_conventions():
    m = compute_metrics(PredicateSet(), PredicateSet.of("A/1"))
    assert (m.coverage, m.usage, m.degenerate) == (0, 1, True)
    m = compute_metrics(PredicateSet(), PredicateSet())
    assert (m.coverage, m.usage, m.degenerate) == (1, 1, True)


def test_metrics_name_mode():
    m = compute_metrics(PredicateSet.of("Sees/1"), PredicateSet.of("Sees/2"), match="name")
    assert (m.coverage, m.usage) == (1, 1)
    assert compute_metrics(PredicateSet.of("Sees/1"), PredicateSet.of("Sees/2")).coverage == 0


@settings(max_examples=200, deadline=None)
@given(predicate_sets, predicate_sets)
def test_metrics_symmetric_and_bounded(px, py):
    a, b = compute_metrics(px, py), compute_metrics(py, px)
    assert (a.coverage, a.usage) == (b.usage, b.coverage)
    assert 0 <= a.coverage <= 1 and 0 <= a.usage <= 1


@settings(max_examples=200, deadline=None)
@given(predicate_sets, predicate_sets, signatures)
def test_metrics_monotone(px, py, extra):
    before = compute_metrics(px, py)
    after = compute_metrics(px | PredicateSet([extra]), py)
    if extra in py:
        assert after.coverage >= before.coverage
    elif len(px):
        assert after.usage <= before.usage


def test_used_predicates_survive_round_trip(exemplar_block):
    statements = parse_translation_block(exemplar_block).statements
    again = [parse_statement(render(s.formula)) for s in statements]
    assert extract_used_predicates(again) == extract_used_predicates(statements)


def test_declaration_rendering():
    assert PredicateSignature("Prereq", 2).declaration() == "Prereq(x, y)"
    assert PredicateSignature("Rain", 0).declaration() == "Rain"
    assert PredicateSet.of("Young/1", "Quiet/1").to_line() == "Quiet(x); Young(x)"
