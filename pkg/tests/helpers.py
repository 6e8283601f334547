"""Deterministic model stand-ins shared by the pipeline, CLI and acceptance tests."""

import random

from folpipe.pipeline import MockClient
from folpipe.pipeline.prompts import PROOFWRITER_FOL, PROOFWRITER_OUTPUT
from folpipe.predicates import PredicateSet, PredicateSignature, parse_predicate_decls
from folpipe.taxonomy import ErrorKind

CONSTANTS = ["Anne", "Bob", "Erin", "Fiona"]
# one "criterion N: PASS|FAIL ..." line per acceptance test, shown in the terminal summary
ACCEPTANCE_LINES: list[str] = []

NAMES = ["Quiet", "Furry", "Green", "Red", "Rough", "White", "Young", "Sees", "Likes", "Chases"]


def is_stage2(messages) -> bool:
    return "\nPredicates:\n" in messages[-1]["content"]


def predicate_line(messages) -> str:
    return messages[-1]["content"].split("\nPredicates:\n", 1)[1].strip()


def exemplar_client() -> MockClient:
    """Predicates then FOL for the exemplar; the stage-1 stop sequence trims the full block."""
    return MockClient(lambda m: PROOFWRITER_FOL if is_stage2(m) else PROOFWRITER_OUTPUT)


def fact_block(predicates: PredicateSet) -> str:
    """Premises: one ground fact per declared signature. Conclusion: the first of them."""
    facts = [f"{s.name}({', '.join(CONSTANTS[:s.arity])})" if s.arity else s.name for s in predicates]
    return "Premises:\n" + "\n".join(facts) + "\nConclusion:\n" + facts[0] + "\n"


def declaration_client(stage1: str) -> MockClient:
    """Stage 1 answers ``stage1``; stage 2 writes facts for exactly the predicates it was given."""
    def respond(messages):
        if is_stage2(messages):
            return fact_block(parse_predicate_decls([predicate_line(messages)]))
        return stage1
    return MockClient(respond)


def base_predicate_set(rng: random.Random) -> PredicateSet:
    names = rng.sample(NAMES, rng.randint(2, 6))
    return PredicateSet(PredicateSignature(n, rng.choice([0, 1, 1, 2])) for n in names)


def perturb_arity(predicates: PredicateSet, rng: random.Random) -> tuple[PredicateSet, PredicateSignature]:
    """Insert an extra variable into one declaration, keeping the original beside it."""
    target = rng.choice(sorted(predicates))
    extra = PredicateSignature(target.name, target.arity + 1)
    return predicates | PredicateSet([extra]), target


def declarations(predicates: PredicateSet) -> str:
    return "Predicates:\n" + "\n".join(s.declaration() for s in predicates) + "\n"


# --- synthesis fixture -------------------------------------------------------


def _block(predicates, premises, conclusion):
    return ("Predicates:\n" + "\n".join(predicates) + "\nPremises:\n" + "\n".join(premises)
            + "\nConclusion:\n" + conclusion + "\n")


def synth_candidates():
    """Six candidates: two format-bad, one syntax-bad, one semantic-bad, two good."""
    from folpipe.datasynth import CandidateRecord
    from folpipe.pipeline import ReasoningProblem
    from folpipe.reasoner import Verdict

    def cand(i, label, output):
        problem = ReasoningProblem(f"c{i}", (f"Premise text {i}.", "Another premise."), f"Question {i}?", label)
        return CandidateRecord(problem, output)

    good_true = _block(["Quiet(x) ::: x is quiet", "Red(x) ::: x is red"],
                       ["Quiet(Anne)", "∀x (Quiet(x) → Red(x))"], "Red(Anne)")
    good_false = "```\n" + _block(["Quiet(x)", "Red(x)"], ["Quiet(Bob)", "Quiet(Bob) → ¬Red(Bob)"],
                                  "Red(Bob)") + "```\n"
    return [
        cand(1, Verdict.TRUE, good_true),
        cand(2, Verdict.FALSE, good_false),
        cand(3, Verdict.TRUE, "Predicates:\nQuiet(x)\nPremises:\nQuiet(Anne)\n"),
        cand(4, Verdict.TRUE, "Predicates:\n" + " ".join(["IsFavorite(x, y)"] * 200)),
        cand(5, Verdict.TRUE, _block(["Sees(x, y)", "Visits(x, y)"],
                                     ["Sees(Tiger, Mouse)", "∀x (Visits(x, Rabbit) ∧ Sees(Mouse) → Visits(x, Tiger))"],
                                     "Visits(Bob, Tiger)")),
        cand(6, Verdict.TRUE, _block(["Quiet(x)", "Red(x)"], ["Quiet(Anne)"], "Red(Anne)")),
    ]


def balance_candidates():
    """Four good candidates labelled True, True, False, Uncertain."""
    from folpipe.datasynth import CandidateRecord
    from folpipe.pipeline import ReasoningProblem
    from folpipe.reasoner import Verdict

    rows = [
        (Verdict.TRUE, ["Quiet", "Red"], ["Quiet(Anne)", "∀x (Quiet(x) → Red(x))"], "Red(Anne)"),
        (Verdict.TRUE, ["Young", "Red"], ["Young(Erin)"], "Young(Erin) ∨ Red(Erin)"),
        (Verdict.FALSE, ["Red"], ["¬Red(Bob)"], "Red(Bob)"),
        (Verdict.UNCERTAIN, ["Quiet", "Red"], ["Quiet(Fiona)"], "Red(Fiona)"),
    ]
    out = []
    for i, (label, names, premises, conclusion) in enumerate(rows):
        problem = ReasoningProblem(f"b{i}", tuple(f"Sentence {j}." for j in range(len(premises))), "Q?", label)
        out.append(CandidateRecord(problem, _block([f"{n}(x)" for n in names], premises, conclusion)))
    return out


# --- taxonomy exhibits --------------------------------------------------------


# one exemplar per error kind: statements, expected (group, kind) headline
TAXONOMY_EXEMPLARS = [
    (["BerkeleyCollege(x) ∧ ResidentialCollegeAt(x, yaleUniversity)"], ("Parsing", "MissingQuantifier")),
    (["BeneficialTo(cherry, people) ⊕ On(cherry, warningList)) → ¬RedFruit(cherry)"],
     ("Parsing", "ParenthesisError")),
    (["∀x (Athlete(x) → ¬NeverExercises(x)) Never: does not exist a time"], ("Parsing", "CompletionError")),
    (["∃y (Own(emily, y) ∧ Roommate(y)) → ∃y (Own(emily, y) ∧ LiveIn(emily, apartment))"],
     ("Type", "QuantifierLocation")),
    (["∀x ∃y (In(indonesia) ∧ Prosecutor(x) ∧ SpecialCrime(y) → InvestigatePersonally(x, y))"],
     ("Type", "MissingVariable")),
    (["Endowment(yale, 42.3 billion)"], ("Token", "SpecialToken")),
    (["∀x (Rating(x, y) ∧ y > 4 → Listed(x))"], ("Token", "UnknownOperator")),
    (["Sees(Tiger, Mouse)", "∀x (((Visits(x, Rabbit)) ∧ (Sees(Mouse))) → (Visits(x, Tiger)))"],
     ("Predicate", "ArityMismatch")),
    (["Platypus(platypus) ∧ ¬Teeth(platypus) ∧ Mammal(platypus)"], ("Predicate", "SubjectPredicateConflict")),
]

FEEDBACK_EXEMPLARS = [
    ("'NoneType' object has no attribute 'rstrip'", ErrorKind.MISSING_VARIABLE),
    ("The following symbols are used with multiple arities: Sees/2, Sees/1", ErrorKind.ARITY_MISMATCH),
    ("A term cannot be constructed from the marked string", ErrorKind.PARENTHESIS_ERROR),
    ("Unexpected token:'-'", ErrorKind.UNKNOWN_OPERATOR),
]
