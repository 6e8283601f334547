"""Prompt templates for the four generation modes and the built-in few-shot exemplars."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from folpipe.pipeline.problems import ReasoningProblem


class PromptMode(enum.Enum):
    STANDARD = "Standard"
    PREDICATES_ONLY = "PredicatesOnly"
    FOL_GIVEN_PREDICATES = "FolGivenPredicates"
    VERIFIER = "Verifier"


@dataclass(frozen=True)
class FewShot:
    problem: ReasoningProblem
    output: str
    predicates: str | None = None  # ';'-line shown in the user turn (FolGivenPredicates, Verifier)


@dataclass(frozen=True)
class PromptTemplate:
    """System text, few-shot turns and a user-turn layout.

    ``render`` is a pure function of the template and its arguments.
    """

    mode: PromptMode
    system: str
    examples: tuple[FewShot, ...] = ()
    premises_header: str = "Premises:"
    conclusion_header: str = "Conclusion:"

    def user_turn(self, problem: ReasoningProblem, predicates: str | None = None) -> str:
        lines = [self.premises_header, " ".join(p.strip() for p in problem.premises),
                 self.conclusion_header, problem.conclusion.strip()]
        if self.mode in (PromptMode.FOL_GIVEN_PREDICATES, PromptMode.VERIFIER):
            if predicates is None:
                raise ValueError(f"{self.mode.value} prompts need a predicate line")
            lines += ["Predicates:", predicates]
        return "\n".join(lines)

    def render(self, problem: ReasoningProblem, predicates: str | None = None) -> list[dict]:
        messages = [{"role": "system", "content": self.system}]
        for shot in self.examples:
            messages.append({"role": "user", "content": self.user_turn(shot.problem, shot.predicates)})
            messages.append({"role": "assistant", "content": shot.output})
        messages.append({"role": "user", "content": self.user_turn(problem, predicates)})
        return messages


# --- exemplars ---------------------------------------------------------------

SYNTHESIS_INSTRUCTION = (
    "You are an expert who works with theorem provers. Given some context and a question, generate the "
    "predicates and the first-order logic formula for contexts and question. Here is an example."
)
ICL_INSTRUCTION = (
    "Given a set of premises and a conclusion, generate the predicates and first-order logic representation "
    "of both the premises and the conclusion."
)
VERIFIER_INSTRUCTION = (
    "You are given a premise, a conclusion, and a list of predicates. Check if the predicates correctly "
    "represent the premise and conclusion.\n"
    "Rules:Watch for arity errors: this happens when the same predicate symbol is used with different "
    "numbers of arguments.\n"
    "Example: Parent(x, y) (2 arguments) vs. Parent(x) (1 argument) → arity error.\n"
    'If all predicates are correct, output:"correct"\n'
    "If there are errors, output the corrected list of predicates only"
)

PROOFWRITER_EXEMPLAR = ReasoningProblem(
    id="proofwriter-exemplar",
    premises=(
        "Anne is quiet.", "Erin is furry.", "Erin is green.", "Fiona is furry.", "Fiona is quiet.",
        "Fiona is red.", "Fiona is rough.", "Fiona is white.", "Harry is furry.", "Harry is quiet.",
        "Harry is white.", "Young people are furry.", "If Anne is quiet then Anne is red.",
        "Young, green people are rough.", "If someone is green then they are white.",
        "If someone is furry and quiet then they are white.", "If someone is young and white then they are rough.",
        "All red people are young.",
    ),
    conclusion="Anne is white.",
)

PROOFWRITER_PREDICATES = """Predicates:
Quiet(x) ::: x is quiet
Furry(x) ::: x is furry
Green(x) ::: x is green
Red(x) ::: x is red
Rough(x) ::: x is rough
White(x) ::: x is white
Young(x) ::: x is young
"""

PROOFWRITER_FOL = """Premises:
Quiet(Anne) ::: Anne is quiet.
Furry(Erin) ::: Erin is furry.
Green(Erin) ::: Erin is green.
Furry(Fiona) ::: Fiona is furry.
Quiet(Fiona) ::: Fiona is quiet.
Red(Fiona) ::: Fiona is red.
Rough(Fiona) ::: Fiona is rough.
White(Fiona) ::: Fiona is white.
Furry(Harry) ::: Harry is furry.
Quiet(Harry) ::: Harry is quiet.
White(Harry) ::: Harry is white.
∀x (Young(x) → Furry(x)) ::: Young people are furry.
Quiet(Anne) → ¬Red(Anne) ::: If Anne is quiet then Anne is not red.
∀x (Young(x) ∧ Green(x) → Rough(x)) ::: Young, green people are rough.
∀x (Green(x) → White(x)) ::: If someone is green then they are white.
∀x (Furry(x) ∧ Quiet(x) → ¬White(x)) ::: If someone is furry and quiet then they are not white.
∀x (Young(x) ∧ White(x) → Rough(x)) ::: If someone is young and white they are rough.
∀x (Red(x) → Young(x)) ::: All red people are young.
Conclusion:
White(Anne) ::: Anne is white.
"""

PROOFWRITER_OUTPUT = PROOFWRITER_PREDICATES + PROOFWRITER_FOL
PROOFWRITER_PREDICATE_LINE = "Quiet(x); Furry(x); Green(x); Red(x); Rough(x); White(x); Young(x)"

BRADEN_EXEMPLAR = ReasoningProblem(
    id="braden-exemplar",
    premises=(
        "Braden advances medical knowledge.",
        ("If Braden pursues science, then he can either make a groundbreaking discovery or advance medical "
         "knowledge, but not both."),
        "Braden pursues science.",
    ),
    conclusion="Braden makes a groundbreaking discovery.",
)
BRADEN_OUTPUT = """Predicates:
AdvancesMedicalKnowledge(x);
PursuesScience(x);
MakesDiscovery(x);
Premise_First-order:
AdvancesMedicalKnowledge(Braden) ::: Braden advances medical knowledge.;
PursuesScience(Braden) → (MakesDiscovery(Braden) ⊕ AdvancesMedicalKnowledge(Braden)) ::: If Braden pursues science, then he can either make a groundbreaking discovery or advance medical knowledge, but not both.;
PursuesScience(Braden) ::: Braden pursues science.
Conclusion_First-order:
MakesDiscovery(Braden) ::: Braden makes a groundbreaking discovery.
"""

_PREREQ_PROBLEM = ReasoningProblem(
    id="verifier-prerequisites",
    premises=(
        "If a class has prerequisites, the student must take the prerequisites to take the class.",
        ("If a class has no prerequisites, then the student can take the class CPSC 201 and CPSC 223 are "
         "prerequisites for CPSC 323."),
        "Intro Microeconomics is the only prerequisite for Intermediate Microeconomics.",
        "Intro Geology has no prerequisites.",
    ),
    conclusion="Intermediate Microeconomics has one prerequisite.",
)
_YALE_PROBLEM = ReasoningProblem(
    id="verifier-yale",
    premises=(
        "Yale University is a private Ivy League research university.",
        "Yale University moved to New Haven in 1716.",
        "Yale university's endowment was valued at 42.3 billion.",
    ),
    conclusion="Yale University has the largest university endowment of any educational institution.",
)

VERIFIER_EXAMPLES = (
    FewShot(_PREREQ_PROBLEM, "Predicates:\nClass(x); Prereq(x, y); Student(x); Take(x, y); CanTake(x, y)",
            "CanTake(x); CanTake(x, y); Class(x); Prereq(x, y); Student(x); Take(x); Taken(x)"),
    FewShot(_YALE_PROBLEM, "correct",
            "Is(x, y); Endowment(x, y); ResidentialCollege(x); ResearchUniversity(x); IvyLeague(x); "
            "MoveTo(x, y); List(x, y); Value(x, y)"),
    # an extra variable inserted into Young
    FewShot(PROOFWRITER_EXEMPLAR, "Predicates:\n" + PROOFWRITER_PREDICATE_LINE,
            "Quiet(x); Furry(x); Green(x); Red(x); Rough(x); White(x); Young(x); Young(x, y)"),
)


def standard_template(shots: int = 1) -> PromptTemplate:
    examples = (FewShot(PROOFWRITER_EXEMPLAR, PROOFWRITER_OUTPUT),)[:shots]
    return PromptTemplate(PromptMode.STANDARD, SYNTHESIS_INSTRUCTION, examples)


def icl_template() -> PromptTemplate:
    return PromptTemplate(PromptMode.STANDARD, ICL_INSTRUCTION, (FewShot(BRADEN_EXEMPLAR, BRADEN_OUTPUT),),
                          premises_header="Premise:")


def predicates_template(shots: int = 1) -> PromptTemplate:
    examples = (FewShot(PROOFWRITER_EXEMPLAR, PROOFWRITER_PREDICATES),)[:shots]
    return PromptTemplate(PromptMode.PREDICATES_ONLY, SYNTHESIS_INSTRUCTION, examples)


def fol_template(shots: int = 1) -> PromptTemplate:
    examples = (FewShot(PROOFWRITER_EXEMPLAR, PROOFWRITER_FOL, PROOFWRITER_PREDICATE_LINE),)[:shots]
    return PromptTemplate(PromptMode.FOL_GIVEN_PREDICATES, SYNTHESIS_INSTRUCTION, examples)


def verifier_template() -> PromptTemplate:
    return PromptTemplate(PromptMode.VERIFIER, VERIFIER_INSTRUCTION, VERIFIER_EXAMPLES)
