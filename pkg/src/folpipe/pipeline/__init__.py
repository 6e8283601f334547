"""Standard and incremental NL-to-FOL inference, predicate verification and evaluation."""

from folpipe.pipeline.clients import (
    ClientError,
    Completion,
    FailingClient,
    GeneratorConfig,
    HttpChatClient,
    LanguageModelClient,
    MockClient,
    RecordingClient,
    ReplayClient,
    key_for,
    loop_responder,
)
from folpipe.pipeline.evaluation import EvaluationSummary, evaluate
from folpipe.pipeline.problems import ReasoningProblem, read_problems, write_problems
from folpipe.pipeline.prompts import (
    FewShot,
    PromptMode,
    PromptTemplate,
    fol_template,
    icl_template,
    predicates_template,
    standard_template,
    verifier_template,
)
from folpipe.pipeline.runner import Pipeline, RunMode, RunResult, run_incremental, run_standard, stage_budgets
from folpipe.pipeline.verifier import (
    Provenance,
    VerifierOutcome,
    verify_predicates_deterministic,
    verify_predicates_model,
)

__all__ = [
    "ClientError", "Completion", "EvaluationSummary", "FailingClient", "FewShot", "GeneratorConfig",
    "HttpChatClient", "LanguageModelClient", "MockClient", "Pipeline", "PromptMode", "PromptTemplate",
    "Provenance", "ReasoningProblem", "RecordingClient", "ReplayClient", "RunMode", "RunResult",
    "VerifierOutcome", "evaluate", "fol_template", "icl_template", "key_for", "loop_responder",
    "predicates_template", "read_problems", "run_incremental", "run_standard", "stage_budgets",
    "standard_template", "verifier_template", "verify_predicates_deterministic", "verify_predicates_model",
    "write_problems",
]
