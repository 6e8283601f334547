import json
from collections import Counter

from helpers import balance_candidates, synth_candidates

from folpipe.datasynth import (
    CandidateRecord,
    CorpusRecord,
    audit_corpus,
    balance_labels,
    batch_requests,
    filter_format,
    filter_semantic,
    filter_syntax,
    load_candidates,
    normalize_output,
    problem_text,
    read_corpus,
    read_outputs,
    run_filters,
    synthesize,
    write_corpus,
)
from folpipe.pipeline import GeneratorConfig, ReasoningProblem, standard_template
from folpipe.reasoner import ProofLimits, Verdict
from folpipe.taxonomy import ErrorKind


def candidate(output, label=Verdict.TRUE):
    return CandidateRecord(ReasoningProblem("x", ("Anne is quiet.",), "Anne is red.", label), output)


def test_candidate_needs_label():
    import pytest

    with pytest.raises(ValueError):
        CandidateRecord(ReasoningProblem("x", ("a",), "b"), "")


def test_normalization_steps():
    text, steps = normalize_output("```fol\nPREMISES:\n\n\nQuiet(Anne)\n```\n")
    assert "stripped code fences" in steps and "normalized section headers" in steps
    assert "collapsed blank lines" in steps
    assert text.startswith("Premises:")


def test_format_filter(exemplar_block):
    assert filter_format(candidate(exemplar_block)).passed
    fenced = filter_format(candidate("```\n" + exemplar_block + "```"))
    assert fenced.passed and fenced.steps == ["stripped code fences"]
    missing = filter_format(candidate(exemplar_block.split("Conclusion:")[0]))
    assert not missing.passed and missing.reports[0].kind is ErrorKind.FORMAT_VIOLATION


def test_syntax_filter(exemplar_block):
    assert filter_syntax(candidate(exemplar_block)).passed
    arity = exemplar_block.replace("Quiet(Anne)", "Quiet(Anne, Bob)", 1)
    result = filter_syntax(candidate(arity))
    assert not result.passed and [r.kind for r in result.reports] == [ErrorKind.ARITY_MISMATCH]
    free = exemplar_block.replace("Quiet(Anne)", "Quiet(x)", 1)
    result = filter_syntax(candidate(free))
    assert [r.kind for r in result.reports] == [ErrorKind.MISSING_QUANTIFIER]


def test_semantic_filter():
    good = "Predicates:\nQuiet(x)\nRed(x)\nPremises:\nQuiet(Anne)\n∀x (Quiet(x) → Red(x))\nConclusion:\nRed(Anne)\n"
    assert filter_semantic(candidate(good)).passed
    flipped = good.replace("→ Red(x)", "→ ¬Red(x)")
    result = filter_semantic(candidate(flipped))
    assert not result.passed and result.verdict is Verdict.FALSE
    unknown = "Predicates:\nQuiet(x)\nRed(x)\nPremises:\nQuiet(Anne)\nConclusion:\nRed(Anne)\n"
    assert filter_semantic(candidate(unknown, Verdict.UNCERTAIN)).passed


def test_semantic_timeouts_are_logged():
    text = ("Predicates:\nNat(x)\nSucc(x, y)\nSpecial(x)\nPremises:\nNat(zero)\n"
            "∀x (Nat(x) → ∃y (Succ(x, y) ∧ Nat(y)))\nConclusion:\nSpecial(zero)\n")
    tight = ProofLimits(max_clauses=50, max_seconds=1.0)
    decided = filter_semantic(candidate(text, Verdict.TRUE), tight)
    assert not decided.passed and decided.timed_out and "limits" in decided.reason
    assert filter_semantic(candidate(text, Verdict.UNCERTAIN), tight).passed


def test_synthesis_counts_and_rejections():
    report = synthesize(synth_candidates())
    assert report.counts == {"input": 6, "format": 4, "syntax": 3, "semantic": 2}
    assert report.survivor_line() == "input 6 / format 4 / syntax 3 / semantic 2"
    assert [(r["id"], r["stage"]) for r in report.rejections] == [
        ("c3", "format"), ("c4", "format"), ("c5", "syntax"), ("c6", "semantic")]


def test_synthesis_parallel_matches_serial():
    serial = synthesize(synth_candidates())
    parallel = synthesize(synth_candidates(), jobs=4)
    assert serial.corpus == parallel.corpus and serial.counts == parallel.counts


def test_all_good_input_keeps_counts_equal():
    report = synthesize(balance_candidates())
    assert len(set(report.counts.values())) == 1


def test_emitted_records_revalidate():
    for rec in synthesize(synth_candidates()).corpus:
        assert run_filters(rec.candidate()).passed


def test_problem_text_layout():
    text = problem_text(ReasoningProblem("x", ("A.", "B."), "C?"))
    assert text == "Context:\nA. B.\n\nQuestion:\nC?"


def test_balance_labels():
    corpus = synthesize(balance_candidates()).corpus
    assert Counter(r.label for r in corpus) == {Verdict.TRUE: 2, Verdict.FALSE: 1, Verdict.UNCERTAIN: 1}
    kept = balance_labels(corpus, seed=1)
    assert len(kept) == 3 and len({r.label for r in kept}) == 3
    assert balance_labels(corpus, seed=1) == kept
    assert balance_labels([], seed=0) == []


def test_balance_floor_rule():
    def rec(i, label):
        return CorpusRecord(str(i), "in", "out", label)

    labels = [Verdict.TRUE] * 10 + [Verdict.FALSE] * 6 + [Verdict.UNCERTAIN] * 8
    kept = balance_labels([rec(i, v) for i, v in enumerate(labels)], seed=3)
    assert Counter(r.label for r in kept) == {v: 6 for v in Verdict if v is not Verdict.ERROR}
    even = [rec(i, v) for i, v in enumerate([Verdict.TRUE, Verdict.FALSE, Verdict.UNCERTAIN] * 10)]
    assert balance_labels(even, seed=0) == even


def test_audit_flags_duplicates_and_unused():
    target = "Predicates:\nQuiet(x)\nQuiet(x)\nRed(x)\nPremises:\nQuiet(Anne)\nConclusion:\nQuiet(Anne)\n"
    audit = audit_corpus([CorpusRecord("a", "in", target, Verdict.TRUE)])
    checks = sorted(f["check"] for f in audit["findings"])
    assert checks == ["duplicate-declaration", "unused-declaration"]


def test_corpus_io_round_trip(tmp_path):
    corpus = synthesize(synth_candidates()).corpus
    path = tmp_path / "corpus.jsonl"
    write_corpus(path, corpus)
    assert read_corpus(path) == corpus
    assert set(json.loads(path.read_text().splitlines()[0])) == {"id", "input", "target", "label"}


def test_batch_files(tmp_path):
    problems = [c.problem for c in synth_candidates()]
    rows = batch_requests(problems, standard_template(), GeneratorConfig(model="m"))
    assert rows[0]["url"] == "/v1/chat/completions" and rows[0]["custom_id"] == "c1"
    assert rows[0]["body"]["messages"][-1]["role"] == "user"
    path = tmp_path / "out.jsonl"
    lines = [
        {"custom_id": "c1", "response": {"body": {"choices": [{"message": {"content": "X"}}]}}},
        {"custom_id": "c2", "response": {"body": {}}},
        {"id": "c3", "output": "Y"},
    ]
    path.write_text("\n".join(json.dumps(r) for r in lines))
    outputs = read_outputs(path)
    assert outputs == {"c1": "X", "c2": "", "c3": "Y"}
    paired = load_candidates(problems, outputs)
    assert [c.output for c in paired][:4] == ["X", "", "Y", ""]
