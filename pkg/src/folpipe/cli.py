"""Command-line interface: ``folpipe parse | check | solve | run | synth | batch-requests``.

Exit status: 0 success, 1 input or validation failure, 2 configuration error,
3 transport failure. Batch commands exit 0 even when single records fail.
"""

from __future__ import annotations

import json
import logging
import os
import sys
from dataclasses import fields
from pathlib import Path

import click

from folpipe.datasynth import (
    audit_corpus,
    balance_labels,
    batch_requests,
    load_candidates,
    read_outputs,
    synthesize,
    write_corpus,
    write_json,
)
from folpipe.logic.block import parse_translation_block
from folpipe.logic.errors import FormattingFailure, ParseFailure
from folpipe.logic.parser import parse_formula
from folpipe.logic.render import render
from folpipe.logic.syntax import (
    And,
    Atom,
    Dialect,
    Exists,
    ForAll,
    Iff,
    Implies,
    Not,
    Or,
    Statement,
    Var,
    Xor,
    atoms,
)
from folpipe.pipeline.clients import (
    ENV_API_KEY,
    ENV_ENDPOINT,
    ENV_MODEL,
    FailingClient,
    GeneratorConfig,
    HttpChatClient,
    MockClient,
    ReplayClient,
    loop_responder,
)
from folpipe.pipeline.evaluation import evaluate
from folpipe.pipeline.problems import ReasoningProblem, read_problems, write_jsonl
from folpipe.pipeline.prompts import VERIFIER_INSTRUCTION, standard_template
from folpipe.pipeline.runner import Pipeline, RunMode
from folpipe.predicates import (
    PredicateSet,
    PredicateSignature,
    compute_metrics,
    extract_used_predicates,
    parse_predicate_decls,
)
from folpipe.reasoner.oracle import BoundExceeded, grounding_oracle, witnesses_needed
from folpipe.reasoner.prover import ProofLimits, prove
from folpipe.taxonomy import classify, classify_statement, classify_statements, headline

EXIT_OK, EXIT_INPUT, EXIT_CONFIG, EXIT_TRANSPORT = 0, 1, 2, 3

log = logging.getLogger("folpipe")


class ConfigError(click.ClickException):
    exit_code = EXIT_CONFIG


class InputError(click.ClickException):
    exit_code = EXIT_INPUT


def _emit(obj) -> None:
    click.echo(json.dumps(obj, indent=2, ensure_ascii=False))


def ast_json(f) -> dict:
    if isinstance(f, Atom):
        return {"atom": f.predicate, "args": [{"var" if isinstance(t, Var) else "const": t.name} for t in f.args]}
    if isinstance(f, Not):
        return {"not": ast_json(f.body)}
    if isinstance(f, (And, Or, Implies, Iff, Xor)):
        return {type(f).__name__.lower(): [ast_json(f.left), ast_json(f.right)]}
    if isinstance(f, (ForAll, Exists)):
        return {type(f).__name__.lower(): f.var, "body": ast_json(f.body)}
    raise TypeError(type(f))


def _limits(spec: str | None) -> ProofLimits:
    try:
        return ProofLimits.parse(spec) if spec else ProofLimits()
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad --limits: {exc}") from exc


# --- configuration ------------------------------------------------------------


def load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    return data


_ENV = {"endpoint": ENV_ENDPOINT, "api_key": ENV_API_KEY, "model": ENV_MODEL}


def resolve(key: str, flag, config: dict, default=None):
    """Flags win over environment variables, which win over the config file."""
    if flag is not None:
        return flag
    env = _ENV.get(key)
    if env and os.environ.get(env):
        return os.environ[env]
    return config.get(key, default)


def generator_config(config: dict, **flags) -> GeneratorConfig:
    known = {f.name for f in fields(GeneratorConfig)}
    values = {k: resolve(k, flags.get(k), config) for k in known}
    values = {k: v for k, v in values.items() if v is not None}
    if "stop" in values:
        values["stop"] = tuple(values["stop"])
    try:
        return GeneratorConfig(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad generator configuration: {exc}") from exc


# --- commands -----------------------------------------------------------------


@click.group()
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for every random choice.")
@click.option("--jobs", type=int, default=None, help="Worker pool width (default: CPU count).")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None, help="JSON config file.")
@click.option("-v", "--verbose", count=True)
@click.pass_context
def main(ctx, seed, jobs, config_path, verbose):
    """NL-to-FOL translation toolkit: parsing, error taxonomy, proving, pipelines and corpus synthesis."""
    logging.basicConfig(level=logging.WARNING - 10 * min(verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    config = load_config(config_path)
    jobs = jobs if jobs is not None else config.get("jobs", os.cpu_count() or 1)
    if jobs < 1:
        raise ConfigError("--jobs must be >= 1")
    ctx.obj = {"seed": seed, "jobs": jobs, "config": config}


@main.command("parse")
@click.argument("formula", required=False)
@click.option("--dialect", type=click.Choice(["unicode", "ascii"]), default="unicode")
def cmd_parse(formula, dialect):
    """Parse FORMULA (or stdin) and print its AST; defects are reported with exit 1."""
    text = formula if formula is not None else sys.stdin.read().strip()
    try:
        f = parse_formula(text)
        statement = Statement(text, f)
    except ParseFailure as exc:
        f, statement = None, Statement(text, None, None, exc)
    reports = classify_statement(statement)
    out = {"input": text, "reports": [r.to_dict() for r in reports]}
    if f is not None:
        out["ast"] = ast_json(f)
        out["rendered"] = render(f, Dialect(dialect))
    _emit(out)
    sys.exit(EXIT_INPUT if reports else EXIT_OK)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


@main.command("check")
@click.argument("block", type=click.Path(dir_okay=False))
@click.option("--predicates", "predicates_path", type=click.Path(dir_okay=False), default=None,
              help="Declared predicates (one per line or ';'-separated); default: the block's own section.")
def cmd_check(block, predicates_path):
    """Validate a translation block: validity, error reports and predicate metrics."""
    text = _read(block)
    declared = None
    if predicates_path:
        declared = parse_predicate_decls(_read(predicates_path).splitlines())
    try:
        parsed = parse_translation_block(text)
    except FormattingFailure as exc:
        parsed = exc
    reports = classify(text, parsed, declared=declared)
    out = {"valid": not isinstance(parsed, FormattingFailure) and parsed.all_parsed,
           "reports": [r.to_dict() for r in reports]}
    top = headline(reports)
    out["headline"] = top.kind.value if top else None
    if not isinstance(parsed, FormattingFailure):
        px = declared if declared is not None else parse_predicate_decls(parsed.predicate_lines)
        out["metrics"] = compute_metrics(px, extract_used_predicates(parsed.statements), out["valid"]).to_dict()
    _emit(out)
    sys.exit(EXIT_OK if out["valid"] and not reports else EXIT_INPUT)


def read_solve_input(text: str) -> list[Statement]:
    """Premises then conclusion, from JSON ``{"premises": [...], "conclusion": ...}`` or a block."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            data = json.loads(text)
            lines = [*data["premises"], data["conclusion"]]
        except (ValueError, KeyError, TypeError) as exc:
            raise InputError(f"bad problem JSON: {exc}") from exc
        out = []
        for line in lines:
            try:
                out.append(Statement(line, parse_formula(line)))
            except ParseFailure as exc:
                out.append(Statement(line, None, None, exc))
        return out
    try:
        record = parse_translation_block(text, require_predicates=False)
    except FormattingFailure as exc:
        raise InputError(f"formatting: {exc.reason}") from exc
    return record.statements


@main.command("solve")
@click.argument("problem", type=click.Path(dir_okay=False))
@click.option("--oracle", is_flag=True, help="Decide by grounding over the constants instead of resolution.")
@click.option("--limits", "limits_spec", default=None, help="e.g. max_clauses=10000,max_seconds=5")
@click.option("--json", "as_json", is_flag=True, help="Print a JSON object instead of the bare verdict.")
def cmd_solve(problem, oracle, limits_spec, as_json):
    """Print True, False or Uncertain for a problem file."""
    limits = _limits(limits_spec)
    statements = read_solve_input(_read(problem))
    reports = classify_statements(statements, None, len(statements) - 1)
    if reports:
        for r in reports:
            click.echo(f"{r.kind.value}: {r.detail}", err=True)
        sys.exit(EXIT_INPUT)
    premises = [s.formula for s in statements[:-1]]
    conclusion = statements[-1].formula
    if oracle:
        extra = witnesses_needed(premises, conclusion)
        if extra is None:
            log.warning("existential below a universal: the oracle domain is the constants only")
        try:
            result = grounding_oracle(premises, conclusion, extra_elements=extra or 0)
        except BoundExceeded as exc:
            raise InputError(str(exc)) from exc
        verdict, inconsistent = result.verdict, result.inconsistent
    else:
        proof = prove(premises, conclusion, limits)
        if proof.error is not None:
            click.echo(f"{proof.error.kind.value}: {proof.error.detail}", err=True)
            sys.exit(EXIT_INPUT)
        verdict, inconsistent = proof.verdict, proof.inconsistent
    if as_json:
        _emit({"verdict": verdict.value, "inconsistent": inconsistent, "method": "oracle" if oracle else "prover"})
    else:
        click.echo(verdict.value)


def gold_responder(problems: list[ReasoningProblem]):
    """A mock model that answers with each problem's gold FOL (last formula is the conclusion)."""
    by_premises = {" ".join(p.strip() for p in pr.premises): pr for pr in problems if pr.gold_fol}

    def respond(messages) -> str:
        last = messages[-1]["content"]
        if messages[0]["content"] == VERIFIER_INSTRUCTION:
            return "correct"
        problem = next((p for key, p in by_premises.items() if key and key in last), None)
        if problem is None:
            return ""
        formulas = list(problem.gold_fol)
        sigs = PredicateSet()
        for text in formulas:
            try:
                sigs = sigs | PredicateSet(PredicateSignature(a.predicate, a.arity) for a in atoms(parse_formula(text)))
            except ParseFailure:
                pass
        fol = "Premises:\n" + "\n".join(formulas[:-1]) + "\nConclusion:\n" + formulas[-1] + "\n"
        if "\nPredicates:\n" in last:
            return fol
        return "Predicates:\n" + "\n".join(s.declaration() for s in sigs) + "\n" + fol

    return respond


def make_client(kind: str, gen: GeneratorConfig, replay: str | None, mock: str, problems):
    if kind == "http":
        try:
            return HttpChatClient(gen)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    if kind == "replay":
        if not replay:
            raise ConfigError("--client replay needs --replay FILE")
        try:
            return ReplayClient.from_file(replay)
        except (OSError, ValueError, KeyError) as exc:
            raise ConfigError(f"cannot load replay file: {exc}") from exc
    if mock == "loop":
        return MockClient(loop_responder())
    if mock == "gold":
        return MockClient(gold_responder(problems))
    if mock == "fail":
        return FailingClient()
    raise ConfigError(f"unknown mock {mock!r}")


_MODES = {"standard": RunMode.STANDARD, "icl": RunMode.ICL, "incremental": RunMode.INCREMENTAL}


@main.command("run")
@click.option("--dataset", required=True, type=click.Path(dir_okay=False), help="Problems as JSON lines.")
@click.option("--mode", type=click.Choice(sorted(_MODES)), default="standard", show_default=True)
@click.option("--verifier", type=click.Choice(["none", "deterministic", "model"]), default="none", show_default=True)
@click.option("--client", "client_kind", type=click.Choice(["http", "replay", "mock"]), default="http",
              show_default=True)
@click.option("--replay", type=click.Path(dir_okay=False), default=None, help="Replay file for --client replay.")
@click.option("--verifier-replay", type=click.Path(dir_okay=False), default=None,
              help="Separate replay file answering verifier prompts.")
@click.option("--mock", type=click.Choice(["loop", "gold", "fail"]), default="loop", show_default=True)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
@click.option("--name", "dataset_name", default=None, help="Dataset name in the heatmap (default: file stem).")
@click.option("--endpoint", default=None)
@click.option("--model", default=None)
@click.option("--api-key", default=None)
@click.option("--temperature", type=float, default=None)
@click.option("--max-tokens", type=int, default=None)
@click.option("--stage1-share", type=float, default=None, help="Incremental: budget fraction for predicates.")
@click.option("--limits", "limits_spec", default=None)
@click.option("--timing/--no-timing", default=True, help="Include latencies in results.")
@click.pass_context
def cmd_run(ctx, dataset, mode, verifier, client_kind, replay, verifier_replay, mock, out_dir, dataset_name,
            endpoint, model, api_key, temperature, max_tokens, stage1_share, limits_spec, timing):
    """Run a dataset through the pipeline; writes results.jsonl, summary.json and heatmap.csv."""
    config = ctx.obj["config"]
    gen = generator_config(config, endpoint=endpoint, model=model, api_key=api_key, temperature=temperature,
                           max_tokens=max_tokens, stage1_share=stage1_share)
    limits = _limits(resolve("limits", limits_spec, config))
    if verifier != "none" and mode != "incremental":
        raise ConfigError("--verifier needs --mode incremental")
    try:
        problems = read_problems(dataset)
    except (OSError, ValueError) as exc:
        raise InputError(str(exc)) from exc
    client = make_client(client_kind, gen, replay, mock, problems)
    verifier_client = None
    if verifier_replay:
        verifier_client = make_client("replay", gen, verifier_replay, mock, problems)
    run_mode = _MODES[mode]
    if verifier != "none":
        run_mode = RunMode.INCREMENTAL_VERIFIER
    pipeline = Pipeline(client, gen, run_mode, verifier=None if verifier == "none" else verifier,
                        verifier_client=verifier_client, limits=limits, jobs=ctx.obj["jobs"])
    results = pipeline.run(problems)
    summary = evaluate(results, dataset_name or Path(dataset).stem)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_jsonl(out / "results.jsonl", (r.to_dict(timing) for r in results))
    write_json(out / "summary.json", {"mode": run_mode.value, **summary.to_dict()})
    (out / "heatmap.csv").write_text(summary.heatmap.to_csv(), encoding="utf-8")
    click.echo(f"{run_mode.value}: n={summary.n} execution={summary.execution_rate:.3f} "
               f"accuracy={summary.accuracy:.3f} coverage={summary.mean_coverage:.3f} "
               f"usage={summary.mean_usage:.3f} valid={summary.valid_rate:.3f} errors={summary.n_reports}")
    if isinstance(client, HttpChatClient):
        client.close()
    if results and all(r.transport_error for r in results):
        click.echo("every request failed", err=True)
        sys.exit(EXIT_TRANSPORT)


@main.command("synth")
@click.option("--dataset", required=True, type=click.Path(dir_okay=False), help="Labelled problems (JSON lines).")
@click.option("--outputs", required=True, type=click.Path(dir_okay=False),
              help="Generator outputs keyed by id (batch-response or {id, output} lines).")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
@click.option("--balance", "balance_seed", type=int, default=None, help="Balance labels with this seed.")
@click.option("--limits", "limits_spec", default=None)
@click.pass_context
def cmd_synth(ctx, dataset, outputs, out_dir, balance_seed, limits_spec):
    """Filter generator outputs into a corpus; prints per-stage survivor counts."""
    limits = _limits(resolve("limits", limits_spec, ctx.obj["config"]))
    try:
        problems = read_problems(dataset)
        candidates = load_candidates(problems, read_outputs(outputs))
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigError(f"cannot load synthesis inputs: {exc}") from exc
    report = synthesize(candidates, limits, ctx.obj["jobs"])
    corpus = report.corpus
    if balance_seed is not None:
        corpus = balance_labels(corpus, balance_seed)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_corpus(out / "corpus.jsonl", corpus)
    write_jsonl(out / "rejections.jsonl", report.rejections)
    write_json(out / "audit.json", {"counts": report.counts, "emitted": len(corpus), **audit_corpus(corpus)})
    click.echo(report.survivor_line() + f" / emitted {len(corpus)}")


@main.command("batch-requests")
@click.option("--dataset", required=True, type=click.Path(dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--model", default=None)
@click.option("--max-tokens", type=int, default=None)
@click.pass_context
def cmd_batch_requests(ctx, dataset, out_path, model, max_tokens):
    """Write chat-completions batch requests for corpus generation."""
    gen = generator_config(ctx.obj["config"], model=model, max_tokens=max_tokens)
    try:
        problems = read_problems(dataset)
    except (OSError, ValueError) as exc:
        raise InputError(str(exc)) from exc
    n = write_jsonl(out_path, batch_requests(problems, standard_template(), gen))
    click.echo(f"{n} requests")


if __name__ == "__main__":  # pragma: no cover
    main()
