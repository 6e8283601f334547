"""Reasoning problems and JSON-lines io."""

from __future__ import annotations

import json
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from pathlib import Path

from folpipe.reasoner.prover import Verdict


@dataclass(frozen=True)
class ReasoningProblem:
    """Natural-language premises and conclusion, optionally with a gold label and gold FOL."""

    id: str
    premises: tuple[str, ...]
    conclusion: str
    label: Verdict | None = None
    gold_fol: tuple[str, ...] | None = None

    def __post_init__(self):
        if isinstance(self.premises, str) or not self.premises:
            raise ValueError(f"problem {self.id!r} needs at least one premise")
        object.__setattr__(self, "premises", tuple(self.premises))
        if self.gold_fol is not None:
            object.__setattr__(self, "gold_fol", tuple(self.gold_fol))
        if isinstance(self.label, str):
            object.__setattr__(self, "label", Verdict.parse(self.label))

    def to_dict(self) -> dict:
        d = {"id": self.id, "premises": list(self.premises), "conclusion": self.conclusion}
        if self.label is not None:
            d["label"] = self.label.value
        if self.gold_fol is not None:
            d["gold_fol"] = list(self.gold_fol)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> ReasoningProblem:
        premises = d["premises"]
        if isinstance(premises, str):
            premises = [premises]
        label = d.get("label")
        return cls(str(d["id"]), tuple(premises), d["conclusion"],
                   Verdict.parse(label) if label is not None else None, d.get("gold_fol"))


def iter_jsonl(path: str | Path) -> Iterator[dict]:
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                yield json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{n}: invalid JSON ({exc.msg})") from exc


def write_jsonl(path: str | Path, rows: Iterable[dict]) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False, sort_keys=True) + "\n")
            n += 1
    return n


def read_problems(path: str | Path) -> list[ReasoningProblem]:
    problems = []
    for n, row in enumerate(iter_jsonl(path), 1):
        try:
            problems.append(ReasoningProblem.from_dict(row))
        except (KeyError, ValueError) as exc:
            raise ValueError(f"{path}: record {n}: {exc}") from exc
    return problems


def write_problems(path: str | Path, problems: Iterable[ReasoningProblem]) -> int:
    return write_jsonl(path, (p.to_dict() for p in problems))
