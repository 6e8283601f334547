"""Parsing of full model generations in the Predicates / Premises / Conclusion layout."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from folpipe.logic.errors import FormattingFailure, ParseFailure
from folpipe.logic.parser import parse_formula
from folpipe.logic.render import render
from folpipe.logic.syntax import Dialect, Statement

SECTIONS = ("predicates", "premises", "conclusion")

_HEADER = re.compile(
    r"""^\s*[#*_\s]*
    (?P<name>predicates?|premises?(?:[_\s-]*first[_\s-]*order)?|conclusions?(?:[_\s-]*first[_\s-]*order)?)
    [*_\s]*:[*_\s]*(?P<rest>.*)$""",
    re.IGNORECASE | re.VERBOSE,
)


def match_header(line: str) -> tuple[str, str] | None:
    """Return (section, trailing text) when ``line`` is a section header."""
    m = _HEADER.match(line)
    if m is None:
        return None
    name = m.group("name").lower()
    for section in SECTIONS:
        if name.startswith(section[:7]):
            return section, m.group("rest").strip()
    return None


def split_gloss(line: str) -> tuple[str, str | None]:
    line = line.strip()
    if line.endswith(";"):
        line = line[:-1].rstrip()
    if ":::" in line:
        formula, gloss = line.split(":::", 1)
        return formula.strip(), gloss.strip()
    return line, None


def parse_statement(line: str) -> Statement:
    text, gloss = split_gloss(line)
    try:
        return Statement(text, parse_formula(text), gloss)
    except ParseFailure as exc:
        return Statement(text, None, gloss, exc)


@dataclass
class TranslationRecord:
    """One parsed generation. Each formula is parsed on its own, so bad lines don't void the record."""

    predicate_lines: list[str]
    premises: list[Statement]
    conclusion: Statement
    text: str = ""
    extras: dict = field(default_factory=dict)

    @property
    def statements(self) -> list[Statement]:
        return [*self.premises, self.conclusion]

    def locate(self, index: int) -> tuple[str, int]:
        """Map a flat statement index onto (section, index within section)."""
        if index < len(self.premises):
            return "premises", index
        return "conclusion", 0

    @property
    def all_parsed(self) -> bool:
        return all(s.ok for s in self.statements)

    def is_valid(self, n_premises: int | None = None) -> bool:
        if not self.all_parsed:
            return False
        return n_premises is None or n_premises == len(self.premises)

    def to_text(self, dialect: Dialect = Dialect.UNICODE) -> str:
        """Render in the Predicates / Premises / Conclusion layout."""
        lines = ["Predicates:"]
        lines.extend(self.predicate_lines)
        lines.append("Premises:")
        lines.extend(_statement_line(s, dialect) for s in self.premises)
        lines.append("Conclusion:")
        lines.append(_statement_line(self.conclusion, dialect))
        return "\n".join(lines) + "\n"


def _statement_line(s: Statement, dialect: Dialect) -> str:
    body = render(s.formula, dialect) if s.formula is not None else s.text
    return f"{body} ::: {s.gloss}" if s.gloss is not None else body


def split_sections(text: str, *, require_predicates: bool = True) -> dict[str, list[str]]:
    """Split ``text`` by section header; text before the first header is ignored."""
    if not text or not text.strip():
        raise FormattingFailure("empty generation", SECTIONS)
    sections: dict[str, list[str]] = {}
    order: list[str] = []
    current = None
    for raw in text.splitlines():
        header = match_header(raw)
        if header is not None:
            name, rest = header
            if name in sections:
                raise FormattingFailure(f"duplicate {name} section")
            sections[name] = []
            order.append(name)
            current = name
            line = rest
        else:
            line = raw
        if current is None:
            continue
        line = line.strip()
        if line and not _is_separator(line):
            sections[current].append(line)

    wanted = SECTIONS if require_predicates else SECTIONS[1:]
    missing = tuple(s for s in wanted if s not in sections)
    if missing:
        raise FormattingFailure(f"missing section: {', '.join(missing)}", missing)
    expected = [s for s in SECTIONS if s in sections]
    if order != expected:
        raise FormattingFailure(f"sections out of order: {' / '.join(order)}")
    for name in wanted:
        if not sections[name]:
            raise FormattingFailure(f"empty {name} section", (name,))
    return sections


def _is_separator(line: str) -> bool:
    return set(line) <= set("-#=`*_ ")


def split_declarations(lines: list[str]) -> list[str]:
    """Declaration lines may hold several ``;``-separated predicates."""
    out = []
    for line in lines:
        formula, gloss = split_gloss(line)
        parts = [p.strip() for p in formula.split(";")] if gloss is None else [formula]
        for part in parts:
            if part:
                out.append(part if gloss is None else f"{part} ::: {gloss}")
    return out


def parse_translation_block(text: str, *, require_predicates: bool = True) -> TranslationRecord:
    """Parse a full generation.

    Raises
    ------
    FormattingFailure
        When a section header is missing, duplicated or out of order, a section is
        empty, or the conclusion section holds more than one statement.
    """
    sections = split_sections(text, require_predicates=require_predicates)
    conclusion_lines = sections["conclusion"]
    if len(conclusion_lines) != 1:
        raise FormattingFailure(f"conclusion section holds {len(conclusion_lines)} statements")
    return TranslationRecord(
        predicate_lines=split_declarations(sections.get("predicates", [])),
        premises=[parse_statement(line) for line in sections["premises"]],
        conclusion=parse_statement(conclusion_lines[0]),
        text=text,
    )
