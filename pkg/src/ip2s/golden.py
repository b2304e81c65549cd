"""Golden timelines: the encoded case-study tables used as exact oracles.

File format: one entry per line, ``step|agent|TRIGGER_CODE|ACTION_CODE(args)``.
Blank lines and '#' comments are ignored. Step values must be consecutive
from 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Sequence

from .errors import ParseError
from .model import Action, AgentId, TimelineEntry, TriggerCode


@dataclass(frozen=True)
class GoldenRow:
    step: int
    agent: AgentId
    trigger: TriggerCode
    action: Action

    def row(self) -> tuple[AgentId, TriggerCode, Action]:
        return (self.agent, self.trigger, self.action)

    def __str__(self) -> str:
        return f"{self.step}|{self.agent}|{self.trigger.value}|{self.action}"


class CompareMode(Enum):
    STRICT = "strict"
    SUBSEQUENCE = "subsequence"


@dataclass(frozen=True)
class Verdict:
    """Comparison outcome; on mismatch carries the first diverging step."""

    matched: bool
    step: int | None = None
    expected: GoldenRow | None = None
    actual: TimelineEntry | None = None

    def describe(self) -> str:
        if self.matched:
            return "Match"
        lines = [f"Mismatch at golden step {self.step}:"]
        lines.append(f"  expected: {self.expected if self.expected else '<end of golden>'}")
        if self.actual is not None:
            lines.append(
                f"  actual:   {self.actual.step}|{self.actual.agent}"
                f"|{self.actual.trigger.value}|{self.actual.action}  (tick {self.actual.tick})"
            )
        else:
            lines.append("  actual:   <no further comparable entry>")
        return "\n".join(lines)


def parse_golden(text: str, source: str = "<golden>") -> list[GoldenRow]:
    rows: list[GoldenRow] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split("|")]
        if len(parts) != 4:
            raise ParseError(
                f"expected 'step|agent|TRIGGER|ACTION(args)', got {raw!r}", f"{source}:{lineno}"
            )
        step_text, agent, trigger_text, action_text = parts
        try:
            step = int(step_text)
        except ValueError:
            raise ParseError(f"bad step ordinal {step_text!r}", f"{source}:{lineno}") from None
        try:
            trigger = TriggerCode(trigger_text)
        except ValueError:
            raise ParseError(f"unknown trigger code {trigger_text!r}", f"{source}:{lineno}") from None
        try:
            action = Action.parse(action_text)
        except ValueError as exc:
            raise ParseError(str(exc), f"{source}:{lineno}") from None
        rows.append(GoldenRow(step=step, agent=agent, trigger=trigger, action=action))
    for i, row in enumerate(rows, start=1):
        if row.step != i:
            raise ParseError(f"steps must be consecutive from 1; step {row.step} at position {i}", source)
    return rows


def load_golden(path: str | Path) -> list[GoldenRow]:
    path = Path(path)
    return parse_golden(path.read_text(encoding="utf-8"), source=str(path))


def compare_timeline(
    entries: Sequence[TimelineEntry], golden: Sequence[GoldenRow], mode: CompareMode
) -> Verdict:
    """Check a run against a golden document.

    Strict: the run's entries, filtered to the golden's agents and to the
    paper-comparable action codes, must equal the golden sequence exactly.
    Subsequence: the golden must appear in order within the full run,
    tolerating plumbing entries in between.
    """
    if mode is CompareMode.STRICT:
        agents = {row.agent for row in golden}
        filtered = [e for e in entries if e.comparable and e.agent in agents]
        for i, row in enumerate(golden):
            if i >= len(filtered):
                return Verdict(False, step=row.step, expected=row, actual=None)
            if filtered[i].row() != row.row():
                return Verdict(False, step=row.step, expected=row, actual=filtered[i])
        if len(filtered) > len(golden):
            return Verdict(False, step=len(golden) + 1, expected=None, actual=filtered[len(golden)])
        return Verdict(True)

    cursor = 0
    for row in golden:
        found = None
        for j in range(cursor, len(entries)):
            if entries[j].row() == row.row():
                found = j
                break
        if found is None:
            remaining = next((e for e in entries[cursor:] if e.comparable), None)
            return Verdict(False, step=row.step, expected=row, actual=remaining)
        cursor = found + 1
    return Verdict(True)
