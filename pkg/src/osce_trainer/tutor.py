"""The examiner agent: contextual hints, training summary, checklist scoring.

Scoring walks the checklist one item at a time. Each item gets its own
prompt and completion, and the reply must open with a strict verdict
line so grades are machine-parseable; a malformed verdict is retried
once and then fails hard rather than silently defaulting to a grade.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping

from .llm import CompletionRequest, Provider, ProviderError
from .log import MessageFeed
from .prompts import PromptEngine
from .scenarios import Scenario


class MalformedVerdict(Exception):
    pass


class ScoringFailed(Exception):
    def __init__(self, item_id: str, reason: str) -> None:
        super().__init__(f"scoring failed for checklist item {item_id!r}: {reason}")
        self.item_id = item_id


class TutorUnavailable(Exception):
    pass


@dataclass(frozen=True)
class Verdict:
    item_id: str
    completed: bool
    justification: str

    def __post_init__(self) -> None:
        if not self.justification.strip():
            raise ValueError("justification must be non-empty")

    @property
    def points(self) -> int:
        return 1 if self.completed else 0


@dataclass(frozen=True)
class ScoreReport:
    verdicts: tuple[Verdict, ...]
    total: int
    max_points: int
    retries: Mapping[str, int] = field(default_factory=dict)  # item_id -> retry count

    def __post_init__(self) -> None:
        if self.total != sum(v.points for v in self.verdicts):
            raise ValueError("total must equal the sum of verdict points")
        if not 0 <= self.total <= self.max_points:
            raise ValueError("total out of range")

    def to_payload(self) -> dict:
        return {
            "verdicts": [
                {"item_id": v.item_id, "completed": v.completed, "justification": v.justification}
                for v in self.verdicts
            ],
            "total": self.total,
            "max": self.max_points,
        }

    def render(self, scenario: Scenario) -> str:
        """Check/cross list in checklist order, plus the summed score."""
        by_id = {item.id: item.description for item in scenario.checklist}
        lines = [
            f"{'✓' if v.completed else '✗'} {by_id.get(v.item_id, v.item_id)} — {v.justification}"
            for v in self.verdicts
        ]
        lines.append(f"OSCE score: {self.total}/{self.max_points}")
        return "\n".join(lines)


_VERDICT_LINE = re.compile(r"\s*VERDICT:\s*(COMPLETED|MISSED)\s*\Z", re.IGNORECASE)


def parse_verdict(completion: str) -> tuple[bool, str]:
    """First line ``VERDICT: COMPLETED|MISSED`` (case-insensitive); rest is justification."""
    first, _, rest = completion.partition("\n")
    match = _VERDICT_LINE.match(first)
    if not match:
        raise MalformedVerdict(f"completion does not start with a verdict line: {first!r}")
    justification = rest.strip()
    if not justification:
        raise MalformedVerdict("verdict has no justification")
    return match.group(1).upper() == "COMPLETED", justification


class TutorAgent:
    """Stateless tutor over a scenario and a student-patient transcript."""

    def __init__(self, provider: Provider, prompts: PromptEngine) -> None:
        self.provider = provider
        self.prompts = prompts

    def _complete(self, prompt: str) -> str:
        try:
            return self.provider.complete(CompletionRequest(prompt=prompt))
        except ProviderError as exc:
            raise TutorUnavailable(str(exc)) from exc

    def help(self, scenario: Scenario, feed: MessageFeed, query: str) -> str:
        prompt = self.prompts.build_tutor_prompt("help", scenario, feed, query=query)
        return self._complete(prompt)

    def summarize(self, scenario: Scenario, feed: MessageFeed) -> str:
        prompt = self.prompts.build_tutor_prompt("summary", scenario, feed)
        return self._complete(prompt)

    def score(self, scenario: Scenario, feed: MessageFeed) -> ScoreReport:
        """One verdict per checklist item, in order; one retry per malformed verdict."""
        verdicts: list[Verdict] = []
        retries: dict[str, int] = {}
        for item in scenario.checklist:
            prompt = self.prompts.build_score_item_prompt(scenario, feed, item)
            attempts = 0
            while True:
                completion = self._complete(prompt)
                attempts += 1
                try:
                    completed, justification = parse_verdict(completion)
                    break
                except MalformedVerdict as exc:
                    if attempts > 1:
                        raise ScoringFailed(item.id, str(exc)) from exc
                    retries[item.id] = retries.get(item.id, 0) + 1
            verdicts.append(Verdict(item_id=item.id, completed=completed, justification=justification))
        return ScoreReport(
            verdicts=tuple(verdicts),
            total=sum(v.points for v in verdicts),
            max_points=len(scenario.checklist),
            retries=retries,
        )
