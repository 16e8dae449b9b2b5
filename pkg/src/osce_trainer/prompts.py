"""Deterministic prompt assembly for the patient and tutor agents.

Templates are plain text files with named ``{placeholder}`` slots; only
names from the allowed set are substituted, so literal braces (e.g. JSON
examples inside a template) pass through untouched. Rendering is a pure
function of its inputs: identical inputs yield byte-identical prompts.
"""

from __future__ import annotations

import re
from importlib import resources
from pathlib import Path

from .log import MessageFeed, render_feed
from .scenarios import ChecklistItem, Scenario
from .sim import FunctionSpace, ObservedVariables

TEMPLATE_NAMES = ("patient", "tutor_help", "tutor_summary", "tutor_score_item")

ALLOWED_PLACEHOLDERS = frozenset(
    {
        "role_description",
        "observed_variables",
        "perception_space",
        "action_space",
        "history",
        "task_description",
        "checklist",
        "checklist_item",
        "query",
    }
)

_PLACEHOLDER = re.compile(r"\{(" + "|".join(sorted(ALLOWED_PLACEHOLDERS)) + r")\}")


class UnknownTemplate(Exception):
    pass


class PromptTemplate:
    def __init__(self, name: str, body: str) -> None:
        self.name = name
        self.body = body.replace("\r\n", "\n")

    def placeholders(self) -> set[str]:
        return {m.group(1) for m in _PLACEHOLDER.finditer(self.body)}

    def render(self, **slots: str) -> str:
        missing = self.placeholders() - slots.keys()
        if missing:
            raise ValueError(f"template {self.name}: missing slots {sorted(missing)}")

        def substitute(match: re.Match[str]) -> str:
            return slots[match.group(1)]

        return _PLACEHOLDER.sub(substitute, self.body)


def _load_template(name: str, override_dir: Path | None) -> PromptTemplate:
    if override_dir is not None:
        candidate = override_dir / f"{name}.txt"
        if candidate.exists():
            return PromptTemplate(name, candidate.read_text(encoding="utf-8"))
    body = resources.files("osce_trainer").joinpath(f"templates/{name}.txt").read_text(encoding="utf-8")
    return PromptTemplate(name, body)


def render_checklist(items: tuple[ChecklistItem, ...] | list[ChecklistItem]) -> str:
    """One numbered line per item, in scenario order."""
    return "\n".join(f"{i}. {item.description}" for i, item in enumerate(items, start=1))


class PromptEngine:
    """Loads templates (optionally overridden from a directory) and builds prompts."""

    def __init__(self, template_dir: str | Path | None = None) -> None:
        override = Path(template_dir) if template_dir is not None else None
        self._templates = {name: _load_template(name, override) for name in TEMPLATE_NAMES}

    def template(self, name: str) -> PromptTemplate:
        try:
            return self._templates[name]
        except KeyError:
            raise UnknownTemplate(name) from None

    def build_patient_prompt(
        self,
        scenario: Scenario,
        observed: ObservedVariables,
        perception_space: FunctionSpace,
        action_space: FunctionSpace,
        feed: MessageFeed,
        query: str,
    ) -> str:
        return self.template("patient").render(
            role_description=scenario.role_description,
            observed_variables=observed.render(),
            perception_space=perception_space.render(),
            action_space=action_space.render(),
            history=render_feed(feed),
            query=query,
        )

    def build_tutor_prompt(
        self, kind: str, scenario: Scenario, full_feed: MessageFeed, query: str = ""
    ) -> str:
        if kind not in ("help", "summary"):
            raise ValueError(f"tutor prompt kind must be 'help' or 'summary', got {kind!r}")
        slots = dict(
            task_description=scenario.task_description,
            role_description=scenario.role_description,
            checklist=render_checklist(scenario.checklist),
            history=render_feed(full_feed),
        )
        if kind == "help":
            return self.template("tutor_help").render(query=query, **slots)
        return self.template("tutor_summary").render(**slots)

    def build_score_item_prompt(
        self, scenario: Scenario, full_feed: MessageFeed, item: ChecklistItem
    ) -> str:
        return self.template("tutor_score_item").render(
            task_description=scenario.task_description,
            role_description=scenario.role_description,
            history=render_feed(full_feed),
            checklist_item=item.description,
        )
