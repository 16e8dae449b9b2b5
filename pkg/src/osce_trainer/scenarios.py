"""OSCE scenario authoring, validation, and persistence.

A scenario is one training station: the patient role description, the
student's task, the examiner checklist, and optional scripted motor
deficits (e.g. a drifting arm). Scenarios live as one JSON document per
station in a configured directory, so educators can edit them by hand.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Any, Mapping

CATEGORIES = (
    "clinical_examination",
    "clinical_procedures",
    "communication_skills",
    "data_interpretation",
)

LIMBS = ("left_arm", "right_arm", "head")

_IDENTIFIER = re.compile(r"[a-z_][a-z0-9_]*\Z")


class ValidationFailed(Exception):
    """Carries every field-level violation found in a scenario document."""

    def __init__(self, violations: list[str]) -> None:
        super().__init__("; ".join(violations))
        self.violations = violations


class NotFound(Exception):
    pass


class StorageError(Exception):
    pass


@dataclass(frozen=True)
class ChecklistItem:
    id: str
    description: str
    points: int = 1  # fixed; variable weights are out of scope


@dataclass(frozen=True)
class MotorDeficit:
    """A scripted physical finding: the limb drifts while the gate holds."""

    limb: str
    drift_direction: str = "down"
    rate: float = 0.1  # elevation lost per tick


@dataclass(frozen=True)
class Scenario:
    id: str
    title: str
    category: str
    role_description: str
    task_description: str
    checklist: tuple[ChecklistItem, ...]
    deficits: tuple[MotorDeficit, ...] = ()
    tutor_notes: str = ""  # reserved for scenario-specific tutor knowledge

    def to_document(self) -> dict[str, Any]:
        doc = {
            "id": self.id,
            "title": self.title,
            "category": self.category,
            "role_description": self.role_description,
            "task_description": self.task_description,
            "checklist": [{"id": c.id, "description": c.description} for c in self.checklist],
            "deficits": [asdict(d) for d in self.deficits],
        }
        if self.tutor_notes:
            doc["tutor_notes"] = self.tutor_notes
        return doc


def validate(raw: Mapping[str, Any]) -> Scenario:
    """Check a scenario document against every invariant.

    Pure: never touches a store. Raises ValidationFailed listing all
    violations rather than stopping at the first.
    """
    violations: list[str] = []

    def text_field(name: str, required: bool = True) -> str:
        value = raw.get(name, "")
        if not isinstance(value, str):
            violations.append(f"{name} must be text")
            return ""
        if required and not value.strip():
            violations.append(f"{name} must be non-empty")
        return value

    scenario_id = text_field("id")
    if scenario_id and not _IDENTIFIER.match(scenario_id):
        violations.append("id must match [a-z_][a-z0-9_]*")
    title = text_field("title")
    role_description = text_field("role_description")
    task_description = text_field("task_description")
    category = raw.get("category", "")
    if category not in CATEGORIES:
        violations.append(f"category must be one of {', '.join(CATEGORIES)}")

    checklist: list[ChecklistItem] = []
    raw_checklist = raw.get("checklist", [])
    if not isinstance(raw_checklist, list) or not raw_checklist:
        violations.append("checklist must be non-empty")
    else:
        seen: set[str] = set()
        for i, entry in enumerate(raw_checklist):
            if not isinstance(entry, Mapping):
                violations.append(f"checklist[{i}] must be an object")
                continue
            item_id = entry.get("id", "")
            description = entry.get("description", "")
            if not isinstance(item_id, str) or not _IDENTIFIER.match(item_id or ""):
                violations.append(f"checklist[{i}].id must match [a-z_][a-z0-9_]*")
                continue
            if item_id in seen:
                violations.append(f"checklist ids must be unique (duplicate {item_id!r})")
                continue
            if not isinstance(description, str) or not description.strip():
                violations.append(f"checklist[{i}].description must be non-empty")
                continue
            seen.add(item_id)
            checklist.append(ChecklistItem(id=item_id, description=description))

    deficits: list[MotorDeficit] = []
    for i, entry in enumerate(raw.get("deficits", []) or []):
        if not isinstance(entry, Mapping):
            violations.append(f"deficits[{i}] must be an object")
            continue
        limb = entry.get("limb", "")
        if limb not in LIMBS:
            violations.append(f"deficits[{i}].limb must be one of {', '.join(LIMBS)}")
            continue
        rate = entry.get("rate", 0.1)
        if not isinstance(rate, (int, float)) or isinstance(rate, bool) or rate < 0:
            violations.append(f"deficits[{i}].rate must be a number >= 0")
            continue
        deficits.append(
            MotorDeficit(limb=limb, drift_direction=entry.get("drift_direction", "down"), rate=float(rate))
        )

    tutor_notes = raw.get("tutor_notes", "")
    if not isinstance(tutor_notes, str):
        violations.append("tutor_notes must be text")
        tutor_notes = ""

    if violations:
        raise ValidationFailed(violations)
    return Scenario(
        id=scenario_id,
        title=title,
        category=category,
        role_description=role_description,
        task_description=task_description,
        checklist=tuple(checklist),
        deficits=tuple(deficits),
        tutor_notes=tutor_notes,
    )


def load_document(path: str | Path) -> dict[str, Any]:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise StorageError(f"unreadable scenario document {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise StorageError(f"scenario document {path} must be a JSON object")
    return raw


class ScenarioStore:
    """Directory of scenario documents, one ``<id>.json`` per station."""

    def __init__(self, directory: str | Path) -> None:
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def _path(self, scenario_id: str) -> Path:
        return self.directory / f"{scenario_id}.json"

    def save(self, scenario: Scenario) -> str:
        self._path(scenario.id).write_text(
            json.dumps(scenario.to_document(), indent=2, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )
        return scenario.id

    def load(self, scenario_id: str) -> Scenario:
        path = self._path(scenario_id)
        if not path.exists():
            raise NotFound(f"no scenario with id {scenario_id!r}")
        return validate(load_document(path))

    def list(self) -> list[dict[str, str]]:
        summaries = []
        for path in sorted(self.directory.glob("*.json")):
            scenario = validate(load_document(path))
            summaries.append({"id": scenario.id, "title": scenario.title, "category": scenario.category})
        return summaries
