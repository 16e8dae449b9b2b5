from __future__ import annotations

import pytest

from osce_trainer import fixture_path
from osce_trainer.llm import ScriptedProvider
from osce_trainer.prompts import PromptEngine
from osce_trainer.scenarios import Scenario, load_document, validate


@pytest.fixture(scope="session")
def neuro_scenario() -> Scenario:
    return validate(load_document(fixture_path("upper_limb_neuro.json")))


@pytest.fixture(scope="session")
def prompt_engine() -> PromptEngine:
    return PromptEngine()


@pytest.fixture
def neuro_script() -> ScriptedProvider:
    return ScriptedProvider.from_file(fixture_path("neuro_script.json"))
