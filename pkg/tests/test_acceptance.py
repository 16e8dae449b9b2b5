"""Acceptance suite: one test per release criterion, printing a pass line each."""

from __future__ import annotations

import random
import time
from pathlib import Path

import pytest

from osce_trainer import fixture_path
from osce_trainer.llm import LatencyStats, ScriptEntry, ScriptedProvider, StubDelayProvider, measure_latency
from osce_trainer.llm import CompletionRequest
from osce_trainer.log import LogMessage, MessageFeed, Topic, freeze_args
from osce_trainer.metrics import TranscriptPair, latency_cell, rtf, wer
from osce_trainer.prompts import PromptEngine
from osce_trainer.scenarios import ScenarioStore, ValidationFailed, validate
from osce_trainer.service import ActionRejected, Session
from osce_trainer.sim import ObservedVariables, PATIENT_ACTIONS, PATIENT_PERCEPTIONS
from osce_trainer.tutor import ScoringFailed, TutorAgent

from test_metrics import brute_force_distance
from test_scenarios import minimal_doc, scenarios as scenario_strategy

GOLDEN_DIR = Path(__file__).parent / "golden"

STUDENT_TURNS = (
    "Hello, I am Dr. Smith. Today I will examine the nerves of your neck and shoulders.",
    "Please sit down for me.",
    "@tutor what next?",
    "Please stand up.",
    "Now extend both arms straight out in front of you.",
    "Close your eyes and hold that position.",
    "You can open your eyes now.",
    "I will touch your left arm. Can you feel this?",
)


def run_scripted_session(journal_path: Path, neuro_scenario, prompt_engine):
    provider = ScriptedProvider.from_file(fixture_path("neuro_script.json"))
    session = Session(neuro_scenario, provider, prompt_engine, journal_path=journal_path)
    for i, text in enumerate(STUDENT_TURNS):
        session.route_message(text)
        if i == 5:  # pronator drift: hold the position for three seconds
            session.tick(3)
    session.end()
    return session.score(), journal_path.read_bytes()


def test_deterministic_end_to_end_replay(tmp_path, neuro_scenario, prompt_engine):
    start = time.perf_counter()
    journals, reports = [], []
    for i in range(10):
        report, journal = run_scripted_session(tmp_path / f"run{i}.journal", neuro_scenario, prompt_engine)
        journals.append(journal)
        reports.append(report)
    elapsed = time.perf_counter() - start
    assert all(j == journals[0] for j in journals), "journals differ across runs"
    assert all(r == reports[0] for r in reports)
    assert reports[0].total == 3 and reports[0].max_points == 4
    assert [v.completed for v in reports[0].verdicts] == [True, False, True, True]
    assert elapsed < 5.0
    print("PASS deterministic end-to-end replay: 10 byte-identical journals, score 3/4, "
          f"{elapsed:.2f}s")


def test_prompt_golden_files(neuro_scenario, prompt_engine):
    empty = MessageFeed(entries=(), window=20)
    feed = MessageFeed(
        entries=(
            LogMessage(0, 0, Topic("perception", "sensor", "text_input"),
                       freeze_args({"text": "Hello, I am Dr. Smith. I will examine your neck and shoulders today."})),
            LogMessage(1, 0, Topic("action", "patient", "say"),
                       freeze_args({"text": "Hello doctor, I'm John Miller. My neck has been hurting for two weeks."})),
        ),
        window=20,
    )
    built = {
        "patient_empty.txt": prompt_engine.build_patient_prompt(
            neuro_scenario, ObservedVariables(), PATIENT_PERCEPTIONS, PATIENT_ACTIONS, empty, "Hello"),
        "tutor_help.txt": prompt_engine.build_tutor_prompt("help", neuro_scenario, feed, query="what next?"),
        "tutor_summary.txt": prompt_engine.build_tutor_prompt("summary", neuro_scenario, feed),
        "score_item.txt": prompt_engine.build_score_item_prompt(neuro_scenario, feed, neuro_scenario.checklist[3]),
    }
    for name, prompt in built.items():
        assert prompt == (GOLDEN_DIR / name).read_text(encoding="utf-8"), f"golden mismatch: {name}"
    assert built["patient_empty.txt"].rstrip("\n").endswith("action::")
    print("PASS prompt golden files: 4 prompts byte-identical to frozen goldens")


def test_log_state_coherence_1000_randomized_sequences(neuro_scenario, prompt_engine):
    envelopes = [
        '{"function": "say", "args": {"text": "hm"}}',
        '{"function": "move_arm", "args": {"side": "left", "direction": "up"}}',
        '{"function": "move_arm", "args": {"side": "right", "direction": "forward"}}',
        '{"function": "move_head", "args": {"direction": "right"}}',
        '{"function": "extend_arms", "args": {}}',
        '{"function": "relax_arms", "args": {}}',
        '{"function": "close_eyes", "args": {}}',
        '{"function": "open_eyes", "args": {}}',
        '{"function": "sit", "args": {}}',
        '{"function": "stand", "args": {}}',
    ]
    rng = random.Random(123)
    checks = 0
    for _ in range(1000):
        provider = ScriptedProvider([ScriptEntry(response=envelopes[0], substring="")])
        session = Session(neuro_scenario, provider, prompt_engine)
        for _ in range(rng.randint(1, 8)):
            kind = rng.random()
            if kind < 0.5:
                provider.entries[0].response = rng.choice(envelopes)
                session.route_message("next instruction")
            elif kind < 0.75:
                session.manipulate(
                    rng.choice(["left_arm", "right_arm", "head"]),
                    rng.choice(["neutral", "up", "down"]),
                )
            else:
                session.tick(rng.randint(1, 3))
            assert session.replayed_state() == session.sim_state
            checks += 1
    print(f"PASS log/state coherence: {checks} steps across 1000 randomized sequences")


def test_wer_oracle_equivalence():
    rng = random.Random(99)
    alphabet = ["a", "b", "c", "d", "e"]
    for _ in range(200):
        reference = tuple(rng.choice(alphabet) for _ in range(rng.randint(1, 8)))
        hypothesis = tuple(rng.choice(alphabet) for _ in range(rng.randint(0, 8)))
        expected = brute_force_distance(reference, hypothesis) / len(reference)
        assert wer(TranscriptPair(reference, hypothesis)) == expected
    assert wer(TranscriptPair.from_text("the cat sat", "the cat sat")) == 0.0
    assert wer(TranscriptPair(reference=("a", "b", "c"), hypothesis=())) == 1.0
    print("PASS WER oracle equivalence: 200 random pairs exact, identity 0.0, empty hypothesis 1.0")


def test_rtf_decision_logic():
    tiny = rtf(3.25, 10.0)
    base = rtf(5.67, 10.0)
    small = rtf(19.1, 10.0)
    assert abs(tiny.ratio - 0.325) < 1e-9 and tiny.real_time_capable
    assert abs(base.ratio - 0.567) < 1e-9 and base.real_time_capable
    assert abs(small.ratio - 1.91) < 1e-9 and not small.real_time_capable
    print("PASS RTF decision logic: 0.325/0.567 capable, 1.91 not capable, ratios exact to 1e-9")


def test_latency_harness_stub():
    stats = measure_latency(StubDelayProvider(delay_s=0.05), CompletionRequest(prompt="story"), n=10)
    assert 0.05 <= stats.mean <= 0.08
    assert stats.std < 0.02
    cell = latency_cell(LatencyStats(samples=(2.07, 2.07), mean=2.07, std=0.27))
    assert cell == "2.07s ± 0.27"
    import re

    assert re.fullmatch(r"\d+\.\d\ds ± \d+\.\d\d", latency_cell(stats))
    print(f"PASS latency harness: stub mean {stats.mean:.3f}s, std {stats.std:.3f}s, cell format ok")


def test_pronator_drift_exact(neuro_scenario, prompt_engine):
    envelopes = iter(
        ['{"function": "extend_arms", "args": {}}', '{"function": "close_eyes", "args": {}}']
    )

    class Seq(ScriptedProvider):
        def complete(self, request):
            return next(envelopes)

    session = Session(neuro_scenario, Seq([]), prompt_engine)
    session.route_message("Extend your arms")
    session.route_message("Close your eyes")
    session.tick(3)
    state = session.sim_state
    assert state.right_arm_elevation == 0.7
    assert state.left_arm_elevation == 1.0

    # eyes open: no drift at all
    from osce_trainer import sim

    open_eyes, _ = sim.apply_action(ObservedVariables(), sim.ActionCall("extend_arms"))
    after, events = sim.tick(open_eyes, neuro_scenario.deficits, 3)
    assert after == open_eyes and events == []
    print("PASS pronator drift: 3 ticks -> right elevation 0.7, left 1.0; eyes open gates drift")


def test_failure_policy_adversarial_scripts(neuro_scenario, prompt_engine):
    # malformed envelope: 2 re-prompts then ActionRejected, state unchanged
    provider = ScriptedProvider.from_responses(["bad", "worse", "worst", "unreached"])
    session = Session(neuro_scenario, provider, prompt_engine)
    before = session.sim_state
    with pytest.raises(ActionRejected):
        session.route_message("Sit down")
    assert session.sim_state == before
    assert [e.consumed for e in provider.entries] == [True, True, True, False]

    # malformed verdict: 1 retry then ScoringFailed
    feed = MessageFeed(entries=(), window=20)
    bad_verdicts = ScriptedProvider.from_responses(["nope", "still nope"])
    with pytest.raises(ScoringFailed):
        TutorAgent(bad_verdicts, prompt_engine).score(neuro_scenario, feed)
    assert all(e.consumed for e in bad_verdicts.entries)
    print("PASS failure policy: 2 envelope re-prompts then ActionRejected; 1 verdict retry then ScoringFailed")


def test_scenario_round_trip_and_rejections(tmp_path_factory):
    from hypothesis import HealthCheck, given, settings

    store_root = tmp_path_factory.mktemp("acceptance_store")
    counter = iter(range(10**6))

    @settings(max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow])
    @given(scenario_strategy())
    def round_trip(scenario):
        store = ScenarioStore(store_root / f"s{next(counter)}")
        store.save(scenario)
        assert store.load(scenario.id) == scenario

    round_trip()

    invalid_fixtures = {
        "empty checklist": (minimal_doc(checklist=[]), "checklist must be non-empty"),
        "duplicate ids": (
            minimal_doc(checklist=[{"id": "a", "description": "x"}, {"id": "a", "description": "y"}]),
            "unique",
        ),
        "empty role": (minimal_doc(role_description=""), "role_description"),
    }
    for name, (doc, needle) in invalid_fixtures.items():
        with pytest.raises(ValidationFailed) as exc:
            validate(doc)
        assert any(needle in v for v in exc.value.violations), name
    print("PASS scenario round-trip: 100 randomized identities; invalid fixtures rejected with correct violations")
