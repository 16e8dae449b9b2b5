"""Session lifecycle and message routing: the interaction loop.

A session owns one event log, one simulator state, and a logical clock
(1 tick = 1 second of session time). Student messages either address the
patient (prompt -> completion -> validated function call -> state
transition) or, when prefixed with ``@tutor``, the tutor. Everything
observable flows through the log, so replaying a session journal
reproduces the exact state.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from . import sim
from .llm import CompletionRequest, Provider
from .log import MessageFeed, SessionClosed, SessionLog, Topic, TopicPattern, freeze_args
from .prompts import PromptEngine
from .scenarios import Scenario, ScenarioStore
from .tutor import ScoreReport, TutorAgent

PATIENT_FEED_WINDOW = 20

# What the patient agent sees: its own actions plus all sensor events.
PATIENT_FEED_PATTERNS = (
    TopicPattern("perception", "sensor", "*"),
    TopicPattern("action", "patient", "*"),
)

# The scored student-patient transcript: excludes tutor exchanges and
# system bookkeeping (failed-turn markers).
TRANSCRIPT_PATTERNS = (
    TopicPattern("perception", "sensor", "text_input"),
    TopicPattern("perception", "sensor", "limb_manipulated"),
    TopicPattern("perception", "sensor", "touch"),
    TopicPattern("perception", "sensor", "limb_drifted"),
    TopicPattern("action", "patient", "*"),
)

MAX_PARSE_RETRIES = 2

TUTOR_PREFIX = "@tutor"


class EmptyMessage(Exception):
    pass


class ActionRejected(Exception):
    """The LLM produced no valid action call within the retry budget."""


class AlreadyEnded(Exception):
    pass


class SessionNotEnded(Exception):
    pass


class UnknownSession(Exception):
    pass


@dataclass(frozen=True)
class AgentTurn:
    agent: str  # patient | tutor
    action: sim.ActionCall | None
    say_text: str | None

    def to_payload(self) -> dict:
        return {
            "agent": self.agent,
            "action": (
                {"function": self.action.function, "args": self.action.args_dict()}
                if self.action
                else None
            ),
            "say_text": self.say_text,
        }


class Session:
    """One training session: log, simulator state, and agents."""

    def __init__(
        self,
        scenario: Scenario,
        provider: Provider,
        prompts: PromptEngine,
        session_id: str | None = None,
        journal_path: str | Path | None = None,
    ) -> None:
        self.id = session_id or uuid.uuid4().hex
        self.scenario = scenario
        self.provider = provider
        self.prompts = prompts
        self.ticks = 0
        self.log = SessionLog(clock=lambda: self.ticks * 1000, journal_path=journal_path)
        self.sim_state = sim.ObservedVariables()
        self.tutor = TutorAgent(provider, prompts)
        self._summary: str | None = None

    @property
    def state(self) -> str:
        return "ended" if self.log.closed else "active"

    @property
    def active(self) -> bool:
        return not self.log.closed

    def _require_active(self) -> None:
        if not self.active:
            raise SessionClosed("session has ended")

    def patient_feed(self) -> MessageFeed:
        return self.log.filter_feed(PATIENT_FEED_PATTERNS, window=PATIENT_FEED_WINDOW)

    def transcript_feed(self) -> MessageFeed:
        return self.log.filter_feed(TRANSCRIPT_PATTERNS, window=None)

    def _publish_events(self, events: list[sim.Event]) -> None:
        for topic, args in events:
            self.log.publish(topic, args)

    def route_message(self, text: str) -> AgentTurn:
        """Dispatch a student message to the patient or (with @tutor) the tutor."""
        self._require_active()
        text = text.strip()
        if not text:
            raise EmptyMessage("message is blank")
        if text.lower().startswith(TUTOR_PREFIX):
            query = text[len(TUTOR_PREFIX) :].lstrip(" :,")
            return self._tutor_turn(query)
        return self._patient_turn(text)

    def _tutor_turn(self, query: str) -> AgentTurn:
        self.log.publish(Topic("perception", "sensor", "tutor_query"), freeze_args({"text": query}))
        hint = self.tutor.help(self.scenario, self.transcript_feed(), query)
        self.log.publish(Topic("action", "tutor", "say"), freeze_args({"text": hint}))
        return AgentTurn(agent="tutor", action=None, say_text=hint)

    def _patient_turn(self, text: str) -> AgentTurn:
        feed = self.patient_feed()  # history up to, not including, this utterance
        self.log.publish(Topic("perception", "sensor", "text_input"), freeze_args({"text": text}))
        prompt = self.prompts.build_patient_prompt(
            self.scenario, self.sim_state, sim.PATIENT_PERCEPTIONS, sim.PATIENT_ACTIONS, feed, text
        )
        last_error: sim.ActionValidationError | None = None
        for _ in range(1 + MAX_PARSE_RETRIES):
            completion = self.provider.complete(CompletionRequest(prompt=prompt))
            try:
                call = sim.parse_function_call(completion, sim.PATIENT_ACTIONS)
            except sim.ActionValidationError as exc:
                last_error = exc
                prompt = (
                    f"{prompt}\n\nYour previous reply was rejected: {exc} "
                    "Respond again with exactly one JSON function call from the Action Space.\n\naction::\n"
                )
                continue
            new_state, events = sim.apply_action(self.sim_state, call)
            self._publish_events(events)
            self.sim_state = new_state
            say_text = call.args_dict().get("text") if call.function == "say" else None
            return AgentTurn(agent="patient", action=call, say_text=say_text)
        self.log.publish(
            Topic("action", "system", "turn_failed"), freeze_args({"error": str(last_error)})
        )
        raise ActionRejected(f"no valid action after {MAX_PARSE_RETRIES} re-prompts: {last_error}")

    def manipulate(self, limb: str, position: str) -> sim.ObservedVariables:
        self._require_active()
        new_state, events = sim.apply_manipulation(self.sim_state, limb, position)
        self._publish_events(events)
        self.sim_state = new_state
        return self.sim_state

    def touch(self, limb: str) -> None:
        self._require_active()
        self.log.publish(*sim.touch_event(limb))

    def tick(self, n: int = 1) -> sim.ObservedVariables:
        """Advance the session clock; active sessions accrue drift."""
        for _ in range(n):
            self.ticks += 1
            if not self.active:
                continue
            new_state, events = sim.tick(self.sim_state, self.scenario.deficits, 1)
            self._publish_events(events)
            self.sim_state = new_state
        return self.sim_state

    def end(self) -> str:
        """End the session and return the tutor's training summary."""
        if not self.active:
            raise AlreadyEnded("session already ended")
        feed = self.transcript_feed()
        self.log.close()
        self._summary = self.tutor.summarize(self.scenario, feed)
        return self._summary

    def score(self) -> ScoreReport:
        if self.active:
            raise SessionNotEnded("end the session before scoring")
        return self.tutor.score(self.scenario, self.transcript_feed())

    def replayed_state(self) -> sim.ObservedVariables:
        """Observed variables derived purely from the log (coherence oracle)."""
        return self.log.derive_observed(sim.observed_schema())


class SessionManager:
    """Creates and tracks independent sessions over one scenario store."""

    def __init__(
        self,
        store: ScenarioStore,
        provider: Provider,
        prompts: PromptEngine,
        journal_dir: str | Path | None = None,
    ) -> None:
        self.store = store
        self.provider = provider
        self.prompts = prompts
        self.journal_dir = Path(journal_dir) if journal_dir else None
        self.sessions: dict[str, Session] = {}

    def create(self, scenario_id: str) -> Session:
        scenario = self.store.load(scenario_id)
        session_id = uuid.uuid4().hex
        journal_path = self.journal_dir / f"{session_id}.journal" if self.journal_dir else None
        session = Session(
            scenario, self.provider, self.prompts, session_id=session_id, journal_path=journal_path
        )
        self.sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Session:
        try:
            return self.sessions[session_id]
        except KeyError:
            raise UnknownSession(session_id) from None
