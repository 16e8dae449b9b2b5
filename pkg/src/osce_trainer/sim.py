"""Deterministic virtual-patient state machine.

Replaces a rendered 3D patient with a small kinematic state vector:
posture, eye state, per-arm position and elevation, head direction.
Validated action calls from the language model, direct limb
manipulations by the student, and scripted drift all transition this
state and emit log events, so that replaying the event stream always
reproduces the live state.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, replace
from typing import Any, Sequence

from .log import Args, LogMessage, ObservedSchema, Topic, TopicPattern, freeze_args
from .scenarios import MotorDeficit

ARM_DIRECTIONS = ("neutral", "up", "down", "forward")
HEAD_DIRECTIONS = ("neutral", "left", "right", "up", "down")
POSTURES = ("standing", "sitting")
EYE_STATES = ("open", "closed")
LIMBS = ("left_arm", "right_arm", "head")

# Elevation a limb settles at when moved to a named position.
ELEVATION = {"up": 1.0, "forward": 1.0, "neutral": 0.5, "down": 0.0}

# Elevation below which a drifting arm visibly drops out of position.
DRIFT_DROP_THRESHOLD = 0.5


class ActionValidationError(Exception):
    """Base for everything that can go wrong with an LLM function call."""


class NoEnvelopeFound(ActionValidationError):
    pass


class UnknownFunction(ActionValidationError):
    pass


class ArityMismatch(ActionValidationError):
    pass


class TypeMismatch(ActionValidationError):
    pass


class UnknownLimb(Exception):
    pass


class InvalidPosition(Exception):
    pass


class IllegalTransition(Exception):
    """Reserved: the minimal action set has no forbidden transitions."""


@dataclass(frozen=True)
class ObservedVariables:
    """The patient's visible state snapshot, derived entirely from the log."""

    posture: str = "standing"
    eyes: str = "open"
    arms_extended: bool = False
    left_arm_pos: str = "neutral"
    left_arm_elevation: float = 0.5
    right_arm_pos: str = "neutral"
    right_arm_elevation: float = 0.5
    head: str = "neutral"

    def __post_init__(self) -> None:
        if not 0.0 <= self.left_arm_elevation <= 1.0 or not 0.0 <= self.right_arm_elevation <= 1.0:
            raise ValueError("elevation must be in [0, 1]")
        if self.arms_extended and not (self.left_arm_pos == self.right_arm_pos == "forward"):
            raise ValueError("arms_extended requires both arms forward")

    def render(self) -> str:
        lines = [
            f"posture: {self.posture}",
            f"eyes: {self.eyes}",
            f"arms_extended: {'true' if self.arms_extended else 'false'}",
            f"left_arm_pos: {self.left_arm_pos} (elevation {self.left_arm_elevation:g})",
            f"right_arm_pos: {self.right_arm_pos} (elevation {self.right_arm_elevation:g})",
            f"head: {self.head}",
        ]
        return "\n".join(lines)

    def to_dict(self) -> dict[str, Any]:
        return {
            "posture": self.posture,
            "eyes": self.eyes,
            "arms_extended": self.arms_extended,
            "left_arm_pos": self.left_arm_pos,
            "left_arm_elevation": self.left_arm_elevation,
            "right_arm_pos": self.right_arm_pos,
            "right_arm_elevation": self.right_arm_elevation,
            "head": self.head,
        }


@dataclass(frozen=True)
class Param:
    name: str
    kind: str = "text"  # text | number | boolean
    choices: tuple[str, ...] | None = None


@dataclass(frozen=True)
class Signature:
    name: str
    params: tuple[Param, ...]
    doc: str

    def render(self) -> str:
        args = ", ".join(f"{p.name}: {p.kind}" for p in self.params)
        return f"{self.name}({args}) -- {self.doc}"


class FunctionSpace:
    """An agent's action or perception space: a named set of signatures."""

    def __init__(self, signatures: Sequence[Signature]) -> None:
        self.signatures = tuple(signatures)
        self._by_name = {s.name: s for s in self.signatures}
        if len(self._by_name) != len(self.signatures):
            raise ValueError("signature names must be unique")

    def get(self, name: str) -> Signature | None:
        return self._by_name.get(name)

    def render(self) -> str:
        return "\n".join(s.render() for s in self.signatures)


PATIENT_ACTIONS = FunctionSpace(
    [
        Signature("say", (Param("text"),), "Say something out loud to the doctor."),
        Signature(
            "move_arm",
            (Param("side", choices=("left", "right")), Param("direction", choices=ARM_DIRECTIONS)),
            "Move one arm to a position: neutral, up, down, or forward.",
        ),
        Signature(
            "move_head",
            (Param("direction", choices=HEAD_DIRECTIONS),),
            "Turn or tilt the head: neutral, left, right, up, or down.",
        ),
        Signature("sit", (), "Sit down."),
        Signature("stand", (), "Stand up."),
        Signature("extend_arms", (), "Extend both arms straight in front of the body."),
        Signature("relax_arms", (), "Let both arms relax back to a neutral position."),
        Signature("close_eyes", (), "Close both eyes."),
        Signature("open_eyes", (), "Open both eyes."),
    ]
)

PATIENT_PERCEPTIONS = FunctionSpace(
    [
        Signature("text_input", (Param("text"),), "The doctor said something to you."),
        Signature(
            "limb_manipulated",
            (Param("limb", choices=LIMBS), Param("new_position")),
            "The doctor moved one of your limbs to a new position.",
        ),
        Signature("touch", (Param("limb", choices=LIMBS),), "The doctor touched one of your limbs."),
    ]
)


@dataclass(frozen=True)
class ActionCall:
    function: str
    args: Args = ()

    def args_dict(self) -> dict[str, Any]:
        return dict(self.args)


_KIND_CHECKS = {
    "text": lambda v: isinstance(v, str),
    "number": lambda v: isinstance(v, (int, float)) and not isinstance(v, bool),
    "boolean": lambda v: isinstance(v, bool),
}

_decoder = json.JSONDecoder()


def _scan_envelopes(completion: str):
    for pos in range(len(completion)):
        if completion[pos] != "{":
            continue
        try:
            obj, _ = _decoder.raw_decode(completion, pos)
        except json.JSONDecodeError:
            continue
        if isinstance(obj, dict) and "function" in obj:
            yield obj


def parse_function_call(completion: str, space: FunctionSpace) -> ActionCall:
    """Extract and validate the first function-call envelope in a completion.

    Surrounding prose and code fences are ignored; the envelope is the
    first balanced ``{"function": ..., "args": {...}}`` object that
    parses as JSON. The call is then checked against the space: known
    name, exact argument names in signature order, matching types and
    enum values.
    """
    envelope = next(_scan_envelopes(completion), None)
    if envelope is None:
        raise NoEnvelopeFound("no function-call envelope found in completion")

    name = envelope["function"]
    signature = space.get(name) if isinstance(name, str) else None
    if signature is None:
        raise UnknownFunction(f"function {name!r} is not in the action space")

    args = envelope.get("args", {})
    if not isinstance(args, dict):
        raise ArityMismatch(f"{name}: args must be an object")
    expected = [p.name for p in signature.params]
    if list(args.keys()) != expected:
        raise ArityMismatch(f"{name}: expected args ({', '.join(expected)}), got ({', '.join(args.keys())})")
    for param in signature.params:
        value = args[param.name]
        if not _KIND_CHECKS[param.kind](value):
            raise TypeMismatch(f"{name}: argument {param.name!r} must be {param.kind}")
        if param.choices is not None and value not in param.choices:
            raise TypeMismatch(f"{name}: argument {param.name!r} must be one of {', '.join(param.choices)}")
    return ActionCall(function=name, args=freeze_args(args))


def _with_extended_flag(state: ObservedVariables) -> ObservedVariables:
    # arms_extended is derived: both arms forward.
    extended = state.left_arm_pos == "forward" and state.right_arm_pos == "forward"
    return replace(state, arms_extended=extended)


def _set_arm(state: ObservedVariables, side: str, position: str) -> ObservedVariables:
    elevation = ELEVATION[position]
    if side == "left":
        state = replace(state, left_arm_pos=position, left_arm_elevation=elevation, arms_extended=False)
    else:
        state = replace(state, right_arm_pos=position, right_arm_elevation=elevation, arms_extended=False)
    return _with_extended_flag(state)


def _action_transition(state: ObservedVariables, call: ActionCall) -> ObservedVariables:
    args = call.args_dict()
    fn = call.function
    if fn == "say":
        return state
    if fn == "move_arm":
        return _set_arm(state, args["side"], args["direction"])
    if fn == "move_head":
        return replace(state, head=args["direction"])
    if fn == "sit":
        return replace(state, posture="sitting")
    if fn == "stand":
        return replace(state, posture="standing")
    if fn == "extend_arms":
        state = _set_arm(state, "left", "forward")
        return _set_arm(state, "right", "forward")
    if fn == "relax_arms":
        state = _set_arm(state, "left", "neutral")
        return _set_arm(state, "right", "neutral")
    if fn == "close_eyes":
        return replace(state, eyes="closed")
    if fn == "open_eyes":
        return replace(state, eyes="open")
    raise UnknownFunction(fn)


Event = tuple[Topic, Args]


def apply_action(state: ObservedVariables, call: ActionCall) -> tuple[ObservedVariables, list[Event]]:
    """Execute a validated action; redundant actions are no-ops but still log."""
    new_state = _action_transition(state, call)
    event: Event = (Topic("action", "patient", call.function), call.args)
    return new_state, [event]


def apply_manipulation(
    state: ObservedVariables, limb: str, new_position: str
) -> tuple[ObservedVariables, list[Event]]:
    """The student physically moves a limb; the patient perceives it."""
    if limb not in LIMBS:
        raise UnknownLimb(f"unknown limb {limb!r}")
    if limb == "head":
        if new_position not in HEAD_DIRECTIONS:
            raise InvalidPosition(f"head position must be one of {', '.join(HEAD_DIRECTIONS)}")
        new_state = replace(state, head=new_position)
    else:
        if new_position not in ARM_DIRECTIONS:
            raise InvalidPosition(f"arm position must be one of {', '.join(ARM_DIRECTIONS)}")
        new_state = _set_arm(state, "left" if limb == "left_arm" else "right", new_position)
    event: Event = (
        Topic("perception", "sensor", "limb_manipulated"),
        freeze_args({"limb": limb, "new_position": new_position}),
    )
    return new_state, [event]


def touch_event(limb: str) -> Event:
    if limb not in LIMBS:
        raise UnknownLimb(f"unknown limb {limb!r}")
    return (Topic("perception", "sensor", "touch"), freeze_args({"limb": limb}))


def _drift_gate(state: ObservedVariables) -> bool:
    return state.arms_extended and state.eyes == "closed"


def tick(
    state: ObservedVariables, deficits: Sequence[MotorDeficit], n: int = 1
) -> tuple[ObservedVariables, list[Event]]:
    """Advance scripted findings by n clock ticks.

    While the arms are extended and the eyes closed, each deficit lowers
    its limb's elevation by its rate per tick (rounded to 1e-9, clamped
    to 0). Once elevation falls below the drop threshold the arm visibly
    drops (position ``down``), which also ends the extended posture and
    stops further drift.
    """
    if n < 0:
        raise ValueError("tick count must be >= 0")
    events: list[Event] = []
    for _ in range(n):
        if not _drift_gate(state):
            continue
        for deficit in deficits:
            if deficit.limb not in ("left_arm", "right_arm") or deficit.rate == 0:
                continue
            side = "left" if deficit.limb == "left_arm" else "right"
            elevation = state.left_arm_elevation if side == "left" else state.right_arm_elevation
            new_elevation = round(max(0.0, elevation - deficit.rate), 9)
            if new_elevation == elevation:
                continue
            position = "down" if new_elevation < DRIFT_DROP_THRESHOLD else "forward"
            if side == "left":
                state = replace(
                    state, left_arm_pos=position, left_arm_elevation=new_elevation, arms_extended=False
                )
            else:
                state = replace(
                    state, right_arm_pos=position, right_arm_elevation=new_elevation, arms_extended=False
                )
            state = _with_extended_flag(state)
            events.append(
                (
                    Topic("perception", "sensor", "limb_drifted"),
                    freeze_args({"limb": deficit.limb, "elevation": new_elevation, "position": position}),
                )
            )
    return state, events


def _replay_action(state: ObservedVariables, msg: LogMessage) -> ObservedVariables:
    signature = PATIENT_ACTIONS.get(msg.topic.function)
    if signature is None:
        return state
    return _action_transition(state, ActionCall(function=msg.topic.function, args=msg.args))


def _replay_manipulation(state: ObservedVariables, msg: LogMessage) -> ObservedVariables:
    args = msg.args_dict()
    limb = args["limb"]
    if limb == "head":
        return replace(state, head=args["new_position"])
    return _set_arm(state, "left" if limb == "left_arm" else "right", args["new_position"])


def _replay_drift(state: ObservedVariables, msg: LogMessage) -> ObservedVariables:
    args = msg.args_dict()
    side = "left" if args["limb"] == "left_arm" else "right"
    if side == "left":
        state = replace(
            state, left_arm_pos=args["position"], left_arm_elevation=args["elevation"], arms_extended=False
        )
    else:
        state = replace(
            state, right_arm_pos=args["position"], right_arm_elevation=args["elevation"], arms_extended=False
        )
    return _with_extended_flag(state)


def observed_schema() -> ObservedSchema:
    """Fold schema reproducing the simulator state from the event stream."""
    return ObservedSchema(
        initial=ObservedVariables,
        handlers=(
            (TopicPattern("action", "patient", "*"), _replay_action),
            (TopicPattern("perception", "sensor", "limb_manipulated"), _replay_manipulation),
            (TopicPattern("perception", "sensor", "limb_drifted"), _replay_drift),
        ),
    )
