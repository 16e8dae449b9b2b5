"""Append-only, per-session publish-subscribe event log.

Every interaction in a training session (student utterances, patient
actions, limb manipulations, drift) is a message on a namespaced topic,
e.g. ``perception::sensor::text_input`` or ``action::patient::move_arm``.
Agent context is derived from the log: the message feed is a windowed,
topic-filtered view, and observed variables are a fold over the full log.
"""

from __future__ import annotations

import json
import re
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterator, Mapping, Sequence

NAMESPACES = ("action", "perception")

_IDENTIFIER = re.compile(r"[a-z_][a-z0-9_]*\Z")

ArgValue = Any  # text, number, boolean, or a flat map of those
Args = tuple[tuple[str, ArgValue], ...]


class SessionClosed(Exception):
    """Raised when publishing to a log whose session has ended."""


def _check_identifier(value: str, what: str) -> None:
    if not _IDENTIFIER.match(value):
        raise ValueError(f"{what} {value!r} is not a valid identifier")


@dataclass(frozen=True)
class Topic:
    """A log topic, rendered canonically as ``namespace::source::function``."""

    namespace: str
    source: str
    function: str

    def __post_init__(self) -> None:
        if self.namespace not in NAMESPACES:
            raise ValueError(f"namespace must be one of {NAMESPACES}, got {self.namespace!r}")
        _check_identifier(self.source, "source")
        _check_identifier(self.function, "function")

    def render(self) -> str:
        return f"{self.namespace}::{self.source}::{self.function}"

    @classmethod
    def parse(cls, text: str) -> "Topic":
        parts = text.split("::")
        if len(parts) != 3:
            raise ValueError(f"topic {text!r} must have exactly two '::' separators")
        return cls(*parts)


@dataclass(frozen=True)
class TopicPattern:
    """Topic matcher; each field is an exact value or the wildcard ``*``."""

    namespace: str = "*"
    source: str = "*"
    function: str = "*"

    def matches(self, topic: Topic) -> bool:
        return (
            self.namespace in ("*", topic.namespace)
            and self.source in ("*", topic.source)
            and self.function in ("*", topic.function)
        )

    @classmethod
    def parse(cls, text: str) -> "TopicPattern":
        parts = text.split("::")
        if len(parts) != 3:
            raise ValueError(f"pattern {text!r} must have exactly two '::' separators")
        return cls(*parts)


def _freeze_value(value: ArgValue) -> ArgValue:
    if isinstance(value, Mapping):
        frozen = tuple((str(k), v) for k, v in value.items())
        for _, v in frozen:
            if isinstance(v, Mapping):
                raise ValueError("nested maps are not allowed in message args")
        return frozen
    return value


def freeze_args(args: Sequence[tuple[str, ArgValue]] | Mapping[str, ArgValue]) -> Args:
    """Normalize args into an immutable ordered tuple of (name, value) pairs."""
    pairs = args.items() if isinstance(args, Mapping) else args
    return tuple((name, _freeze_value(value)) for name, value in pairs)


def _render_value(value: ArgValue) -> str:
    if isinstance(value, tuple):  # frozen flat map
        return json.dumps(dict(value), separators=(", ", ": "))
    return json.dumps(value)


def _render_args(args: Args) -> str:
    return ", ".join(f"{name}={_render_value(value)}" for name, value in args)


@dataclass(frozen=True)
class LogMessage:
    """One published event: sequence number, session-relative time, topic, args."""

    seq: int
    timestamp_ms: int
    topic: Topic
    args: Args = ()

    def arg(self, name: str) -> ArgValue:
        for key, value in self.args:
            if key == name:
                return value
        raise KeyError(name)

    def args_dict(self) -> dict[str, ArgValue]:
        return dict(self.args)

    def render(self) -> str:
        return f"{self.topic.render()}({_render_args(self.args)})"


@dataclass(frozen=True)
class MessageFeed:
    """A windowed, ordered slice of the log used as prompt history."""

    entries: tuple[LogMessage, ...]
    window: int = 20

    def __post_init__(self) -> None:
        if self.window < 0:
            raise ValueError("window must be >= 0")
        if len(self.entries) > self.window:
            raise ValueError("feed exceeds its window")


def render_feed(feed: MessageFeed) -> str:
    """One line per message, in log order, no trailing newline."""
    return "\n".join(msg.render() for msg in feed.entries)


@dataclass(frozen=True)
class ObservedSchema:
    """Declares how observed state is folded from the log.

    ``initial`` builds the default state; each handler is applied, in
    declaration order, to every message whose topic matches its pattern.
    Handlers return the next state (latest update wins).
    """

    initial: Callable[[], Any]
    handlers: tuple[tuple[TopicPattern, Callable[[Any, LogMessage], Any]], ...]


def derive_observed(messages: Sequence[LogMessage], schema: ObservedSchema) -> Any:
    """Left-to-right fold of the log over the schema."""
    state = schema.initial()
    for msg in messages:
        for pattern, handler in schema.handlers:
            if pattern.matches(msg.topic):
                state = handler(state, msg)
    return state


class Subscription:
    """Cursor over a log; yields each message exactly once, in seq order."""

    def __init__(self, log: "SessionLog", start: int = 0) -> None:
        self._log = log
        self._cursor = start

    def pending(self) -> list[LogMessage]:
        messages = self._log.messages[self._cursor :]
        self._cursor += len(messages)
        return list(messages)


class SessionLog:
    """In-memory append-only log with optional file journaling.

    The clock callable supplies session-relative milliseconds for each
    publish; by default it is wall time since the log was created, but
    sessions inject a logical tick clock for deterministic replay.
    """

    def __init__(
        self,
        clock: Callable[[], int] | None = None,
        journal_path: str | Path | None = None,
    ) -> None:
        if clock is None:
            start = time.monotonic()
            clock = lambda: int((time.monotonic() - start) * 1000)  # noqa: E731
        self._clock = clock
        self._messages: list[LogMessage] = []
        self._closed = False
        self._journal = open(journal_path, "a", encoding="utf-8") if journal_path else None

    @property
    def messages(self) -> tuple[LogMessage, ...]:
        return tuple(self._messages)

    @property
    def closed(self) -> bool:
        return self._closed

    def __len__(self) -> int:
        return len(self._messages)

    def publish(self, topic: Topic, args: Sequence[tuple[str, ArgValue]] | Mapping[str, ArgValue] = ()) -> int:
        """Append a message and return its sequence number."""
        if self._closed:
            raise SessionClosed("cannot publish to an ended session")
        msg = LogMessage(
            seq=len(self._messages),
            timestamp_ms=self._clock(),
            topic=topic,
            args=freeze_args(args),
        )
        self._messages.append(msg)
        if self._journal is not None:
            self._journal.write(f"{msg.seq}\t{msg.timestamp_ms}\t{msg.render()}\n")
            self._journal.flush()
        return msg.seq

    def close(self) -> None:
        self._closed = True
        if self._journal is not None:
            self._journal.close()
            self._journal = None

    def filter_feed(self, patterns: Sequence[TopicPattern], window: int | None = 20) -> MessageFeed:
        """Last ``window`` messages matching any pattern, in log order.

        ``window=None`` returns all matches (used for the tutor's
        unwindowed transcript).
        """
        matches = [m for m in self._messages if any(p.matches(m.topic) for p in patterns)]
        if window is None:
            return MessageFeed(entries=tuple(matches), window=max(len(matches), 1))
        if window < 0:
            raise ValueError("window must be >= 0")
        return MessageFeed(entries=tuple(matches[len(matches) - window :] if window else []), window=window)

    def subscribe(self, start: int = 0) -> Subscription:
        return Subscription(self, start)

    def derive_observed(self, schema: ObservedSchema) -> Any:
        return derive_observed(self._messages, schema)


_JOURNAL_LINE = re.compile(r"(?P<seq>\d+)\t(?P<ts>\d+)\t(?P<topic>[a-z_0-9]+::[a-z_0-9]+::[a-z_0-9]+)\((?P<args>.*)\)\Z")
_ARG_NAME = re.compile(r"\s*([a-z_][a-z0-9_]*)=")

_decoder = json.JSONDecoder()


def _parse_args(text: str) -> Args:
    args: list[tuple[str, ArgValue]] = []
    pos = 0
    while pos < len(text):
        m = _ARG_NAME.match(text, pos)
        if not m:
            raise ValueError(f"malformed journal args at {text[pos:]!r}")
        value, end = _decoder.raw_decode(text, m.end())
        args.append((m.group(1), value))
        pos = end
        if pos < len(text):
            if not text.startswith(", ", pos):
                raise ValueError(f"malformed journal args at {text[pos:]!r}")
            pos += 2
    return freeze_args(args)


def load_journal(path: str | Path) -> list[LogMessage]:
    """Replay a journal file back into messages (recovery path)."""
    messages: list[LogMessage] = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        m = _JOURNAL_LINE.match(line)
        if not m:
            raise ValueError(f"malformed journal line: {line!r}")
        messages.append(
            LogMessage(
                seq=int(m.group("seq")),
                timestamp_ms=int(m.group("ts")),
                topic=Topic.parse(m.group("topic")),
                args=_parse_args(m.group("args")),
            )
        )
    return messages
