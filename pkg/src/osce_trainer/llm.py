"""Chat-completion providers and the latency measurement harness.

Three providers share one interface: a live HTTP provider speaking a
generic prompt-in/text-out contract, a scripted provider used for
deterministic tests and replays, and a fixed-delay stub for latency
benchmarks.
"""

from __future__ import annotations

import json
import os
import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Protocol, Sequence

import requests

DEFAULT_TIMEOUT_S = 10.0


class ProviderError(Exception):
    """Non-success response or transport failure after retry."""


class Timeout(ProviderError):
    pass


class ScriptExhausted(ProviderError):
    """The scripted provider has no entry matching the request."""


@dataclass(frozen=True)
class CompletionRequest:
    prompt: str
    max_output_tokens: int = 512
    temperature: float = 0.0

    def __post_init__(self) -> None:
        if not self.prompt:
            raise ValueError("prompt must be non-empty")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")


class Provider(Protocol):
    def complete(self, request: CompletionRequest) -> str: ...


@dataclass
class ScriptEntry:
    """One scripted response.

    Entries with ``substring=None`` are consumed in order and match any
    prompt; substring entries are reusable and match only prompts that
    contain their text.
    """

    response: str
    substring: str | None = None
    consumed: bool = False


class ScriptedProvider:
    """Deterministic provider: same script + same request sequence -> same responses."""

    def __init__(self, entries: Sequence[ScriptEntry]) -> None:
        self.entries = [ScriptEntry(e.response, e.substring) for e in entries]

    @classmethod
    def from_responses(cls, responses: Sequence[str]) -> "ScriptedProvider":
        return cls([ScriptEntry(response=r) for r in responses])

    @classmethod
    def from_file(cls, path: str | Path) -> "ScriptedProvider":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(raw, list):
            raise ValueError("script file must be a JSON list of entries")
        entries = []
        for entry in raw:
            entries.append(ScriptEntry(response=entry["response"], substring=entry.get("substring")))
        return cls(entries)

    def complete(self, request: CompletionRequest) -> str:
        for entry in self.entries:
            if entry.substring is not None:
                if entry.substring in request.prompt:
                    return entry.response
            elif not entry.consumed:
                entry.consumed = True
                return entry.response
        raise ScriptExhausted("no script entry matches the request")


class StubDelayProvider:
    """Fixed-delay provider for exercising the latency harness."""

    def __init__(self, delay_s: float, response: str = "ok") -> None:
        self.delay_s = delay_s
        self.response = response

    def complete(self, request: CompletionRequest) -> str:
        time.sleep(self.delay_s)
        return self.response


def _default_encode(request: CompletionRequest, model: str) -> dict:
    return {
        "model": model,
        "prompt": request.prompt,
        "max_output_tokens": request.max_output_tokens,
        "temperature": request.temperature,
    }


def _default_decode(payload: dict) -> str:
    try:
        return payload["text"]
    except (KeyError, TypeError) as exc:
        raise ProviderError(f"malformed provider response: {payload!r}") from exc


class HttpProvider:
    """Generic chat-completion HTTP provider.

    Vendor differences are absorbed by the encode/decode adapters; the
    credential comes from the LLM_API_KEY environment variable. One
    retry on transport error, none on malformed content (that is the
    caller's parse-retry policy).
    """

    def __init__(
        self,
        endpoint: str,
        model: str = "",
        timeout_s: float = DEFAULT_TIMEOUT_S,
        api_key: str | None = None,
        encode: Callable[[CompletionRequest, str], dict] = _default_encode,
        decode: Callable[[dict], str] = _default_decode,
    ) -> None:
        self.endpoint = endpoint
        self.model = model
        self.timeout_s = timeout_s
        self.api_key = api_key if api_key is not None else os.environ.get("LLM_API_KEY", "")
        self.encode = encode
        self.decode = decode

    def _call_once(self, request: CompletionRequest) -> str:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            response = requests.post(
                self.endpoint,
                json=self.encode(request, self.model),
                headers=headers,
                timeout=self.timeout_s,
            )
        except requests.Timeout as exc:
            raise Timeout(f"provider call exceeded {self.timeout_s}s") from exc
        if response.status_code >= 400:
            raise ProviderError(f"provider returned status {response.status_code}")
        return self.decode(response.json())

    def complete(self, request: CompletionRequest) -> str:
        try:
            return self._call_once(request)
        except (Timeout, ProviderError):
            raise
        except requests.RequestException:
            # one retry on transport error
            try:
                return self._call_once(request)
            except requests.RequestException as exc:
                raise ProviderError(f"transport failure after retry: {exc}") from exc


@dataclass(frozen=True)
class LatencyStats:
    """Mean and sample standard deviation over retained timing samples."""

    samples: tuple[float, ...]
    mean: float
    std: float

    def __post_init__(self) -> None:
        if not self.samples:
            raise ValueError("samples must be non-empty")
        if self.std < 0:
            raise ValueError("std must be >= 0")

    @classmethod
    def from_samples(cls, samples: Sequence[float]) -> "LatencyStats":
        if len(samples) < 2:
            raise ValueError("need at least 2 samples")
        return cls(
            samples=tuple(samples),
            mean=statistics.fmean(samples),
            std=statistics.stdev(samples),
        )


def measure_latency(provider: Provider, request: CompletionRequest, n: int) -> LatencyStats:
    """Time n completions of the same request; a failed call aborts the run."""
    if n < 2:
        raise ValueError("n must be >= 2")
    samples = []
    for _ in range(n):
        start = time.perf_counter()
        provider.complete(request)
        samples.append(time.perf_counter() - start)
    return LatencyStats.from_samples(samples)
