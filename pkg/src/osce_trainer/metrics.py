"""Benchmark math and reporting: word error rate, real-time factor, tables.

The bench consumes already-measured records (durations, processing
times, transcript pairs); running speech models or reproducing absolute
published numbers is out of scope.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from typing import Sequence

from .llm import LatencyStats


class EmptyReference(Exception):
    pass


class NonPositiveDuration(Exception):
    pass


_PUNCT_TABLE = str.maketrans("", "", string.punctuation)


def normalize(text: str) -> tuple[str, ...]:
    """Lowercase, strip ASCII punctuation, split on whitespace."""
    return tuple(text.lower().translate(_PUNCT_TABLE).split())


@dataclass(frozen=True)
class TranscriptPair:
    reference: tuple[str, ...]
    hypothesis: tuple[str, ...]

    @classmethod
    def from_text(cls, reference: str, hypothesis: str) -> "TranscriptPair":
        return cls(reference=normalize(reference), hypothesis=normalize(hypothesis))


def word_edit_distance(reference: Sequence[str], hypothesis: Sequence[str]) -> int:
    """Minimum unit-cost edit distance (substitutions + deletions + insertions)."""
    previous = list(range(len(hypothesis) + 1))
    for i, ref_token in enumerate(reference, start=1):
        current = [i]
        for j, hyp_token in enumerate(hypothesis, start=1):
            cost = 0 if ref_token == hyp_token else 1
            current.append(min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + cost))
        previous = current
    return previous[-1]


def wer(pair: TranscriptPair) -> float:
    """(S + D + I) / N with N = reference length; may exceed 1."""
    if not pair.reference:
        raise EmptyReference("reference must be non-empty")
    return word_edit_distance(pair.reference, pair.hypothesis) / len(pair.reference)


@dataclass(frozen=True)
class RtfResult:
    ratio: float
    real_time_capable: bool


def rtf(processing_time_s: float, audio_duration_s: float) -> RtfResult:
    """Processing time over audio duration; below 1 means faster than real time."""
    if audio_duration_s <= 0:
        raise NonPositiveDuration("audio duration must be > 0")
    if processing_time_s < 0:
        raise ValueError("processing time must be >= 0")
    ratio = processing_time_s / audio_duration_s
    return RtfResult(ratio=ratio, real_time_capable=ratio < 1)


def latency_cell(stats: LatencyStats) -> str:
    return f"{stats.mean:.2f}s ± {stats.std:.2f}"


def bench_report(headers: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    """Deterministic fixed-width table; rows keep their given order."""
    if not rows:
        raise ValueError("report needs at least one row")
    table = [list(headers)] + [list(row) for row in rows]
    widths = [max(len(row[col]) for row in table) for col in range(len(headers))]
    lines = []
    for idx, row in enumerate(table):
        lines.append("  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip())
        if idx == 0:
            lines.append("  ".join("-" * width for width in widths))
    return "\n".join(lines)
