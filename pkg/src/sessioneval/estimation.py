"""Corpus-level estimators for the decay horizon L and the reformulation-text length."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .params import MetricParams
from .sessions import Session
from .trailtext import mtl


class EstimationError(ValueError):
    pass


@dataclass(frozen=True)
class EstimationConfig:
    default_snippet_len: int = 80
    mtl_discard_frac: float = 0.01
    rt_discard_frac: float = 0.04
    reading_speed: float = 255.0  # characters per minute

    def __post_init__(self):
        if not (0.0 <= self.mtl_discard_frac < 1.0 and 0.0 <= self.rt_discard_frac < 1.0):
            raise ValueError("discard fractions must lie in [0, 1)")
        if self.reading_speed <= 0:
            raise ValueError("reading speed must be positive")


def estimate_L(
    sessions: list[Session], cfg: EstimationConfig, params: MetricParams
) -> int:
    """Largest per-session MTL after discarding the top mtl_discard_frac outliers."""
    if not sessions:
        raise EstimationError("empty corpus")
    mtls = sorted(
        (mtl(s, params, default_snippet_len=cfg.default_snippet_len) for s in sessions),
        reverse=True,
    )
    k = math.ceil(cfg.mtl_discard_frac * len(mtls))
    if k >= len(mtls):
        raise EstimationError("corpus too small: discard leaves no sessions")
    return mtls[k]


def reformulation_intervals(sessions: list[Session]) -> list[float]:
    """Gap in seconds between a query's exit and the next query's issue; negatives dropped."""
    intervals = []
    for s in sessions:
        for prev, nxt in zip(s.queries, s.queries[1:]):
            gap = nxt.issue_time - prev.end_time
            if gap >= 0:
                intervals.append(gap)
    return intervals


def estimate_rt_length(sessions: list[Session], cfg: EstimationConfig) -> int:
    """Reformulation-text length: mean reformulation time converted via reading speed."""
    intervals = reformulation_intervals(sessions)
    if not intervals:
        raise EstimationError("no valid reformulation intervals")
    intervals.sort()
    k = math.ceil(cfg.rt_discard_frac * len(intervals))
    if k >= len(intervals):
        raise EstimationError("discard leaves no reformulation intervals")
    kept = intervals[: len(intervals) - k] if k else intervals
    mean_seconds = sum(kept) / len(kept)
    return math.ceil(cfg.reading_speed * mean_seconds / 60.0)
