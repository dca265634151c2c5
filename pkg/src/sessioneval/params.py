"""Shared hyperparameter containers and the gain mapping."""

from __future__ import annotations

from dataclasses import dataclass, field


DUP_INCLUDE_FULL = "include_full"
DUP_INCLUDE_DISCOUNTED = "include_discounted"
DUP_EXCLUDE = "exclude"
DUP_MODES = (DUP_INCLUDE_FULL, DUP_INCLUDE_DISCOUNTED, DUP_EXCLUDE)

ABLATION_NO_SESSION_NORM = "no_session_norm"
ABLATION_NO_REFORMULATION_TEXT = "no_reformulation_text"
ABLATION_NO_ENHANCEMENT = "no_enhancement"
ABLATIONS = (
    ABLATION_NO_SESSION_NORM,
    ABLATION_NO_REFORMULATION_TEXT,
    ABLATION_NO_ENHANCEMENT,
)


@dataclass(frozen=True)
class DuplicatePolicy:
    """How repeated occurrences of one document are treated in the ideal reading sequence."""

    mode: str = DUP_INCLUDE_FULL
    discount: float = 0.5  # used only in include_discounted mode

    def __post_init__(self):
        if self.mode not in DUP_MODES:
            raise ValueError(f"unknown duplicate policy mode: {self.mode!r}")
        if not 0.0 < self.discount <= 1.0:
            raise ValueError("duplicate discount must lie in (0, 1]")


@dataclass(frozen=True)
class MetricParams:
    """All metric hyperparameters in one place.

    F: fraction of a document's length the user is assumed to read.
    L: decay horizon in characters (score contributions vanish at this offset).
    H: highest relevance level of the gain mapping.
    reformulation_len: length in characters of the filler text charged per reformulation.
    b_q, b_r: per-query / per-rank log bases of the DCG-family metrics.
    p, b: persistence parameters of the RBP-family metrics.
    lam: recency weight of the RS-family metrics.
    ablation: subset of {no_session_norm, no_reformulation_text, no_enhancement}.
    """

    F: float = 0.20
    L: int = 19336
    H: int = 1
    reformulation_len: int = 876
    dup_policy: DuplicatePolicy = field(default_factory=DuplicatePolicy)
    b_q: float = 4.0
    b_r: float = 2.0
    p: float = 0.8
    b: float = 0.9
    lam: float = 1.0
    ablation: frozenset = frozenset()

    def __post_init__(self):
        if not 0.0 < self.F <= 1.0:
            raise ValueError("F must lie in (0, 1]")
        if self.L <= 0:
            raise ValueError("L must be positive")
        if self.H < 1:
            raise ValueError("H must be a positive integer")
        if self.reformulation_len < 0:
            raise ValueError("reformulation_len must be non-negative")
        if self.b_q <= 1.0 or self.b_r <= 1.0:
            raise ValueError("log bases must exceed 1")
        if not (0.0 < self.p < 1.0 and 0.0 < self.b < 1.0):
            raise ValueError("p and b must lie in (0, 1)")
        if self.lam < 0.0:
            raise ValueError("lam must be non-negative")
        unknown = set(self.ablation) - set(ABLATIONS)
        if unknown:
            raise ValueError(f"unknown ablation switches: {sorted(unknown)}")

    def with_ablation(self, *switches: str) -> "MetricParams":
        from dataclasses import replace

        return replace(self, ablation=frozenset(self.ablation) | set(switches))


def gain_value(level: int, H: int) -> float:
    """Gain of a level-l relevant document: (2^l - 1) / 2^H."""
    if level < 0 or level > H:
        raise ValueError(f"relevance level {level} outside [0, {H}]")
    return (2**level - 1) / 2**H
