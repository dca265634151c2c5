"""Session-level metrics: NUM, U-measure and the DCG/RBP baseline families."""

from __future__ import annotations

import math
from dataclasses import replace
from typing import Callable, Optional

from .enhancement import apply_click_labels, enhance_labels, ideal_sequence
from .params import (
    ABLATION_NO_ENHANCEMENT,
    ABLATION_NO_SESSION_NORM,
    ABLATION_NO_REFORMULATION_TEXT,
    MetricParams,
    gain_value,
)
from .sessions import SerpResult, Session
from .trailtext import (
    Trailtext,
    TrailtextUndefinedError,
    build_actual_trailtext,
    build_ideal_trailtext,
)


class MetricUndefinedError(ValueError):
    """The metric has no defined value on this session."""


def u_measure(tt: Trailtext, L: int) -> float:
    """Sum of gain(s) * max(0, 1 - end_pos(s)/L) over the trailtext strings."""
    if L <= 0:
        raise ValueError("L must be positive")
    return sum(s.gain * max(0.0, 1.0 - s.end_pos / L) for s in tt.strings if s.gain > 0)


def num(session: Session, params: MetricParams) -> float:
    """Normalized U-measure: U(actual trailtext) / U(ideal trailtext).

    Ablation switches: no_enhancement keeps click-only labels,
    no_reformulation_text drops the filler strings, no_session_norm returns
    the unnormalized numerator.
    """
    if not session.has_clicks:
        raise MetricUndefinedError("NUM undefined: session has no clicks")
    if ABLATION_NO_ENHANCEMENT in params.ablation:
        labeled = apply_click_labels(session)
    else:
        labeled = enhance_labels(session)
    u_actual = u_measure(build_actual_trailtext(labeled, params), params.L)
    if ABLATION_NO_SESSION_NORM in params.ablation:
        return u_actual
    entries = ideal_sequence(labeled, params.dup_policy, params.F, params.H)
    u_ideal = u_measure(build_ideal_trailtext(entries), params.L)
    if u_ideal == 0.0:
        raise MetricUndefinedError("L too small for session: ideal score is zero")
    return u_actual / u_ideal


def um(session: Session, params: MetricParams) -> float:
    """Plain U-measure of the actual trailtext, clicks only, no reformulation filler."""
    if not session.has_clicks:
        raise MetricUndefinedError("U-measure undefined: session has no clicks")
    p = params.with_ablation(ABLATION_NO_REFORMULATION_TEXT)
    return u_measure(build_actual_trailtext(session, p), params.L)


def _click_gain(result: SerpResult, H: int) -> float:
    # Baselines treat clicked documents as level-1 relevant and never enhance.
    return gain_value(1, H) if result.clicked else 0.0


GainFn = Callable[[SerpResult], float]


def sdcg(
    session: Session,
    b_q: float,
    b_r: float,
    gain_fn: Optional[GainFn] = None,
    H: int = 1,
) -> float:
    gain_fn = gain_fn or (lambda r: _click_gain(r, H))
    score = 0.0
    for q in session.queries:
        q_disc = 1.0 + math.log(q.index, b_q)
        for r in q.results:
            g = gain_fn(r)
            if g:
                score += g / (q_disc * (1.0 + math.log(r.rank, b_r)))
    return score


def srbp(
    session: Session,
    p: float,
    b: float,
    gain_fn: Optional[GainFn] = None,
    H: int = 1,
) -> float:
    gain_fn = gain_fn or (lambda r: _click_gain(r, H))
    if not (0.0 < p < 1.0 and 0.0 < b < 1.0):
        raise ValueError("p and b must lie in (0, 1)")
    q_ratio = (p - b * p) / (1.0 - b * p)
    score = 0.0
    for q in session.queries:
        inner = sum((b * p) ** (r.rank - 1) * gain_fn(r) for r in q.results)
        score += q_ratio ** (q.index - 1) * inner
    return (1.0 - p) * score


def rs_dcg(
    session: Session,
    lam: float,
    b_q: float,
    b_r: float,
    gain_fn: Optional[GainFn] = None,
    H: int = 1,
) -> float:
    gain_fn = gain_fn or (lambda r: _click_gain(r, H))
    M = session.n_queries
    score = 0.0
    for q in session.queries:
        recency = math.exp(-lam * (M - q.index))
        q_disc = 1.0 + math.log(q.index, b_q)
        for r in q.results:
            g = gain_fn(r)
            if g:
                score += recency * g / (q_disc * (1.0 + math.log(r.rank, b_r)))
    return score


def rs_rbp(
    session: Session,
    lam: float,
    p: float,
    b: float,
    gain_fn: Optional[GainFn] = None,
    H: int = 1,
) -> float:
    # Note: no overall (1-p) factor, matching the RS-RBP definition as printed.
    gain_fn = gain_fn or (lambda r: _click_gain(r, H))
    M = session.n_queries
    q_ratio = (p - b * p) / (1.0 - b * p)
    score = 0.0
    for q in session.queries:
        inner = sum((b * p) ** (r.rank - 1) * gain_fn(r) for r in q.results)
        score += math.exp(-lam * (M - q.index)) * q_ratio ** (q.index - 1) * inner
    return score


def per_query_normalize(score: float, M: int) -> float:
    if M < 1:
        raise ValueError("M must be >= 1")
    return score / M


def average_precision_gs(session: Session) -> float:
    """Golden standard: mean over queries of (clicked results / shown results)."""
    precisions = []
    for q in session.queries:
        if not q.results:
            raise MetricUndefinedError(f"query {q.query_id!r} has no results")
        precisions.append(len(q.clicked_results) / len(q.results))
    return sum(precisions) / len(precisions)


def lcd_gs(session: Session) -> float:
    """Golden standard: reciprocal global index of the last clicked document."""
    clicks = session.clicks_in_order()
    if not clicks:
        raise MetricUndefinedError("LCD undefined: session has no clicks")
    last_q, last_r = clicks[-1]
    index_lc = sum(len(q.results) for q in session.queries if q.index < last_q.index)
    index_lc += last_r.rank
    return 1.0 / index_lc


def score_session(metric: str, session: Session, params: MetricParams) -> float:
    """Dispatch a metric by CLI name."""
    M = session.n_queries
    if metric == "num":
        return num(session, params)
    if metric == "um":
        return um(session, params)
    if metric == "um-q":
        return per_query_normalize(um(session, params), M)
    if metric == "sdcg":
        return sdcg(session, params.b_q, params.b_r, H=params.H)
    if metric == "sdcg-q":
        return per_query_normalize(sdcg(session, params.b_q, params.b_r, H=params.H), M)
    if metric == "srbp":
        return srbp(session, params.p, params.b, H=params.H)
    if metric == "srbp-q":
        return per_query_normalize(srbp(session, params.p, params.b, H=params.H), M)
    if metric == "rsdcg":
        return rs_dcg(session, params.lam, params.b_q, params.b_r, H=params.H)
    if metric == "rsrbp":
        return rs_rbp(session, params.lam, params.p, params.b, H=params.H)
    if metric == "ap":
        return average_precision_gs(session)
    if metric == "lcd":
        return lcd_gs(session)
    raise ValueError(f"unknown metric: {metric!r}")


METRIC_NAMES = (
    "num", "um", "um-q", "sdcg", "sdcg-q", "srbp", "srbp-q", "rsdcg", "rsrbp", "ap", "lcd",
)
