"""Session-level relevance labels from clicks, and the ideal reading sequence.

A click marks its own result relevant. It also marks every unclicked
occurrence of the same document in an *earlier* query relevant (the user
skipped it there but wanted it). The labels only ever flow backward.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .params import (
    DUP_EXCLUDE,
    DUP_INCLUDE_DISCOUNTED,
    DUP_INCLUDE_FULL,
    DuplicatePolicy,
    gain_value,
)
from .sessions import REL_CLICK, REL_ENHANCED, SerpResult, Session, SessionQuery


@dataclass(frozen=True)
class IdealEntry:
    doc_id: str
    read_len: int  # ceil(F * doc_len)
    gain: float
    origin: tuple[int, int]  # (query index, rank) of the occurrence


def _relabel(session: Session, backward: bool) -> Session:
    clicked_in = {}  # doc_id -> set of query indices with a click on it
    for q in session.queries:
        for r in q.clicked_results:
            clicked_in.setdefault(r.doc_id, set()).add(q.index)

    new_queries = []
    for q in session.queries:
        new_results = []
        for r in q.results:
            if r.clicked:
                r = replace(r, session_relevant=True, relevance_source=REL_CLICK)
            elif backward and any(j > q.index for j in clicked_in.get(r.doc_id, ())):
                r = replace(r, session_relevant=True, relevance_source=REL_ENHANCED)
            new_results.append(r)
        new_queries.append(replace(q, results=tuple(new_results)))
    return replace(session, queries=tuple(new_queries))


def enhance_labels(session: Session) -> Session:
    """Label clicked results and their skipped earlier occurrences as session-relevant."""
    return _relabel(session, backward=True)


def apply_click_labels(session: Session) -> Session:
    """Label clicked results only (no backward enhancement)."""
    return _relabel(session, backward=False)


def ideal_sequence(
    session: Session,
    policy: DuplicatePolicy,
    F: float,
    H: int = 1,
    base_gain_fn=gain_value,
) -> list[IdealEntry]:
    """Ordered relevant reads of the ideal session.

    Clicked occurrences follow click order. An enhanced earlier occurrence is
    placed immediately before the first click of its document. The duplicate
    policy applies to the second and later occurrences of a doc_id in the
    resulting sequence.
    """
    base_gain = base_gain_fn(1, H)

    enhanced_by_doc = {}  # doc_id -> occurrences, earliest (query, rank) first
    for q in session.queries:
        for r in q.results:
            if r.session_relevant and not r.clicked:
                enhanced_by_doc.setdefault(r.doc_id, []).append((q, r))

    raw: list[tuple[SessionQuery, SerpResult]] = []
    emitted: set[tuple[int, int]] = set()  # (query index, rank) of emitted enhanced occurrences
    for q, r in session.clicks_in_order():
        for eq, er in enhanced_by_doc.get(r.doc_id, []):
            if eq.index < q.index and (eq.index, er.rank) not in emitted:
                raw.append((eq, er))
                emitted.add((eq.index, er.rank))
        raw.append((q, r))

    entries: list[IdealEntry] = []
    seen: set[str] = set()
    for q, r in raw:
        gain = base_gain
        if r.doc_id in seen:
            if policy.mode == DUP_EXCLUDE:
                continue
            if policy.mode == DUP_INCLUDE_DISCOUNTED:
                gain = policy.discount * base_gain
        seen.add(r.doc_id)
        if gain <= 0:
            continue
        entries.append(
            IdealEntry(
                doc_id=r.doc_id,
                read_len=math.ceil(F * r.doc_len),
                gain=gain,
                origin=(q.index, r.rank),
            )
        )
    return entries
