"""Trailtext construction for the actual and ideal sessions, and MTL."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .enhancement import IdealEntry
from .params import ABLATION_NO_REFORMULATION_TEXT, MetricParams, gain_value
from .sessions import Session

KIND_SNIPPET = "snippet"
KIND_DOCUMENT = "document"
KIND_REFORMULATION = "reformulation"


class TrailtextUndefinedError(ValueError):
    """The actual trailtext is undefined (session has no clicks)."""


@dataclass(frozen=True)
class TrailString:
    kind: str
    length: int
    gain: float
    end_pos: int  # cumulative offset of the string's last character


@dataclass(frozen=True)
class Trailtext:
    strings: tuple[TrailString, ...] = ()

    @property
    def total_len(self) -> int:
        return self.strings[-1].end_pos if self.strings else 0


def _assemble(pieces: list[tuple[str, int, float]]) -> Trailtext:
    strings = []
    pos = 0
    for kind, length, gain in pieces:
        pos += length
        strings.append(TrailString(kind=kind, length=length, gain=gain, end_pos=pos))
    return Trailtext(strings=tuple(strings))


def build_actual_trailtext(session: Session, params: MetricParams) -> Trailtext:
    """What the user actually read, in reading order.

    Per query: all snippets down to the lowest clicked rank, with each clicked
    document's read text right after its snippet. A reformulation filler
    follows every query but the last (clicks or not), unless ablated away.
    """
    if not session.has_clicks:
        raise TrailtextUndefinedError("undefined trailtext: no clicks")

    doc_gain = gain_value(1, params.H)
    add_rt = params.reformulation_len > 0 and (
        ABLATION_NO_REFORMULATION_TEXT not in params.ablation
    )

    pieces: list[tuple[str, int, float]] = []
    for q in session.queries:
        clicked_ranks = [r.rank for r in q.clicked_results]
        if clicked_ranks:
            lowest = max(clicked_ranks)
            for r in q.results:
                if r.rank > lowest:
                    break
                pieces.append((KIND_SNIPPET, r.snippet_len, 0.0))
                if r.clicked:
                    read = math.ceil(params.F * r.doc_len)
                    pieces.append((KIND_DOCUMENT, read, doc_gain))
        if add_rt and q.index < session.n_queries:
            pieces.append((KIND_REFORMULATION, params.reformulation_len, 0.0))
    return _assemble(pieces)


def build_ideal_trailtext(ideal_entries: list[IdealEntry]) -> Trailtext:
    """The ideal session's reading: relevant documents only, no snippets, no reformulations."""
    return _assemble([(KIND_DOCUMENT, e.read_len, e.gain) for e in ideal_entries])


def mtl(session: Session, params: MetricParams, default_snippet_len: int | None = None) -> int:
    """Maximal Trailtext Length in characters.

    Snippets down to the last click of each query, the read fraction of every
    clicked document, and one reformulation filler per reformulation. A
    zero-click session yields only the reformulation term (used by estimation).
    `default_snippet_len` substitutes for non-positive snippet lengths.
    """
    total = (session.n_queries - 1) * params.reformulation_len
    for q in session.queries:
        clicked_ranks = [r.rank for r in q.clicked_results]
        if not clicked_ranks:
            continue
        lowest = max(clicked_ranks)
        for r in q.results:
            if r.rank > lowest:
                continue
            snippet = r.snippet_len
            if default_snippet_len is not None and snippet <= 0:
                snippet = default_snippet_len
            total += snippet
            if r.clicked:
                total += math.ceil(params.F * r.doc_len)
    return total
