"""Session/click data model, JSONL parsing and dataset filtering."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional

REL_NONE = "none"
REL_CLICK = "click"
REL_ENHANCED = "enhanced"


class SessionParseError(ValueError):
    """Raised when a session-log line cannot be parsed or fails validation."""


@dataclass(frozen=True)
class SerpResult:
    doc_id: str
    rank: int  # 1-based SERP position
    snippet_len: int
    doc_len: int
    clicked: bool
    click_time: Optional[float] = None  # seconds since session start
    graded_label: Optional[int] = None  # reserved for explicit-judgment mode
    session_relevant: bool = False
    relevance_source: str = REL_NONE

    def __post_init__(self):
        if self.rank < 1:
            raise SessionParseError(f"rank must be >= 1, got {self.rank}")
        if self.snippet_len < 0 or self.doc_len < 0:
            raise SessionParseError("lengths must be non-negative")
        if self.clicked != (self.click_time is not None):
            raise SessionParseError(
                f"doc {self.doc_id!r}: clicked flag and click_time must agree"
            )
        if self.clicked and self.click_time < 0:
            raise SessionParseError("click_time must be >= 0")
        if self.session_relevant and self.relevance_source == REL_NONE:
            raise SessionParseError("session_relevant result needs a relevance source")


@dataclass(frozen=True)
class SessionQuery:
    query_id: str
    index: int  # 1-based issue order within the session
    issue_time: float
    end_time: float
    results: tuple[SerpResult, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "results", tuple(self.results))
        ranks = [r.rank for r in self.results]
        if sorted(ranks) != list(range(1, len(ranks) + 1)):
            raise SessionParseError(
                f"query {self.query_id!r}: ranks must be exactly 1..N "
                f"with no gaps or duplicates (got {ranks})"
            )

    @property
    def clicked_results(self) -> list[SerpResult]:
        return [r for r in self.results if r.clicked]


@dataclass(frozen=True)
class Session:
    session_id: str
    queries: tuple[SessionQuery, ...] = ()
    satisfaction: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "queries", tuple(self.queries))
        indices = [q.index for q in self.queries]
        if indices != list(range(1, len(indices) + 1)):
            raise SessionParseError(
                f"session {self.session_id!r}: query indices must be 1..M in order"
            )

    @property
    def n_queries(self) -> int:
        return len(self.queries)

    @property
    def has_clicks(self) -> bool:
        return any(r.clicked for q in self.queries for r in q.results)

    def clicks_in_order(self) -> list[tuple[SessionQuery, SerpResult]]:
        """All clicks, ordered by click time; ties broken by (query index, rank).

        The tie-break makes click order a total order, which downstream
        ideal-sequence construction relies on.
        """
        pairs = [(q, r) for q in self.queries for r in q.results if r.clicked]
        pairs.sort(key=lambda qr: (qr[1].click_time, qr[0].index, qr[1].rank))
        return pairs


def _result_from_obj(obj: dict) -> SerpResult:
    return SerpResult(
        doc_id=str(obj["doc_id"]),
        rank=int(obj["rank"]),
        snippet_len=int(obj["snippet_len"]),
        doc_len=int(obj["doc_len"]),
        clicked=bool(obj["clicked"]),
        click_time=None if obj.get("click_time") is None else float(obj["click_time"]),
        graded_label=None if obj.get("graded_label") is None else int(obj["graded_label"]),
        session_relevant=bool(obj.get("session_relevant", False)),
        relevance_source=str(obj.get("relevance_source", REL_NONE)),
    )


def session_from_obj(obj: dict) -> Session:
    queries = []
    for i, qobj in enumerate(obj["queries"], start=1):
        queries.append(
            SessionQuery(
                query_id=str(qobj["query_id"]),
                index=i,
                issue_time=float(qobj["issue_time"]),
                end_time=float(qobj["end_time"]),
                results=[_result_from_obj(r) for r in qobj["results"]],
            )
        )
    sat = obj.get("satisfaction")
    return Session(
        session_id=str(obj["session_id"]),
        queries=queries,
        satisfaction=None if sat is None else int(sat),
    )


def session_to_obj(session: Session) -> dict:
    def result_obj(r: SerpResult) -> dict:
        obj = {
            "doc_id": r.doc_id,
            "rank": r.rank,
            "snippet_len": r.snippet_len,
            "doc_len": r.doc_len,
            "clicked": r.clicked,
            "click_time": r.click_time,
            "graded_label": r.graded_label,
        }
        if r.session_relevant:
            obj["session_relevant"] = True
            obj["relevance_source"] = r.relevance_source
        return obj

    return {
        "session_id": session.session_id,
        "satisfaction": session.satisfaction,
        "queries": [
            {
                "query_id": q.query_id,
                "issue_time": q.issue_time,
                "end_time": q.end_time,
                "results": [result_obj(r) for r in q.results],
            }
            for q in session.queries
        ],
    }


def parse_sessions(text: str) -> list[Session]:
    """Parse line-delimited session records; raises on the first bad line."""
    sessions = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SessionParseError(f"line {lineno}: invalid JSON ({exc})") from exc
        try:
            sessions.append(session_from_obj(obj))
        except (KeyError, TypeError) as exc:
            raise SessionParseError(f"line {lineno}: missing/invalid field {exc}") from exc
        except SessionParseError as exc:
            raise SessionParseError(f"line {lineno}: {exc}") from exc
    return sessions


def serialize_sessions(sessions: Iterable[Session]) -> str:
    return "".join(
        json.dumps(session_to_obj(s), sort_keys=True, ensure_ascii=False) + "\n"
        for s in sessions
    )


def load_sessions(path) -> list[Session]:
    with open(path, encoding="utf-8") as fh:
        return parse_sessions(fh.read())


def filter_sessions(sessions: list[Session]) -> list[Session]:
    """Drop good-abandonment sessions: exactly one query and zero clicks."""
    return [s for s in sessions if not (s.n_queries == 1 and not s.has_clicks)]
