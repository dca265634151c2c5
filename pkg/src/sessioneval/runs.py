"""Run files, the ideal/diversified run transforms, and synthetic sessions."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

from .sessions import Session, SessionQuery, SerpResult


class RunParseError(ValueError):
    pass


Ranking = list[tuple[str, float]]  # (doc_id, score), best first


@dataclass(frozen=True)
class Run:
    run_tag: str
    rankings: dict[tuple[str, int], Ranking] = field(default_factory=dict)


@dataclass(frozen=True)
class PoolDoc:
    doc_id: str
    score: float
    snippet_len: int
    doc_len: int


# (session_id, query index) -> candidate documents
CandidatePool = dict[tuple[str, int], list[PoolDoc]]


def parse_run(text: str) -> Run:
    """Parse a TSV run: session_id, query_index, doc_id, rank, score, run_tag."""
    tag: Optional[str] = None
    rows: dict[tuple[str, int], list[tuple[int, str, float]]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 6:
            raise RunParseError(f"line {lineno}: expected 6 tab-separated fields")
        session_id, q_idx, doc_id, rank, score, run_tag = parts
        if tag is None:
            tag = run_tag
        elif tag != run_tag:
            raise RunParseError(f"line {lineno}: mixed run tags {tag!r} and {run_tag!r}")
        rows.setdefault((session_id, int(q_idx)), []).append(
            (int(rank), doc_id, float(score))
        )

    rankings: dict[tuple[str, int], Ranking] = {}
    for key, entries in rows.items():
        entries.sort()
        ranks = [e[0] for e in entries]
        if ranks != list(range(1, len(ranks) + 1)):
            raise RunParseError(f"{key}: ranks must be 1..N without gaps")
        docs = [e[1] for e in entries]
        if len(set(docs)) != len(docs):
            raise RunParseError(f"{key}: duplicate doc_id in one ranking")
        scores = [e[2] for e in entries]
        if any(a < b for a, b in zip(scores, scores[1:])):
            raise RunParseError(f"{key}: scores must be non-increasing with rank")
        rankings[key] = [(d, s) for _, d, s in entries]
    return Run(run_tag=tag or "", rankings=rankings)


def serialize_run(run: Run) -> str:
    lines = []
    for (session_id, q_idx) in sorted(run.rankings):
        for rank, (doc_id, score) in enumerate(run.rankings[(session_id, q_idx)], start=1):
            lines.append(
                f"{session_id}\t{q_idx}\t{doc_id}\t{rank}\t{score!r}\t{run.run_tag}"
            )
    return "\n".join(lines) + ("\n" if lines else "")


def parse_pools(text: str) -> CandidatePool:
    """Parse a TSV pool: session_id, query_index, doc_id, score, snippet_len, doc_len."""
    pools: CandidatePool = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 6:
            raise RunParseError(f"line {lineno}: expected 6 tab-separated fields")
        session_id, q_idx, doc_id, score, snippet_len, doc_len = parts
        pools.setdefault((session_id, int(q_idx)), []).append(
            PoolDoc(doc_id, float(score), int(snippet_len), int(doc_len))
        )
    return pools


def _session_query_indices(pools: CandidatePool, session_id: str) -> list[int]:
    indices = sorted(q for sid, q in pools if sid == session_id)
    if not indices:
        raise ValueError(f"no pools for session {session_id!r}")
    return indices


def _extended_pool(pools: CandidatePool, session_id: str, m: int, indices: list[int]) -> dict[str, PoolDoc]:
    # Union of this query's pool with all subsequent queries' pools; on a
    # doc_id collision the higher-scored entry wins (earlier query on ties).
    merged: dict[str, PoolDoc] = {}
    for q in indices:
        if q < m:
            continue
        for doc in pools.get((session_id, q), []):
            held = merged.get(doc.doc_id)
            if held is None or doc.score > held.score:
                merged[doc.doc_id] = doc
    return merged


def _ranked(docs: dict[str, PoolDoc], top_k: int) -> Ranking:
    ordered = sorted(docs.values(), key=lambda d: (-d.score, d.doc_id))
    return [(d.doc_id, d.score) for d in ordered[:top_k]]


def ideal_run_transform(
    pools: CandidatePool, session_id: str, top_k: int = 10
) -> dict[int, Ranking]:
    """Re-rank each query over its own pool extended with all later queries' pools."""
    indices = _session_query_indices(pools, session_id)
    out: dict[int, Ranking] = {}
    for m in indices:
        merged = _extended_pool(pools, session_id, m, indices)
        if not merged:
            raise ValueError(f"empty extended pool for ({session_id!r}, {m})")
        out[m] = _ranked(merged, top_k)
    return out


def diversified_run_transform(
    pools: CandidatePool, session_id: str, top_k: int = 10
) -> dict[int, Ranking]:
    """Like the ideal transform, but never re-present a doc shown by an earlier query."""
    indices = _session_query_indices(pools, session_id)
    out: dict[int, Ranking] = {}
    presented: set[str] = set()
    for m in indices:
        merged = _extended_pool(pools, session_id, m, indices)
        survivors = {d: doc for d, doc in merged.items() if d not in presented}
        ranking = _ranked(survivors, top_k)  # may fall short of top_k
        out[m] = ranking
        presented.update(d for d, _ in ranking)
    return out


def pools_from_sessions(sessions: list[Session], score_fn=None) -> CandidatePool:
    """Build candidate pools from sessions, scoring docs by a rank-derived default."""
    pools: CandidatePool = {}
    for s in sessions:
        for q in s.queries:
            pools[(s.session_id, q.index)] = [
                PoolDoc(
                    doc_id=r.doc_id,
                    score=score_fn(s, q, r) if score_fn else 1.0 / (q.index * 100 + r.rank),
                    snippet_len=r.snippet_len,
                    doc_len=r.doc_len,
                )
                for r in q.results
            ]
    return pools


def apply_run_to_session(session: Session, rankings: dict[int, Ranking], pools: CandidatePool) -> Session:
    """Project the session's clicks onto re-ranked results.

    Simulation rule for scoring transformed runs with click-based metrics: a
    document the user clicked anywhere in the original session is treated as
    clicked wherever it now appears. Click times follow reading order.
    """
    clicked_docs = {r.doc_id for q in session.queries for r in q.clicked_results}
    attrs = {}
    for (sid, qi), docs in pools.items():
        if sid != session.session_id:
            continue
        for d in docs:
            attrs.setdefault(d.doc_id, d)

    queries = []
    t = 0.0
    for q in session.queries:
        ranking = rankings.get(q.index, [])
        issue = t
        results = []
        for rank, (doc_id, _score) in enumerate(ranking, start=1):
            t += 1.0
            pd = attrs.get(doc_id)
            clicked = doc_id in clicked_docs
            results.append(
                SerpResult(
                    doc_id=doc_id,
                    rank=rank,
                    snippet_len=pd.snippet_len if pd else 80,
                    doc_len=pd.doc_len if pd else 0,
                    clicked=clicked,
                    click_time=t if clicked else None,
                )
            )
        t += 1.0
        queries.append(
            SessionQuery(
                query_id=q.query_id,
                index=q.index,
                issue_time=issue,
                end_time=t,
                results=results,
            )
        )
        t += 10.0  # reformulation gap
    return Session(
        session_id=session.session_id,
        queries=queries,
        satisfaction=session.satisfaction,
    )


@dataclass(frozen=True)
class SynthConfig:
    n_sessions: int = 100
    min_queries: int = 1
    max_queries: int = 4
    results_per_query: int = 10
    click_base: float = 0.35  # click probability at rank 1
    click_decay: float = 0.75  # multiplicative decay per rank
    snippet_len_range: tuple[int, int] = (40, 120)
    doc_len_range: tuple[int, int] = (300, 3000)
    repeat_frac: float = 0.3  # sessions with a skipped-then-clicked repeat doc
    ensure_click: bool = True

    def __post_init__(self):
        if self.results_per_query < 1:
            raise ValueError("need at least one result per query")
        if not 1 <= self.min_queries <= self.max_queries:
            raise ValueError("bad query count range")
        if self.n_sessions < 0:
            raise ValueError("n_sessions must be >= 0")


def synth_sessions(config: SynthConfig, seed: int) -> list[Session]:
    """Deterministic synthetic corpus with rank-decaying clicks and repeat patterns."""
    rng = random.Random(seed)
    sessions = []
    for si in range(config.n_sessions):
        sid = f"s{si:05d}"
        n_q = rng.randint(config.min_queries, config.max_queries)
        t = 0.0
        queries = []
        for m in range(1, n_q + 1):
            issue = t
            results = []
            for rank in range(1, config.results_per_query + 1):
                t += rng.uniform(0.5, 3.0)
                p_click = config.click_base * config.click_decay ** (rank - 1)
                clicked = rng.random() < p_click
                results.append(
                    SerpResult(
                        doc_id=f"{sid}_q{m}_d{rank}",
                        rank=rank,
                        snippet_len=rng.randint(*config.snippet_len_range),
                        doc_len=rng.randint(*config.doc_len_range),
                        clicked=clicked,
                        click_time=t if clicked else None,
                    )
                )
            t += rng.uniform(1.0, 5.0)
            queries.append(
                SessionQuery(
                    query_id=f"{sid}_q{m}",
                    index=m,
                    issue_time=issue,
                    end_time=t,
                    results=results,
                )
            )
            t += rng.uniform(5.0, 400.0)  # reformulation gap

        queries = _ensure_click(queries, config, rng)
        if n_q >= 2 and rng.random() < config.repeat_frac:
            queries = _plant_repeat(queries, rng)
        sat = _satisfaction_from_clicks(queries, rng)
        sessions.append(Session(session_id=sid, queries=queries, satisfaction=sat))
    return sessions


def _ensure_click(queries, config, rng):
    if not config.ensure_click or any(r.clicked for q in queries for r in q.results):
        return queries
    from dataclasses import replace

    q = queries[0]
    r = q.results[0]
    forced = replace(r, clicked=True, click_time=q.issue_time + 1.0)
    new_results = (forced,) + q.results[1:]
    return [replace(q, results=new_results)] + list(queries[1:])


def _plant_repeat(queries, rng):
    """Make an unclicked early result share a doc_id with a later clicked one."""
    from dataclasses import replace

    later = [(qi, r) for qi, q in enumerate(queries) if qi >= 1 for r in q.results if r.clicked]
    if not later:
        return queries
    qi, clicked = later[rng.randrange(len(later))]
    early_qi = rng.randrange(qi)
    candidates = [r for r in queries[early_qi].results if not r.clicked]
    if not candidates:
        return queries
    victim = candidates[rng.randrange(len(candidates))]
    new_results = tuple(
        replace(r, doc_id=clicked.doc_id) if r.rank == victim.rank else r
        for r in queries[early_qi].results
    )
    out = list(queries)
    out[early_qi] = replace(queries[early_qi], results=new_results)
    return out


def _satisfaction_from_clicks(queries, rng) -> int:
    # Noisy 1-5 rating loosely increasing with early clicks.
    score = 0.0
    for q in queries:
        for r in q.clicked_results:
            score += 1.0 / r.rank
    raw = 1 + int(min(4.0, score * 1.5 + rng.random() * 1.5))
    return max(1, min(5, raw))
