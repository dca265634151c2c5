import pytest

from sessioneval.sessions import SerpResult, Session, SessionQuery


def mk_result(doc_id, rank, clicked=False, click_time=None, snippet_len=80, doc_len=500):
    return SerpResult(
        doc_id=doc_id,
        rank=rank,
        snippet_len=snippet_len,
        doc_len=doc_len,
        clicked=clicked,
        click_time=click_time,
    )


def mk_session(session_id, query_results, satisfaction=None, gap=100.0):
    """Build a session from a list of per-query result lists.

    Each result is a dict of mk_result kwargs minus rank (assigned by position).
    Query issue/end times are laid out sequentially with `gap` seconds between.
    """
    queries = []
    t = 0.0
    for m, results in enumerate(query_results, start=1):
        issue = t
        built = []
        for rank, kw in enumerate(results, start=1):
            built.append(mk_result(rank=rank, **kw))
        t = issue + 60.0
        queries.append(
            SessionQuery(
                query_id=f"q{m}",
                index=m,
                issue_time=issue,
                end_time=t,
                results=built,
            )
        )
        t += gap
    return Session(session_id=session_id, queries=queries, satisfaction=satisfaction)


@pytest.fixture
def fig2_session():
    """Two-query session with a doc skipped in q1 and clicked in q2."""
    return mk_session(
        "fig2",
        [
            [
                {"doc_id": "d1", "clicked": True, "click_time": 5.0},
                {"doc_id": "d2"},
                {"doc_id": "d3"},
                {"doc_id": "d4"},  # skipped here, clicked in q2
            ],
            [
                {"doc_id": "d4", "clicked": True, "click_time": 200.0},
                {"doc_id": "d5"},
                {"doc_id": "d7", "clicked": True, "click_time": 210.0},
            ],
        ],
    )
