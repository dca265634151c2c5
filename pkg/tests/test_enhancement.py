import math

import pytest

from sessioneval.enhancement import apply_click_labels, enhance_labels, ideal_sequence
from sessioneval.params import DuplicatePolicy
from sessioneval.runs import SynthConfig, synth_sessions
from sessioneval.sessions import REL_CLICK, REL_ENHANCED

from conftest import mk_session


def brute_force_enhanced(session):
    """All (query index, rank) of unclicked occurrences whose doc is clicked later."""
    labels = set()
    for qi in session.queries:
        for r in qi.results:
            if r.clicked:
                continue
            for qj in session.queries:
                if qj.index > qi.index and any(
                    rr.doc_id == r.doc_id and rr.clicked for rr in qj.results
                ):
                    labels.add((qi.index, r.rank))
                    break
    return labels


def enhanced_of(session):
    return {
        (q.index, r.rank)
        for q in session.queries
        for r in q.results
        if r.relevance_source == REL_ENHANCED
    }


def test_backward_enhancement(fig2_session):
    out = enhance_labels(fig2_session)
    q1 = out.queries[0]
    assert q1.results[3].session_relevant
    assert q1.results[3].relevance_source == REL_ENHANCED
    clicked = [r for q in out.queries for r in q.results if r.clicked]
    assert all(r.session_relevant and r.relevance_source == REL_CLICK for r in clicked)


def test_no_clicks_no_labels():
    s = mk_session("x", [[{"doc_id": "a"}, {"doc_id": "b"}]])
    assert enhance_labels(s) == s


def test_enhancement_never_flows_forward():
    s = mk_session(
        "f",
        [
            [{"doc_id": "a", "clicked": True, "click_time": 1.0}],
            [{"doc_id": "b"}, {"doc_id": "a"}],  # same doc later, unclicked
        ],
    )
    out = enhance_labels(s)
    assert not out.queries[1].results[1].session_relevant
    assert enhanced_of(out) == brute_force_enhanced(s)


def test_enhancement_idempotent_and_matches_oracle():
    sessions = synth_sessions(SynthConfig(n_sessions=60, repeat_frac=1.0), seed=11)
    for s in sessions:
        out = enhance_labels(s)
        assert enhance_labels(out) == out
        assert enhanced_of(out) == brute_force_enhanced(s)


def test_click_only_labels():
    sessions = synth_sessions(SynthConfig(n_sessions=20, repeat_frac=1.0), seed=5)
    for s in sessions:
        out = apply_click_labels(s)
        assert enhanced_of(out) == set()
        for q in out.queries:
            for r in q.results:
                assert r.session_relevant == r.clicked


def test_ideal_sequence_duplicate_policies(fig2_session):
    enhanced = enhance_labels(fig2_session)
    full = ideal_sequence(enhanced, DuplicatePolicy("include_full"), F=0.2)
    # click order: d1, d4 (preceded by its enhanced q1 occurrence), d7
    assert [e.doc_id for e in full] == ["d1", "d4", "d4", "d7"]
    assert all(e.gain == 0.5 for e in full)
    assert all(e.read_len == math.ceil(0.2 * 500) for e in full)

    discounted = ideal_sequence(enhanced, DuplicatePolicy("include_discounted", 0.5), F=0.2)
    assert [e.gain for e in discounted] == [0.5, 0.5, 0.25, 0.5]

    excluded = ideal_sequence(enhanced, DuplicatePolicy("exclude"), F=0.2)
    assert [e.doc_id for e in excluded] == ["d1", "d4", "d7"]
    # enhanced occurrence comes first, so it is the one kept
    assert excluded[1].origin == (1, 4)


def test_ideal_sequence_orders_by_click_time():
    s = mk_session(
        "o",
        [
            [
                {"doc_id": "a", "clicked": True, "click_time": 10.0},
                {"doc_id": "b"},
                {"doc_id": "c", "clicked": True, "click_time": 5.0},
            ]
        ],
    )
    entries = ideal_sequence(enhance_labels(s), DuplicatePolicy(), F=0.2)
    assert [e.doc_id for e in entries] == ["c", "a"]


def test_ideal_sequence_empty_without_relevant():
    s = mk_session("e", [[{"doc_id": "a"}], [{"doc_id": "b"}]])
    assert ideal_sequence(enhance_labels(s), DuplicatePolicy(), F=0.2) == []


def test_policy_gain_ordering_property():
    sessions = synth_sessions(SynthConfig(n_sessions=80, repeat_frac=1.0), seed=23)
    for s in sessions:
        enhanced = enhance_labels(s)
        totals = {}
        for mode in ("include_full", "include_discounted", "exclude"):
            entries = ideal_sequence(enhanced, DuplicatePolicy(mode), F=0.2)
            totals[mode] = sum(e.gain for e in entries)
            if mode == "exclude":
                docs = [e.doc_id for e in entries]
                assert len(docs) == len(set(docs))
        assert totals["include_full"] >= totals["include_discounted"] >= totals["exclude"]
