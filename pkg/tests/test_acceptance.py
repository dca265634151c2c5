"""Acceptance suite: one test per criterion, each prints a PASS line on success."""

import json
import math
import random
import time

import pytest

from sessioneval.cli import main
from sessioneval.enhancement import enhance_labels
from sessioneval.estimation import EstimationConfig, estimate_L, estimate_rt_length
from sessioneval.meta_eval import concordance, kendall, spearman
from sessioneval.metrics import lcd_gs, num, rs_dcg, sdcg
from sessioneval.params import MetricParams, gain_value
from sessioneval.runs import (
    SynthConfig,
    diversified_run_transform,
    ideal_run_transform,
    pools_from_sessions,
    synth_sessions,
)
from sessioneval.sessions import REL_ENHANCED, SerpResult, Session, SessionQuery
from sessioneval.trailtext import build_actual_trailtext, mtl

from conftest import mk_session
from test_enhancement import brute_force_enhanced, enhanced_of
from test_meta_eval import brute_concordance, brute_kendall, brute_spearman


def ok(n, msg):
    print(f"PASS criterion {n}: {msg}")


def test_criterion_01_gain_mapping():
    assert gain_value(1, 1) == 0.5
    for H in (1, 2, 3, 4):
        assert gain_value(0, H) == 0.0
    ok(1, "gain_value(1,1)=0.5 and gain_value(0,H)=0 for H in 1..4")


def test_criterion_02_lcd_worked_example():
    s = mk_session(
        "lcd",
        [
            [{"doc_id": f"a{r}", "clicked": r == 1, "click_time": 1.0 if r == 1 else None}
             for r in range(1, 11)],
            [{"doc_id": f"b{r}", "clicked": r == 4, "click_time": 100.0 if r == 4 else None}
             for r in range(1, 11)],
        ],
    )
    assert lcd_gs(s) == 1 / 14
    ok(2, "LCD of last click at 4th result of 2nd query (10/query) = 1/14 exactly")


def test_criterion_03_rt_estimation_arithmetic():
    start = time.perf_counter()
    corpus = []
    for i in range(100):
        corpus.append(
            Session(
                f"s{i}",
                [
                    SessionQuery("q1", 1, 0.0, 60.0, [SerpResult("a", 1, 80, 500, True, 1.0)]),
                    SessionQuery("q2", 2, 266.0, 326.0, [SerpResult("b", 1, 80, 500, False)]),
                ],
            )
        )
    cfg = EstimationConfig(rt_discard_frac=0.04, reading_speed=255.0)
    assert estimate_rt_length(corpus, cfg) == 876  # ceil(255 * 206/60) = ceil(875.5)
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    ok(3, f"mean interval 206 s at 255 chars/min -> 876 chars in {elapsed:.3f} s")


def test_criterion_04_hand_oracle_num():
    s = mk_session("h", [[{"doc_id": "a", "clicked": True, "click_time": 1.0,
                           "snippet_len": 80, "doc_len": 500}]])
    value = num(s, MetricParams(F=0.2, L=1000))
    assert abs(value - 0.41 / 0.45) < 1e-12
    ok(4, "single-click worked example: NUM = 0.41/0.45 within 1e-12")


def _large_corpus():
    return synth_sessions(
        SynthConfig(n_sessions=10_000, min_queries=1, max_queries=4, repeat_frac=0.4),
        seed=20240501,
    )


def test_criterion_05_num_bound_property():
    start = time.perf_counter()
    sessions = _large_corpus()
    probe = MetricParams(F=0.2, reformulation_len=876)
    L = max(mtl(s, probe) for s in sessions) + 1
    params = MetricParams(F=0.2, L=L, reformulation_len=876)
    violations = 0
    for s in sessions:
        value = num(s, params)
        if not 0.0 < value <= 1.0:
            violations += 1
    elapsed = time.perf_counter() - start
    assert violations == 0
    assert elapsed < 60.0
    ok(5, f"NUM in (0,1] on {len(sessions)} sessions, 0 violations, {elapsed:.1f} s")


def test_criterion_06_ablation_identities():
    sessions = synth_sessions(SynthConfig(n_sessions=2_000, repeat_frac=0.4), seed=6)
    probe = MetricParams(F=0.2, reformulation_len=876)
    L = max(mtl(s, probe) for s in sessions) + 1
    params = MetricParams(F=0.2, L=L, reformulation_len=876)
    no_rt = params.with_ablation("no_reformulation_text")
    for s in sessions:
        assert abs(rs_dcg(s, 0.0, 4.0, 2.0) - sdcg(s, 4.0, 2.0)) < 1e-12
        assert num(s, no_rt) >= num(s, params)
    ok(6, "rs_dcg(lambda=0) = sdcg to 1e-12 and NUM(no RT) >= NUM(RT) on 2000 sessions")


def test_criterion_07_enhancement_oracle():
    sessions = synth_sessions(
        SynthConfig(n_sessions=1_000, min_queries=2, max_queries=4, repeat_frac=1.0),
        seed=7,
    )
    for s in sessions:
        assert enhanced_of(enhance_labels(s)) == brute_force_enhanced(s)
    ok(7, "enhance_labels matches the brute-force double-loop labeler on 1000 sessions")


def test_criterion_08_correlation_oracles():
    rng = random.Random(8)
    checked = 0
    for _ in range(500):
        n = rng.randint(2, 50)
        tie_heavy = rng.random() < 0.5
        span = 5 if tie_heavy else 10**6
        xs = [float(rng.randint(0, span)) for _ in range(n)]
        ys = [float(rng.randint(0, span)) for _ in range(n)]
        if len(set(xs)) < 2 or len(set(ys)) < 2:
            continue
        assert abs(spearman(xs, ys) - brute_spearman(xs, ys)) < 1e-12
        assert abs(kendall(xs, ys) - brute_kendall(xs, ys)) < 1e-12
        checked += 1
    xs = [float(i) for i in range(25)]
    assert spearman(xs, xs[::-1]) == -1.0
    assert kendall(xs, xs[::-1]) == -1.0
    ok(8, f"spearman/kendall match O(n^2) oracles to 1e-12 on {checked} vectors; reversed = -1")


def test_criterion_09_concordance_oracle():
    rng = random.Random(9)
    for trial in range(200):
        n_sessions = rng.randint(5, 25)
        tags = ["r1", "r2", "r3"]
        items = [(f"s{i}", t) for i in range(n_sessions) for t in tags]
        a = {it: float(rng.randint(0, 6)) for it in items}
        b = {it: float(rng.randint(0, 6)) for it in items}
        gold = {it: float(rng.randint(0, 6)) for it in items}
        pairs = [
            ((f"s{i}", t1), (f"s{i}", t2))
            for i in range(n_sessions)
            for t1, t2 in (("r1", "r2"), ("r1", "r3"), ("r2", "r3"))
        ]
        rep = concordance(a, b, gold, pairs)
        expect = brute_concordance(a, b, gold, pairs)
        assert (rep.n_disagreements, rep.conc_a, rep.conc_b) == expect
    ok(9, "concordance counts/fractions match an exhaustive recount on 200 pair sets")


def test_criterion_10_transform_properties():
    sessions = synth_sessions(
        SynthConfig(n_sessions=500, min_queries=2, max_queries=4, repeat_frac=0.5),
        seed=10,
    )
    pools = pools_from_sessions(sessions)
    for s in sessions:
        div = diversified_run_transform(pools, s.session_id, top_k=10)
        emitted = [d for q in sorted(div) for d, _ in div[q]]
        assert len(emitted) == len(set(emitted))
        ideal = ideal_run_transform(pools, s.session_id, top_k=10)
        last = s.n_queries
        own = sorted(
            pools[(s.session_id, last)], key=lambda d: (-d.score, d.doc_id)
        )[:10]
        assert ideal[last] == [(d.doc_id, d.score) for d in own]
    ok(10, "diversified runs duplicate-free and ideal transform is identity on last query")


def test_criterion_11_estimation_oracle():
    corpus = []
    for k in range(1, 1001):
        r = SerpResult("d", 1, snippet_len=k, doc_len=0, clicked=True, click_time=1.0)
        corpus.append(Session(f"m{k}", [SessionQuery("q", 1, 0.0, 10.0, [r])]))
    cfg = EstimationConfig(mtl_discard_frac=0.01)
    params = MetricParams(F=0.2, reformulation_len=0)
    assert estimate_L(corpus, cfg, params) == 990

    sessions = synth_sessions(SynthConfig(n_sessions=500, repeat_frac=0.4), seed=11)
    probe = MetricParams(F=0.2, L=10**7, reformulation_len=876)
    for s in sessions:
        assert mtl(s, probe) == build_actual_trailtext(s, probe).total_len
    ok(11, "estimate_L on MTLs 1..1000 with 1% discard = 990; MTL = actual total_len")


def test_criterion_12_pipeline_determinism(tmp_path):
    def pipeline(tag):
        d = tmp_path / tag
        d.mkdir()
        sessions = d / "sessions.jsonl"
        est = d / "estimate.json"
        scores = d / "scores.csv"
        corr = d / "correlate.json"
        assert main(["synth", "--seed", "12", "--n", "80", "--min-queries", "2",
                     "--out", str(sessions)]) == 0
        assert main(["estimate", str(sessions), "--out", str(est)]) == 0
        cfg = json.loads(est.read_text())
        assert main(["eval", str(sessions), "--metric", "num",
                     "--L", str(cfg["L"] + 1), "--rt-len", str(cfg["rt_len"]),
                     "--out", str(scores)]) == 0
        assert main(["correlate", str(sessions), "--metric", "num",
                     "--folds", "4", "--repeats", "2", "--seed", "12",
                     "--out", str(corr)]) == 0
        return [p.read_bytes() for p in (sessions, est, scores, corr)]

    assert pipeline("run1") == pipeline("run2")
    ok(12, "synth -> estimate -> eval -> correlate twice with one seed: byte-identical")
