"""Command-line interface."""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from . import estimation, meta_eval, metrics, runs
from .enhancement import enhance_labels, ideal_sequence
from .estimation import EstimationConfig, estimate_L, estimate_rt_length
from .params import ABLATIONS, DuplicatePolicy, MetricParams
from .reports import EvalReport, EvalRow, render_score_histogram, sha256_of_text
from .sessions import filter_sessions, parse_sessions, serialize_sessions
from .trailtext import build_actual_trailtext, build_ideal_trailtext

_DUP_MODES = {"include": "include_full", "discount": "include_discounted", "exclude": "exclude"}


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--F", type=float, default=0.20, help="fraction of a document read")
    p.add_argument("--L", type=int, default=19336, help="decay horizon in characters")
    p.add_argument("--H", type=int, default=1, help="highest relevance level")
    p.add_argument("--rt-len", type=int, default=876, help="reformulation text length")
    p.add_argument("--dup-policy", choices=sorted(_DUP_MODES), default="include")
    p.add_argument("--dup-discount", type=float, default=0.5)
    p.add_argument("--b-q", type=float, default=4.0)
    p.add_argument("--b-r", type=float, default=2.0)
    p.add_argument("--p", type=float, default=0.8)
    p.add_argument("--b", type=float, default=0.9)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--ablate", action="append", choices=ABLATIONS, default=[])


def _params_from_args(args) -> MetricParams:
    return MetricParams(
        F=args.F,
        L=args.L,
        H=args.H,
        reformulation_len=args.rt_len,
        dup_policy=DuplicatePolicy(mode=_DUP_MODES[args.dup_policy], discount=args.dup_discount),
        b_q=args.b_q,
        b_r=args.b_r,
        p=args.p,
        b=args.b,
        lam=args.lam,
        ablation=frozenset(args.ablate),
    )


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load_filtered(path: str, apply_filter: bool):
    text = _read(path)
    sessions = parse_sessions(text)
    if apply_filter:
        sessions = filter_sessions(sessions)
    return sessions, sha256_of_text(text)


def _cmd_eval(args) -> int:
    params = _params_from_args(args)
    sessions, digest = _load_filtered(args.sessions, not args.no_filter)
    rows = []
    for s in sessions:
        try:
            score = metrics.score_session(args.metric, s, params)
            rows.append(EvalRow(session_id=s.session_id, metric=args.metric, score=score))
        except metrics.MetricUndefinedError as exc:
            reason = "no_clicks" if "no clicks" in str(exc) else "undefined"
            rows.append(
                EvalRow(session_id=s.session_id, metric=args.metric, score=None, error=reason)
            )
    report = EvalReport(
        rows=tuple(rows),
        params={
            "metric": args.metric,
            "F": params.F,
            "L": params.L,
            "H": params.H,
            "rt_len": params.reformulation_len,
            "dup_policy": params.dup_policy.mode,
            "dup_discount": params.dup_policy.discount,
            "b_q": params.b_q,
            "b_r": params.b_r,
            "p": params.p,
            "b": params.b,
            "lambda": params.lam,
            "ablation": sorted(params.ablation),
        },
        input_digest=digest,
    )
    _write(args.out, report.to_csv())
    if report.error_count:
        print(f"warning: {report.error_count} session(s) skipped", file=sys.stderr)
    if args.report:
        _write(args.report, report.to_json())
    if args.figure:
        render_score_histogram(report, args.figure)
    return 0


def _cmd_estimate(args) -> int:
    cfg = EstimationConfig(
        default_snippet_len=args.default_snippet_len,
        mtl_discard_frac=args.mtl_discard,
        rt_discard_frac=args.rt_discard,
        reading_speed=args.reading_speed,
    )
    sessions, _ = _load_filtered(args.sessions, not args.no_filter)
    intervals = estimation.reformulation_intervals(sessions)
    rt_len = estimate_rt_length(sessions, cfg)
    # L depends on the reformulation length, so rt is estimated first.
    params = MetricParams(F=args.F, reformulation_len=rt_len)
    L = estimate_L(sessions, cfg, params)
    out = {
        "L": L,
        "rt_len": rt_len,
        "n_sessions": len(sessions),
        "n_intervals": len(intervals),
    }
    _write(args.out, json.dumps(out, sort_keys=True) + "\n")
    return 0


def _float_grid(lo: float, hi: float, step: float) -> list[float]:
    # lo exclusive, hi inclusive; built from integers to dodge float drift
    n = round((hi - lo) / step)
    return [round(lo + k * step, 10) for k in range(1, n + 1)]


def _metric_family(args, base: MetricParams) -> meta_eval.MetricFamily:
    from dataclasses import replace

    name = args.metric

    def scorer(session, point):
        p = base
        if "b_q" in point:
            p = replace(p, b_q=point["b_q"], b_r=point["b_r"])
        if "p" in point:
            p = replace(p, p=point["p"], b=point["b"])
        if "L" in point:
            p = replace(p, L=point["L"], reformulation_len=point["rt_len"])
        return metrics.score_session(name, session, p)

    if name in ("sdcg", "sdcg-q", "rsdcg"):
        vals = _float_grid(1.0, 5.0, args.grid_step_dcg)
        grid = [{"b_q": bq, "b_r": br} for bq in vals for br in vals]
        return meta_eval.MetricFamily(name=name, scorer=scorer, grid=grid)
    if name in ("srbp", "srbp-q", "rsrbp"):
        vals = _float_grid(0.0, 1.0 - args.grid_step_rbp, args.grid_step_rbp)
        grid = [{"p": p, "b": b} for p in vals for b in vals]
        return meta_eval.MetricFamily(name=name, scorer=scorer, grid=grid)
    if name in ("num", "um", "um-q"):
        cfg = EstimationConfig()

        def estimator(train_sessions):
            try:
                rt = estimate_rt_length(train_sessions, cfg)
            except estimation.EstimationError:
                rt = base.reformulation_len
            try:
                L = estimate_L(cfg=cfg, sessions=train_sessions,
                               params=replace(base, reformulation_len=rt))
            except estimation.EstimationError:
                L = base.L
            return {"L": L, "rt_len": rt}

        return meta_eval.MetricFamily(name=name, scorer=scorer, estimator=estimator)
    if name in ("ap", "lcd"):
        return meta_eval.MetricFamily(name=name, scorer=scorer, grid=[{}])
    raise ValueError(f"metric {name!r} has no tuning family")


def _cmd_correlate(args) -> int:
    base = _params_from_args(args)
    sessions, _ = _load_filtered(args.sessions, not args.no_filter)
    usable = [s for s in sessions if s.has_clicks and s.satisfaction is not None]
    dropped = len(sessions) - len(usable)
    if dropped:
        print(f"warning: dropped {dropped} session(s) without clicks or rating", file=sys.stderr)
    family = _metric_family(args, base)
    report = meta_eval.cross_validate(
        usable, family, folds=args.folds, repeats=args.repeats, seed=args.seed
    )
    _write(args.out, json.dumps(report.to_obj(), sort_keys=True, indent=2) + "\n")
    return 0


def _read_scores_csv(path: str) -> dict:
    scores = {}
    lines = _read(path).splitlines()
    for line in lines[1:] if lines and lines[0].startswith("session_id") else lines:
        if not line.strip():
            continue
        session_id, run_tag, score = line.split(",")
        scores[(session_id, run_tag)] = float(score)
    return scores


def _cmd_concordance(args) -> int:
    scores_a = _read_scores_csv(args.scores_a)
    scores_b = _read_scores_csv(args.scores_b)
    gold = _read_scores_csv(args.gold)
    pairs = []
    for line in _read(args.pairs).splitlines():
        if not line.strip():
            continue
        session_id, tag_a, tag_b = line.split("\t")
        pairs.append(((session_id, tag_a), (session_id, tag_b)))
    report = meta_eval.concordance(
        scores_a,
        scores_b,
        gold,
        pairs,
        metric_a=args.name_a,
        metric_b=args.name_b,
        gold_ties_agree=args.gold_ties_agree,
    )
    _write(args.out, json.dumps(report.to_obj(), sort_keys=True, indent=2) + "\n")
    return 0


def _cmd_transform_runs(args) -> int:
    pools = runs.parse_pools(_read(args.pools))
    transform = (
        runs.ideal_run_transform if args.mode == "ideal" else runs.diversified_run_transform
    )
    rankings = {}
    for session_id in sorted({sid for sid, _ in pools}):
        for q_idx, ranking in transform(pools, session_id, top_k=args.top_k).items():
            rankings[(session_id, q_idx)] = ranking
    run = runs.Run(run_tag=args.run_tag, rankings=rankings)
    _write(args.out, runs.serialize_run(run))
    return 0


def _cmd_synth(args) -> int:
    config = runs.SynthConfig(
        n_sessions=args.n,
        min_queries=args.min_queries,
        max_queries=args.max_queries,
        results_per_query=args.results_per_query,
        repeat_frac=args.repeat_frac,
    )
    sessions = runs.synth_sessions(config, seed=args.seed)
    _write(args.out, serialize_sessions(sessions))
    return 0


def _cmd_enhance(args) -> int:
    sessions, _ = _load_filtered(args.sessions, apply_filter=False)
    _write(args.out, serialize_sessions(enhance_labels(s) for s in sessions))
    return 0


def _cmd_trailtext_debug(args) -> int:
    params = _params_from_args(args)
    sessions, _ = _load_filtered(args.sessions, apply_filter=False)
    by_id = {s.session_id: s for s in sessions}
    if args.session_id not in by_id:
        raise ValueError(f"session {args.session_id!r} not found")
    session = enhance_labels(by_id[args.session_id])
    if args.which == "actual":
        tt = build_actual_trailtext(session, params)
    else:
        entries = ideal_sequence(session, params.dup_policy, params.F, params.H)
        tt = build_ideal_trailtext(entries)
    payload = [
        {"kind": s.kind, "length": s.length, "gain": s.gain, "end_pos": s.end_pos}
        for s in tt.strings
    ]
    _write(args.out, json.dumps(payload, indent=2) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sessioneval",
        description="Session-search evaluation: NUM, U-measure, sDCG/sRBP families",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="score sessions with one metric, emit CSV")
    p.add_argument("sessions")
    p.add_argument("--metric", choices=metrics.METRIC_NAMES, default="num")
    p.add_argument("--out", default=None)
    p.add_argument("--report", default=None, help="also write a JSON report with provenance")
    p.add_argument("--figure", default=None, help="render a score histogram to this file")
    p.add_argument("--no-filter", action="store_true", help="keep good-abandonment sessions")
    _add_param_flags(p)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("estimate", help="estimate L and the reformulation length")
    p.add_argument("sessions")
    p.add_argument("--default-snippet-len", type=int, default=80)
    p.add_argument("--mtl-discard", type=float, default=0.01)
    p.add_argument("--rt-discard", type=float, default=0.04)
    p.add_argument("--reading-speed", type=float, default=255.0)
    p.add_argument("--F", type=float, default=0.20)
    p.add_argument("--no-filter", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("correlate", help="repeated k-fold correlation with satisfaction")
    p.add_argument("sessions")
    p.add_argument("--metric", choices=metrics.METRIC_NAMES, default="num")
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid-step-dcg", type=float, default=0.1)
    p.add_argument("--grid-step-rbp", type=float, default=0.05)
    p.add_argument("--no-filter", action="store_true")
    p.add_argument("--out", default=None)
    _add_param_flags(p)
    p.set_defaults(func=_cmd_correlate)

    p = sub.add_parser("concordance", help="preference agreement with a golden standard")
    p.add_argument("--scores-a", required=True)
    p.add_argument("--scores-b", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--pairs", required=True, help="TSV: session_id, run_tag_a, run_tag_b")
    p.add_argument("--name-a", default="a")
    p.add_argument("--name-b", default="b")
    p.add_argument("--gold-ties-agree", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_concordance)

    p = sub.add_parser("transform-runs", help="ideal / diversified run transforms")
    p.add_argument("pools", help="TSV: session_id, query_index, doc_id, score, snippet_len, doc_len")
    p.add_argument("--mode", choices=("ideal", "diversified"), required=True)
    p.add_argument("--top-k", type=int, default=10)
    p.add_argument("--run-tag", default="transformed")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_transform_runs)

    p = sub.add_parser("synth", help="generate a deterministic synthetic corpus")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--min-queries", type=int, default=1)
    p.add_argument("--max-queries", type=int, default=4)
    p.add_argument("--results-per-query", type=int, default=10)
    p.add_argument("--repeat-frac", type=float, default=0.3)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("enhance", help="add session-level relevance labels to a log")
    p.add_argument("sessions")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_enhance)

    p = sub.add_parser("trailtext-debug", help="dump a session's trailtext as JSON")
    p.add_argument("sessions")
    p.add_argument("--session-id", required=True)
    p.add_argument("--which", choices=("actual", "ideal"), default="actual")
    p.add_argument("--out", default=None)
    _add_param_flags(p)
    p.set_defaults(func=_cmd_trailtext_debug)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
