"""Meta-evaluation: rank correlations, the concordance test, and CV tuning."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

from .sessions import Session


class CorrelationUndefinedError(ValueError):
    pass


def _average_ranks(xs: Sequence[float]) -> list[float]:
    # Tied values share the mean of the ranks they occupy (1-based).
    order = sorted(range(len(xs)), key=lambda i: xs[i])
    ranks = [0.0] * len(xs)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and xs[order[j + 1]] == xs[order[i]]:
            j += 1
        mean_rank = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = mean_rank
        i = j + 1
    return ranks


def _pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    sxx = sum((x - mx) ** 2 for x in xs)
    syy = sum((y - my) ** 2 for y in ys)
    if sxx == 0 or syy == 0:
        raise CorrelationUndefinedError("undefined correlation: constant vector")
    return sxy / math.sqrt(sxx * syy)


def spearman(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Spearman's rho with average-rank tie handling."""
    if len(xs) != len(ys) or len(xs) < 2:
        raise ValueError("need two equal-length vectors of length >= 2")
    return _pearson(_average_ranks(xs), _average_ranks(ys))


def kendall(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Kendall's tau-b."""
    if len(xs) != len(ys) or len(xs) < 2:
        raise ValueError("need two equal-length vectors of length >= 2")
    n = len(xs)
    concordant = discordant = ties_x = ties_y = 0
    for i in range(n):
        for j in range(i + 1, n):
            dx = xs[i] - xs[j]
            dy = ys[i] - ys[j]
            if dx == 0 and dy == 0:
                ties_x += 1
                ties_y += 1
            elif dx == 0:
                ties_x += 1
            elif dy == 0:
                ties_y += 1
            elif (dx > 0) == (dy > 0):
                concordant += 1
            else:
                discordant += 1
    n0 = n * (n - 1) // 2
    denom = math.sqrt((n0 - ties_x) * (n0 - ties_y))
    if denom == 0:
        raise CorrelationUndefinedError("undefined correlation: all pairs tied")
    return (concordant - discordant) / denom


Item = tuple[str, str]  # (session_id, run_tag)


@dataclass(frozen=True)
class ScoredSessionSet:
    """Scores keyed by (session_id, run_tag)."""

    scores: Mapping[Item, float]

    def __getitem__(self, item: Item) -> float:
        return self.scores[item]

    @classmethod
    def from_rows(cls, rows: Sequence[tuple[str, str, float]]) -> "ScoredSessionSet":
        scores: dict[Item, float] = {}
        for session_id, run_tag, score in rows:
            key = (session_id, run_tag)
            if key in scores:
                raise ValueError(f"duplicate score for {key}")
            scores[key] = float(score)
        return cls(scores=scores)


@dataclass(frozen=True)
class ConcordanceReport:
    metric_a: str
    metric_b: str
    n_disagreements: int
    conc_a: Optional[float]  # None when there are no disagreements
    conc_b: Optional[float]

    def to_obj(self) -> dict:
        return {
            "metric_a": self.metric_a,
            "metric_b": self.metric_b,
            "n_disagreements": self.n_disagreements,
            "conc_a": self.conc_a,
            "conc_b": self.conc_b,
        }


def _sign(x: float) -> int:
    return (x > 0) - (x < 0)


def concordance(
    scores_a: Mapping[Item, float],
    scores_b: Mapping[Item, float],
    gold: Mapping[Item, float],
    pairs: Sequence[tuple[Item, Item]],
    metric_a: str = "a",
    metric_b: str = "b",
    gold_ties_agree: bool = False,
) -> ConcordanceReport:
    """Count disagreement pairs and each metric's agreement with the golden standard.

    A pair disagrees when the two metrics state strictly opposite preferences;
    ties in either metric exclude the pair. A golden-standard tie counts as
    agreement for neither metric unless gold_ties_agree is set.
    """
    if not pairs:
        raise ValueError("empty pair list")
    n_dis = 0
    agree_a = agree_b = 0
    for left, right in pairs:
        sa = _sign(scores_a[left] - scores_a[right])
        sb = _sign(scores_b[left] - scores_b[right])
        if sa * sb >= 0:
            continue
        n_dis += 1
        sg = _sign(gold[left] - gold[right])
        if sg == 0:
            if gold_ties_agree:
                agree_a += 1
                agree_b += 1
            continue
        if sa == sg:
            agree_a += 1
        if sb == sg:
            agree_b += 1
    if n_dis == 0:
        return ConcordanceReport(metric_a, metric_b, 0, None, None)
    return ConcordanceReport(metric_a, metric_b, n_dis, agree_a / n_dis, agree_b / n_dis)


@dataclass(frozen=True)
class MetricFamily:
    """A metric with either a tunable parameter grid or a corpus estimator.

    scorer(session, point) -> float, where point is one grid entry (a dict).
    When estimator is given, no grid search happens: estimator(train_sessions)
    returns the point used on the held-out fold.
    """

    name: str
    scorer: Callable[[Session, dict], float]
    grid: Sequence[dict] = ()
    estimator: Optional[Callable[[list[Session]], dict]] = None


@dataclass(frozen=True)
class FoldResult:
    repeat: int
    fold: int
    point: dict
    rho: Optional[float]
    tau: Optional[float]


@dataclass(frozen=True)
class CrossValReport:
    family: str
    grid_searched: bool
    mean_rho: Optional[float]
    mean_tau: Optional[float]
    folds: tuple[FoldResult, ...]

    def to_obj(self) -> dict:
        return {
            "family": self.family,
            "grid_searched": self.grid_searched,
            "rho": self.mean_rho,
            "tau": self.mean_tau,
            "folds": [
                {
                    "repeat": f.repeat,
                    "fold": f.fold,
                    "params": f.point,
                    "rho": f.rho,
                    "tau": f.tau,
                }
                for f in self.folds
            ],
        }


def _fold_split(n: int, folds: int, rng: random.Random) -> list[list[int]]:
    idx = list(range(n))
    rng.shuffle(idx)
    out = [[] for _ in range(folds)]
    for pos, i in enumerate(idx):
        out[pos % folds].append(i)
    return out


def cross_validate(
    sessions: list[Session],
    family: MetricFamily,
    folds: int = 5,
    repeats: int = 10,
    seed: int = 0,
) -> CrossValReport:
    """Repeated k-fold tuning against satisfaction, selected by Spearman's rho."""
    if any(s.satisfaction is None for s in sessions):
        raise ValueError("every session needs a satisfaction rating")
    if len(sessions) < folds:
        raise ValueError("fewer sessions than folds")
    if family.estimator is None and not family.grid:
        raise ValueError("metric family has neither a grid nor an estimator")

    sat = [float(s.satisfaction) for s in sessions]

    cache: dict[int, list[float]] = {}

    def scores_for(point: dict, point_key: Optional[int] = None) -> list[float]:
        if point_key is not None and point_key in cache:
            return cache[point_key]
        vals = [family.scorer(s, point) for s in sessions]
        if point_key is not None:
            cache[point_key] = vals
        return vals

    results: list[FoldResult] = []
    for rep in range(repeats):
        rng = random.Random(seed + rep)
        fold_idx = _fold_split(len(sessions), folds, rng)
        for f in range(folds):
            test = fold_idx[f]
            train = [i for g in range(folds) if g != f for i in fold_idx[g]]
            if family.estimator is not None:
                point = family.estimator([sessions[i] for i in train])
                point_scores = scores_for(point)
            else:
                best_point, best_rho, best_scores = None, -math.inf, None
                for gi, point in enumerate(family.grid):
                    vals = scores_for(point, gi)
                    try:
                        rho = spearman([vals[i] for i in train], [sat[i] for i in train])
                    except CorrelationUndefinedError:
                        continue
                    if rho > best_rho:
                        best_point, best_rho, best_scores = point, rho, vals
                if best_point is None:
                    raise CorrelationUndefinedError(
                        "no grid point yields a defined training correlation"
                    )
                point, point_scores = best_point, best_scores
            xs = [point_scores[i] for i in test]
            ys = [sat[i] for i in test]
            try:
                rho = spearman(xs, ys)
            except (CorrelationUndefinedError, ValueError):
                rho = None
            try:
                tau = kendall(xs, ys)
            except (CorrelationUndefinedError, ValueError):
                tau = None
            results.append(FoldResult(repeat=rep, fold=f, point=dict(point), rho=rho, tau=tau))

    rhos = [r.rho for r in results if r.rho is not None]
    taus = [r.tau for r in results if r.tau is not None]
    return CrossValReport(
        family=family.name,
        grid_searched=family.estimator is None,
        mean_rho=sum(rhos) / len(rhos) if rhos else None,
        mean_tau=sum(taus) / len(taus) if taus else None,
        folds=tuple(results),
    )
