"""Evaluation reports: CSV scores, JSON provenance, and score-distribution figures."""

from __future__ import annotations

import hashlib
import io
import json
from dataclasses import dataclass, field
from typing import Optional


@dataclass(frozen=True)
class EvalRow:
    session_id: str
    metric: str
    score: Optional[float]  # None when the metric is undefined on the session
    error: Optional[str] = None


@dataclass(frozen=True)
class EvalReport:
    rows: tuple[EvalRow, ...]
    params: dict
    input_digest: str
    seed: Optional[int] = None

    @property
    def scores(self) -> list[float]:
        return [r.score for r in self.rows if r.score is not None]

    @property
    def error_count(self) -> int:
        return sum(1 for r in self.rows if r.error is not None)

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("session_id,metric,score\n")
        for r in self.rows:
            value = f"error:{r.error}" if r.error is not None else repr(r.score)
            out.write(f"{r.session_id},{r.metric},{value}\n")
        return out.getvalue()

    def to_obj(self) -> dict:
        scores = self.scores
        return {
            "rows": [
                {
                    "session_id": r.session_id,
                    "metric": r.metric,
                    "score": r.score,
                    "error": r.error,
                }
                for r in self.rows
            ],
            "aggregate": {
                "count": len(scores),
                "errors": self.error_count,
                "mean": sum(scores) / len(scores) if scores else None,
            },
            "provenance": {
                "params": self.params,
                "seed": self.seed,
                "input_sha256": self.input_digest,
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_obj(), sort_keys=True, indent=2) + "\n"


def sha256_of_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def render_score_histogram(report: EvalReport, path: str, bins: int = 30) -> None:
    """Write a histogram of the per-session scores next to the CSV output."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    scores = report.scores
    fig, ax = plt.subplots(figsize=(6, 4))
    if scores:
        ax.hist(scores, bins=bins, color="#4878a8", edgecolor="white")
    metric = report.rows[0].metric if report.rows else "score"
    ax.set_xlabel(metric)
    ax.set_ylabel("sessions")
    ax.set_title(f"{metric} over {len(scores)} sessions")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
