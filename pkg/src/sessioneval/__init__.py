"""Session-search evaluation toolkit: NUM, U-measure and friends."""

from .enhancement import IdealEntry, apply_click_labels, enhance_labels, ideal_sequence
from .estimation import EstimationConfig, estimate_L, estimate_rt_length
from .meta_eval import (
    ConcordanceReport,
    MetricFamily,
    ScoredSessionSet,
    concordance,
    cross_validate,
    kendall,
    spearman,
)
from .metrics import (
    MetricUndefinedError,
    average_precision_gs,
    lcd_gs,
    num,
    per_query_normalize,
    rs_dcg,
    rs_rbp,
    score_session,
    sdcg,
    srbp,
    u_measure,
    um,
)
from .params import DuplicatePolicy, MetricParams, gain_value
from .runs import (
    Run,
    SynthConfig,
    diversified_run_transform,
    ideal_run_transform,
    parse_run,
    synth_sessions,
)
from .sessions import (
    SerpResult,
    Session,
    SessionParseError,
    SessionQuery,
    filter_sessions,
    parse_sessions,
    serialize_sessions,
)
from .trailtext import Trailtext, TrailString, build_actual_trailtext, build_ideal_trailtext, mtl

__version__ = "0.1.0"
