"""Quality assessment of user-tagging data sources from aggregate reports.

Rank sources by how closely their positive-population claims track the
ground truth, infer their full predictive-value profile from a handful of
campaign aggregates, and apply the results to evaluation sizing,
data-cost break-even and audience forecasting.  A seedable simulator
provides campaigns with known truth for validating the whole pipeline.
"""

from .domain import (
    CampaignAggregate,
    PredictiveValues,
    QualityReport,
    Tag,
    validate_aggregate,
)
from .econ import (
    PrecisionTable,
    SampleSizePlan,
    brute_force_precision,
    forecast_category,
    max_data_cpi,
    normal_quantile,
    plan_sample_size,
    required_impressions,
    total_evaluation_cost,
)
from .infer import (
    QpProblem,
    QpSolution,
    assign_ranks,
    confidence_interval,
    estimate_positives_inferred,
    infer_predictive_values,
    quality_report,
    solve_simplex_qp,
)
from .rank import (
    RankEntry,
    estimate_positives_rank,
    positive_fraction,
    rank_sources,
    relative_err,
)
from .simulate import (
    AudienceSample,
    SplitSpec,
    aggregate,
    expected_aggregate,
    gen_campaign,
    oracle_metric,
    perturb_profile,
)

__version__ = "0.1.0"

__all__ = [
    "AudienceSample",
    "CampaignAggregate",
    "PredictiveValues",
    "PrecisionTable",
    "QpProblem",
    "QpSolution",
    "QualityReport",
    "RankEntry",
    "SampleSizePlan",
    "SplitSpec",
    "Tag",
    "aggregate",
    "assign_ranks",
    "brute_force_precision",
    "confidence_interval",
    "estimate_positives_inferred",
    "estimate_positives_rank",
    "expected_aggregate",
    "forecast_category",
    "gen_campaign",
    "infer_predictive_values",
    "max_data_cpi",
    "normal_quantile",
    "oracle_metric",
    "perturb_profile",
    "plan_sample_size",
    "positive_fraction",
    "quality_report",
    "rank_sources",
    "relative_err",
    "required_impressions",
    "solve_simplex_qp",
    "total_evaluation_cost",
    "validate_aggregate",
]
