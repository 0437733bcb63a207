"""Core data types and aggregate arithmetic shared by every module."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import CountsExceedPopulation, NegativeCount, ZeroPopulation

# Simplex membership is checked to this tolerance so values coming
# straight out of a numeric solve are accepted without rounding.
SIMPLEX_TOL = 1e-9


class Tag(enum.Enum):
    """The three labels a sound data source may give a user."""

    POSITIVE = "positive"
    NEGATIVE = "negative"
    UNKNOWN = "unknown"


TAGS = (Tag.POSITIVE, Tag.NEGATIVE, Tag.UNKNOWN)
TAG_INDEX = {tag: i for i, tag in enumerate(TAGS)}


def _check_row(name: str, row: tuple[float, float, float]) -> None:
    if len(row) != 3:
        raise ValueError(f"{name} must have exactly 3 entries, got {len(row)}")
    for v in row:
        if not (-SIMPLEX_TOL <= v <= 1.0 + SIMPLEX_TOL):
            raise ValueError(f"{name} entries must lie in [0, 1], got {row}")
    if abs(sum(row) - 1.0) > SIMPLEX_TOL:
        raise ValueError(f"{name} must sum to 1, got sum {sum(row)!r}")


@dataclass(frozen=True)
class PredictiveValues:
    """The nine probabilities mapping a source's tag to the ground truth.

    Row ``alpha`` conditions on the source tagging Positive, ``beta`` on
    Negative, ``gamma`` on Unknown.  Within a row the entries are the
    probabilities of the truth being Positive, Negative and Unknown, so
    ``alpha[0]`` is the source's precision and ``beta[1]`` its negative
    predictive value.  Each row must lie on the probability simplex.
    """

    alpha: tuple[float, float, float]
    beta: tuple[float, float, float]
    gamma: tuple[float, float, float]

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            row = tuple(float(v) for v in getattr(self, name))
            object.__setattr__(self, name, row)
            _check_row(name, row)

    @classmethod
    def from_array(cls, arr) -> "PredictiveValues":
        a = np.asarray(arr, dtype=float).reshape(3, 3)
        return cls(tuple(a[0]), tuple(a[1]), tuple(a[2]))

    def as_array(self) -> np.ndarray:
        """3x3 array with rows alpha, beta, gamma."""
        return np.array([self.alpha, self.beta, self.gamma], dtype=float)

    def row_for(self, predicted: Tag) -> tuple[float, float, float]:
        return (self.alpha, self.beta, self.gamma)[TAG_INDEX[predicted]]

    @property
    def precision(self) -> float:
        return self.alpha[0]

    def is_unbiased(self, xi: float) -> bool:
        """Whether the positive and negative predictive values agree within xi."""
        return abs(self.alpha[0] - self.beta[1]) <= xi + SIMPLEX_TOL


@dataclass(frozen=True)
class CampaignAggregate:
    """Aggregate counts for one campaign.

    ``d_*`` is the data source's view (how many users it tagged Positive /
    Negative / Unknown, scaled to cover the whole population) and ``g_*``
    the ground-truth report's view.  Counts are integers on the ingestion
    path; fractional counts appear only in noiseless expected aggregates.
    """

    campaign_id: str
    population: float
    d_plus: float
    d_minus: float
    d_unknown: float
    g_plus: float
    g_minus: float
    g_unknown: float

    def __post_init__(self):
        if self.population <= 0:
            raise ZeroPopulation(f"campaign {self.campaign_id!r} has population {self.population}")
        tol = 1e-9 * max(1.0, float(self.population))
        for name in ("d_plus", "d_minus", "d_unknown", "g_plus", "g_minus", "g_unknown"):
            v = getattr(self, name)
            if v < 0:
                raise NegativeCount(f"campaign {self.campaign_id!r}: {name} = {v}")
        for side in ("d", "g"):
            total = sum(getattr(self, f"{side}_{part}") for part in ("plus", "minus", "unknown"))
            if abs(total - self.population) > tol:
                raise ValueError(
                    f"campaign {self.campaign_id!r}: {side}-side counts sum to "
                    f"{total!r}, expected population {self.population!r}"
                )

    def d_counts(self) -> np.ndarray:
        return np.array([self.d_plus, self.d_minus, self.d_unknown], dtype=float)

    def g_counts(self) -> np.ndarray:
        return np.array([self.g_plus, self.g_minus, self.g_unknown], dtype=float)

    def d_fractions(self) -> np.ndarray:
        return self.d_counts() / self.population

    def g_fractions(self) -> np.ndarray:
        return self.g_counts() / self.population


def _field(record, name):
    if isinstance(record, Mapping):
        if name not in record:
            raise KeyError(f"campaign record is missing {name!r}")
        return record[name]
    try:
        return getattr(record, name)
    except AttributeError:
        raise KeyError(f"campaign record is missing {name!r}") from None


def validate_aggregate(record) -> CampaignAggregate:
    """Complete and validate a raw campaign record.

    ``record`` is a mapping or object carrying ``campaign_id``,
    ``population``, ``d_plus``, ``d_minus``, ``g_plus`` and ``g_minus``.
    Unknown counts are always rederived as population minus the tagged
    counts, never ingested, so a CampaignAggregate is itself valid input
    and validation is idempotent.
    """
    campaign_id = str(_field(record, "campaign_id"))
    population = _field(record, "population")
    if population <= 0:
        raise ZeroPopulation(f"campaign {campaign_id!r} has population {population}")
    tol = 1e-9 * max(1.0, float(population))
    counts = {}
    for name in ("d_plus", "d_minus", "g_plus", "g_minus"):
        v = _field(record, name)
        if v < 0:
            raise NegativeCount(f"campaign {campaign_id!r}: {name} = {v}")
        counts[name] = v
    unknowns = {}
    for side in ("d", "g"):
        tagged = counts[f"{side}_plus"] + counts[f"{side}_minus"]
        if tagged > population + tol:
            raise CountsExceedPopulation(
                f"campaign {campaign_id!r}: {side}-side counts {tagged} exceed "
                f"population {population}"
            )
        # Float inputs at the boundary can leave a remainder of -1e-13 or so.
        unknowns[side] = max(population - tagged, 0)
    return CampaignAggregate(
        campaign_id=campaign_id,
        population=population,
        d_plus=counts["d_plus"],
        d_minus=counts["d_minus"],
        d_unknown=unknowns["d"],
        g_plus=counts["g_plus"],
        g_minus=counts["g_minus"],
        g_unknown=unknowns["g"],
    )


@dataclass(frozen=True)
class QualityReport:
    """Per-source assessment: ranking score, inferred values, intervals.

    ``ci_half_widths`` is None whenever fewer than 4 campaigns were
    available (the interval needs at least one residual degree of
    freedom).  ``rank`` is assigned relative to the other sources in the
    same assessment batch, 1 = best.
    """

    source_id: str
    mean_relative_err: float
    inferred: PredictiveValues
    ci_half_widths: tuple[float, ...] | None
    ci_level: float
    n_campaigns: int
    rank: int | None = None

    def __post_init__(self):
        if self.inferred is not None and self.n_campaigns < 3:
            raise ValueError("inferred values require at least 3 campaigns")
        if self.n_campaigns < 4 and self.ci_half_widths is not None:
            raise ValueError("confidence intervals are unavailable below 4 campaigns")
        if self.ci_half_widths is not None:
            widths = tuple(float(w) for w in self.ci_half_widths)
            if len(widths) != 9 or any(w < 0 for w in widths):
                raise ValueError("ci_half_widths must be 9 nonnegative scalars")
            object.__setattr__(self, "ci_half_widths", widths)
