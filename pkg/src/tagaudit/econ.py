"""Planning arithmetic: evaluation sizing, data-cost break-even, forecasts.

The sample-size bound treats each served impression as a Bernoulli trial
with success rate 1/c (a c-category source under a uniform prior) and
asks for enough users to separate the correct category from the rest at
the requested significance and power.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import fmean, median
from typing import Iterable, Mapping

from .errors import (
    CountExceedsReach,
    InvalidParameters,
    UnknownTag,
    ZeroFreePrecision,
    ZeroReach,
)

# Wichura's AS 241 rational approximation of the standard normal inverse
# CDF (PPND16), accurate to roughly 1e-15 over (0, 1).
_A = (
    3.3871328727963666080e0, 1.3314166789178437745e2, 1.9715909503065514427e3,
    1.3731693765509461125e4, 4.5921953931549871457e4, 6.7265770927008700853e4,
    3.3430575583588128105e4, 2.5090809287301226727e3,
)
_B = (
    1.0, 4.2313330701600911252e1, 6.8718700749205790830e2, 5.3941960214247511077e3,
    2.1213794301586595867e4, 3.9307895800092710610e4, 2.8729085735721942674e4,
    5.2264952788528545610e3,
)
_C = (
    1.42343711074968357734e0, 4.63033784615654529590e0, 5.76949722146069140550e0,
    3.64784832476320460504e0, 1.27045825245236838258e0, 2.41780725177450611770e-1,
    2.27238449892691845833e-2, 7.74545014278341407640e-4,
)
_D = (
    1.0, 2.05319162663775882187e0, 1.67638483018380384940e0, 6.89767334985100004550e-1,
    1.48103976427480074590e-1, 1.51986665636164571966e-2, 5.47593808499534494600e-4,
    1.05075007164441684324e-9,
)
_E = (
    6.65790464350110377720e0, 5.46378491116411436990e0, 1.78482653991729133580e0,
    2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
    2.71155556874348757815e-5, 2.01033439929228813265e-7,
)
_F = (
    1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1, 1.48753612908506148525e-2,
    7.86869131145613259100e-4, 1.84631831751005468180e-5, 1.42151175831644588870e-7,
    2.04426310338993978564e-15,
)


def _poly(coeffs, r):
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * r + c
    return acc


def normal_quantile(p: float) -> float:
    """Inverse CDF of the standard normal distribution."""
    if not 0.0 < p < 1.0:
        raise InvalidParameters(f"quantile defined on (0, 1), got {p}")
    q = p - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        return q * _poly(_A, r) / _poly(_B, r)
    r = p if q < 0 else 1.0 - p
    r = math.sqrt(-math.log(r))
    if r <= 5.0:
        value = _poly(_C, r - 1.6) / _poly(_D, r - 1.6)
    else:
        value = _poly(_E, r - 5.0) / _poly(_F, r - 5.0)
    return -value if q < 0 else value


def required_impressions(
    c: int,
    margin: float = 0.05,
    significance: float = 0.05,
    power: float = 0.90,
) -> int:
    """Minimum impressions to resolve a c-category source's accuracy.

    ceil(((z_{1-significance/2} + z_power) / margin)^2 * (1/c)(1 - 1/c)).
    With the defaults the squared quantile term is the 4202.969 constant.
    """
    if c < 2:
        raise InvalidParameters(f"need at least 2 categories, got {c}")
    for name, v in (("margin", margin), ("significance", significance), ("power", power)):
        if not 0.0 < v < 1.0:
            raise InvalidParameters(f"{name} must lie in (0, 1), got {v}")
    z = normal_quantile(1.0 - significance / 2.0) + normal_quantile(power)
    return math.ceil((z / margin) ** 2 * (1.0 / c) * (1.0 - 1.0 / c))


@dataclass(frozen=True)
class SampleSizePlan:
    categories: int
    margin: float
    significance: float
    power: float
    required_impressions: int


def plan_sample_size(
    c: int,
    margin: float = 0.05,
    significance: float = 0.05,
    power: float = 0.90,
) -> SampleSizePlan:
    return SampleSizePlan(
        categories=c,
        margin=margin,
        significance=significance,
        power=power,
        required_impressions=required_impressions(c, margin, significance, power),
    )


def total_evaluation_cost(d_sources: int, c: int, cpi: float) -> float:
    """Cost of brute-force evaluating d sources at the default plan."""
    if d_sources < 1:
        raise InvalidParameters(f"need at least 1 data source, got {d_sources}")
    if cpi < 0:
        raise InvalidParameters(f"cost per impression must be nonnegative, got {cpi}")
    return d_sources * required_impressions(c) * cpi


def max_data_cpi(cpi: float, alpha1_data: float, alpha1_free: float) -> float:
    """Break-even per-impression budget for a paid data source.

    cpi * (alpha1_data / alpha1_free - 1).  Negative means the source is
    never worth paying for at this campaign's impression cost.
    """
    if cpi < 0:
        raise InvalidParameters(f"cost per impression must be nonnegative, got {cpi}")
    for name, v in (("alpha1_data", alpha1_data), ("alpha1_free", alpha1_free)):
        if not 0.0 <= v <= 1.0:
            raise InvalidParameters(f"{name} must lie in [0, 1], got {v}")
    if alpha1_free == 0:
        raise ZeroFreePrecision("free-targeting precision must be positive")
    return cpi * (alpha1_data / alpha1_free - 1.0)


def brute_force_precision(n_target_reported: int, n_reached: int) -> float:
    """Precision of a targeted evaluation campaign: on-target count / reach."""
    if n_reached <= 0:
        raise ZeroReach(f"campaign reached {n_reached} users")
    if n_target_reported < 0:
        raise InvalidParameters(f"on-target count must be nonnegative, got {n_target_reported}")
    if n_target_reported > n_reached:
        raise CountExceedsReach(
            f"on-target count {n_target_reported} exceeds reach {n_reached}"
        )
    return n_target_reported / n_reached


@dataclass(frozen=True)
class PrecisionTable:
    """Per-category precision toward one fixed target category."""

    precisions: Mapping[str, float]

    def __post_init__(self):
        cleaned = {}
        for key, value in self.precisions.items():
            if not 0.0 <= value <= 1.0:
                raise InvalidParameters(
                    f"precision for {key!r} must lie in [0, 1], got {value}"
                )
            cleaned[str(key)] = float(value)
        object.__setattr__(self, "precisions", cleaned)

    def __getitem__(self, category: str) -> float:
        try:
            return self.precisions[category]
        except KeyError:
            raise UnknownTag(f"no precision known for category {category!r}") from None

    def __contains__(self, category: str) -> bool:
        return category in self.precisions


_COMBINERS = {"max": max, "min": min, "mean": fmean, "median": median}


def forecast_category(
    tagged_users: Iterable[Iterable[str]],
    table: PrecisionTable,
    combiner: str = "mean",
) -> float:
    """Expected number of users landing in the target category.

    Each user contributes the precision of its tag; users with several
    tags contribute the combined precision; untagged users contribute
    nothing.  The result is bounded by the number of users.
    """
    try:
        combine = _COMBINERS[combiner]
    except KeyError:
        raise InvalidParameters(
            f"combiner must be one of {sorted(_COMBINERS)}, got {combiner!r}"
        ) from None
    expected = 0.0
    for tags in tagged_users:
        probs = [table[tag] for tag in tags]
        if not probs:
            continue
        expected += probs[0] if len(probs) == 1 else combine(probs)
    return expected
