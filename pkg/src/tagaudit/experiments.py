"""Simulation studies over synthetic campaign batches.

Two standard grids drive the ``figures`` CLI subcommand: recovery error
of the inferred precision as the number of campaigns grows, and the same
error as profile noise grows at a fixed campaign count.  Both feed the
estimator noiseless expected aggregates, so the error they chart is the
error of the assessment method itself (campaign-design degeneracy,
noise on the underlying values), not finite-audience sampling jitter.
The per-user sampling path (gen_campaign) is what the ``simulate``
subcommand and the estimator-comparison study exercise.
"""

from __future__ import annotations

from dataclasses import dataclass
from statistics import fmean

import numpy as np
import yaml

from .domain import PredictiveValues
from .errors import NumericError, ParseError
from .infer import QpProblem, estimate_positives_inferred, infer_predictive_values
from .rank import estimate_positives_rank, positive_fraction, relative_err
from .simulate import (
    SplitSpec,
    aggregate,
    derive_seed,
    expected_aggregate,
    gen_campaign,
    gen_campaign_from_counts,
    perturb_profile,
    rng_from,
    sample_design,
)

HIGH_QUALITY = PredictiveValues(
    alpha=(0.8, 0.15, 0.05), beta=(0.2, 0.7, 0.1), gamma=(0.4, 0.5, 0.1)
)
LOW_QUALITY = PredictiveValues(
    alpha=(0.4, 0.5, 0.1), beta=(0.3, 0.6, 0.1), gamma=(0.5, 0.4, 0.1)
)

# Substream ids keep every study's draws independent of the others'.
_STREAM_SIMULATE = 0
_STREAM_CAMPAIGN_GRID = 1
_STREAM_NOISE_GRID = 2
_STREAM_HOLDOUT = 3


@dataclass(frozen=True)
class Scenario:
    """Everything a simulation run needs, loadable from a YAML document."""

    profiles: tuple[tuple[str, PredictiveValues], ...]
    split: SplitSpec
    trials: int
    campaign_grid: tuple[int, ...]
    zeta_grid: tuple[float, ...]
    noise_campaigns: int
    base_seed: int
    xi: float = 1.0


def default_scenario() -> Scenario:
    """The stock 100-user protocol with the two reference profiles."""
    return Scenario(
        profiles=(("high_quality", HIGH_QUALITY), ("low_quality", LOW_QUALITY)),
        split=SplitSpec(fixed_per_tag=20, uniform_remainder=40),
        trials=100,
        campaign_grid=(3, 4, 5, 6, 7, 8, 9, 10),
        zeta_grid=(0.0, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35),
        noise_campaigns=6,
        base_seed=20160519,
        xi=1.0,
    )


def _require(doc, key, kind):
    if key not in doc:
        raise ParseError(None, key, "missing scenario key")
    value = doc[key]
    try:
        if kind is tuple:
            return tuple(value)
        return kind(value)
    except (TypeError, ValueError) as exc:
        raise ParseError(None, key, str(exc)) from None


def load_scenario(path) -> Scenario:
    """Read a scenario from a YAML key-value document."""
    with open(path, "r", encoding="utf-8") as handle:
        try:
            doc = yaml.safe_load(handle)
        except yaml.YAMLError as exc:
            raise ParseError(None, "scenario", f"not valid YAML: {exc}") from None
    if not isinstance(doc, dict):
        raise ParseError(None, "scenario", "scenario document must be a mapping")

    profiles = []
    raw_profiles = _require(doc, "profiles", dict)
    if not raw_profiles:
        raise ParseError(None, "profiles", "at least one profile is required")
    for name in sorted(raw_profiles):
        spec = raw_profiles[name]
        try:
            values = PredictiveValues(
                alpha=tuple(spec["alpha"]),
                beta=tuple(spec["beta"]),
                gamma=tuple(spec["gamma"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(None, f"profiles.{name}", str(exc)) from None
        profiles.append((str(name), values))

    raw_split = _require(doc, "split", dict)
    try:
        split = SplitSpec(
            fixed_per_tag=int(raw_split["fixed_per_tag"]),
            uniform_remainder=int(raw_split["uniform_remainder"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(None, "split", str(exc)) from None

    return Scenario(
        profiles=tuple(profiles),
        split=split,
        trials=_require(doc, "trials", int),
        campaign_grid=tuple(int(k) for k in _require(doc, "campaign_grid", tuple)),
        zeta_grid=tuple(float(z) for z in _require(doc, "zeta_grid", tuple)),
        noise_campaigns=_require(doc, "noise_campaigns", int),
        base_seed=_require(doc, "base_seed", int),
        xi=float(doc.get("xi", 1.0)),
    )


def expected_campaign_batch(
    profile: PredictiveValues,
    split: SplitSpec,
    n_campaigns: int,
    seed: int,
    *,
    prefix: str = "c",
):
    """Noiseless aggregates for n freshly drawn campaign designs."""
    batch = []
    for c in range(n_campaigns):
        design = sample_design(split, rng_from(seed, c))
        batch.append(expected_aggregate(profile, design, f"{prefix}{c:02d}"))
    return batch


def sampled_campaign_batch(
    profile: PredictiveValues,
    split: SplitSpec,
    n_campaigns: int,
    seed: int,
    *,
    prefix: str = "c",
):
    """Aggregates of per-user sampled campaigns (granular truth discarded)."""
    return [
        aggregate(gen_campaign(profile, split, derive_seed(seed, c)), f"{prefix}{c:02d}")
        for c in range(n_campaigns)
    ]


def skewed_campaign_batch(
    profile: PredictiveValues,
    n_campaigns: int,
    population: int,
    seed: int,
    *,
    prefix: str = "c",
):
    """Sampled campaigns whose tag compositions differ campaign to campaign.

    Each campaign's audience composition is drawn from a flat Dirichlet,
    mirroring performance campaigns that target differently skewed
    websites; such discriminative designs are what identify the nine
    values from finite audiences.
    """
    batch = []
    for c in range(n_campaigns):
        rng = rng_from(seed, c)
        counts = rng.multinomial(population, rng.dirichlet(np.ones(3)))
        sample = gen_campaign_from_counts(profile, counts, derive_seed(seed, c, 1))
        batch.append(aggregate(sample, f"{prefix}{c:02d}"))
    return batch


def _mean_precision_error(
    profile: PredictiveValues,
    split: SplitSpec,
    n_campaigns: int,
    trials: int,
    xi: float,
    seed_path,
    zeta: float = 0.0,
) -> float:
    errs = []
    for trial in range(trials):
        trial_seed = derive_seed(*seed_path, trial)
        generating = profile
        if zeta > 0:
            generating = perturb_profile(profile, zeta, derive_seed(trial_seed, 1))
        campaigns = expected_campaign_batch(generating, split, n_campaigns, trial_seed)
        solution = infer_predictive_values(QpProblem(campaigns, xi=xi, normalize=True))
        errs.append(abs(solution.values.alpha[0] - profile.alpha[0]))
    return fmean(errs)


def campaign_count_grid(scenario: Scenario) -> list[tuple[int, str, float]]:
    """Rows (num_campaigns, profile, mean |estimated - true| precision)."""
    rows = []
    for k in scenario.campaign_grid:
        for p_idx, (name, profile) in enumerate(scenario.profiles):
            err = _mean_precision_error(
                profile,
                scenario.split,
                k,
                scenario.trials,
                scenario.xi,
                (scenario.base_seed, _STREAM_CAMPAIGN_GRID, p_idx, k),
            )
            rows.append((int(k), name, err))
    return rows


def noise_grid(scenario: Scenario) -> list[tuple[float, str, float]]:
    """Rows (zeta, profile, mean |estimated - true| precision).

    Each trial perturbs the profile once, generates the whole campaign
    batch from the perturbed values, and measures recovery against the
    unperturbed precision.
    """
    rows = []
    for z_idx, zeta in enumerate(scenario.zeta_grid):
        for p_idx, (name, profile) in enumerate(scenario.profiles):
            err = _mean_precision_error(
                profile,
                scenario.split,
                scenario.noise_campaigns,
                scenario.trials,
                scenario.xi,
                (scenario.base_seed, _STREAM_NOISE_GRID, p_idx, z_idx),
                zeta=zeta,
            )
            rows.append((float(zeta), name, err))
    return rows


def simulate_scenario(
    scenario: Scenario,
    *,
    n_campaigns: int | None = None,
    trials: int | None = None,
    zeta: float = 0.0,
):
    """Sampled campaign aggregates for every profile and trial.

    Returns (source_id, CampaignAggregate) pairs in deterministic order;
    the source id is the profile name so the output feeds the rank and
    infer commands directly.
    """
    n_campaigns = scenario.noise_campaigns if n_campaigns is None else n_campaigns
    trials = scenario.trials if trials is None else trials
    rows = []
    for p_idx, (name, profile) in enumerate(scenario.profiles):
        for trial in range(trials):
            trial_seed = derive_seed(scenario.base_seed, _STREAM_SIMULATE, p_idx, trial)
            generating = profile
            if zeta > 0:
                generating = perturb_profile(profile, zeta, derive_seed(trial_seed, 1))
            for c in range(n_campaigns):
                sample = gen_campaign(generating, scenario.split, derive_seed(trial_seed, 2, c))
                rows.append((name, aggregate(sample, f"t{trial:03d}.c{c:02d}")))
    return rows


def holdout_comparison(
    profile: PredictiveValues,
    *,
    population: int = 100,
    n_campaigns: int = 40,
    n_seeds: int = 20,
    base_seed: int,
    xi: float = 1.0,
) -> tuple[float, float]:
    """Correlation of estimated vs true positives on held-out campaigns.

    Campaigns are sampled with skewed compositions (see
    skewed_campaign_batch).  Half of them train both estimators (the
    inferred values on one hand; the mean relative error,
    recognized-fraction and claim scaling on the other), the rest are
    scored.  Returns the mean Pearson correlation across seeds for
    (inferred, rank-based).
    """
    r_inferred, r_rank = [], []
    for s in range(n_seeds):
        seed = derive_seed(base_seed, _STREAM_HOLDOUT, s)
        campaigns = skewed_campaign_batch(profile, n_campaigns, population, seed)
        half = n_campaigns // 2
        train, test = campaigns[:half], campaigns[half:]

        values = infer_predictive_values(QpProblem(tuple(train), xi=xi)).values
        errs = []
        for c in train:
            try:
                errs.append(relative_err(c))
            except NumericError:
                continue
        mu = fmean(errs)
        tau = fmean((c.g_plus + c.g_minus) / c.population for c in train)

        # Score only campaigns where the rank surrogate is defined, so the
        # two estimators see the same held-out set.
        test = [c for c in test if c.d_plus + c.d_minus > 0]
        truth = np.array([c.g_plus for c in test], dtype=float)
        inferred = np.array([estimate_positives_inferred(values, c.d_counts()) for c in test])
        ranked = np.array(
            [
                estimate_positives_rank(c.population, tau, positive_fraction(c), mu)
                for c in test
            ]
        )
        r_inferred.append(float(np.corrcoef(inferred, truth)[0, 1]))
        r_rank.append(float(np.corrcoef(ranked, truth)[0, 1]))
    return fmean(r_inferred), fmean(r_rank)
