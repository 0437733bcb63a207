"""Synthetic campaigns with known per-user ground truth.

Generation is deliberately backwards: predicted tags are assigned first
(a fixed block per tag plus a uniformly random remainder), then each
user's true category is drawn from the profile row matching its
predicted tag.  That is the only place granular truth exists; everything
downstream sees aggregates only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import TAGS, CampaignAggregate, PredictiveValues, Tag
from .errors import EmptySample, InvalidSplit, NegativeCount


def rng_from(seed: int, *path: int) -> np.random.Generator:
    """Counter-based generator for a (seed, substream-path) pair.

    Philox keyed through SeedSequence gives independent streams for every
    distinct path, so trials and campaigns can run in any order or in
    parallel without sharing state.
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(seed: int, *path: int) -> int:
    """A 64-bit child seed from the same (seed, path) tree as rng_from."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(p) for p in path))
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class SplitSpec:
    """How an audience is split over predicted tags.

    ``fixed_per_tag`` users are assigned deterministically to each of the
    three tags; ``uniform_remainder`` more are assigned uniformly at
    random (probability 1/3 each).
    """

    fixed_per_tag: int
    uniform_remainder: int

    def __post_init__(self):
        if self.fixed_per_tag < 0 or self.uniform_remainder < 0:
            raise InvalidSplit(
                f"split counts must be nonnegative: {self.fixed_per_tag}, {self.uniform_remainder}"
            )
        if self.total == 0:
            raise InvalidSplit("split describes an empty audience")

    @property
    def total(self) -> int:
        return 3 * self.fixed_per_tag + self.uniform_remainder


@dataclass(frozen=True, eq=False)
class AudienceSample:
    """Per-user (predicted, truth) pairs, stored as tag codes 0/1/2."""

    predicted: np.ndarray
    truth: np.ndarray
    seed: int

    def __len__(self) -> int:
        return len(self.predicted)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AudienceSample):
            return NotImplemented
        return (
            self.seed == other.seed
            and np.array_equal(self.predicted, other.predicted)
            and np.array_equal(self.truth, other.truth)
        )

    @property
    def users(self) -> list[tuple[Tag, Tag]]:
        return [(TAGS[p], TAGS[t]) for p, t in zip(self.predicted, self.truth)]

    @classmethod
    def from_pairs(cls, pairs, seed: int = 0) -> "AudienceSample":
        pred = np.array([p.value if isinstance(p, Tag) else p for p, _ in pairs])
        tru = np.array([t.value if isinstance(t, Tag) else t for _, t in pairs])
        to_code = {tag.value: i for i, tag in enumerate(TAGS)}
        return cls(
            predicted=np.array([to_code[v] for v in pred], dtype=np.int64),
            truth=np.array([to_code[v] for v in tru], dtype=np.int64),
            seed=seed,
        )


def sample_design(split: SplitSpec, rng: np.random.Generator) -> np.ndarray:
    """Predicted-tag counts for one campaign under the split."""
    counts = np.full(3, split.fixed_per_tag, dtype=np.int64)
    if split.uniform_remainder:
        counts += np.bincount(
            rng.integers(0, 3, size=split.uniform_remainder), minlength=3
        )
    return counts


def _sample_truth(profile: PredictiveValues, counts, rng) -> AudienceSample:
    predicted = np.repeat(np.arange(3), counts)
    truth = np.empty(len(predicted), dtype=np.int64)
    matrix = profile.as_array()
    start = 0
    for tag_code in range(3):
        n = int(counts[tag_code])
        truth[start : start + n] = rng.choice(3, size=n, p=matrix[tag_code])
        start += n
    return predicted, truth


def gen_campaign(profile: PredictiveValues, split: SplitSpec, seed: int) -> AudienceSample:
    """Generate one campaign audience; pure function of its arguments."""
    rng = rng_from(seed)
    counts = sample_design(split, rng)
    predicted, truth = _sample_truth(profile, counts, rng)
    return AudienceSample(predicted=predicted, truth=truth, seed=int(seed))


def gen_campaign_from_counts(profile: PredictiveValues, counts, seed: int) -> AudienceSample:
    """Like gen_campaign, but with the predicted-tag counts given directly.

    Useful for audiences whose tag composition is skewed campaign by
    campaign (the discriminative designs the assessment works best on)
    rather than drawn from one SplitSpec.
    """
    counts = np.asarray(counts, dtype=np.int64)
    if counts.shape != (3,) or np.any(counts < 0):
        raise InvalidSplit(f"counts must be 3 nonnegative integers, got {counts}")
    if counts.sum() == 0:
        raise InvalidSplit("counts describe an empty audience")
    rng = rng_from(seed)
    predicted, truth = _sample_truth(profile, counts, rng)
    return AudienceSample(predicted=predicted, truth=truth, seed=int(seed))


def perturb_profile(profile: PredictiveValues, zeta: float, seed: int) -> PredictiveValues:
    """Add independent uniform noise in [-zeta, +zeta] to all nine entries.

    Entries are clamped to [0, 1] and each row renormalized to sum to 1,
    so the result is always a valid profile.  zeta = 0 returns the input
    unchanged (bit for bit).
    """
    if not 0.0 <= zeta <= 0.35:
        raise ValueError(f"zeta must lie in [0, 0.35], got {zeta}")
    if zeta == 0.0:
        return profile
    rng = rng_from(seed)
    rows = np.clip(profile.as_array() + rng.uniform(-zeta, zeta, size=(3, 3)), 0.0, 1.0)
    sums = rows.sum(axis=1, keepdims=True)
    # A row can clamp to all zeros only when every entry was below zeta;
    # fall back to the uniform row there.
    degenerate = sums[:, 0] <= 0.0
    rows[degenerate] = 1.0 / 3.0
    sums[degenerate] = 1.0
    return PredictiveValues.from_array(rows / sums)


def aggregate(sample: AudienceSample, campaign_id: str) -> CampaignAggregate:
    """Collapse a sample to aggregate counts (predicted -> D side, truth -> G side)."""
    if len(sample) == 0:
        raise EmptySample("cannot aggregate an empty sample")
    d = np.bincount(sample.predicted, minlength=3)
    g = np.bincount(sample.truth, minlength=3)
    return CampaignAggregate(
        campaign_id=str(campaign_id),
        population=int(len(sample)),
        d_plus=int(d[0]),
        d_minus=int(d[1]),
        d_unknown=int(d[2]),
        g_plus=int(g[0]),
        g_minus=int(g[1]),
        g_unknown=int(g[2]),
    )


def expected_aggregate(profile: PredictiveValues, d_counts, campaign_id: str) -> CampaignAggregate:
    """Noiseless aggregate: the G side is the exact expectation under the profile.

    The only place fractional counts are allowed into a CampaignAggregate.
    """
    d = np.asarray(d_counts, dtype=float)
    if d.shape != (3,):
        raise ValueError("d_counts must be 3 scalars")
    if np.any(d < 0):
        raise NegativeCount(f"d_counts must be nonnegative, got {d_counts}")
    g = profile.as_array().T @ d
    return CampaignAggregate(
        campaign_id=str(campaign_id),
        population=float(d.sum()),
        d_plus=float(d[0]),
        d_minus=float(d[1]),
        d_unknown=float(d[2]),
        g_plus=float(g[0]),
        g_minus=float(g[1]),
        g_unknown=float(g[2]),
    )


def oracle_metric(sample: AudienceSample, metric: str) -> float:
    """Granular performance metric; only meaningful inside the simulator.

    ``accuracy`` is the fraction of users whose truth equals the predicted
    tag.  ``true_positive_rate`` counts users where both are Positive,
    over the whole audience.
    """
    if len(sample) == 0:
        raise EmptySample("cannot score an empty sample")
    if metric == "accuracy":
        return float(np.mean(sample.predicted == sample.truth))
    if metric == "true_positive_rate":
        return float(np.mean((sample.predicted == 0) & (sample.truth == 0)))
    raise ValueError(f"unknown metric {metric!r}")
