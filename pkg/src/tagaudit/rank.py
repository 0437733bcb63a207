"""Rank data sources by closeness of their positive-population claims.

A source's claim for a campaign is the fraction it tags Positive among
the users it recognizes; the score is the relative error of that claim
against the ground truth's fraction, averaged across campaigns.  Smaller
is better.
"""

from __future__ import annotations

from dataclasses import dataclass
from statistics import fmean
from typing import Mapping, Sequence

from .domain import CampaignAggregate
from .errors import (
    DegenerateErr,
    InvalidParameters,
    NoRecognizedUsers,
    NoUsableCampaigns,
    ZeroGroundTruthPositives,
)


def positive_fraction(agg: CampaignAggregate) -> float:
    """Fraction tagged Positive among recognized (non-Unknown) users."""
    recognized = agg.d_plus + agg.d_minus
    if recognized <= 0:
        raise NoRecognizedUsers(
            f"campaign {agg.campaign_id!r}: source recognizes nobody"
        )
    return agg.d_plus / recognized


def ground_truth_fraction(agg: CampaignAggregate) -> float:
    """Ground-truth positive fraction R among recognized users."""
    recognized = agg.g_plus + agg.g_minus
    if recognized <= 0 or agg.g_plus <= 0:
        raise ZeroGroundTruthPositives(
            f"campaign {agg.campaign_id!r}: ground truth reports no positives"
        )
    return agg.g_plus / recognized


def relative_err(agg: CampaignAggregate) -> float:
    """|R - R_hat| / R, the scaled disagreement of claim vs ground truth."""
    r_hat = positive_fraction(agg)
    r = ground_truth_fraction(agg)
    return abs(r - r_hat) / r


@dataclass(frozen=True)
class RankEntry:
    """One source's ranking record; ``skipped`` counts campaigns where the
    error was undefined (nobody recognized, or no ground-truth positives)."""

    source_id: str
    per_campaign_err: tuple[float, ...]
    mean_err: float
    skipped: int = 0


def rank_sources(
    per_source: Mapping[str, Sequence[CampaignAggregate]],
) -> list[RankEntry]:
    """Score every source and order them best (smallest mean error) first.

    Campaigns with undefined relative error are excluded from the mean and
    reported in ``skipped``; a source with no usable campaign at all is an
    error.  Ties are broken by source id so the order is total.
    """
    entries = []
    for source_id, campaigns in per_source.items():
        errs: list[float] = []
        skipped = 0
        for agg in campaigns:
            try:
                errs.append(relative_err(agg))
            except (NoRecognizedUsers, ZeroGroundTruthPositives):
                skipped += 1
        if not errs:
            raise NoUsableCampaigns(
                f"source {source_id!r}: relative error undefined on all "
                f"{skipped} campaigns"
            )
        entries.append(
            RankEntry(
                source_id=str(source_id),
                per_campaign_err=tuple(errs),
                mean_err=fmean(errs),
                skipped=skipped,
            )
        )
    entries.sort(key=lambda e: (e.mean_err, e.source_id))
    return entries


def estimate_positives_rank(
    population: float, tau_hat: float, r_hat: float, mean_err: float
) -> float:
    """Rank-based positive-population estimate M * tau_hat * R_hat / (1 - mu_bar).

    ``tau_hat`` is the fraction of the population the ground truth
    recognizes (estimated on training campaigns) and ``mean_err`` the
    source's mean relative error there.
    """
    if not 0.0 <= tau_hat <= 1.0:
        raise InvalidParameters(f"tau_hat must lie in [0, 1], got {tau_hat}")
    if not 0.0 <= r_hat <= 1.0:
        raise InvalidParameters(f"r_hat must lie in [0, 1], got {r_hat}")
    if mean_err >= 1.0:
        raise DegenerateErr(
            f"mean relative error {mean_err} >= 1; estimate would extrapolate"
        )
    return population * tau_hat * r_hat / (1.0 - mean_err)
