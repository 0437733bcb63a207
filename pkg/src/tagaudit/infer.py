"""Direct estimation of a source's nine predictive values.

Each campaign contributes three linear relations: the ground-truth count
of a category is approximately the D-counts dotted with the matching
column of the predictive-value matrix.  Stacking campaigns gives a least
squares problem over the product of three probability simplices, with an
optional band |alpha1 - beta2| <= xi expressing confidence that the
source is unbiased.

The feasible set is a compact polytope and the objective a plain least
squares, so a primal active-set iteration solves it exactly: every
equality-constrained subproblem is a numpy lstsq on the null-space
parametrization, and steps are truncated at the first blocking
constraint.  No iterative tolerance tuning is involved; termination is a
KKT check with nonnegative multipliers.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from statistics import fmean

import numpy as np
from scipy.linalg import null_space
from scipy.stats import t as student_t

from .domain import CampaignAggregate, PredictiveValues, QualityReport
from .errors import (
    InsufficientDof,
    InvalidParameters,
    NonConvergence,
    NoRecognizedUsers,
    NoUsableCampaigns,
    TooFewCampaigns,
    UnequalPopulations,
    ZeroGroundTruthPositives,
)
from .rank import relative_err

KKT_TOL = 1e-9
_ACTIVE_TOL = 1e-8

# Equality rows: each of the three tag rows sums to one.
_ROW_SUMS = np.zeros((3, 9))
for _i in range(3):
    _ROW_SUMS[_i, 3 * _i : 3 * _i + 3] = 1.0

_BAND = np.zeros(9)
_BAND[0] = 1.0
_BAND[4] = -1.0


@dataclass(frozen=True)
class QpProblem:
    """Inputs to the estimator: k >= 3 validated campaigns, the
    unbiasedness slack xi, and whether residuals are scaled to
    per-population fractions (required when campaign sizes differ)."""

    campaigns: tuple[CampaignAggregate, ...]
    xi: float = 0.05
    normalize: bool = True

    def __post_init__(self):
        object.__setattr__(self, "campaigns", tuple(self.campaigns))
        if self.xi < 0:
            raise InvalidParameters(f"xi must be nonnegative, got {self.xi}")


@dataclass(frozen=True, eq=False)
class QpSolution:
    """Solver output.  ``objective`` and ``residuals`` are in the units the
    problem was solved in: population fractions when normalize is on, raw
    counts otherwise.  ``unique`` is False when the campaign designs are
    too alike to pin all nine values, in which case the returned minimizer
    is one of many."""

    values: PredictiveValues
    objective: float
    residuals: np.ndarray
    iterations: int
    converged: bool
    kkt_residual: float
    max_violation: float
    unique: bool

    def __post_init__(self):
        object.__setattr__(self, "residuals", np.asarray(self.residuals, dtype=float))


def _constraints(xi: float):
    """(equality rows, rhs, inequality rows, rhs) for the feasible set."""
    eq = _ROW_SUMS
    eq_rhs = np.ones(3)
    ineq = [-np.eye(9)]
    ineq_rhs = [np.zeros(9)]
    if xi > 0:
        ineq.append(np.array([_BAND, -_BAND]))
        ineq_rhs.append(np.array([xi, xi]))
    else:
        eq = np.vstack([eq, _BAND])
        eq_rhs = np.append(eq_rhs, 0.0)
    return eq, eq_rhs, np.vstack(ineq), np.concatenate(ineq_rhs)


def solve_simplex_qp(design, target, xi: float, *, max_iter: int = 200):
    """Exact minimizer of ||design @ x - target||^2 over the feasible set.

    Returns (x, info) with info a dict carrying iterations, kkt_residual,
    max_violation and the active inequality indices.  Raises
    NonConvergence if the active-set iteration fails to terminate (which
    a convex problem of this size should never do).
    """
    design = np.asarray(design, dtype=float)
    target = np.asarray(target, dtype=float)
    eq, eq_rhs, ineq, ineq_rhs = _constraints(xi)

    x = np.full(9, 1.0 / 3.0)
    working: list[int] = []

    for iteration in range(1, max_iter + 1):
        active_rows = ineq[working] if working else np.empty((0, 9))
        basis = null_space(np.vstack([eq, active_rows]))
        if basis.shape[1] == 0:
            p = np.zeros(9)
        else:
            reduced = design @ basis
            u = np.linalg.lstsq(reduced, target - design @ x, rcond=None)[0]
            p = basis @ u

        if np.linalg.norm(p) <= 1e-12 * (1.0 + np.linalg.norm(x)):
            grad = 2.0 * design.T @ (design @ x - target)
            cols = np.vstack([eq, active_rows]).T
            y = np.linalg.lstsq(cols, -grad, rcond=None)[0]
            lam = y[eq.shape[0] :]
            stationarity = float(np.linalg.norm(cols @ y + grad))
            if lam.size == 0 or lam.min() >= -KKT_TOL:
                violation = max(
                    float(np.abs(eq @ x - eq_rhs).max()),
                    float(np.maximum(ineq @ x - ineq_rhs, 0.0).max()),
                )
                info = {
                    "iterations": iteration,
                    "kkt_residual": stationarity,
                    "max_violation": violation,
                    "active": tuple(working),
                }
                return x, info
            working.pop(int(np.argmin(lam)))
            continue

        # Step to the nearest blocking constraint, if any comes before a
        # full step.
        t = 1.0
        blocker = None
        slack = ineq_rhs - ineq @ x
        heading = ineq @ p
        for idx in range(len(ineq)):
            if idx in working or heading[idx] <= 1e-14:
                continue
            t_idx = slack[idx] / heading[idx]
            if t_idx < t - 1e-15:
                t = max(t_idx, 0.0)
                blocker = idx
        x = x + t * p
        if blocker is not None:
            working.append(blocker)
            working.sort()

    raise NonConvergence(f"active-set iteration did not terminate in {max_iter} steps")


def _design_matrix(campaigns, normalize: bool):
    """Stacked (3k x 9) design and 3k target vector, plus the count scale.

    Rows are built from D-counts so that row j of campaign i reads
    D . (column j of the value matrix) = G_j.  With normalize on, each
    campaign's rows are divided by its population; otherwise populations
    must agree and the common size is divided out for conditioning (the
    returned scale restores count units).
    """
    populations = [c.population for c in campaigns]
    if normalize:
        scale = 1.0
    else:
        m = populations[0]
        if any(abs(p - m) > 1e-9 * max(1.0, m) for p in populations):
            raise UnequalPopulations(
                f"campaign populations differ ({sorted(set(populations))}); "
                "enable normalization or equalize campaign sizes"
            )
        scale = float(m)
    rows = np.zeros((3 * len(campaigns), 9))
    target = np.zeros(3 * len(campaigns))
    for i, agg in enumerate(campaigns):
        m = agg.population if normalize else scale
        d = agg.d_counts() / m
        g = agg.g_counts() / m
        for j in range(3):
            rows[3 * i + j, [j, 3 + j, 6 + j]] = d
            target[3 * i + j] = g[j]
    return rows, target, scale


def _design_is_unique(design) -> bool:
    reduced = design @ null_space(_ROW_SUMS)
    s = np.linalg.svd(reduced, compute_uv=False)
    return bool(s.size == 6 and s[-1] > 1e-8 * s[0])


def infer_predictive_values(problem: QpProblem) -> QpSolution:
    """Solve the constrained least squares and package the estimate.

    The output is deterministic (fixed interior starting point, exact
    subproblem solves) and independent of campaign order.
    """
    campaigns = problem.campaigns
    if len(campaigns) < 3:
        raise TooFewCampaigns(
            f"need at least 3 campaigns for a unique estimate, got {len(campaigns)}"
        )
    design, target, scale = _design_matrix(campaigns, problem.normalize)
    x, info = solve_simplex_qp(design, target, problem.xi)
    residuals = ((design @ x - target) * scale).reshape(len(campaigns), 3)
    return QpSolution(
        values=PredictiveValues.from_array(x),
        objective=float(np.sum(residuals**2)),
        residuals=residuals,
        iterations=info["iterations"],
        converged=info["kkt_residual"] <= KKT_TOL and info["max_violation"] <= KKT_TOL,
        kkt_residual=info["kkt_residual"],
        max_violation=info["max_violation"],
        unique=_design_is_unique(design),
    )


def estimate_positives_inferred(values: PredictiveValues, d_counts) -> float:
    """Estimated positive population D . (alpha1, beta1, gamma1)."""
    d = np.asarray(d_counts, dtype=float)
    return float(d @ values.as_array()[:, 0])


def confidence_interval(
    solution: QpSolution, problem: QpProblem, delta: float
) -> tuple[float, ...]:
    """Half-widths s_i * t(1 - delta/2, 2k - 6) for the nine estimates.

    Standard errors come from the equivalent linear regression: the model
    has six free directions once the row-sum constraints are eliminated,
    and each campaign contributes two informative rows (the third is
    fixed by the population identity).  The residual mean square on those
    rows, with 2k - 6 degrees of freedom, scales the inverse
    normal-equations matrix of the free parametrization.
    """
    if not 0.0 < delta < 1.0:
        raise InvalidParameters(f"delta must lie in (0, 1), got {delta}")
    k = len(problem.campaigns)
    dof = 2 * k - 6
    if dof < 1:
        raise InsufficientDof(
            f"confidence intervals need at least 4 campaigns, got {k}"
        )
    design, target, _ = _design_matrix(problem.campaigns, problem.normalize)
    x = solution.values.as_array().ravel()

    constraints = [_ROW_SUMS]
    if problem.xi == 0:
        constraints.append(_BAND.reshape(1, 9))
    elif abs(abs(x[0] - x[4]) - problem.xi) <= _ACTIVE_TOL:
        constraints.append(_BAND.reshape(1, 9))
    for i in range(9):
        if x[i] <= _ACTIVE_TOL:
            row = np.zeros((1, 9))
            row[0, i] = 1.0
            constraints.append(row)
    basis = null_space(np.vstack(constraints))
    if basis.shape[1] == 0:
        return tuple(0.0 for _ in range(9))

    keep = np.array([3 * i + j for i in range(k) for j in (0, 1)])
    reduced = design[keep] @ basis
    resid = design[keep] @ x - target[keep]
    sigma2 = float(resid @ resid) / dof
    normal = reduced.T @ reduced
    try:
        cov_reduced = sigma2 * np.linalg.inv(normal)
    except np.linalg.LinAlgError:
        cov_reduced = sigma2 * np.linalg.pinv(normal)
    variances = np.clip(np.diag(basis @ cov_reduced @ basis.T), 0.0, None)
    quantile = float(student_t.ppf(1.0 - delta / 2.0, dof))
    return tuple(float(np.sqrt(v)) * quantile for v in variances)


def quality_report(
    source_id: str,
    campaigns,
    *,
    xi: float = 0.05,
    delta: float = 0.05,
    normalize: bool = True,
) -> QualityReport:
    """Assess one source: mean relative error plus inferred values.

    Campaigns where the relative error is undefined are skipped for the
    mean (they still feed the inference).  Rank is left unset; assign it
    across sources with assign_ranks.
    """
    campaigns = tuple(campaigns)
    errs = []
    for agg in campaigns:
        try:
            errs.append(relative_err(agg))
        except (NoRecognizedUsers, ZeroGroundTruthPositives):
            continue
    if not errs:
        raise NoUsableCampaigns(
            f"source {source_id!r}: relative error undefined on every campaign"
        )
    problem = QpProblem(campaigns=campaigns, xi=xi, normalize=normalize)
    solution = infer_predictive_values(problem)
    ci = confidence_interval(solution, problem, delta) if len(campaigns) >= 4 else None
    return QualityReport(
        source_id=str(source_id),
        mean_relative_err=fmean(errs),
        inferred=solution.values,
        ci_half_widths=ci,
        ci_level=1.0 - delta,
        n_campaigns=len(campaigns),
        rank=None,
    )


def assign_ranks(reports) -> list[QualityReport]:
    """Order reports by mean relative error (ties by source id) and number them."""
    ordered = sorted(reports, key=lambda r: (r.mean_relative_err, r.source_id))
    return [replace(r, rank=i + 1) for i, r in enumerate(ordered)]
