"""Null-proportion estimation, thresholds, direction search and the full
single-index procedure.

Thresholds are found by scanning the observed projected p-values (plus 0).
Both FDR estimators have a numerator that is non-decreasing in ``t`` while
the rejection count is constant between order statistics, so the largest
qualifying observed value yields the same rejection set as the supremum over
all ``t``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .null_model import EstimationError, NullCdf, fit_null_cdf
from .projection import PValueTable, ProjectedSample, project_all, theta_grid

__all__ = [
    "LambdaGrid",
    "DEFAULT_LAMBDA_GRID",
    "DecisionReport",
    "Pi0Estimate",
    "pi0_hat",
    "threshold_star",
    "threshold_alpha",
    "fdr_hat",
    "rejection_count",
    "select_theta",
    "run_sim_procedure",
    "METHODS",
]

METHODS = ("parametric", "nonparametric", "uniform")


@dataclass(frozen=True)
class LambdaGrid:
    """Increasing tuning values in (0, 1/2]; an implicit 0 precedes them."""

    values: tuple

    def __post_init__(self):
        v = tuple(float(x) for x in self.values)
        if not v:
            raise ValueError("lambda grid must be nonempty")
        if any(not 0.0 < x <= 0.5 for x in v):
            raise ValueError("lambda values must lie in (0, 0.5]")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("lambda values must be strictly increasing")
        object.__setattr__(self, "values", v)

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    @classmethod
    def parse(cls, text: str) -> "LambdaGrid":
        return cls(tuple(float(x) for x in text.split(",") if x.strip()))


DEFAULT_LAMBDA_GRID = LambdaGrid(
    (0.02, 0.04, 0.06, 0.08) + tuple(round(0.1 + 0.025 * k, 10) for k in range(17))
)


@dataclass(frozen=True)
class Pi0Estimate:
    pi0: float
    lam: float
    path: tuple = ()  # (lambda, unclamped estimate) pairs visited

    def __iter__(self):
        # allows ``pi0, lam = pi0_hat(...)``
        return iter((self.pi0, self.lam))


@dataclass
class DecisionReport:
    theta_hat: float
    pi0_hat: float
    lambda_chosen: float
    threshold: float
    rejected: np.ndarray
    method: str
    p_theta: np.ndarray | None = field(default=None, repr=False)
    theta_grid: np.ndarray | None = field(default=None, repr=False)
    theta_counts: np.ndarray | None = field(default=None, repr=False)
    fdr_curve: list | None = field(default=None, repr=False)

    @property
    def n_rejected(self) -> int:
        return int(self.rejected.size)


def _check_level(a, name):
    if not 0.0 < a:
        raise ValueError(f"{name} must be positive")


def pi0_hat(sample: ProjectedSample, null_cdf: NullCdf, grid: LambdaGrid = DEFAULT_LAMBDA_GRID) -> Pi0Estimate:
    """Estimate the null proportion with data-driven choice of lambda.

    Walks lambda_1, lambda_2, ... and stops at the first one whose estimate
    does not decrease from the previous value; falls back to the last grid
    value. The result is clamped to [1/m, 1].
    """
    values = np.sort(np.asarray(sample.values, dtype=float))
    m = values.size
    if m == 0:
        raise EstimationError("empty sample")
    lams = np.concatenate(([0.0], np.asarray(grid.values)))
    tail = 1.0 - np.asarray(null_cdf(lams), dtype=float)
    above = m - np.searchsorted(values, lams, side="right")
    with np.errstate(divide="ignore", invalid="ignore"):
        est = above / (tail * m)
    n = lams.size - 1
    pick = n
    for j in range(1, n):
        if est[j] >= est[j - 1]:
            pick = j
            break
    # only the lambdas actually visited need a usable denominator
    if np.any(tail[:pick + 1] <= 0):
        raise EstimationError("null CDF reaches 1 at a lambda the estimator needs")
    pi0 = min(1.0, max(1.0 / m, float(est[pick])))
    path = tuple((float(lams[j]), float(est[j])) for j in range(pick + 1))
    return Pi0Estimate(pi0, float(lams[pick]), path)


def _scan(values, null_cdf, scale, level):
    """Largest observed value whose estimated FDR is at most ``level``."""
    v = np.sort(np.asarray(values, dtype=float))
    m = v.size
    if m == 0:
        return 0.0
    r = np.searchsorted(v, v, side="right")
    est = scale * m * np.asarray(null_cdf(v), dtype=float) / r
    ok = np.flatnonzero(est <= level)
    if ok.size == 0:
        return 0.0
    return float(v[ok[-1]])


def threshold_star(sample: ProjectedSample, null_cdf: NullCdf, alpha_prime: float) -> float:
    """Threshold at working level ``alpha_prime`` with the null proportion
    taken as 1. Returns 0 when nothing qualifies."""
    _check_level(alpha_prime, "alpha_prime")
    return _scan(sample.values, null_cdf, 1.0, alpha_prime)


def threshold_alpha(sample: ProjectedSample, null_cdf: NullCdf, pi0: float, alpha: float) -> float:
    """Threshold controlling the estimated FDR at ``alpha`` given ``pi0``."""
    _check_level(alpha, "alpha")
    if not 0.0 < pi0 <= 1.0:
        raise ValueError("pi0 must lie in (0, 1]")
    return _scan(sample.values, null_cdf, pi0, alpha)


def rejection_count(sample: ProjectedSample, t: float) -> int:
    if t <= 0:
        return 0
    return int(np.count_nonzero(sample.values <= t))


def fdr_hat(t, sample: ProjectedSample, null_cdf: NullCdf, pi0: float):
    """Plug-in FDR estimate ``pi0 * F0(t) * m / max(R(t), 1)``.

    Not capped at 1.
    """
    arr = np.asarray(t, dtype=float)
    v = np.sort(sample.values)
    r = np.maximum(np.searchsorted(v, arr, side="right"), 1)
    out = pi0 * np.asarray(null_cdf(arr), dtype=float) * v.size / r
    return float(out) if out.ndim == 0 else out


def select_theta(table: PValueTable, alpha_prime: float, grid: Sequence[float] | None = None,
                 method: str = "parametric", c: float = 0.0):
    """Direction maximizing the number of rejections at level ``alpha_prime``.

    Returns ``(theta_hat, counts)`` where ``counts[l]`` is the rejection
    count at ``grid[l]``. Ties go to the largest direction.
    """
    grid = theta_grid(101) if grid is None else np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("theta grid must be nonempty")
    counts = np.zeros(grid.size, dtype=int)
    best, best_count = None, -1
    for i, theta in enumerate(grid):
        sample = project_all(table, float(theta))
        t = threshold_star(sample, fit_null_cdf(sample, method, c), alpha_prime)
        counts[i] = rejection_count(sample, t)
        if counts[i] >= best_count:
            best, best_count = float(theta), counts[i]
    return best, counts


def run_sim_procedure(table: PValueTable, alpha: float = 0.05, alpha_prime: float | None = None,
                      method: str = "nonparametric", theta_points: int = 101,
                      grid: LambdaGrid = DEFAULT_LAMBDA_GRID, thetas: Sequence[float] | None = None,
                      c: float = 0.0, curve_points: int = 0) -> DecisionReport:
    """Full pipeline: direction search, null and pi0 estimation at the chosen
    direction, then thresholding at ``alpha``.

    ``thetas`` overrides the equally spaced grid of ``theta_points``
    directions. ``curve_points > 0`` also records the estimated FDR on that
    many evenly spaced ``t`` in (0, 1].
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    alpha_prime = alpha if alpha_prime is None else alpha_prime
    directions = theta_grid(theta_points) if thetas is None else np.asarray(thetas, dtype=float)
    theta, counts = select_theta(table, alpha_prime, directions, method, c)

    sample = project_all(table, theta)
    null = fit_null_cdf(sample, method, c)
    est = pi0_hat(sample, null, grid)
    t = threshold_alpha(sample, null, est.pi0, alpha)
    rejected = np.flatnonzero(sample.values <= t) if t > 0 else np.array([], dtype=int)

    curve = None
    if curve_points:
        ts = np.arange(1, curve_points + 1) / curve_points
        curve = list(zip(ts.tolist(), np.atleast_1d(fdr_hat(ts, sample, null, est.pi0)).tolist()))
    return DecisionReport(theta, est.pi0, est.lam, t, rejected, method,
                          p_theta=sample.values, theta_grid=directions,
                          theta_counts=counts, fdr_curve=curve)
