"""Competing multiple-testing procedures.

All procedures return a :class:`BaselineReport` with rejected row indices
in the original ordering.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .estimation import DEFAULT_LAMBDA_GRID, LambdaGrid, pi0_hat, threshold_alpha
from .null_model import NonparametricNullCdf, UniformNullCdf
from .numeric import std_normal_cdf, std_normal_quantile
from .projection import PValueTable, ProjectedSample, clamp

__all__ = [
    "BaselineReport",
    "storey",
    "bh",
    "weighted_bh",
    "cumulative_weights",
    "two_stage",
    "mean_filter_pstar",
    "mean_filter",
]


@dataclass
class BaselineReport:
    procedure: str
    rejected: np.ndarray
    threshold: float = float("nan")  # p-value cutoff, or the BH rank cutoff k*alpha/m
    n_rejected: int = 0
    pi0_hat: float | None = None

    def __post_init__(self):
        self.rejected = np.asarray(self.rejected, dtype=int)
        self.n_rejected = int(self.rejected.size)


def _sample(p):
    p = clamp(np.asarray(p, dtype=float).ravel())
    return ProjectedSample(float("nan"), p, p)


def storey(pvals, alpha: float, grid: LambdaGrid = DEFAULT_LAMBDA_GRID, pi0: float | None = None,
           null_cdf=None, name: str = "storey") -> BaselineReport:
    """Plug-in FDR thresholding with data-driven pi0.

    ``pi0`` fixes the null proportion instead of estimating it. ``null_cdf``
    replaces the uniform null (used by :func:`mean_filter`).
    """
    sample = _sample(pvals)
    null = UniformNullCdf() if null_cdf is None else null_cdf
    if pi0 is None:
        pi0 = pi0_hat(sample, null, grid).pi0
    t = threshold_alpha(sample, null, pi0, alpha)
    rejected = np.flatnonzero(sample.values <= t) if t > 0 else []
    return BaselineReport(name, rejected, t, pi0_hat=pi0)


def bh(pvals, alpha: float, name: str = "bh") -> BaselineReport:
    """Benjamini-Hochberg step-up. Values above 1 are allowed and never
    rejected."""
    p = np.asarray(pvals, dtype=float).ravel()
    if np.any(np.isnan(p)) or np.any(p < 0):
        raise ValueError("p-values must be non-negative")
    m = p.size
    if m == 0:
        return BaselineReport(name, [], 0.0)
    order = np.argsort(p, kind="stable")
    ok = np.flatnonzero(p[order] <= alpha * np.arange(1, m + 1) / m)
    if ok.size == 0:
        return BaselineReport(name, [], 0.0)
    k = ok[-1] + 1
    return BaselineReport(name, np.sort(order[:k]), alpha * k / m)


def cumulative_weights(p1, B: float = 2.0) -> np.ndarray:
    """Weights ``Phi(Phi^{-1}(1 - p1) - B)`` rescaled to mean one."""
    z = std_normal_quantile(clamp(1.0 - np.asarray(p1, dtype=float)))
    v = std_normal_cdf(np.atleast_1d(z) - B)
    if np.ptp(v) == 0:
        return np.ones_like(v)
    return v / v.mean()


def weighted_bh(table: PValueTable, alpha: float, B: float = 2.0) -> BaselineReport:
    """BH applied to ``p2 / w`` with cumulative weights from ``p1``."""
    w = cumulative_weights(table.p1, B)
    return bh(table.p2 / w, alpha, name="wbh")


def two_stage(table: PValueTable, alpha: float, remove_fraction: float = 0.5) -> BaselineReport:
    """Drop the rows with the largest ``p1``, then BH on the survivors' ``p2``."""
    if not 0.0 <= remove_fraction < 1.0:
        raise ValueError("remove_fraction must lie in [0, 1)")
    m = table.m
    keep = math.ceil((1.0 - remove_fraction) * m - 1e-9)
    survivors = np.sort(np.argsort(table.p1, kind="stable")[:keep])
    inner = bh(table.p2[survivors], alpha)
    return BaselineReport("twostage", survivors[inner.rejected], inner.threshold)


def mean_filter_pstar(p2) -> np.ndarray:
    """Average of each p-value with its two neighbours; edge indices repeat
    the boundary value."""
    p = np.asarray(p2, dtype=float).ravel()
    if p.size == 0:
        raise ValueError("need at least one p-value")
    padded = np.concatenate(([p[0]], p, [p[-1]]))
    return (padded[:-2] + padded[1:-1] + padded[2:]) / 3.0


def mean_filter(p2, alpha: float, grid: LambdaGrid = DEFAULT_LAMBDA_GRID) -> BaselineReport:
    """Plug-in FDR thresholding on the smoothed p-values.

    Smoothed null p-values are not uniform, so their null CDF is estimated
    by the symmetrized empirical CDF rather than taken as the identity.
    """
    pstar = mean_filter_pstar(p2)
    return storey(pstar, alpha, grid, null_cdf=NonparametricNullCdf(clamp(pstar)), name="meanfilter")
