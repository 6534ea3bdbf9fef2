"""True-null distribution of the projected p-value.

Two estimators are provided. :class:`ParametricNullCdf` assumes the normal
scores of null pairs are jointly normal with mean zero, so the projected
score is ``N(0, sigma0^2)``. :class:`NonparametricNullCdf` only assumes the
null density is centrally symmetric about ``(1/2, 1/2)`` and reflects the
upper half of the sample.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .numeric import std_normal_quantile
from .projection import EPS, ProjectedSample

__all__ = [
    "EstimationError",
    "NullModelParams",
    "NullCdf",
    "ParametricNullCdf",
    "NonparametricNullCdf",
    "UniformNullCdf",
    "estimate_sigma0",
    "parametric_null_cdf",
    "nonparametric_null_cdf",
    "fit_null_cdf",
    "closed_form_sigma0",
    "null_density_oracle",
]


class EstimationError(ValueError):
    """Raised when a sample is too degenerate to estimate a null quantity."""


@dataclass(frozen=True)
class NullModelParams:
    """Mean, scales and correlation of the normal scores ``(z1, z2)``.

    Used both for the true-null model and, as a second instance, for the
    nonnull component.
    """

    mu: tuple[float, float] = (0.0, 0.0)
    sigma1: float = 1.0
    sigma2: float = 1.0
    rho: float = 0.0

    def __post_init__(self):
        if not abs(self.rho) < 1:
            raise ValueError("|rho| must be < 1")
        if self.sigma1 <= 0 or self.sigma2 <= 0:
            raise ValueError("scales must be positive")

    @property
    def cov(self) -> np.ndarray:
        c = self.rho * self.sigma1 * self.sigma2
        return np.array([[self.sigma1**2, c], [c, self.sigma2**2]])

    def mean_at(self, theta: float) -> float:
        return math.cos(theta) * self.mu[0] + math.sin(theta) * self.mu[1]

    def scale_at(self, theta: float) -> float:
        return closed_form_sigma0(self, theta)


def estimate_sigma0(z, c: float = 0.0) -> float:
    """Scale of the null projected scores from their right half.

    Scores at or below ``-c`` are dropped and replaced by the negated scores
    in ``[c, inf)``; the result is the root mean square (about zero) of the
    reconstructed sample.
    """
    z = np.asarray(z, dtype=float)
    if z.size == 0:
        raise EstimationError("empty score sample")
    if c < 0:
        raise ValueError("c must be non-negative")
    upper_closed = z[z >= c]
    middle = z[(z > -c) & (z <= c)]
    upper_open = z[z > c]
    n = upper_closed.size + middle.size + upper_open.size
    if n == 0:
        raise EstimationError("no scores above -c; cannot reconstruct the null sample")
    ss = np.dot(upper_closed, upper_closed) + np.dot(middle, middle) + np.dot(upper_open, upper_open)
    sigma = math.sqrt(ss / n)
    if sigma <= 0:
        raise EstimationError("estimated null scale is zero")
    return sigma


def parametric_null_cdf(t, sigma0_hat: float):
    """``Phi(Phi^{-1}(t) / sigma0_hat)``; exactly ``t`` when the scale is 1."""
    if not sigma0_hat > 0:
        raise ValueError("sigma0_hat must be positive")
    arr = np.asarray(t, dtype=float)
    if np.any((arr < 0) | (arr > 1)):
        raise ValueError("t must lie in [0, 1]")
    if sigma0_hat == 1.0:
        out = arr.copy()
    else:
        with np.errstate(divide="ignore"):
            z = special.ndtri(arr)
        out = special.ndtr(z / sigma0_hat)
    return float(out) if out.ndim == 0 else out


class NullCdf:
    """Evaluable estimate of the null CDF of a projected p-value."""

    kind: str

    def __call__(self, t):
        raise NotImplementedError


@dataclass(frozen=True)
class ParametricNullCdf(NullCdf):
    sigma0_hat: float
    kind = "parametric"

    def __post_init__(self):
        if not self.sigma0_hat > 0:
            raise ValueError("sigma0_hat must be positive")

    def __call__(self, t):
        return parametric_null_cdf(t, self.sigma0_hat)


@dataclass(frozen=True)
class UniformNullCdf(NullCdf):
    """Identity CDF: projected p-values are uniform under the null."""

    kind = "uniform"

    def __call__(self, t):
        arr = np.asarray(t, dtype=float)
        return float(arr) if arr.ndim == 0 else arr.copy()


class NonparametricNullCdf(NullCdf):
    """Symmetrized empirical CDF built from the values above 1/2.

    For ``t <= 1/2`` the estimate is ``#{p >= 1 - t} / D``; above 1/2 it is
    ``1 - #{p >= t} / D`` with ``D = 2 #{p > 1/2} + #{p = 1/2}``.
    Evaluation is a binary search on the sorted sample.
    """

    kind = "nonparametric"

    def __init__(self, values):
        v = np.sort(np.asarray(values, dtype=float).ravel())
        self.sorted_values = v
        self.count_above_half = int(v.size - np.searchsorted(v, 0.5, side="right"))
        self.count_at_half = int(np.searchsorted(v, 0.5, side="right") - np.searchsorted(v, 0.5, side="left"))
        self.denominator = 2 * self.count_above_half + self.count_at_half
        if self.denominator == 0:
            raise EstimationError("no projected p-values at or above 1/2; null sample is degenerate")

    def _count_ge(self, x):
        return self.sorted_values.size - np.searchsorted(self.sorted_values, x, side="left")

    def __call__(self, t):
        arr = np.asarray(t, dtype=float)
        if np.any((arr < 0) | (arr > 1)):
            raise ValueError("t must lie in [0, 1]")
        low = self._count_ge(1.0 - arr) / self.denominator
        high = 1.0 - self._count_ge(arr) / self.denominator
        out = np.where(arr <= 0.5, low, high)
        return float(out) if out.ndim == 0 else out

    def __repr__(self):
        return (f"NonparametricNullCdf(m={self.sorted_values.size}, "
                f"above_half={self.count_above_half}, at_half={self.count_at_half})")


def nonparametric_null_cdf(t, sample):
    """Symmetrized empirical null CDF of ``sample`` (a projected sample or
    plain array of projected p-values) evaluated at ``t``."""
    return NonparametricNullCdf(getattr(sample, "values", sample))(t)


def fit_null_cdf(sample: ProjectedSample, method: str, c: float = 0.0) -> NullCdf:
    """Build the null CDF estimate named by ``method`` for one projection."""
    if method == "parametric":
        return ParametricNullCdf(estimate_sigma0(sample.z, c))
    if method == "nonparametric":
        return NonparametricNullCdf(sample.values)
    if method == "uniform":
        return UniformNullCdf()
    raise ValueError(f"unknown null method {method!r}")


def closed_form_sigma0(params: NullModelParams, theta: float) -> float:
    """Standard deviation of ``cos(theta) z1 + sin(theta) z2`` under ``params``."""
    if not 0.0 <= theta <= math.pi / 2:
        raise ValueError("theta must lie in [0, pi/2]")
    c, s = math.cos(theta), math.sin(theta)
    var = (c * params.sigma1) ** 2 + (s * params.sigma2) ** 2 + 2 * params.rho * params.sigma1 * params.sigma2 * c * s
    return math.sqrt(var)


def null_density_oracle(p1, p2, rho0: float, family: str = "normal", df: int | None = None):
    """Joint null density of ``(p1, p2)`` when the test statistics are
    bivariate normal or bivariate t with correlation ``rho0``.

    ``family`` is ``"normal"`` or ``"t"``; the t family needs ``df``.
    """
    if not abs(rho0) < 1:
        raise ValueError("|rho0| must be < 1")
    p1 = np.clip(np.asarray(p1, dtype=float), EPS, 1 - EPS)
    p2 = np.clip(np.asarray(p2, dtype=float), EPS, 1 - EPS)
    one_m = 1.0 - rho0 * rho0
    if family == "normal":
        x, y = std_normal_quantile(p1), std_normal_quantile(p2)
        q = rho0 * rho0 * x * x - 2 * rho0 * x * y + rho0 * rho0 * y * y
        out = np.exp(-q / (2 * one_m)) / math.sqrt(one_m)
    elif family == "t":
        if df is None or df < 1:
            raise ValueError("the t family needs df >= 1")
        v = float(df)
        x, y = special.stdtrit(v, p1), special.stdtrit(v, p2)
        lead = math.exp(2 * special.gammaln(v / 2) - 2 * special.gammaln((v + 1) / 2)) * v / (2 * math.sqrt(one_m))
        joint = (1 + (x * x - 2 * rho0 * x * y + y * y) / (v * one_m)) ** (-(v + 2) / 2)
        marg = (1 + x * x / v) ** (-(v + 1) / 2) * (1 + y * y / v) ** (-(v + 1) / 2)
        out = lead * joint / marg
    else:
        raise ValueError(f"unknown family {family!r}")
    return float(out) if np.ndim(out) == 0 else out
