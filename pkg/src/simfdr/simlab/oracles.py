"""Closed-form and Monte-Carlo reference quantities for the bivariate normal
model.

Everything here works with the normal scores ``z_j = Phi^{-1}(p_j)``. For
right-sided z tests with nonnull statistic mean ``mu`` the scores of a
nonnull row have mean ``-mu``; :func:`example1_models` applies that flip.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

from ..null_model import EstimationError, NullModelParams, closed_form_sigma0
from ..numeric import as_generator, std_normal_quantile

__all__ = [
    "example1_models",
    "RectangleFdr",
    "fdr_rectangle_mc",
    "threshold_oracle",
    "theta0_oracle_normal",
    "power_oracle",
    "delta_power_ratio",
    "SingularityError",
]

HALF_PI = math.pi / 2


class SingularityError(ArithmeticError):
    """The first-order power expansion has a vanishing denominator."""


def example1_models(mu=(2.0, 2.0), rho: float = 0.2):
    """Null and nonnull score models for right-sided tests with unit variances."""
    null = NullModelParams((0.0, 0.0), 1.0, 1.0, rho)
    nonnull = NullModelParams((-float(mu[0]), -float(mu[1])), 1.0, 1.0, rho)
    return null, nonnull


@dataclass(frozen=True)
class RectangleFdr:
    estimate: float
    se: float
    n_hits: int


def fdr_rectangle_mc(null: NullModelParams, nonnull: NullModelParams, pi0: float,
                     t1: float, t2: float, n: int, rng) -> RectangleFdr:
    """Monte-Carlo null fraction among draws landing in ``p1 <= t1, p2 <= t2``.

    Rows are labelled null with probability ``pi0`` and drawn from the
    matching score model. Returns NaN with ``n_hits = 0`` when no draw
    lands in the rectangle.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 <= pi0 <= 1.0:
        raise ValueError("pi0 must lie in [0, 1]")
    gen = as_generator(rng)
    is_null = gen.random(n) < pi0
    eps = gen.standard_normal((n, 2))
    out = np.empty((n, 2))
    for flag, par in ((True, null), (False, nonnull)):
        rows = is_null == flag
        factor = np.linalg.cholesky(par.cov)
        out[rows] = eps[rows] @ factor.T + np.asarray(par.mu)
    # compare scores against score-space limits, same event as p <= t
    b1 = -np.inf if t1 <= 0 else (np.inf if t1 >= 1 else std_normal_quantile(t1))
    b2 = -np.inf if t2 <= 0 else (np.inf if t2 >= 1 else std_normal_quantile(t2))
    hit = (out[:, 0] <= b1) & (out[:, 1] <= b2)
    k = int(hit.sum())
    if k == 0:
        return RectangleFdr(float("nan"), float("nan"), 0)
    f = float(is_null[hit].mean())
    return RectangleFdr(f, math.sqrt(f * (1.0 - f) / k), k)


def _log_cdfs(u, theta, null, nonnull):
    s0 = closed_form_sigma0(null, theta)
    s1 = closed_form_sigma0(nonnull, theta)
    return (special.log_ndtr((u - null.mean_at(theta)) / s0),
            special.log_ndtr((u - nonnull.mean_at(theta)) / s1))


def _ratio_root(theta, null, nonnull, pi0, level, weight_null):
    """Score-space threshold ``u`` where the null share of rejections hits ``level``.

    The null share is ``w F0 / (pi0 F0 + (1 - pi0) F1)`` with ``w`` either 1
    (working level) or ``pi0`` (FDR level).
    """
    pi1 = 1.0 - pi0

    def g(u):
        l0, l1 = _log_cdfs(u, theta, null, nonnull)
        # log of the null share minus log level
        return math.log(weight_null) + l0 - np.logaddexp(math.log(pi0) + l0, math.log(pi1) + l1) - math.log(level)

    lo, hi = -40.0, 40.0
    if g(lo) > 0 or g(hi) < 0:
        raise EstimationError(f"no threshold reaches level {level} at theta={theta:.4f}")
    return optimize.brentq(g, lo, hi, xtol=1e-13, rtol=1e-14, maxiter=500)


def threshold_oracle(theta, null, nonnull, pi0, level, fdr_level=False):
    """Population threshold ``t`` on the projected p-value.

    With ``fdr_level`` the null share includes ``pi0`` (FDR control);
    otherwise it is the working-level ratio ``F0 / F``.
    """
    u = _ratio_root(theta, null, nonnull, pi0, level, pi0 if fdr_level else 1.0)
    return float(special.ndtr(u))


def power_oracle(theta, null, nonnull, pi0, level, fdr_level=True):
    """Nonnull rejection probability ``F1(t, theta)`` at the population threshold."""
    u = _ratio_root(theta, null, nonnull, pi0, level, pi0 if fdr_level else 1.0)
    s1 = closed_form_sigma0(nonnull, theta)
    return float(special.ndtr((u - nonnull.mean_at(theta)) / s1))


def theta0_oracle_normal(null: NullModelParams, nonnull: NullModelParams, pi0: float,
                         alpha_prime: float, n_grid: int = 1000, refine: bool = True) -> float:
    """Direction maximizing nonnull power at working level ``alpha_prime``.

    Scans ``n_grid`` directions on [0, pi/2], solving for the threshold at
    each by a bracketing root search, then polishes the best grid point with
    a bounded scalar search over the neighbouring cell.
    """
    if not 0.0 < pi0 < 1.0:
        raise ValueError("pi0 must lie in (0, 1)")
    grid = np.linspace(0.0, HALF_PI, n_grid)

    def power(th):
        return power_oracle(th, null, nonnull, pi0, alpha_prime, fdr_level=False)

    vals = np.array([power(th) for th in grid])
    k = int(np.argmax(vals))
    if not refine:
        return float(grid[k])
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, n_grid - 1)]
    res = optimize.minimize_scalar(lambda th: -power(th), bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-10})
    return float(res.x) if -res.fun >= vals[k] else float(grid[k])


def delta_power_ratio(null: NullModelParams, nonnull: NullModelParams, pi0: float,
                      alpha: float, theta: float) -> float:
    """First-order approximation of the power ratio between direction
    ``theta`` and the primary-only direction pi/2.

    Returns ``1 + Delta(theta)``, with ``Delta`` linear in ``theta - pi/2``.
    """
    if not 0.0 <= theta <= HALF_PI:
        raise ValueError("theta must lie in [0, pi/2]")
    if theta == HALF_PI:
        return 1.0
    pi1 = 1.0 - pi0
    u = _ratio_root(HALF_PI, null, nonnull, pi0, alpha, pi0)
    beta = (1.0 / alpha - 1.0) * pi0 / pi1
    phi_u = math.exp(-0.5 * u * u) / math.sqrt(2 * math.pi)

    def dens(par):
        # density of p2 at t = Phi(u) under the given score model
        x = (u - par.mu[1]) / par.sigma2
        return math.exp(-0.5 * x * x) / math.sqrt(2 * math.pi) / (par.sigma2 * phi_u)

    def cond_mean(par):
        return par.mu[0] + par.rho * par.sigma1 / par.sigma2 * (u - par.mu[1])

    f0, f1 = dens(null), dens(nonnull)
    denom = f1 - beta * f0
    if abs(denom) < 1e-300:
        raise SingularityError("f1 - beta' f0 vanishes at the primary-only threshold")
    F0 = float(special.ndtr((u - null.mu[1]) / null.sigma2))
    gap = cond_mean(null) - cond_mean(nonnull)
    delta = phi_u * f1 * f0 / denom * (theta - HALF_PI) / F0 * gap
    return 1.0 + delta
