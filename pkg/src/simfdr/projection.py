"""Bivariate p-value tables and the single-index projection.

A pair ``(p1, p2)`` is mapped to ``Phi(cos(theta) * z1 + sin(theta) * z2)``
with ``z_j = Phi^{-1}(p_j)``. ``theta = 0`` uses the preliminary column alone
and ``theta = pi/2`` the primary column alone.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .numeric import std_normal_cdf, std_normal_quantile

__all__ = [
    "EPS",
    "PValueTable",
    "ProjectedSample",
    "clamp",
    "project",
    "project_all",
    "theta_grid",
]

#: Probabilities are clamped into [EPS, 1 - EPS] before any quantile is taken.
EPS = 1e-12

HALF_PI = math.pi / 2


def clamp(p):
    return np.clip(np.asarray(p, dtype=float), EPS, 1.0 - EPS)


def _check_theta(theta):
    if not (0.0 <= theta <= HALF_PI):
        raise ValueError(f"theta must lie in [0, pi/2], got {theta!r}")


@dataclass
class PValueTable:
    """``m`` bivariate p-values with optional ids and null/nonnull labels.

    ``truth`` is a boolean array, True marking a nonnull row.
    """

    p1: np.ndarray
    p2: np.ndarray
    ids: list | None = None
    truth: np.ndarray | None = None
    _z: tuple | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        p1 = np.asarray(self.p1, dtype=float).ravel()
        p2 = np.asarray(self.p2, dtype=float).ravel()
        if p1.size == 0:
            raise ValueError("a p-value table needs at least one row")
        if p1.shape != p2.shape:
            raise ValueError("p1 and p2 must have the same length")
        if np.any(np.isnan(p1)) or np.any(np.isnan(p2)):
            raise ValueError("p-values must not be NaN")
        if np.any((p1 < 0) | (p1 > 1) | (p2 < 0) | (p2 > 1)):
            raise ValueError("p-values must lie in [0, 1]")
        self.p1 = clamp(p1)
        self.p2 = clamp(p2)
        if self.ids is not None and len(self.ids) != p1.size:
            raise ValueError("ids must match the number of rows")
        if self.truth is not None:
            self.truth = np.asarray(self.truth, dtype=bool).ravel()
            if self.truth.size != p1.size:
                raise ValueError("truth labels must match the number of rows")

    def __len__(self):
        return self.p1.size

    @property
    def m(self) -> int:
        return self.p1.size

    @property
    def z(self) -> tuple[np.ndarray, np.ndarray]:
        """Normal scores of both columns, computed once and cached."""
        if self._z is None:
            self._z = (std_normal_quantile(self.p1), std_normal_quantile(self.p2))
        return self._z

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[float, float]], **kw) -> "PValueTable":
        arr = np.asarray(pairs, dtype=float).reshape(-1, 2)
        return cls(arr[:, 0], arr[:, 1], **kw)


@dataclass(frozen=True)
class ProjectedSample:
    """Projected p-values ``p_i(theta)`` along with their normal scores."""

    theta: float
    values: np.ndarray
    z: np.ndarray

    def __len__(self):
        return self.values.size

    @property
    def m(self) -> int:
        return self.values.size


def project(p1, p2, theta):
    """Single-index p-value of one pair (or of broadcastable arrays)."""
    _check_theta(theta)
    if theta == 0.0:
        return _scalar(clamp(p1))
    if theta == HALF_PI:
        return _scalar(clamp(p2))
    z = math.cos(theta) * std_normal_quantile(clamp(p1)) + math.sin(theta) * std_normal_quantile(clamp(p2))
    return _scalar(clamp(std_normal_cdf(z)))


def _scalar(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


def project_all(table: PValueTable, theta: float) -> ProjectedSample:
    """Project every row of ``table`` onto direction ``theta``.

    The endpoint directions return the corresponding column unchanged.
    """
    _check_theta(theta)
    z1, z2 = table.z
    if theta == 0.0:
        return ProjectedSample(theta, table.p1.copy(), z1.copy())
    if theta == HALF_PI:
        return ProjectedSample(theta, table.p2.copy(), z2.copy())
    z = math.cos(theta) * z1 + math.sin(theta) * z2
    values = clamp(std_normal_cdf(z))
    return ProjectedSample(theta, values, z)


def theta_grid(L: int) -> np.ndarray:
    """``L`` equally spaced directions on [0, pi/2], both endpoints included."""
    if int(L) != L or L < 2:
        raise ValueError("theta grid needs L >= 2 points")
    grid = np.arange(L, dtype=float) / (L - 1) * HALF_PI
    grid[-1] = HALF_PI
    return grid
