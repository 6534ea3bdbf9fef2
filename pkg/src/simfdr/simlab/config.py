"""Simulation configuration."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from ..errors import ConfigError

PROCEDURES = ("sim1", "sim2", "storey", "bh", "wbh", "twostage", "meanfilter")

# default nonnull means per example
_DEFAULT_PI0 = {1: 0.75, 2: 0.75, 3: 0.7, 4: 0.9}
_DEFAULT_MU = {1: ((2.0, 2.0),), 2: ((4.0, 4.0),), 3: ((1.5,), (2.0,), (2.5,)), 4: ((2.0,),)}


def _as_means(mu, scalars=False):
    """Normalize a scalar, a pair, or a list of pairs into a tuple of tuples.

    With ``scalars`` a flat list is read as several one-dimensional values.
    """
    if isinstance(mu, (int, float)):
        return ((float(mu),),)
    mu = tuple(mu)
    if mu and isinstance(mu[0], (int, float)):
        if scalars:
            return tuple((float(x),) for x in mu)
        return (tuple(float(x) for x in mu),)
    return tuple(tuple(float(x) for x in (c if not isinstance(c, (int, float)) else (c,))) for c in mu)


@dataclass(frozen=True)
class SimConfig:
    """Parameters of one simulation study.

    ``mu`` is a nonnull mean pair, or a list of pairs forming an equally
    weighted mixture unless ``mu_weights`` is given. ``pi0`` of None picks
    the example's usual null proportion. For Example 3 it lists
    the signal strengths a nonnull z statistic draws from; for Example 4 it
    is the group mean difference. ``alpha`` may be one level or several;
    all levels are applied to the same generated tables. ``alpha_prime``
    of None means the working level equals each ``alpha``.
    """

    example: int = 1
    m: int = 10_000
    pi0: float | None = None
    mu: tuple = None
    mu_weights: tuple | None = None
    rho: float = 0.2
    df: int | None = None
    contaminate: bool = False
    reps: int = 500
    master_seed: int = 0
    alpha: tuple = (0.05,)
    alpha_prime: float | None = None
    procedures: tuple = ("sim1", "sim2", "storey")
    theta_points: int = 101
    group_size: int = 10
    sse_df: int = 19
    filter_fraction: float = 0.5
    wbh_b: float = 2.0
    allow_pure_null: bool = False
    scenario: str = ""

    def __post_init__(self):
        put = lambda k, v: object.__setattr__(self, k, v)
        if self.example not in (1, 2, 3, 4):
            raise ConfigError(f"example must be 1-4, got {self.example!r}")
        if self.pi0 is None:
            put("pi0", _DEFAULT_PI0[self.example])
        put("mu", _as_means(_DEFAULT_MU[self.example] if self.mu is None else self.mu, self.example in (3, 4)))
        alphas = (self.alpha,) if isinstance(self.alpha, (int, float)) else tuple(self.alpha)
        put("alpha", tuple(float(a) for a in alphas))
        put("procedures", tuple(self.procedures))
        if self.df is None and self.example == 2:
            put("df", 3)
        self.validate()

    def validate(self):
        if self.m < 2:
            raise ConfigError("m must be at least 2")
        if self.example == 3 and self.m < 3:
            raise ConfigError("example 3 needs m >= 3")
        if self.reps < 1:
            raise ConfigError("reps must be at least 1")
        lo_ok = 0.0 < self.pi0 if not self.allow_pure_null else 0.0 <= self.pi0
        hi_ok = self.pi0 < 1.0 or (self.allow_pure_null and self.pi0 == 1.0)
        if not (lo_ok and hi_ok):
            raise ConfigError("pi0 must lie in (0, 1); pass allow_pure_null to permit pi0 = 1")
        if not self.alpha or any(not 0.0 < a < 1.0 for a in self.alpha):
            raise ConfigError("alpha levels must lie in (0, 1)")
        if self.alpha_prime is not None and not 0.0 < self.alpha_prime < 1.0:
            raise ConfigError("alpha_prime must lie in (0, 1)")
        if not abs(self.rho) < 1.0:
            raise ConfigError("rho must lie in (-1, 1)")
        if self.df is not None and self.example != 2:
            raise ConfigError("df only applies to example 2")
        if self.df is not None and self.df < 1:
            raise ConfigError("df must be >= 1")
        if self.contaminate and self.example not in (1, 2):
            raise ConfigError("contamination applies to examples 1 and 2")
        bad = [p for p in self.procedures if p not in PROCEDURES]
        if bad or not self.procedures:
            raise ConfigError(f"unknown procedure(s) {bad}; choose from {', '.join(PROCEDURES)}")
        if self.example in (1, 2) and any(len(c) != 2 for c in self.mu):
            raise ConfigError("examples 1 and 2 need nonnull mean pairs")
        if self.example in (3, 4) and any(len(c) != 1 for c in self.mu):
            raise ConfigError("examples 3 and 4 take scalar signal values")
        if self.mu_weights is not None:
            if len(self.mu_weights) != len(self.mu) or any(w < 0 for w in self.mu_weights) or sum(self.mu_weights) <= 0:
                raise ConfigError("mu_weights must be non-negative, one per mean, with positive sum")
        if self.theta_points < 2:
            raise ConfigError("theta_points must be >= 2")
        if self.group_size < 2 or self.sse_df < 1:
            raise ConfigError("group_size must be >= 2 and sse_df >= 1")
        if not 0.0 <= self.filter_fraction < 1.0:
            raise ConfigError("filter_fraction must lie in [0, 1)")

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["mu"] = [list(c) for c in self.mu]
        d["alpha"] = list(self.alpha)
        d["procedures"] = list(self.procedures)
        if self.mu_weights is not None:
            d["mu_weights"] = list(self.mu_weights)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SimConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        d = dict(d)
        for k in ("mu", "mu_weights", "alpha", "procedures"):
            if isinstance(d.get(k), list):
                d[k] = tuple(tuple(x) if isinstance(x, list) else x for x in d[k])
        return cls(**d)

    def replace(self, **kw) -> "SimConfig":
        return dataclasses.replace(self, **kw)
