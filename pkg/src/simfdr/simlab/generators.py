"""Data-generating models for the four simulation examples.

Every generator takes a :class:`SimConfig` and an RNG (``RngStream`` or numpy
``Generator``) and returns a :class:`PValueTable` with ``truth`` labels,
True marking a nonnull row. Rows given a zero mean are labelled null.
"""
from __future__ import annotations

import numpy as np
from scipy import special

from ..errors import ConfigError
from ..numeric import as_generator, sample_bivariate_normal, sample_bivariate_t, student_t_cdf
from ..projection import PValueTable
from .config import SimConfig

__all__ = [
    "gen_example1",
    "gen_example2",
    "gen_example3",
    "gen_example4",
    "generate",
    "contaminate",
    "nonnull_mask",
    "example3_clusters",
]


def nonnull_mask(m: int, pi0: float, gen: np.random.Generator) -> np.ndarray:
    """``round((1 - pi0) m)`` nonnull rows at seeded random positions."""
    m1 = int(round((1.0 - pi0) * m))
    mask = np.zeros(m, dtype=bool)
    mask[gen.permutation(m)[:m1]] = True
    return mask


def _component_means(cfg: SimConfig, mask, gen):
    """Per-row mean vector; nonnull rows draw a mixture component."""
    means = np.zeros((mask.size, len(cfg.mu[0])))
    idx = np.flatnonzero(mask)
    comps = np.asarray(cfg.mu, dtype=float)
    if len(comps) == 1:
        means[idx] = comps[0]
    else:
        w = None
        if cfg.mu_weights is not None:
            w = np.asarray(cfg.mu_weights, dtype=float)
            w = w / w.sum()
        means[idx] = comps[gen.choice(len(comps), size=idx.size, p=w)]
    return means


def _signal(means):
    # a nonnull row whose drawn mean is zero is indistinguishable from a null
    return np.any(means != 0, axis=1)


def contaminate(x1, rng):
    """Add an independent standard normal draw to each statistic."""
    gen = as_generator(rng)
    x1 = np.asarray(x1, dtype=float)
    out = x1 + gen.standard_normal(x1.shape)
    return float(out) if out.ndim == 0 else out


def _cov(rho):
    return np.array([[1.0, rho], [rho, 1.0]])


def gen_example1(cfg: SimConfig, rng) -> PValueTable:
    """Right-sided z tests on bivariate normal statistics."""
    if cfg.example != 1:
        raise ConfigError("gen_example1 needs example = 1")
    gen = as_generator(rng)
    mask = nonnull_mask(cfg.m, cfg.pi0, gen)
    means = _component_means(cfg, mask, gen)
    x = sample_bivariate_normal(gen, (0.0, 0.0), _cov(cfg.rho), size=cfg.m) + means
    if cfg.contaminate:
        x[:, 0] = contaminate(x[:, 0], gen)
    return PValueTable(special.ndtr(-x[:, 0]), special.ndtr(-x[:, 1]), truth=_signal(means))


def gen_example2(cfg: SimConfig, rng) -> PValueTable:
    """Right-sided tests on bivariate t statistics, exact t marginal p-values."""
    if cfg.example != 2:
        raise ConfigError("gen_example2 needs example = 2")
    gen = as_generator(rng)
    mask = nonnull_mask(cfg.m, cfg.pi0, gen)
    means = _component_means(cfg, mask, gen)
    x = sample_bivariate_t(gen, (0.0, 0.0), _cov(cfg.rho), cfg.df, size=cfg.m) + means
    if cfg.contaminate:
        x[:, 0] = contaminate(x[:, 0], gen)
    p1 = student_t_cdf(-x[:, 0], cfg.df)
    p2 = student_t_cdf(-x[:, 1], cfg.df)
    return PValueTable(p1, p2, truth=_signal(means))


def example3_clusters(m: int) -> np.ndarray:
    """Nonnull mask with three signal blocks.

    At ``m = 10000`` the blocks are rows 1000-1999, 5000-5999 and
    8000-8999 (0-based); other sizes scale the boundaries proportionally.
    """
    mask = np.zeros(m, dtype=bool)
    for lo, hi in ((0.1, 0.2), (0.5, 0.6), (0.8, 0.9)):
        mask[int(round(lo * m)):int(round(hi * m))] = True
    return mask


def gen_example3(cfg: SimConfig, rng) -> PValueTable:
    """Serially clustered signals.

    Independent one-sided z tests; each nonnull mean is drawn uniformly from
    ``cfg.mu``. The preliminary p-value of row i averages the primary
    p-values of rows i-1 and i+1, repeating the boundary row at the edges.
    ``cfg.pi0`` is ignored: the cluster layout fixes the null proportion.
    """
    if cfg.example != 3:
        raise ConfigError("gen_example3 needs example = 3")
    if cfg.m < 3:
        raise ConfigError("example 3 needs m >= 3")
    gen = as_generator(rng)
    mask = example3_clusters(cfg.m)
    signals = np.asarray([c[0] for c in cfg.mu])
    mu = np.zeros(cfg.m)
    mu[mask] = signals[gen.integers(0, signals.size, size=int(mask.sum()))]
    z = gen.standard_normal(cfg.m) + mu
    p2 = special.ndtr(-z)
    left = np.concatenate(([p2[0]], p2[:-1]))
    right = np.concatenate((p2[1:], [p2[-1]]))
    return PValueTable((left + right) / 2.0, p2, truth=mu != 0)


def gen_example4(cfg: SimConfig, rng) -> PValueTable:
    """Two-sample comparisons with a variance-based preliminary p-value.

    Each row has two groups of ``cfg.group_size`` unit-variance normal
    observations; nonnull rows shift the second group by ``cfg.mu``. The
    primary p-value is the two-sided pooled t test. The preliminary one is
    the upper chi-square tail of the total sum of squares about the grand
    mean, which under the null is chi-square with ``2n - 1`` degrees of
    freedom and independent of the t statistic.
    """
    if cfg.example != 4:
        raise ConfigError("gen_example4 needs example = 4")
    gen = as_generator(rng)
    n = cfg.group_size
    mask = nonnull_mask(cfg.m, cfg.pi0, gen)
    effect = _component_means(cfg, mask, gen)[:, 0]
    a = gen.standard_normal((cfg.m, n))
    b = gen.standard_normal((cfg.m, n)) + effect[:, None]
    ma, mb = a.mean(axis=1), b.mean(axis=1)
    within = ((a - ma[:, None]) ** 2).sum(axis=1) + ((b - mb[:, None]) ** 2).sum(axis=1)
    dof = 2 * n - 2
    t = (ma - mb) / np.sqrt(within / dof * 2.0 / n)
    p2 = 2.0 * student_t_cdf(-np.abs(t), dof)
    grand = (ma + mb) / 2.0
    total = within + n * ((ma - grand) ** 2 + (mb - grand) ** 2)
    # upper tail computed directly to keep precision for large sums of squares
    p1 = special.chdtrc(cfg.sse_df, total)
    return PValueTable(np.clip(p1, 0.0, 1.0), np.clip(p2, 0.0, 1.0), truth=effect != 0)


_GENERATORS = {1: gen_example1, 2: gen_example2, 3: gen_example3, 4: gen_example4}


def generate(cfg: SimConfig, rng) -> PValueTable:
    return _GENERATORS[cfg.example](cfg, rng)
