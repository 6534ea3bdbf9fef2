"""Replication engine, FDP/power bookkeeping and result serialization."""
from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..baselines import bh, mean_filter, storey, two_stage, weighted_bh
from ..estimation import DecisionReport, run_sim_procedure
from ..numeric import RngStream
from .config import SimConfig
from .generators import generate

__all__ = [
    "fdp_power",
    "run_procedure",
    "run_replication",
    "replicate",
    "SimSummary",
    "RECORD_FIELDS",
    "records_to_csv",
    "aggregate",
    "default_workers",
]

RECORD_FIELDS = ("example", "procedure", "alpha", "rep", "fdp", "power", "theta_hat",
                 "pi0_hat", "threshold", "n_rejected", "scenario")

NAN = float("nan")


def fdp_power(report, truth) -> tuple[float, float]:
    """``V / max(R, 1)`` and ``S / m1`` (NaN when there are no nonnulls)."""
    if truth is None:
        raise ValueError("ground-truth labels are required")
    truth = np.asarray(truth, dtype=bool)
    rejected = np.asarray(report.rejected if hasattr(report, "rejected") else report, dtype=int)
    r = rejected.size
    s = int(truth[rejected].sum()) if r else 0
    v = r - s
    m1 = int(truth.sum())
    return v / max(r, 1), (s / m1 if m1 else NAN)


def run_procedure(name: str, table, alpha: float, cfg: SimConfig):
    """Apply one named procedure to a table."""
    if name in ("sim1", "sim2"):
        method = "parametric" if name == "sim1" else "nonparametric"
        return run_sim_procedure(table, alpha, cfg.alpha_prime, method, cfg.theta_points)
    if name == "storey":
        return storey(table.p2, alpha)
    if name == "bh":
        return bh(table.p2, alpha)
    if name == "wbh":
        return weighted_bh(table, alpha, cfg.wbh_b)
    if name == "twostage":
        return two_stage(table, alpha, cfg.filter_fraction)
    if name == "meanfilter":
        return mean_filter(table.p2, alpha)
    raise ValueError(f"unknown procedure {name!r}")


def run_replication(cfg: SimConfig, rep: int) -> list[dict]:
    """Generate one table from stream ``rep`` and apply every procedure at
    every level."""
    table = generate(cfg, RngStream(cfg.master_seed, rep))
    out = []
    for alpha in cfg.alpha:
        for name in cfg.procedures:
            rpt = run_procedure(name, table, alpha, cfg)
            fdp, power = fdp_power(rpt, table.truth)
            if isinstance(rpt, DecisionReport):
                theta, pi0 = rpt.theta_hat, rpt.pi0_hat
            else:
                theta, pi0 = NAN, (NAN if rpt.pi0_hat is None else rpt.pi0_hat)
            out.append({
                "example": cfg.example, "procedure": name, "alpha": alpha, "rep": rep,
                "fdp": fdp, "power": power, "theta_hat": theta, "pi0_hat": pi0,
                "threshold": float(rpt.threshold), "n_rejected": int(rpt.n_rejected),
                "scenario": cfg.scenario,
            })
    return out


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("SIMFDR_WORKERS", "1")))
    except ValueError:
        return 1


def _run_chunk(args):
    cfg, reps = args
    return [run_replication(cfg, r) for r in reps]


@dataclass
class SimSummary:
    """Per-replication records plus per-(procedure, alpha) aggregates."""

    config: SimConfig
    records: list = field(repr=False)
    table: list = field(default_factory=list)

    def rows(self, procedure=None, alpha=None):
        return [r for r in self.records
                if (procedure is None or r["procedure"] == procedure)
                and (alpha is None or r["alpha"] == alpha)]

    def column(self, key, procedure=None, alpha=None) -> np.ndarray:
        return np.array([r[key] for r in self.rows(procedure, alpha)], dtype=float)

    def mean(self, key, procedure, alpha=None) -> float:
        alpha = self.config.alpha[0] if alpha is None else alpha
        return float(np.mean(self.column(key, procedure, alpha)))

    def to_csv(self) -> str:
        return records_to_csv(self.records)

    def to_json(self) -> str:
        payload = {"config": self.config.to_dict(), "summary": self.table}
        return dumps_json(payload)


def replicate(cfg: SimConfig, workers: int | None = None) -> SimSummary:
    """Run ``cfg.reps`` replications, stream ``k`` feeding replication ``k``.

    The result depends only on ``cfg``: chunks are merged back in
    replication order whatever the worker count.
    """
    workers = default_workers() if workers is None else max(1, int(workers))
    reps = list(range(cfg.reps))
    if workers == 1 or cfg.reps == 1:
        per_rep = [run_replication(cfg, r) for r in reps]
    else:
        chunks = [reps[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            done = list(ex.map(_run_chunk, [(cfg, c) for c in chunks]))
        by_rep = {}
        for c, res in zip(chunks, done):
            by_rep.update(zip(c, res))
        per_rep = [by_rep[r] for r in reps]
    records = [row for rows in per_rep for row in rows]
    return SimSummary(cfg, records, aggregate(records))


def _mean_se(x):
    x = np.asarray(x, dtype=float)
    x = x[~np.isnan(x)]
    if x.size == 0:
        return NAN, NAN
    se = float(np.std(x, ddof=1) / math.sqrt(x.size)) if x.size > 1 else NAN
    return float(np.mean(x)), se


def aggregate(records) -> list[dict]:
    """Mean and Monte-Carlo SE per (example, scenario, procedure, alpha),
    in order of first appearance."""
    groups = {}
    for r in records:
        key = (int(r["example"]), str(r.get("scenario", "")), r["procedure"], float(r["alpha"]))
        groups.setdefault(key, []).append(r)
    out = []
    for (example, scenario, proc, alpha), rows in groups.items():
        entry = {"example": example, "scenario": scenario, "procedure": proc, "alpha": alpha,
                 "reps": len(rows)}
        for k in ("fdp", "power", "theta_hat", "pi0_hat", "n_rejected"):
            entry[f"mean_{k}"], entry[f"se_{k}"] = _mean_se([float(r[k]) for r in rows])
        out.append(entry)
    return out


def _fmt(v):
    if isinstance(v, float):
        return "nan" if math.isnan(v) else repr(v)
    return str(v)


def records_to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(RECORD_FIELDS)
    for r in records:
        w.writerow([_fmt(r[k]) for k in RECORD_FIELDS])
    return buf.getvalue()


def _json_safe(obj):
    if isinstance(obj, float):
        return None if math.isnan(obj) or math.isinf(obj) else obj
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, np.generic):
        return _json_safe(obj.item())
    return obj


def dumps_json(obj) -> str:
    """Deterministic JSON: sorted keys, NaN written as null."""
    return json.dumps(_json_safe(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"
