"""Command-line interface.

Subcommands
-----------
analyze   run the single-index procedure on a CSV of bivariate p-values
simulate  run a simulation study and write per-replication records
report    aggregate replication CSVs and compare with reference values
rerun     repeat a run from its manifest

Exit codes: 0 success, 2 usage or data error, 1 internal error.
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import hashlib
import io
import json
import math
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, EstimationError
from .estimation import DEFAULT_LAMBDA_GRID, LambdaGrid, fdr_hat, run_sim_procedure
from .null_model import fit_null_cdf
from .projection import PValueTable, project_all
from .simlab.config import PROCEDURES, SimConfig
from .simlab.engine import RECORD_FIELDS, aggregate, dumps_json, replicate

__all__ = ["main", "DataError", "RunManifest", "read_pvalue_csv", "read_records_csv"]


class DataError(ValueError):
    """Malformed or out-of-range input data."""


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def _now():
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def _read_text(path) -> str:
    with open(path, newline="") as fh:
        return fh.read()


def _sha256_bytes(b: bytes) -> str:
    return hashlib.sha256(b).hexdigest()


def _sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


@dataclass
class RunManifest:
    """Everything needed to repeat a run: resolved configuration, version,
    seed, wall-clock bounds and content hashes of input and outputs."""

    command: str
    config: dict
    tool_version: str = __version__
    master_seed: int | None = None
    started: str = field(default_factory=_now)
    finished: str = ""
    input_sha256: str = ""
    outputs: dict = field(default_factory=dict)

    def finish(self, out_dir: Path, names):
        self.finished = _now()
        self.outputs = {n: _sha256_file(out_dir / n) for n in names}

    def write(self, path: Path):
        path.write_text(json.dumps(self.__dict__, indent=2, sort_keys=True) + "\n")

    @classmethod
    def read(cls, path) -> "RunManifest":
        try:
            d = json.loads(Path(path).read_text())
            return cls(**d)
        except (OSError, json.JSONDecodeError, TypeError) as exc:
            raise DataError(f"cannot read manifest {path}: {exc}") from exc


# ---------------------------------------------------------------- input files

def read_pvalue_csv(path):
    """Parse a ``p1,p2`` or ``id,p1,p2`` CSV into ``(ids, p1, p2)``."""
    try:
        text = _read_text(path)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from exc
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DataError(f"{path}: empty file") from None
    header = [h.strip() for h in header]
    if header not in (["p1", "p2"], ["id", "p1", "p2"]):
        raise DataError(f"{path}: line 1: header must be 'p1,p2' or 'id,p1,p2', got {','.join(header)!r}")
    has_id = len(header) == 3
    ids, p1, p2 = [], [], []
    for row in reader:
        line = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise DataError(f"{path}: line {line}: expected {len(header)} fields, got {len(row)}")
        try:
            a, b = float(row[-2]), float(row[-1])
        except ValueError:
            raise DataError(f"{path}: line {line}: p-values must be numbers") from None
        if not (0.0 <= a <= 1.0 and 0.0 <= b <= 1.0):
            raise DataError(f"{path}: line {line}: p-values must lie in [0, 1]")
        ids.append(row[0].strip() if has_id else str(len(ids) + 1))
        p1.append(a)
        p2.append(b)
    if not p1:
        raise DataError(f"{path}: no data rows")
    return ids, np.array(p1), np.array(p2)


def read_records_csv(path) -> list[dict]:
    """Read a per-replication CSV written by ``simulate``."""
    try:
        text = _read_text(path)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from exc
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise DataError(f"{path}: empty file")
    if tuple(rows[0]) != RECORD_FIELDS:
        raise DataError(f"{path}: header does not match the replication record layout")
    out = []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(RECORD_FIELDS):
            raise DataError(f"{path}: line {i}: expected {len(RECORD_FIELDS)} fields")
        r = dict(zip(RECORD_FIELDS, row))
        try:
            rec = {
                "example": int(r["example"]), "procedure": r["procedure"], "alpha": float(r["alpha"]),
                "rep": int(r["rep"]), "fdp": float(r["fdp"]), "power": float(r["power"]),
                "theta_hat": float(r["theta_hat"]), "pi0_hat": float(r["pi0_hat"]),
                "threshold": float(r["threshold"]), "n_rejected": int(r["n_rejected"]),
                "scenario": r["scenario"],
            }
        except ValueError:
            raise DataError(f"{path}: line {i}: malformed value") from None
        out.append(rec)
    if not out:
        raise DataError(f"{path}: no replication records")
    return out


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return "nan" if math.isnan(v) else repr(v)
    return str(v)


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(x) for x in r])


# ------------------------------------------------------------------- analyze

def _analyze(cfg: dict, out: Path) -> list[str]:
    ids, p1, p2 = read_pvalue_csv(cfg["input"])
    table = PValueTable(p1, p2, ids=ids)
    grid = LambdaGrid(tuple(cfg["lambda_grid"]))
    rpt = run_sim_procedure(table, cfg["alpha"], cfg["alpha_prime"], cfg["method"],
                            cfg["theta_points"], grid)
    flags = np.zeros(table.m, dtype=int)
    flags[rpt.rejected] = 1
    _write_csv(out / "rejections.csv", ("id", "p1", "p2", "p_theta", "rejected"),
               zip(ids, p1.tolist(), p2.tolist(), rpt.p_theta.tolist(), flags.tolist()))

    sample = project_all(table, rpt.theta_hat)
    null = fit_null_cdf(sample, cfg["method"])
    ts = np.arange(1, cfg["curve_points"] + 1) / cfg["curve_points"]
    est = np.atleast_1d(fdr_hat(ts, sample, null, rpt.pi0_hat))
    counts = np.searchsorted(np.sort(sample.values), ts, side="right")
    _write_csv(out / "fdr_curve.csv", ("t", "fdr_hat", "n_rejected"),
               zip(ts.tolist(), est.tolist(), counts.tolist()))

    summary = {
        "method": cfg["method"], "alpha": cfg["alpha"], "alpha_prime": cfg["alpha_prime"],
        "m": table.m, "theta_hat": rpt.theta_hat, "pi0_hat": rpt.pi0_hat,
        "lambda": rpt.lambda_chosen, "threshold": rpt.threshold, "n_rejections": rpt.n_rejected,
        "theta_diagnostics": [{"theta": float(t), "n_rejections": int(c)}
                              for t, c in zip(rpt.theta_grid, rpt.theta_counts)],
    }
    (out / "summary.json").write_text(dumps_json(summary))
    return ["rejections.csv", "fdr_curve.csv", "summary.json"]


def _analyze_config(args) -> dict:
    if not 0.0 < args.alpha < 1.0:
        raise ConfigError("--alpha must lie in (0, 1)")
    ap = args.alpha if args.alpha_prime is None else args.alpha_prime
    if not 0.0 < ap < 1.0:
        raise ConfigError("--alpha-prime must lie in (0, 1)")
    if args.theta_points < 2:
        raise ConfigError("--theta-points must be >= 2")
    if args.curve_points < 1:
        raise ConfigError("--curve-points must be >= 1")
    grid = DEFAULT_LAMBDA_GRID if args.lambda_grid is None else LambdaGrid.parse(args.lambda_grid)
    return {"input": str(Path(args.input).resolve()), "alpha": args.alpha, "alpha_prime": ap,
            "method": args.method, "theta_points": args.theta_points,
            "lambda_grid": list(grid.values), "curve_points": args.curve_points}


def _run_analyze(cfg: dict, out: Path) -> int:
    out.mkdir(parents=True, exist_ok=True)
    man = RunManifest("analyze", cfg)
    if not Path(cfg["input"]).is_file():
        raise DataError(f"input file not found: {cfg['input']}")
    man.input_sha256 = _sha256_file(cfg["input"])
    names = _analyze(cfg, out)
    man.finish(out, names)
    man.write(out / "manifest.json")
    return 0


# ------------------------------------------------------------------ simulate

def _parse_mu(text: str):
    comps = [tuple(float(x) for x in part.split(",") if x.strip()) for part in text.split(";") if part.strip()]
    if not comps or any(not c for c in comps):
        raise ConfigError(f"cannot parse --mu {text!r}")
    return comps[0] if len(comps) == 1 else tuple(comps)


def _scenario_label(cfg: SimConfig) -> str:
    g = lambda x: format(x, "g")
    if cfg.example in (1, 2):
        return "mu=" + ";".join(",".join(g(x) for x in c) for c in cfg.mu)
    return "mu=" + ",".join(g(c[0]) for c in cfg.mu)


def _simulate_config(args) -> SimConfig:
    try:
        alphas = tuple(float(a) for a in args.alpha.split(",") if a.strip())
    except ValueError:
        raise ConfigError(f"cannot parse --alpha {args.alpha!r}") from None
    procs = tuple(p.strip() for p in args.procedures.split(",") if p.strip())
    kw = dict(example=args.example, m=args.m, pi0=args.pi0, rho=args.rho, df=args.df,
              contaminate=args.contaminate, reps=args.reps, master_seed=args.seed, alpha=alphas,
              alpha_prime=args.alpha_prime, procedures=procs, theta_points=args.theta_points,
              allow_pure_null=args.allow_pure_null)
    if args.mu is not None:
        kw["mu"] = _parse_mu(args.mu)
    if args.mu_weights is not None:
        kw["mu_weights"] = tuple(float(w) for w in args.mu_weights.split(","))
    if args.sse_df is not None:
        if args.example != 4:
            raise ConfigError("--sse-df only applies to example 4")
        kw["sse_df"] = args.sse_df
    cfg = SimConfig(**kw)
    return cfg.replace(scenario=args.scenario if args.scenario is not None else _scenario_label(cfg))


def _run_simulate(cfg: SimConfig, out: Path, workers=None) -> int:
    out.mkdir(parents=True, exist_ok=True)
    man = RunManifest("simulate", cfg.to_dict(), master_seed=cfg.master_seed)
    man.input_sha256 = _sha256_bytes(dumps_json(cfg.to_dict()).encode())
    summary = replicate(cfg, workers)
    with open(out / "replications.csv", "w", newline="") as fh:
        fh.write(summary.to_csv())
    (out / "summary.json").write_text(summary.to_json())
    man.finish(out, ["replications.csv", "summary.json"])
    man.write(out / "manifest.json")
    return 0


# -------------------------------------------------------------------- report

def _load_reference(path=None) -> list[dict]:
    if path is None:
        text = resources.files("simfdr").joinpath("data/reference_values.json").read_text()
    else:
        text = Path(path).read_text()
    return json.loads(text)["entries"]


def _cell(x, nd=3):
    return "" if x is None or (isinstance(x, float) and math.isnan(x)) else f"{x:.{nd}f}"


def _markdown(agg: list[dict], refs: list[dict]) -> str:
    lines = ["# Simulation summary", ""]
    blocks = {}
    for e in agg:
        blocks.setdefault((e["example"], e["scenario"]), []).append(e)
    for (example, scenario), rows in blocks.items():
        procs = list(dict.fromkeys(r["procedure"] for r in rows))
        alphas = sorted({r["alpha"] for r in rows})
        by = {(r["procedure"], r["alpha"]): r for r in rows}
        lines += [f"## Example {example}" + (f" ({scenario})" if scenario else ""), ""]
        head = ["alpha"]
        for p in procs:
            head += [f"{p} FDP", f"{p} power"]
            if p in ("sim1", "sim2"):
                head.append(f"{p} theta")
        lines.append("| " + " | ".join(head) + " |")
        lines.append("|" + "---|" * len(head))
        for a in alphas:
            cells = [format(a, "g")]
            for p in procs:
                r = by.get((p, a))
                cells += [_cell(r and r["mean_fdp"]), _cell(r and r["mean_power"])]
                if p in ("sim1", "sim2"):
                    cells.append(_cell(r and r["mean_theta_hat"], 4))
            lines.append("| " + " | ".join(cells) + " |")
        lines.append("")

    checks = []
    for ref in refs:
        for e in agg:
            if (e["example"] == ref["example"] and e["procedure"] == ref["procedure"]
                    and abs(e["alpha"] - ref["alpha"]) < 1e-12
                    and (ref["scenario"] is None or ref["scenario"] == e["scenario"])):
                obs = e.get(ref["quantity"])
                if obs is None or math.isnan(obs):
                    continue
                diff = abs(obs - ref["value"])
                checks.append((e["example"], e["scenario"], ref["procedure"], ref["alpha"], ref["quantity"],
                               ref["value"], obs, diff, ref["tolerance"], diff <= ref["tolerance"]))
    if checks:
        lines += ["## Reference comparison", "",
                  "| example | scenario | procedure | alpha | quantity | reference | observed | abs diff | tolerance | result |",
                  "|---|---|---|---|---|---|---|---|---|---|"]
        for c in checks:
            lines.append(f"| {c[0]} | {c[1]} | {c[2]} | {c[3]:g} | {c[4]} | {c[5]:.4f} | {c[6]:.4f} | "
                         f"{c[7]:.4f} | {c[8]:g} | {'pass' if c[9] else 'FAIL'} |")
        lines.append("")
    return "\n".join(lines)


def _run_report(cfg: dict, out: Path) -> int:
    records = []
    for p in cfg["inputs"]:
        records += read_records_csv(p)
    agg = aggregate(records)
    out.mkdir(parents=True, exist_ok=True)
    man = RunManifest("report", cfg)
    h = hashlib.sha256()
    for p in cfg["inputs"]:
        h.update(bytes.fromhex(_sha256_file(p)))
    man.input_sha256 = h.hexdigest()
    keys = ["example", "scenario", "procedure", "alpha", "reps"] + [
        f"{s}_{k}" for k in ("fdp", "power", "theta_hat", "pi0_hat", "n_rejected") for s in ("mean", "se")]
    _write_csv(out / "aggregate.csv", keys, ([e[k] for k in keys] for e in agg))
    (out / "report.md").write_text(_markdown(agg, _load_reference(cfg.get("reference"))))
    man.finish(out, ["aggregate.csv", "report.md"])
    man.write(out / "manifest.json")
    return 0


# ------------------------------------------------------------------- parsing

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="simfdr", description="Single-index multiple testing for bivariate p-values.")
    ap.add_argument("--version", action="version", version=f"simfdr {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="analyze a CSV of bivariate p-values")
    a.add_argument("--input", required=True)
    a.add_argument("--alpha", type=float, default=0.05)
    a.add_argument("--alpha-prime", type=float, default=None)
    a.add_argument("--method", choices=("parametric", "nonparametric"), default="nonparametric")
    a.add_argument("--theta-points", type=int, default=101)
    a.add_argument("--lambda-grid", default=None, help="comma-separated values in (0, 0.5]")
    a.add_argument("--curve-points", type=int, default=1000)
    a.add_argument("--out", required=True)

    s = sub.add_parser("simulate", help="run a simulation study")
    s.add_argument("--example", type=int, choices=(1, 2, 3, 4), required=True)
    s.add_argument("--reps", type=int, default=500)
    s.add_argument("--m", type=int, default=10_000)
    s.add_argument("--pi0", type=float, default=None)
    s.add_argument("--mu", default=None, help="'a,b' pair, 'a,b;c,d' mixture, or scalar list for examples 3-4")
    s.add_argument("--mu-weights", default=None)
    s.add_argument("--rho", type=float, default=0.2)
    s.add_argument("--df", type=int, default=None)
    s.add_argument("--sse-df", type=int, default=None)
    s.add_argument("--alpha", default="0.05", help="one level or a comma-separated list")
    s.add_argument("--alpha-prime", type=float, default=None)
    s.add_argument("--procedures", default="sim1,sim2,storey",
                   help="comma list from " + ",".join(PROCEDURES))
    s.add_argument("--theta-points", type=int, default=101)
    s.add_argument("--contaminate", action="store_true")
    s.add_argument("--allow-pure-null", action="store_true")
    s.add_argument("--scenario", default=None)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int, default=None, help="worker processes (default: $SIMFDR_WORKERS or 1)")
    s.add_argument("--out", required=True)

    r = sub.add_parser("report", help="aggregate replication CSVs")
    r.add_argument("--in", dest="inputs", nargs="+", required=True)
    r.add_argument("--reference", default=None)
    r.add_argument("--out", required=True)

    m = sub.add_parser("rerun", help="repeat a run from its manifest")
    m.add_argument("--manifest", required=True)
    m.add_argument("--out", required=True)
    m.add_argument("--workers", type=int, default=None)
    return ap


def _dispatch(args) -> int:
    out = Path(args.out)
    if args.command == "analyze":
        return _run_analyze(_analyze_config(args), out)
    if args.command == "simulate":
        return _run_simulate(_simulate_config(args), out, args.workers)
    if args.command == "report":
        cfg = {"inputs": [str(Path(p).resolve()) for p in args.inputs],
               "reference": None if args.reference is None else str(Path(args.reference).resolve())}
        return _run_report(cfg, out)
    man = RunManifest.read(args.manifest)
    if man.command == "analyze":
        if not Path(man.config["input"]).is_file() or _sha256_file(man.config["input"]) != man.input_sha256:
            raise DataError("manifest input is missing or its checksum changed")
        return _run_analyze(man.config, out)
    if man.command == "simulate":
        return _run_simulate(SimConfig.from_dict(man.config), out, args.workers)
    if man.command == "report":
        return _run_report(man.config, out)
    raise DataError(f"unknown manifest command {man.command!r}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _dispatch(args)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return 2
    except (DataError, ConfigError, EstimationError) as exc:
        print(f"simfdr: error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except Exception as exc:  # pragma: no cover - reported, not swallowed
        print(f"simfdr: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
