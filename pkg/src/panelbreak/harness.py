"""Monte Carlo experiment runner reproducing the rejection tables.

Configs are plain JSON; each cell (model, N, T) runs R replications and
reports rejection percentages per test with binomial standard errors.
Replicate r of a cell uses a seed derived from (base_seed, model index,
N, T, r), so any single cell can be rerun in isolation and results are
independent of execution order.
"""

from __future__ import annotations

import csv
import io
import json
import time
import warnings
from dataclasses import dataclass, field, asdict

import numpy as np

from .bootstrap import bootstrap_statistics
from .dgp import (
    ErrorModel,
    gen_errors,
    inject_break,
    strong_loadings,
    uniform_break_spec,
    weak_loadings,
)
from .dgp import add_factors
from .estimators import OLS, POINT_TAU, WLS, WeightScheme, make_weights
from .limitdist import critical_value, load_or_build_crit_table
from .teststat import batch_statistics

SCHEMA_VERSION = 1

# warn when estimated work R * max(B,1) * N * T exceeds this many cell-units
DEFAULT_BUDGET = 5e10


def parse_scheme(label: str, t: int) -> WeightScheme:
    """'ols' | 'wls' | 'tau:<v>' -> WeightScheme for grid size T."""
    if label == OLS:
        return make_weights(OLS, t)
    if label == WLS:
        return make_weights(WLS, t)
    if label.startswith("tau:"):
        return make_weights(POINT_TAU, t, tau=float(label.split(":", 1)[1]))
    raise ValueError(f"unknown scheme label {label!r}")


@dataclass(frozen=True)
class TestSpec:
    scheme: str  # "ols" | "wls" | "tau:<v>"
    estimator: str = "hat"  # "hat" | "check"
    functional: str = "sup"

    __test__ = False  # not a pytest collectable despite the name

    @property
    def label(self) -> str:
        mark = "Vhat" if self.estimator == "hat" else "Vcheck"
        return f"{mark}[{self.scheme}]"


@dataclass
class ExperimentConfig:
    models: list  # list of {"kind": "ar1"/"arma21", "rho": float}
    n_list: list
    t_list: list
    tests: list  # list of TestSpec
    theta: float = 0.5
    delta_law: dict | None = None  # None or {"low": -0.4, "high": 0.4}
    change_fraction: float = 0.5
    factor_rule: str = "none"  # "none" | "weak" | "strong"
    calibration: str = "asymptotic"
    alpha: float = 0.05
    replications: int = 1000
    bootstrap_reps: int = 200
    base_seed: int = 12345
    grid_size: int = 1000
    n_paths: int = 10_000
    budget: float = DEFAULT_BUDGET

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("need at least one replication")
        self.tests = [
            t if isinstance(t, TestSpec) else TestSpec(**t) for t in self.tests
        ]
        for t in self.t_list:
            if t < 3:
                raise ValueError(f"T={t} below module minimum of 3")

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls(**json.load(fh))

    def scaled(self, scale: str) -> "ExperimentConfig":
        """'desk' keeps the config; 'paper' bumps R (and B) to paper scale."""
        if scale == "desk":
            return self
        if scale != "paper":
            raise ValueError(f"unknown scale {scale!r}")
        cfg = ExperimentConfig(**{**asdict_config(self), "replications": 5000,
                                  "bootstrap_reps": 500})
        return cfg


def asdict_config(cfg: ExperimentConfig) -> dict:
    d = asdict(cfg)
    d["tests"] = [asdict(t) if not isinstance(t, dict) else t for t in cfg.tests]
    return d


def model_label(m: dict) -> str:
    if m["kind"] == "arma21":
        return "ARMA"
    return f"AR({m.get('rho', 0.0):g})"


@dataclass
class RejectionTable:
    rows: list  # dicts: model, n, t, test, rejections, replications, pct, se, wall_time
    config: dict

    def cell(self, model: str, n: int, t: int, test: str) -> dict:
        for r in self.rows:
            if (r["model"], r["n"], r["t"], r["test"]) == (model, n, t, test):
                return r
        raise KeyError((model, n, t, test))


def _replicate_seed(base: int, model_idx: int, n: int, t: int, r: int):
    return np.random.SeedSequence((base, model_idx, n, t, r))


def _make_panel(model: dict, n: int, t: int, cfg: ExperimentConfig, ss):
    err_seed, brk_seed, fac_seed = ss.spawn(3)
    em = ErrorModel(kind=model["kind"], rho=model.get("rho", 0.0))
    panel = gen_errors(em, n, t, seed=err_seed)
    if cfg.delta_law is not None:
        spec = uniform_break_spec(
            n,
            theta=cfg.theta,
            low=cfg.delta_law["low"],
            high=cfg.delta_law["high"],
            change_fraction=cfg.change_fraction,
            seed=brk_seed,
        )
        panel = inject_break(panel, spec)
    if cfg.factor_rule != "none":
        fs = weak_loadings(n) if cfg.factor_rule == "weak" else strong_loadings(n)
        panel, _, _, _ = add_factors(panel, fs, seed=fac_seed)
    return panel


class ReplicateFailure(RuntimeError):
    def __init__(self, cell, r, cause):
        super().__init__(
            f"replicate {r} of cell {cell} failed ({cause}); "
            f"replay with seed tuple (base, model_idx, N, T, r)"
        )
        self.cell = cell
        self.replicate = r


def run_experiment(cfg: ExperimentConfig, cache_dir: str | None = None) -> RejectionTable:
    """Run every (model, N, T) cell and tabulate rejection percentages."""
    work = (
        cfg.replications
        * max(1, cfg.bootstrap_reps if cfg.calibration == "bootstrap" else 1)
        * max(cfg.n_list)
        * max(cfg.t_list)
        * len(cfg.models)
    )
    if work > cfg.budget:
        warnings.warn(
            f"estimated work {work:.2e} exceeds budget {cfg.budget:.2e}; "
            "this run may take a long time",
            stacklevel=2,
        )

    crit_tables = {}
    if cfg.calibration == "asymptotic":
        for ts in cfg.tests:
            key = (ts.scheme, ts.estimator, ts.functional)
            if key in crit_tables:
                continue
            if ts.estimator == "check":
                kind, tau = "oracle", None
            elif ts.scheme.startswith("tau:"):
                kind, tau = POINT_TAU, float(ts.scheme.split(":", 1)[1])
            else:
                kind, tau = ts.scheme, None
            table = load_or_build_crit_table(
                kind, tau, ts.functional, cfg.grid_size, cfg.n_paths,
                seed=0, cache_dir=cache_dir,
            )
            crit_tables[key] = critical_value(table, cfg.alpha)

    rows = []
    for mi, model in enumerate(cfg.models):
        mlabel = model_label(model)
        for n in cfg.n_list:
            for t in cfg.t_list:
                start = time.perf_counter()
                schemes = {ts.scheme: parse_scheme(ts.scheme, t) for ts in cfg.tests}
                rejections = np.zeros(len(cfg.tests), dtype=int)
                for r in range(cfg.replications):
                    ss = _replicate_seed(cfg.base_seed, mi, n, t, r)
                    try:
                        panel = _make_panel(model, n, t, cfg, ss)
                        triples = [
                            (schemes[ts.scheme], ts.estimator, ts.functional)
                            for ts in cfg.tests
                        ]
                        if cfg.calibration == "asymptotic":
                            norms = batch_statistics(panel, triples)
                            for j, ts in enumerate(cfg.tests):
                                key = (ts.scheme, ts.estimator, ts.functional)
                                if norms[j] > crit_tables[key]:
                                    rejections[j] += 1
                        else:
                            boot_seed = ss.spawn(4)[3]
                            obs, reps, _ = bootstrap_statistics(
                                panel, triples, cfg.bootstrap_reps, seed=boot_seed
                            )
                            counts = np.sum(reps >= obs[None, :], axis=0)
                            pvals = (1.0 + counts) / (cfg.bootstrap_reps + 1.0)
                            rejections += pvals < cfg.alpha
                    except Exception as exc:  # noqa: BLE001 - replay info matters
                        raise ReplicateFailure((mlabel, n, t), r, exc) from exc
                wall = time.perf_counter() - start
                for j, ts in enumerate(cfg.tests):
                    phat = rejections[j] / cfg.replications
                    rows.append({
                        "model": mlabel,
                        "n": n,
                        "t": t,
                        "test": ts.label,
                        "rejections": int(rejections[j]),
                        "replications": cfg.replications,
                        "pct": 100.0 * phat,
                        "se": 100.0 * float(
                            np.sqrt(phat * (1 - phat) / cfg.replications)
                        ),
                        "wall_time": wall,
                    })
    return RejectionTable(rows=rows, config=asdict_config(cfg))


def render_text(table: RejectionTable) -> str:
    """Paper-style layout: model blocks x (N,T) rows x test columns."""
    tests = list(dict.fromkeys(r["test"] for r in table.rows))
    out = io.StringIO()
    header = f"{'Model':<10}{'N':>6}{'T':>6}" + "".join(f"{t:>16}" for t in tests)
    out.write(header + "\n")
    out.write("-" * len(header) + "\n")
    seen = []
    for r in table.rows:
        key = (r["model"], r["n"], r["t"])
        if key not in seen:
            seen.append(key)
    for model, n, t in seen:
        cells = "".join(
            f"{table.cell(model, n, t, ts)['pct']:>16.1f}" for ts in tests
        )
        out.write(f"{model:<10}{n:>6}{t:>6}" + cells + "\n")
    return out.getvalue()


def render_csv(table: RejectionTable) -> str:
    out = io.StringIO()
    fields = ["model", "n", "t", "test", "rejections", "replications",
              "pct", "se", "wall_time"]
    writer = csv.DictWriter(out, fieldnames=fields)
    writer.writeheader()
    for r in table.rows:
        writer.writerow(r)
    return out.getvalue()


def render_json(table: RejectionTable) -> str:
    return json.dumps(
        {"schema_version": SCHEMA_VERSION, "config": table.config,
         "rows": table.rows},
        indent=1,
    )


def table_from_json(text: str) -> RejectionTable:
    payload = json.loads(text)
    return RejectionTable(rows=payload["rows"], config=payload["config"])


def emit_outputs(table: RejectionTable, out_dir, formats=("text", "json", "csv")):
    """Write the table in the requested formats; returns written paths."""
    import os

    os.makedirs(out_dir, exist_ok=True)
    renderers = {"text": ("table.txt", render_text),
                 "json": ("table.json", render_json),
                 "csv": ("table.csv", render_csv)}
    paths = []
    for fmt in formats:
        name, fn = renderers[fmt]
        path = os.path.join(out_dir, name)
        with open(path, "w") as fh:
            fh.write(fn(table))
        paths.append(path)
    return paths
