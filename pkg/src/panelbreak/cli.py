"""Command-line interface.

Subcommands:
  simulate        generate a synthetic panel CSV
  test            run a break test with asymptotic or bootstrap calibration
  bootstrap-test  shorthand for `test --calibration bootstrap`
  critvals        build / cache a critical-value table
  montecarlo      run a Monte Carlo rejection-table experiment from a config
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

import numpy as np

from . import harness
from .dgp import ErrorModel, gen_errors, inject_break, uniform_break_spec, add_factors
from .dgp import strong_loadings, weak_loadings
from .limitdist import load_or_build_crit_table
from .panel import load_panel, save_panel
from .teststat import run_test


def _add_test_flags(sp):
    sp.add_argument("--weights", default="ols",
                    help="ols | wls | tau:<v> (default ols)")
    sp.add_argument("--estimator", default="hat", choices=["hat", "check"])
    sp.add_argument("--functional", default="sup", choices=["sup", "integral"])
    sp.add_argument("--alpha", type=float, default=0.05)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--layout", default="rows", choices=["rows", "columns"])
    sp.add_argument("--json", action="store_true", help="emit a JSON record only")
    sp.add_argument("--reps", type=int, default=500, help="bootstrap replicates")
    sp.add_argument("--pmax", type=int, default=8)
    sp.add_argument("--hac-bandwidth", type=int, default=None)


def _run_test_cmd(args, calibration):
    layout = "panels-as-rows" if args.layout == "rows" else "panels-as-columns"
    panel = load_panel(args.input, layout=layout)
    scheme = harness.parse_scheme(args.weights, panel.n_time)
    outcome = run_test(
        panel, scheme,
        estimator_kind=args.estimator,
        functional=args.functional,
        calibration=calibration,
        alpha=args.alpha,
        seed=args.seed,
        b_reps=args.reps,
        p_max=args.pmax,
        hac_bandwidth=args.hac_bandwidth,
    )
    record = dataclasses.asdict(outcome)
    if args.json:
        print(json.dumps(record, indent=1))
        return 0
    print(f"statistic        {outcome.statistic:.6g}")
    print(f"kappa            {outcome.kappa:.6g}")
    print(f"normalized       {outcome.normalized:.6g}")
    if outcome.critical_value is not None:
        print(f"critical value   {outcome.critical_value:.6g} (alpha={outcome.alpha})")
    if outcome.p_value is not None:
        print(f"p-value          {outcome.p_value:.4g}")
    print(f"decision         {'REJECT' if outcome.decision else 'no rejection'}")
    print(json.dumps(record["metadata"]))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="panelbreak")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="generate a synthetic panel CSV")
    sim.add_argument("output")
    sim.add_argument("--model", default="ar1", choices=["ar1", "arma21"])
    sim.add_argument("--rho", type=float, default=0.0)
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--t", type=int, required=True)
    sim.add_argument("--theta", type=float, default=0.5)
    sim.add_argument("--delta-low", type=float, default=None)
    sim.add_argument("--delta-high", type=float, default=None)
    sim.add_argument("--change-fraction", type=float, default=0.5)
    sim.add_argument("--lambda-rule", default="none",
                     choices=["none", "weak", "strong"])
    sim.add_argument("--p", type=int, default=1, help="number of factors")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--layout", default="rows", choices=["rows", "columns"])

    tst = sub.add_parser("test", help="run a break test on a CSV panel")
    tst.add_argument("input")
    tst.add_argument("--calibration", default="asymptotic",
                     choices=["asymptotic", "bootstrap"])
    _add_test_flags(tst)

    bts = sub.add_parser("bootstrap-test",
                         help="run a wild-bootstrap break test on a CSV panel")
    bts.add_argument("input")
    _add_test_flags(bts)

    cv = sub.add_parser("critvals", help="build and cache a critical-value table")
    cv.add_argument("--weights", default="ols")
    cv.add_argument("--functional", default="sup", choices=["sup", "integral"])
    cv.add_argument("--grid", type=int, default=1000)
    cv.add_argument("--paths", type=int, default=10_000)
    cv.add_argument("--seed", type=int, default=0)
    cv.add_argument("--cache-dir", default=None)

    mc = sub.add_parser("montecarlo", help="run a rejection-table experiment")
    mc.add_argument("--config", required=True)
    mc.add_argument("--scale", default="desk", choices=["desk", "paper"])
    mc.add_argument("--out", default=None, help="output directory")

    args = parser.parse_args(argv)

    if args.command == "simulate":
        ss = np.random.SeedSequence(args.seed)
        err_seed, brk_seed, fac_seed = ss.spawn(3)
        panel = gen_errors(
            ErrorModel(kind=args.model, rho=args.rho), args.n, args.t, seed=err_seed
        )
        if args.delta_low is not None or args.delta_high is not None:
            low = args.delta_low if args.delta_low is not None else -0.4
            high = args.delta_high if args.delta_high is not None else 0.4
            spec = uniform_break_spec(
                args.n, theta=args.theta, low=low, high=high,
                change_fraction=args.change_fraction, seed=brk_seed,
            )
            panel = inject_break(panel, spec)
        if args.lambda_rule != "none":
            fs = (weak_loadings(args.n) if args.lambda_rule == "weak"
                  else strong_loadings(args.n))
            panel, _, _, _ = add_factors(panel, fs, seed=fac_seed)
        layout = "panels-as-rows" if args.layout == "rows" else "panels-as-columns"
        save_panel(panel, args.output, layout=layout)
        return 0

    if args.command == "test":
        return _run_test_cmd(args, args.calibration)

    if args.command == "bootstrap-test":
        return _run_test_cmd(args, "bootstrap")

    if args.command == "critvals":
        if args.weights.startswith("tau:"):
            kind, tau = "tau", float(args.weights.split(":", 1)[1])
        else:
            kind, tau = args.weights, None
        table = load_or_build_crit_table(
            kind, tau, args.functional, args.grid, args.paths, args.seed,
            args.cache_dir,
        )
        print(json.dumps(table.to_dict(), indent=1))
        return 0

    if args.command == "montecarlo":
        cfg = harness.ExperimentConfig.from_json(args.config).scaled(args.scale)
        try:
            table = harness.run_experiment(cfg)
        except harness.ReplicateFailure as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        print(harness.render_text(table))
        if args.out:
            paths = harness.emit_outputs(table, args.out)
            for p in paths:
                print(f"wrote {p}")
        return 0

    return 2


if __name__ == "__main__":
    raise SystemExit(main())
