#!/usr/bin/env python3
"""Run a single Monte Carlo cell (one model, one N, one T) from the shell.

Useful for spot-checking individual table entries without paying for a
full table sweep, e.g.:

    python scripts/run_cell.py --n 200 --t 200 --reps 1000
    python scripts/run_cell.py --n 100 --t 100 --break-panels \
        --factor-rule weak --calibration bootstrap --reps 200
"""

import argparse

from panelbreak.harness import ExperimentConfig, render_text, run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--model", default="ar1", choices=["ar1", "arma21"])
    ap.add_argument("--rho", type=float, default=0.0)
    ap.add_argument("--n", type=int, required=True)
    ap.add_argument("--t", type=int, required=True)
    ap.add_argument("--tests", nargs="+",
                    default=["ols", "wls", "tau:0.1", "tau:0.5"],
                    help="weight scheme labels")
    ap.add_argument("--estimators", nargs="+", default=["hat"],
                    choices=["hat", "check"])
    ap.add_argument("--break-panels", action="store_true",
                    help="inject U[-0.4,0.4] breaks in half the panels")
    ap.add_argument("--factor-rule", default="none",
                    choices=["none", "weak", "strong"])
    ap.add_argument("--calibration", default="asymptotic",
                    choices=["asymptotic", "bootstrap"])
    ap.add_argument("--reps", type=int, default=500)
    ap.add_argument("--boot-reps", type=int, default=200)
    ap.add_argument("--seed", type=int, default=12345)
    args = ap.parse_args()

    cfg = ExperimentConfig(
        models=[{"kind": args.model, "rho": args.rho}],
        n_list=[args.n],
        t_list=[args.t],
        tests=[
            {"scheme": s, "estimator": e}
            for s in args.tests for e in args.estimators
        ],
        delta_law={"low": -0.4, "high": 0.4} if args.break_panels else None,
        factor_rule=args.factor_rule,
        calibration=args.calibration,
        replications=args.reps,
        bootstrap_reps=args.boot_reps,
        base_seed=args.seed,
    )
    table = run_experiment(cfg)
    print(render_text(table))
    for row in table.rows:
        print(f"{row['test']:<16} {row['pct']:5.1f}% "
              f"(se {row['se']:.1f}, wall {row['wall_time']:.1f}s)")


if __name__ == "__main__":
    main()
