#!/usr/bin/env python3
"""Precompute and cache critical-value tables for the named weight schemes.

Run this once before large asymptotic-calibration experiments so that the
Gaussian-process simulation cost is not paid inside the first replicate.
"""

import argparse

from panelbreak import load_or_build_crit_table

SCHEMES = [
    ("ols", None),
    ("wls", None),
    ("tau", 0.1),
    ("tau", 0.5),
    ("oracle", None),  # calibration kernel for the change-adjusted tests
]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid", type=int, default=1000)
    ap.add_argument("--paths", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--cache-dir", default=None)
    ap.add_argument("--functional", default="sup", choices=["sup", "integral"])
    args = ap.parse_args()

    for kind, tau in SCHEMES:
        table = load_or_build_crit_table(
            kind, tau, args.functional, args.grid, args.paths, args.seed,
            args.cache_dir,
        )
        label = kind if tau is None else f"{kind}:{tau}"
        print(f"{label:<10} 5% critical value {table.quantiles[0.05]:.4f}")


if __name__ == "__main__":
    main()
