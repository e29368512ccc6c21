#!/usr/bin/env python3
"""Extended threshold study: the full (L, p) grid.

Runs L in {8, 10, 12, 16, 20} against p in {0.01 ... 0.05} with the
ln(L)-scaled couplings at the balanced temperature, fits the decay rate
per cell and estimates the crossing interval.  This is a multi-hour
run on one core; the CI-scale scaling check lives in
tests/test_acceptance.py (criterion 3).

    python scripts/run_extended_grid.py --trials 1000 --cycles 200 \
        --sweeps 2000 --out grid.csv --workers 4
"""

import argparse
import json
import sys

from mftp.harness import ExperimentConfig, run_sweep


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--L", default="8,10,12,16,20")
    ap.add_argument("--p", default="0.01,0.02,0.03,0.04,0.05")
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--cycles", type=int, default=200)
    ap.add_argument("--sweeps", type=int, default=2000)
    ap.add_argument("--alpha", type=float, default=1.0)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="extended_grid.csv")
    args = ap.parse_args(argv)

    config = ExperimentConfig(
        L_list=[int(x) for x in args.L.split(",")],
        p_list=[float(x) for x in args.p.split(",")],
        alpha=args.alpha, cooler="metropolis", cycles=args.cycles,
        trials=args.trials, sweeps=args.sweeps, base_seed=args.seed,
        workers=args.workers, out=args.out)
    _, summary = run_sweep(config)
    json.dump(summary, sys.stdout, indent=2)
    print()
    return 0


if __name__ == "__main__":
    sys.exit(main())
