#!/usr/bin/env python3
"""Equilibrium-configuration snapshots across the annealing ladder.

Thin wrapper over `mftp cool-demo`: injects one Z-error sample, cools
the feedback layer through beta*h = 0.1, 0.5, 0.8, 2.3 (J = h) and
drops a PGM + CSV grid per stage plus the post-feedback residual.

    python scripts/cooling_snapshots.py --L 16 --p 0.05 --out-dir snaps
"""

import sys

from mftp.cli import main

if __name__ == "__main__":
    args = sys.argv[1:]
    if not any(a.startswith("--engine") for a in args):
        args = ["--engine", "metropolis"] + args
    sys.exit(main(["cool-demo", *args]))
