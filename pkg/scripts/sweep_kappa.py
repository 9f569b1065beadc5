"""Sweep the log-gap estimators over a kappa grid and write a CSV.

    python scripts/sweep_kappa.py --n 1024 --replicas 2000 --output sweep.csv
"""
import argparse
import sys

import numpy as np

from slebubbles import cli


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lo", type=float, default=5.0)
    ap.add_argument("--hi", type=float, default=7.0)
    ap.add_argument("--points", type=int, default=5)
    ap.add_argument("--n", type=int, default=1024)
    ap.add_argument("--replicas", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--output", default=None)
    args = ap.parse_args(argv)
    grid = ",".join(f"{k:g}" for k in np.linspace(args.lo, args.hi, args.points))
    cmd = ["sweep", "--kappa-grid", grid, "--n", str(args.n), "--replicas", str(args.replicas),
           "--seed", str(args.seed), "--quantities", "log_L_gap,log_R_gap,log_overshoot"]
    if args.output:
        cmd += ["--output", args.output]
    return cli.main(cmd)


if __name__ == "__main__":
    sys.exit(main())
