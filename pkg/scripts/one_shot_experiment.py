"""Sweep a single harmonic over a uniform grid and report the sampling MSE."""

import argparse

from qcosamp.sampling import default_grid, mse, sweep
from qcosamp.spec import single


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--r", type=float, default=-0.2)
    ap.add_argument("--s", type=float, default=2.1)
    ap.add_argument("--points", type=int, default=33)
    ap.add_argument("--shots", type=int, default=8192)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--csv", help="optional path for the x,estimated,exact table")
    args = ap.parse_args()

    res = sweep(single(args.n, args.r, args.s), default_grid(args.points), args.shots, args.seed)
    if args.csv:
        res.to_csv(args.csv)
    print(f"points={args.points} shots={args.shots} seed={args.seed}")
    print(f"MSE = {mse(res).mse:.3e}")


if __name__ == "__main__":
    main()
