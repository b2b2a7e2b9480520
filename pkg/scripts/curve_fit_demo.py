"""Fit a one-harmonic model to on-grid data and compare with the exhaustive oracle."""

import argparse

import numpy as np

from qcosamp.curvefit import CurveFitModel, DataSet, curve_fit, qsm_argmin, qsm_table
from qcosamp.spec import phase_value


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--r-index", type=int, default=1)
    ap.add_argument("--s-index", type=int, default=2)
    ap.add_argument("--resolution", type=int, default=2)
    ap.add_argument("--points", type=int, default=8)
    ap.add_argument("--iterations", type=int, default=3)
    ap.add_argument("--shots", type=int, default=4096)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    q = args.resolution
    r, s = phase_value(args.r_index, q), phase_value(args.s_index, q)
    x = -np.pi + 2 * np.pi * np.arange(args.points) / args.points
    data = DataSet(tuple(x), tuple((2 + np.cos(x + r) + np.cos(x + s)) / 4))
    model = CurveFitModel(1, q)

    res = curve_fit(data, 1, q, args.iterations, args.shots, args.seed)
    table = qsm_table(model, data)
    ties = qsm_argmin(model, data)
    print(f"generating phases r={r:+.4f} s={s:+.4f}")
    print(f"kept {res.kept}/{args.shots} shots after post-selection")
    for state, count in sorted(res.histogram.counts.items(), key=lambda kv: -kv[1])[:6]:
        rr, ss = model.decode(int(state, 2))
        print(f"  {state}  count={count:5d}  r={rr[0]:+.4f} s={ss[0]:+.4f}  "
              f"QSM={table[int(state, 2)]:.5f}")
    verdict = "in" if res.best_index in ties else "NOT in"
    print(f"mode {res.best_index} is {verdict} the oracle tie set {ties}")


if __name__ == "__main__":
    main()
