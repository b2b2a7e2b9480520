"""Tabulate normalized QSM^2 - MSE for the harmonic n=1, r=s=0 on x in [0, pi]."""

import argparse

import numpy as np

from qcosamp.curvefit import qsm_mse_difference


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nx", type=int, default=181)
    ap.add_argument("--ny", type=int, default=101)
    ap.add_argument("--csv", help="write the full x,y,difference grid here")
    args = ap.parse_args()

    xs, ys = np.meshgrid(np.linspace(0, np.pi, args.nx), np.linspace(0, 1, args.ny))
    d = qsm_mse_difference(xs, ys)
    if args.csv:
        np.savetxt(args.csv, np.column_stack([xs.ravel(), ys.ravel(), d.ravel()]),
                   delimiter=",", header="x,y,difference", comments="", fmt="%.17g")
    for name, mask in (("left", xs < np.pi / 2), ("right", xs >= np.pi / 2)):
        m = np.where(mask, np.abs(d), -1)
        i = np.unravel_index(np.argmax(m), d.shape)
        print(f"{name:>5} half: |difference| peaks at {abs(d[i]):.4f} "
              f"(x={xs[i]:.4f}, y={ys[i]:.3f}, signed {d[i]:+.4f})")


if __name__ == "__main__":
    main()
