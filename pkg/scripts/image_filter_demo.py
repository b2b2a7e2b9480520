"""Mean-filter a PGM (or a random image) and report agreement with a classical filter."""

import argparse

import numpy as np

from qcosamp.imaging import (WindowSpec, mean_kernel_angles, mean_kernel_filter, random_image,
                             read_pgm, window_centers, write_pgm)


def classical(theta: np.ndarray, win: WindowSpec) -> np.ndarray:
    out = theta.copy()
    hh, hw = win.height // 2, win.width // 2
    for i in window_centers(theta.shape[0], win.height, win.shift_down):
        for j in window_centers(theta.shape[1], win.width, win.shift_right):
            if i < theta.shape[0] and j < theta.shape[1]:
                out[i, j] = theta[i - hh:i - hh + win.height, j - hw:j - hw + win.width].mean()
    return out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--image", help="input PGM; a random 8x8 image when omitted")
    ap.add_argument("--window", type=int, default=2)
    ap.add_argument("--out", help="write the filtered PGM here")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    img = read_pgm(args.image) if args.image else random_image(np.random.default_rng(args.seed))
    win = WindowSpec(args.window, args.window)
    err = np.abs(mean_kernel_angles(img, win) - classical(img.angles(), win)).max()
    print(f"{img.height}x{img.width} image, {args.window}x{args.window} window: "
          f"max angle deviation {err:.2e}")
    if args.out:
        write_pgm(mean_kernel_filter(img, win), args.out)


if __name__ == "__main__":
    main()
