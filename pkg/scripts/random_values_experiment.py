"""Random single-component trials; prints MSE quartiles for several shot budgets."""

import argparse

from qcosamp.sampling import quartiles, random_values_trial


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--shots", type=int, nargs="+", default=[1024, 4096, 8192])
    ap.add_argument("--seed", type=int, default=2)
    args = ap.parse_args()

    print(f"{'shots':>6} {'Q1':>10} {'median':>10} {'Q3':>10}")
    for shots in args.shots:
        q1, q2, q3 = quartiles(random_values_trial(args.trials, shots, args.seed))
        print(f"{shots:>6} {q1:10.3e} {q2:10.3e} {q3:10.3e}")


if __name__ == "__main__":
    main()
