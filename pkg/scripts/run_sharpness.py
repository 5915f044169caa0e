#!/usr/bin/env python3
"""Empirical FWER at the least favorable configuration for a weight vector.

Under the least favorable configuration the familywise error rate of the
weighted step-down equals alpha exactly, so the printed estimate should land
within a few standard errors of the nominal level.

Example:
    python3 scripts/run_sharpness.py --weights 1,2,3 --reps 200000 --seed 7
"""

import argparse

from wholm import Procedure, estimate_sharpness, rng_new


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--weights", required=True,
                        help="comma-separated positive weights")
    parser.add_argument("--procedure", choices=("whp", "wap"), default="whp")
    parser.add_argument("--alpha", type=float, default=0.05)
    parser.add_argument("--reps", type=int, default=200_000)
    parser.add_argument("--seed", type=int, required=True)
    args = parser.parse_args()

    weights = [float(x) for x in args.weights.split(",") if x.strip()]
    procedure = Procedure.WHP if args.procedure == "whp" else Procedure.WAP
    estimate = estimate_sharpness(procedure, weights, len(weights),
                                  args.reps, rng_new(args.seed),
                                  alpha=args.alpha)
    half_width = 1.96 * estimate.se
    print(f"procedure={procedure.value} alpha={args.alpha} "
          f"fwer={estimate.fwer:.5f} ci95=[{estimate.fwer - half_width:.5f}, "
          f"{estimate.fwer + half_width:.5f}] reps={estimate.reps}")


if __name__ == "__main__":
    main()
