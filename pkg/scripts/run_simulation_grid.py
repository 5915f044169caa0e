#!/usr/bin/env python3
"""Sweep the FWER/power simulation over a full factorial grid.

Writes one CSV row per (procedure, m, pi0, rho, scenario) cell.  The defaults
mirror the desk-scale grid used by the acceptance suite; crank --reps for
publication-quality curves.

Example:
    python3 scripts/run_simulation_grid.py --reps 1000 --seed 2024 \
        --output grid.csv
"""

import argparse
import csv
import sys
import time

from wholm import Procedure, SimulationConfig, WeightScenario, run_simulation


def parse_args():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--m", type=int, nargs="+", default=[5, 10])
    parser.add_argument("--pi0", type=float, nargs="+", default=[0.4, 0.8])
    parser.add_argument("--rho", type=float, nargs="+", default=[0.0, 0.5])
    parser.add_argument("--scenarios", nargs="+",
                        default=["S1", "S2", "S3", "S4"],
                        choices=[s.value for s in WeightScenario])
    parser.add_argument("--n", type=int, default=15)
    parser.add_argument("--mu-alt", type=float, default=0.7)
    parser.add_argument("--alpha", type=float, default=0.05)
    parser.add_argument("--reps", type=int, default=1000)
    parser.add_argument("--seed", type=int, required=True)
    parser.add_argument("--output", default="-",
                        help="output CSV path, or - for stdout")
    return parser.parse_args()


def main():
    args = parse_args()
    out = sys.stdout if args.output == "-" else open(args.output, "w",
                                                     newline="")
    writer = csv.writer(out)
    writer.writerow(["procedure", "m", "pi0", "rho", "scenario", "fwer",
                     "fwer_se", "power", "power_se", "reps", "seed"])
    t0 = time.perf_counter()
    cells = 0
    for m in args.m:
        for pi0 in args.pi0:
            for rho in args.rho:
                for name in args.scenarios:
                    config = SimulationConfig(
                        m=m, pi0=pi0, rho=rho, n=args.n, mu_alt=args.mu_alt,
                        alpha=args.alpha, reps=args.reps,
                        weight_scenario=WeightScenario(name), seed=args.seed)
                    result = run_simulation(config)
                    for proc in (Procedure.HOLM, Procedure.WHP, Procedure.WAP):
                        rec = result.records[proc]
                        writer.writerow([proc.value, m, pi0, rho, name,
                                         f"{rec.fwer:.6g}",
                                         f"{rec.fwer_se:.6g}",
                                         f"{rec.power:.6g}",
                                         f"{rec.power_se:.6g}",
                                         args.reps, args.seed])
                    cells += 1
    if out is not sys.stdout:
        out.close()
    print(f"{cells} cells in {time.perf_counter() - t0:.1f}s",
          file=sys.stderr)


if __name__ == "__main__":
    main()
