"""Run the theorem experiment for a range of depths and write one directory of outputs.

Usage: python3 scripts/theorem_sweep.py --out runs/theorem [--ns 4..8] [--seeds 200] [--slices 2000]
"""

import argparse
import csv
import logging

from kakeya.cli import parse_seeds
from kakeya.experiments import Calibration, ExperimentConfig, TheoremSweep, cmd_theorem


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", required=True)
    ap.add_argument("--ns", type=parse_seeds, default=list(range(4, 9)))
    ap.add_argument("--seeds", type=int, default=200)
    ap.add_argument("--slices", type=int, default=2000)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    calib = Calibration.load()
    reports = {}
    for n in args.ns:
        rep = cmd_theorem(ExperimentConfig(n=n, seeds=args.seeds, slices=args.slices, out=args.out))
        reports[n] = rep
        logging.info("n=%d seed*=%d upper*n=%.4f lower*n/log3n=%.4f", n, rep.best_seed, rep.upper_scaled,
                     rep.lower_scaled)

    with open(f"{args.out}/theorem_summary.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "N", "best_seed", "upper", "lower", "upper_times_n", "lower_times_n_over_log3n",
                    "slab_min_times_n", "upper_mode"])
        for n, r in reports.items():
            s = r.summary()
            w.writerow([n, s["N"], r.best_seed, s["upper"], s["lower"], f"{r.upper_scaled:.6f}",
                        f"{r.lower_scaled:.6f}", f"{r.slab_min_scaled:.6f}", r.upper_mode])

    bad = TheoremSweep(reports, calib.C_upper, calib.c_lower).violations()
    print("violations:", bad or "none")
    raise SystemExit(1 if bad else 0)


if __name__ == "__main__":
    main()
