"""Freeze the trend constants from one n = 4 run.

c0      = half the minimum of R/n over the 100-point sample at n = 4
C_upper = twice upper*n for the minimizing sigma at n = 4 (200 seeds)
c_lower = half the smaller of lower*n/log3(n) and min_j n|K & S_j| at n = 4

Usage: python3 scripts/calibrate.py [--write]
"""

import argparse
import json
from pathlib import Path

from kakeya.experiments import Calibration, ExperimentConfig, cmd_theorem, resistance_growth_minimum

TARGET = Path(__file__).resolve().parents[1] / "src" / "kakeya" / "calibration.json"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--write", action="store_true", help=f"overwrite {TARGET.name}")
    args = ap.parse_args()

    n = 4
    r_min = resistance_growth_minimum(n, 100)
    rep = cmd_theorem(ExperimentConfig(n=n))
    observed = {
        "min_R_over_n": r_min,
        "upper_times_n": rep.upper_scaled,
        "lower_times_n_over_log3n": rep.lower_scaled,
        "slab_min_times_n": rep.slab_min_scaled,
        "best_seed": rep.best_seed,
    }
    calib = Calibration(
        c0=round(r_min / 2, 6),
        C_upper=round(2 * rep.upper_scaled, 6),
        c_lower=round(min(rep.lower_scaled, rep.slab_min_scaled) / 2, 6),
        observed=observed,
    )
    print(json.dumps({"c0": calib.c0, "C_upper": calib.C_upper, "c_lower": calib.c_lower, **observed}, indent=2))
    if args.write:
        calib.dump(TARGET)
        print(f"wrote {TARGET}")


if __name__ == "__main__":
    main()
