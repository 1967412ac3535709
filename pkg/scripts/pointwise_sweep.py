"""Per-point table (tree size, level ratio, resistance, survival, exact P_n) for a range of depths.

Usage: python3 scripts/pointwise_sweep.py --out points.csv [--ns 4..12] [--points 100]
"""

import argparse
import csv

from kakeya.cli import parse_seeds
from kakeya.experiments import POINT_HEADER, point_row, point_seed
from kakeya.pointwise import random_points


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", required=True)
    ap.add_argument("--ns", type=parse_seeds, default=list(range(4, 13)))
    ap.add_argument("--points", type=int, default=100)
    args = ap.parse_args()

    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(POINT_HEADER)
        for n in args.ns:
            for p in random_points(args.points, point_seed(n)):
                w.writerow(point_row(n, p))


if __name__ == "__main__":
    main()
