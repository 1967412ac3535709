"""Command line entry point: ``kakeya <command> [options]``.

Exit status: 0 when everything passes, 1 on a property violation, 2 on usage or
resource errors (bad arguments, empty config, KAKEYA_BUDGET exceeded).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import asdict
from fractions import Fraction
from pathlib import Path

from . import experiments as ex
from .geometry import Slab, frac_str, kakeya_family
from .percolation import INF, Subtree, resistance_bound_check, random_subtree, resistance_recursive, survival_exact, survival_mc
from .pointwise import Point, build_slice_tree
from .tree import BudgetExceeded

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def parse_seeds(text: str) -> list[int]:
    """'7', '0..199' (inclusive), or '1,5,9'."""
    try:
        if ".." in text:
            a, b = text.split("..")
            return list(range(int(a), int(b) + 1))
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad seed list {text!r}")


def parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad rational {text!r}; expected p/q")


def _common(p: argparse.ArgumentParser, seeds=True, measure=False):
    p.add_argument("--n", type=int)
    p.add_argument("--config", type=Path, help="JSON file with ExperimentConfig fields")
    p.add_argument("--out", help="output directory")
    if seeds:
        g = p.add_mutually_exclusive_group()
        g.add_argument("--seed", type=int)
        g.add_argument("--seeds", type=parse_seeds, help="'0..199', '1,2,3'")
    if measure:
        p.add_argument("--mode", choices=["auto", "exact", "sampled"])
        p.add_argument("--slices", type=int)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kakeya", description="Random sticky Kakeya sets at desk scale.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write sticky-map JSON files")
    _common(p)
    p.add_argument("--all", action="store_true", help="every labeling of T*_n instead of seeds")
    p.add_argument("--families", action="store_true", help="also write the tube family CSV per map")

    p = sub.add_parser("measure", help="area of K_sigma on a slab, per seed")
    _common(p, measure=True)
    p.add_argument("--slab", nargs=2, type=parse_fraction, metavar=("T0", "T1"),
                   default=[Fraction(1, 3), Fraction(1)])
    p.add_argument("--map", type=Path, help="measure a stored sticky-map JSON instead of seeds")

    p = sub.add_parser("percolate", help="survival and resistance of a subtree")
    _common(p)
    how = p.add_mutually_exclusive_group()
    how.add_argument("--exact", action="store_true", default=True)
    how.add_argument("--mc", action="store_true")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--tree", type=Path, help="subtree JSON; default: random subtree from --n/--p/--seed")
    p.add_argument("--p", type=float, default=1.0, help="edge retention for the random subtree")

    p = sub.add_parser("slice", help="slice tree and membership probability of one point")
    _common(p, seeds=False)
    p.add_argument("--t", type=parse_fraction, required=True)
    p.add_argument("--y", type=parse_fraction, required=True)

    p = sub.add_parser("expected", help="expected slab measure two ways")
    _common(p, measure=True)
    p.add_argument("--grid-points", type=int)

    p = sub.add_parser("theorem", help="select sigma* and measure the tubes and their doubles")
    _common(p, measure=True)

    p = sub.add_parser("verify", help="run every property suite")
    _common(p, seeds=False)
    p.add_argument("--full", action="store_true", help="acceptance-size samples instead of quick ones")
    p.add_argument("--bound-constant", type=int, help="override the constant in the survival-resistance bound")
    p.add_argument("--only", type=lambda x: x.split(","), help="comma-separated suite names")
    return ap


def make_config(args) -> ex.ExperimentConfig:
    overrides = {
        "n": args.n,
        "out": args.out,
        "seeds": [args.seed] if getattr(args, "seed", None) is not None else getattr(args, "seeds", None),
        "mode": getattr(args, "mode", None),
        "slices": getattr(args, "slices", None),
        "grid_points": getattr(args, "grid_points", None),
        "bound_constant": getattr(args, "bound_constant", None),
    }
    try:
        if args.config is not None:
            if not args.config.exists():
                raise UsageError(f"config file not found: {args.config}")
            return ex.ExperimentConfig.from_file(args.config, **overrides)
        return ex.ExperimentConfig(**{k: v for k, v in overrides.items() if v is not None})
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc))


def _emit(payload):
    print(json.dumps(payload, indent=2, sort_keys=True))


def run_generate(args, cfg) -> int:
    paths = ex.cmd_generate(cfg, all_labelings=args.all)
    if args.families:
        for path in paths:
            F = kakeya_family(ex.load_map(path))
            with open(path.with_suffix(".csv"), "w", newline="") as fh:
                csv.writer(fh, lineterminator="\n").writerows(F.to_csv_rows())
    for path in paths:
        print(path)
    return EXIT_OK


def run_measure(args, cfg) -> int:
    slab = Slab(*args.slab)
    if args.map:
        sigma = ex.load_map(args.map)
        rep = ex._measure(kakeya_family(sigma), slab, cfg)
        rows = [ex.MEASURE_HEADER, ex.measure_row(sigma.n, sigma.seed, rep)]
    else:
        rows = ex.cmd_measure(cfg, slab)
    csv.writer(sys.stdout, lineterminator="\n").writerows(rows)
    return EXIT_OK


def run_percolate(args, cfg) -> int:
    if args.tree:
        T = Subtree.from_json(args.tree.read_text())
    else:
        T = Subtree.full(cfg.n) if args.p >= 1 else random_subtree(cfg.n, args.p, cfg.seeds[0])
    R = resistance_recursive(T)
    out = {"n": T.n, "nodes": len(T), "resistance": "inf" if R == INF else frac_str(R)}
    if args.mc:
        mc = survival_mc(T, args.trials, cfg.seeds[0])
        out.update(method="mc", trials=mc.trials, successes=mc.successes, estimate=mc.estimate, stderr=mc.stderr)
    else:
        P = survival_exact(T)
        v = resistance_bound_check(T, cfg.bound_constant)
        out.update(method="exact", survival=frac_str(P), bound=frac_str(v.bound), bound_holds=v.holds)
    _emit(out)
    return EXIT_OK if out.get("bound_holds", True) else EXIT_VIOLATION


def run_slice(args, cfg) -> int:
    try:
        point = Point(args.t, args.y)
    except ValueError as exc:
        raise UsageError(str(exc))
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(ex.POINT_HEADER)
    w.writerow(ex.point_row(cfg.n, point))
    out = cfg.outdir()
    if out:
        st = build_slice_tree(cfg.n, point)
        (out / f"slice_n{cfg.n}.json").write_text(st.tree.to_json() + "\n")
    return EXIT_OK


def run_expected(args, cfg) -> int:
    rep = ex.cmd_expected(cfg)
    _emit({**asdict(rep), "relative_gap": rep.relative_gap, "E_times_n": rep.scaled})
    return EXIT_OK if rep.by_maps <= 2 / 9 else EXIT_VIOLATION


def run_theorem(args, cfg) -> int:
    if cfg.n < 3:
        raise UsageError("theorem runs need n >= 3")
    rep = ex.cmd_theorem(cfg)
    calib = cfg.constants()
    summary = rep.summary()
    bad = ex.TheoremSweep({rep.n: rep}, calib.C_upper, calib.c_lower).violations()
    summary.update(C_upper=calib.C_upper, c_lower=calib.c_lower, violations=bad)
    _emit(summary)
    return EXIT_VIOLATION if bad else EXIT_OK


def run_verify(args, cfg) -> int:
    try:
        results = ex.run_suites(cfg, quick=not args.full, only=args.only)
    except ValueError as exc:
        raise UsageError(str(exc))
    out = cfg.outdir()
    verdicts = []
    for r in results:
        verdicts.append({"suite": r.name, "passed": r.passed, "checked": r.checked, "detail": r.detail,
                         "counterexample": r.counterexample})
        print(r.line(), file=sys.stderr)
        if out and r.counterexample is not None:
            (out / f"counterexample_{r.name}.json").write_text(json.dumps(r.counterexample, indent=2, default=str) + "\n")
    if out:
        (out / "verify.json").write_text(json.dumps(verdicts, indent=2, default=str) + "\n")
    else:
        _emit(verdicts)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VIOLATION


COMMANDS = {
    "generate": run_generate,
    "measure": run_measure,
    "percolate": run_percolate,
    "slice": run_slice,
    "expected": run_expected,
    "theorem": run_theorem,
    "verify": run_verify,
}


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = make_config(args)
        return COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"kakeya: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"kakeya: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"kakeya: I/O error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
