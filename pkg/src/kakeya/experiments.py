"""Desk-scale experiments: the expected-measure argument, selection of a good sigma,
the two-sided theorem check, and the property suites behind ``kakeya verify``.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from . import oracles
from .geometry import Slab, frac_str, kakeya_family, theorem_tubes
from .measure import (
    EXACT_TUBE_LIMIT,
    AreaReport,
    IntervalUnion,
    area,
    exact_area,
    floor_log3,
    slab_measure_check,
    sampled_area,
    slab_uniformity,
    verify_uniformity,
)
from .percolation import (
    INF,
    Subtree,
    resistance_bound_check,
    random_subtree,
    resistance_network,
    resistance_recursive,
    survival_exact,
    survival_mc,
)
from .pointwise import (
    LEVEL_COUNT_CONSTANT,
    Point,
    build_slice_tree,
    membership_decay_check,
    survival_bound_check,
    membership_direct,
    membership_probability_exact,
    membership_tree,
    point_record,
    random_points,
)
from .sticky import EdgeLabeling, StickyMap, enumerate_all_labelings, sample_sticky_map
from .tree import BudgetExceeded

log = logging.getLogger(__name__)

UPPER_SLAB = Slab(Fraction(1, 3), Fraction(1))
POINT_BOX_AREA = Fraction(2, 3) * Fraction(4, 3)


def point_seed(n: int) -> int:
    """Seed of the random point sample used at depth n."""
    return 1000 + n


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class Calibration:
    """Constants frozen from the n = 4 calibration run (see scripts/calibrate.py)."""

    c0: float
    C_upper: float
    c_lower: float
    version: int = 1
    calibrated_at_n: int = 4
    observed: dict = field(default_factory=dict)

    @classmethod
    def load(cls, path: Optional[Path] = None) -> "Calibration":
        if path is None:
            text = resources.files("kakeya").joinpath("calibration.json").read_text()
        else:
            text = Path(path).read_text()
        data = json.loads(text)
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in known})

    def dump(self, path: Path) -> None:
        Path(path).write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + "\n")


@dataclass
class ExperimentConfig:
    n: int = 4
    seeds: list[int] = field(default_factory=lambda: list(range(200)))
    slices: int = 2000
    mode: str = "auto"
    exact_limit: int = EXACT_TUBE_LIMIT
    out: Optional[str] = None
    grid_points: int = 1000
    points: int = 100
    calibration: Optional[str] = None
    bound_constant: int = 12

    def __post_init__(self):
        if isinstance(self.seeds, int):
            self.seeds = list(range(self.seeds))
        self.seeds = [int(x) for x in self.seeds]
        if not self.seeds:
            raise ValueError("no seeds")
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.slices < 2:
            raise ValueError("need at least two slices")
        if self.mode not in ("auto", "exact", "sampled"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.bound_constant <= 0:
            raise ValueError("constants must be positive")

    @classmethod
    def from_file(cls, path, **overrides) -> "ExperimentConfig":
        text = Path(path).read_text().strip()
        if not text:
            raise ValueError(f"empty config file {path}")
        data = json.loads(text)
        if not isinstance(data, dict) or not data:
            raise ValueError(f"config file {path} has no settings")
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)

    def constants(self) -> Calibration:
        return Calibration.load(self.calibration)

    def outdir(self) -> Optional[Path]:
        if self.out is None:
            return None
        p = Path(self.out)
        p.mkdir(parents=True, exist_ok=True)
        return p


def _measure(F, slab, cfg: ExperimentConfig) -> AreaReport:
    return area(F, slab, mode=cfg.mode, slices=cfg.slices, exact_limit=cfg.exact_limit)


def _write_csv(path: Path, rows) -> None:
    with open(path, "w", newline="") as fh:
        csv.writer(fh, lineterminator="\n").writerows(rows)


def _write_json(path: Path, payload) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# generate / measure


def map_filename(n: int, seed) -> str:
    return f"sigma_n{n}_seed{seed}.json"


def cmd_generate(cfg: ExperimentConfig, all_labelings: bool = False) -> list[Path]:
    """Write one sticky-map JSON per seed (or per labeling with ``all_labelings``)."""
    out = cfg.outdir() or Path(".")
    paths = []
    if all_labelings:
        for i, lab in enumerate(enumerate_all_labelings(cfg.n)):
            p = out / f"sigma_n{cfg.n}_all{i}.json"
            p.write_text(lab.to_json() + "\n")
            paths.append(p)
        return paths
    for seed in cfg.seeds:
        p = out / map_filename(cfg.n, seed)
        p.write_text(sample_sticky_map(cfg.n, seed).labeling.to_json() + "\n")
        paths.append(p)
    return paths


def load_map(path) -> StickyMap:
    return StickyMap(EdgeLabeling.from_json(Path(path).read_text()))


MEASURE_HEADER = ["n", "seed", "slab_t0", "slab_t1", "mode", "slices", "area_num", "area_den", "area"]


def measure_row(n, seed, rep: AreaReport) -> list:
    return [n, seed, frac_str(rep.slab.t0), frac_str(rep.slab.t1), rep.mode,
            rep.slices if rep.slices is not None else "", rep.value.numerator, rep.value.denominator,
            f"{float(rep.value):.12g}"]


def cmd_measure(cfg: ExperimentConfig, slab: Slab) -> list[list]:
    rows = [MEASURE_HEADER]
    for seed in cfg.seeds:
        F = kakeya_family(sample_sticky_map(cfg.n, seed))
        rows.append(measure_row(cfg.n, seed, _measure(F, slab, cfg)))
    out = cfg.outdir()
    if out:
        _write_csv(out / f"measure_n{cfg.n}.csv", rows)
    return rows


POINT_HEADER = ["n", "t", "y", "tree_size", "max_level_ratio", "R", "survival", "P_exact"]


def point_row(n: int, point: Point) -> list:
    rec = point_record(n, point)
    R = "inf" if rec.resistance == INF else frac_str(rec.resistance)
    return [n, frac_str(point.t), frac_str(point.y), rec.tree_size, f"{rec.max_level_ratio:.6g}", R,
            frac_str(rec.survival), frac_str(rec.p_exact)]


# ---------------------------------------------------------------------------
# expectation


@dataclass
class ExpectedReport:
    n: int
    by_points: Optional[float]
    by_maps: float
    grid_points: int
    seeds: int

    @property
    def relative_gap(self) -> Optional[float]:
        if self.by_points is None:
            return None
        return abs(self.by_points - self.by_maps) / self.by_maps

    @property
    def scaled(self) -> float:
        """E * n."""
        return self.by_maps * self.n


def quasi_random_points(count: int, seed: int = 0, denominator: int = 2**20) -> list[Point]:
    """Scrambled Halton points in (1/3, 1) x [0, 4/3], rounded to exact rationals."""
    from scipy.stats import qmc

    u = qmc.Halton(d=2, scramble=True, seed=seed).random(count)
    lo = denominator // 3 + 1
    tn = np.clip(np.floor(lo + u[:, 0] * (denominator - lo)), lo, denominator - 1).astype(np.int64)
    yn = np.floor(u[:, 1] * (4 * denominator // 3)).astype(np.int64)
    return [Point(Fraction(int(a), denominator), Fraction(int(b), denominator)) for a, b in zip(tn, yn)]


def cmd_expected(cfg: ExperimentConfig) -> ExpectedReport:
    """E|K_sigma & ([1/3, 1] x R)| two ways: integrating P_n(t, y), and averaging over sampled sigma."""
    by_points = None
    try:
        pts = quasi_random_points(cfg.grid_points, seed=cfg.n)
        mean = sum((membership_probability_exact(cfg.n, p) for p in pts), Fraction(0)) / len(pts)
        by_points = float(mean * POINT_BOX_AREA)
    except (BudgetExceeded, MemoryError) as exc:
        log.warning("point integration skipped: %s", exc)
    vals = [_measure(kakeya_family(sample_sticky_map(cfg.n, s)), UPPER_SLAB, cfg).estimate for s in cfg.seeds]
    rep = ExpectedReport(cfg.n, by_points, float(np.mean(vals)), cfg.grid_points, len(cfg.seeds))
    out = cfg.outdir()
    if out:
        _write_json(out / f"expected_n{cfg.n}.json", {**asdict(rep), "relative_gap": rep.relative_gap,
                                                     "E_times_n": rep.scaled})
    return rep


# ---------------------------------------------------------------------------
# theorem


@dataclass
class TheoremReport:
    n: int
    best_seed: int
    upper: Fraction
    lower: Fraction
    proxy: Fraction
    slabs: dict
    upper_mode: str
    lower_mode: str
    per_seed: list = field(default_factory=list)

    @property
    def N(self) -> int:
        return 3**self.n

    @property
    def upper_scaled(self) -> float:
        """upper * n."""
        return float(self.upper) * self.n

    @property
    def lower_scaled(self) -> float:
        """lower * n / log3 n."""
        return float(self.lower) * self.n / math.log(self.n, 3)

    @property
    def slab_min_scaled(self) -> float:
        return min(self.n * float(v) for v in self.slabs.values())

    def summary(self) -> dict:
        logN = math.log(self.N)
        return {
            "n": self.n,
            "N": self.N,
            "best_seed": self.best_seed,
            "upper": frac_str(self.upper),
            "lower": frac_str(self.lower),
            "proxy_K_over_unit_slab": frac_str(self.proxy),
            "upper_decimal": float(self.upper),
            "lower_decimal": float(self.lower),
            "upper_times_n": self.upper_scaled,
            "lower_times_n_over_log3n": self.lower_scaled,
            "upper_times_logN": float(self.upper) * logN,
            "lower_times_logN_over_loglogN": float(self.lower) * logN / math.log(logN),
            "slab_measures": {str(j): frac_str(v) for j, v in self.slabs.items()},
            "slab_min_times_n": self.slab_min_scaled,
            "upper_mode": self.upper_mode,
            "lower_mode": self.lower_mode,
        }


def theorem_for_map(sigma: StickyMap, cfg: ExperimentConfig, upper: Optional[AreaReport] = None) -> TheoremReport:
    """All theorem quantities for one sigma; re-derivable from its stored map file alone."""
    P, P2 = theorem_tubes(sigma)
    up = upper or _measure(P, None, cfg)
    low = _measure(P2, None, cfg)
    proxy = _measure(kakeya_family(sigma), None, cfg)
    l11 = slab_measure_check(sigma, mode=cfg.mode, slices=cfg.slices)
    return TheoremReport(sigma.n, sigma.seed, up.value, low.value, proxy.value,
                         {j: r.value for j, r in l11.slab_measures.items()}, up.mode, low.mode)


PLOT_SCRIPT = '''"""Plot upper*n and lower*n/log3(n) from theorem_n*.json files in this directory."""
import glob, json
import matplotlib.pyplot as plt

rows = sorted((json.load(open(p)) for p in glob.glob("theorem_n*.json")), key=lambda r: r["n"])
ns = [r["n"] for r in rows]
plt.plot(ns, [r["upper_times_n"] for r in rows], "o-", label="upper * n")
plt.plot(ns, [r["lower_times_n_over_log3n"] for r in rows], "s-", label="lower * n / log3 n")
plt.xlabel("n"); plt.legend(); plt.savefig("theorem.png", dpi=120)
'''


def cmd_theorem(cfg: ExperimentConfig) -> TheoremReport:
    """Pick the seed minimizing |union P_j|, then measure the doubles for that sigma."""
    if cfg.n < 3:
        raise ValueError("theorem runs need n >= 3")
    per_seed = []
    best = None
    for seed in cfg.seeds:
        sigma = sample_sticky_map(cfg.n, seed)
        P, _ = theorem_tubes(sigma)
        rep = _measure(P, None, cfg)
        per_seed.append((seed, rep))
        if best is None or rep.value < best[1].value:
            best = (seed, rep)
    seed, up = best
    sigma = sample_sticky_map(cfg.n, seed)
    report = theorem_for_map(sigma, cfg, upper=up)
    report.per_seed = [(s, r.value) for s, r in per_seed]
    out = cfg.outdir()
    if out:
        _write_csv(out / f"theorem_seeds_n{cfg.n}.csv",
                   [MEASURE_HEADER] + [measure_row(cfg.n, s, r) for s, r in per_seed])
        _write_json(out / f"theorem_n{cfg.n}.json", report.summary())
        (out / map_filename(cfg.n, seed)).write_text(sigma.labeling.to_json() + "\n")
        (out / "plot_theorem.py").write_text(PLOT_SCRIPT)
    return report


# ---------------------------------------------------------------------------
# property suites


@dataclass
class SuiteResult:
    name: str
    passed: bool
    checked: int
    detail: dict = field(default_factory=dict)
    counterexample: Optional[dict] = None

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.checked} checked {self.detail}"


def suite_percolation_oracle(random_count: int = 500, max_edges: int = 12, seed: int = 0) -> SuiteResult:
    """survival_exact against brute-force enumeration on small subtrees."""
    trees = [T for n in range(3) for T in oracles.all_subtrees(n)]
    rng = np.random.default_rng(seed)
    for _ in range(random_count):
        n = int(rng.integers(1, 7))
        T = random_subtree(n, float(rng.uniform(0.3, 0.9)), int(rng.integers(2**32)))
        trees.append(truncate_subtree(T, max_edges))
    for T in trees:
        a, b = survival_exact(T), oracles.brute_force_survival(T)
        if a != b:
            return SuiteResult("percolation-oracle", False, len(trees),
                               counterexample={"tree": json.loads(T.to_json()), "exact": str(a), "brute": str(b)})
    return SuiteResult("percolation-oracle", True, len(trees))


def truncate_subtree(T: Subtree, max_edges: int) -> Subtree:
    """First ``max_edges`` edges in depth-first order; a preorder prefix stays root-connected."""
    keep = sorted(T.nodes(), key=lambda v: v.digits)[: max_edges + 1]
    return Subtree.from_nodes(T.n, keep)


def suite_resistance_dual(random_count: int = 1000, max_n: int = 8, seed: int = 1) -> SuiteResult:
    trees = [Subtree.full(n) for n in range(5)]
    rng = np.random.default_rng(seed)
    for _ in range(random_count):
        n = int(rng.integers(1, max_n + 1))
        trees.append(random_subtree(n, float(rng.uniform(0.25, 0.8)), int(rng.integers(2**32))))
    for T in trees:
        a, b = resistance_recursive(T), resistance_network(T)
        if a != b:
            return SuiteResult("resistance-dual", False, len(trees),
                               counterexample={"tree": json.loads(T.to_json()), "recursive": str(a), "network": str(b)})
    return SuiteResult("resistance-dual", True, len(trees))


def suite_resistance_bound(count: int = 1000, max_n: int = 10, constant: int = 12, seed: int = 2) -> SuiteResult:
    """P(T) <= constant / (2 + R(T)) on random subtrees."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    checked = 0
    extra = [Subtree.full(n) for n in range(5)] + [Subtree.chain(n) for n in range(1, max_n + 1)]
    for i in range(count + len(extra)):
        if i < len(extra):
            T = extra[i]
        else:
            n = int(rng.integers(1, max_n + 1))
            T = random_subtree(n, float(rng.uniform(0.25, 0.8)), int(rng.integers(2**32)))
        v = resistance_bound_check(T, constant)
        checked += 1
        worst = max(worst, v.ratio)
        if not v.holds:
            return SuiteResult("resistance-bound", False, checked, {"constant": constant},
                               counterexample={"tree": json.loads(T.to_json()), "P": str(v.survival),
                                               "R": str(v.resistance), "bound": str(v.bound)})
    return SuiteResult("resistance-bound", True, checked, {"constant": constant, "max_P_times_2_plus_R": worst})


def suite_survival_bound(ns: Sequence[int] = range(4, 9), count: int = 100, exhaustive_points: int = 4) -> SuiteResult:
    checked = 0
    for n in ns:
        for p in random_points(count, point_seed(n)):
            v = survival_bound_check(n, p)
            checked += 1
            if not v.holds:
                return SuiteResult("survival-bound", False, checked,
                                   counterexample={"n": n, "t": str(p.t), "y": str(p.y)})
    for n in (1, 2):
        for p in random_points(exhaustive_points, 77 + n):
            a = membership_probability_exact(n, p)
            b = oracles.exhaustive_membership_probability(n, p)
            checked += 1
            if a != b:
                return SuiteResult("survival-bound", False, checked,
                                   counterexample={"n": n, "t": str(p.t), "y": str(p.y), "exact": str(a),
                                                   "exhaustive": str(b)})
    return SuiteResult("survival-bound", True, checked)


def suite_level_counts(count: int = 500, max_n: int = 10, seed: int = 3) -> SuiteResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i, p in enumerate(random_points(count, seed)):
        n = int(rng.integers(1, max_n + 1))
        counts = build_slice_tree(n, p).level_counts()
        worst = max(worst, max(c / 2**k for k, c in enumerate(counts)))
        if any(c > LEVEL_COUNT_CONSTANT * 2**k for k, c in enumerate(counts)):
            return SuiteResult("level-counts", False, i + 1,
                               counterexample={"n": n, "t": str(p.t), "y": str(p.y), "counts": counts})
    return SuiteResult("level-counts", True, count, {"max_count_over_2^k": worst})


def resistance_growth_minimum(n: int, count: int = 100) -> float:
    """min over the depth-n point sample of R(slice tree) / n (points with empty trees skipped)."""
    vals = []
    for p in random_points(count, point_seed(n)):
        R = resistance_recursive(build_slice_tree(n, p).tree)
        if R != INF:
            vals.append(float(R) / n)
    return min(vals) if vals else INF


def suite_resistance_growth(c0: float, ns: Sequence[int] = range(4, 13), count: int = 100) -> SuiteResult:
    mins = {n: resistance_growth_minimum(n, count) for n in ns}
    bad = {n: m for n, m in mins.items() if m < c0}
    return SuiteResult("resistance-growth", not bad, len(mins) * count, {"c0": c0, "min_R_over_n": mins},
                       counterexample={"below_floor": bad} if bad else None)


def membership_decay_maximum(n: int, count: int = 50) -> float:
    return membership_decay_check(n, random_points(count, point_seed(n))).max_scaled


def suite_membership_decay(ns: Sequence[int] = range(4, 10), count: int = 50, growth: float = 2.0) -> SuiteResult:
    maxima = {n: membership_decay_maximum(n, count) for n in ns}
    first, last = maxima[min(ns)], maxima[max(ns)]
    ok = last <= growth * first
    return SuiteResult("membership-decay", ok, len(maxima) * count, {"max_n_times_P": maxima, "growth": growth},
                       counterexample=None if ok else {"first": first, "last": last})


def suite_measure_oracle(count: int = 20, max_n: int = 6, slices: int = 10_000, rel_tol: float = 1e-3,
                         raster_max_n: int = 3, seed: int = 4) -> SuiteResult:
    rng = np.random.default_rng(seed)
    worst_rel = 0.0
    worst_raster = 0.0
    checked = 0
    slabs = [Slab(0, 1), UPPER_SLAB, Slab(Fraction(1, 9), Fraction(1, 3))]
    for i in range(count):
        n = int(rng.integers(2, max_n + 1))
        sigma = sample_sticky_map(n, int(rng.integers(2**32)))
        F = kakeya_family(sigma)
        slab = slabs[i % len(slabs)]
        ex = exact_area(F, slab).value
        sa = sampled_area(F, slab, slices).value
        rel = float(abs(ex - sa) / ex)
        worst_rel = max(worst_rel, rel)
        checked += 1
        if rel > rel_tol:
            return SuiteResult("measure-oracle", False, checked, counterexample={
                "n": n, "seed": sigma.seed, "slab": [str(slab.t0), str(slab.t1)], "exact": str(ex), "sampled": str(sa)})
    h = 3.0**-12
    for n in range(1, raster_max_n + 1):
        for seed_ in range(3):
            sigma = sample_sticky_map(n, seed_)
            F = kakeya_family(sigma)
            for slab in slabs:
                ex = float(exact_area(F, slab).value)
                r = oracles.raster_area(F, slab, h_y=h)
                row_mass = h * float(slab.length)
                worst_raster = max(worst_raster, abs(ex - r) / row_mass)
                checked += 1
                if abs(ex - r) > row_mass:
                    return SuiteResult("measure-oracle", False, checked, counterexample={
                        "n": n, "seed": seed_, "slab": [str(slab.t0), str(slab.t1)], "exact": ex, "raster": r})
    return SuiteResult("measure-oracle", True, checked,
                       {"max_rel_exact_vs_sampled": worst_rel, "max_raster_error_in_rows": worst_raster})


def suite_uniformity(random_count: int = 500, maps: int = 100, n: int = 4, seed: int = 5) -> SuiteResult:
    rng = np.random.default_rng(seed)
    checked = 0
    for _ in range(random_count):
        K = int(rng.integers(1, 9))
        den = int(rng.integers(1, 30))
        alpha_units = int(rng.integers(1, 8))
        sets = []
        for _ in range(K):
            # alpha split into up to three pieces at random offsets
            cuts = sorted(rng.integers(0, alpha_units + 1, size=int(rng.integers(0, 3))).tolist())
            pieces = np.diff([0] + cuts + [alpha_units]).tolist()
            pos, ivs = int(rng.integers(0, 40)), []
            for ln in pieces:
                if ln:
                    ivs.append((Fraction(pos, den), Fraction(pos + ln, den)))
                    pos += ln + int(rng.integers(1, 6))
            sets.append(IntervalUnion(ivs))
        alpha = sets[0].length
        total = sum((A & B).length for A in sets for B in sets)
        m = total / (K * alpha) * Fraction(int(rng.integers(100, 300)), 100)
        v = verify_uniformity(sets, m)
        checked += 1
        if not v.hypothesis_holds or v.violated:
            return SuiteResult("uniformity", False, checked,
                               counterexample={"sets": [s.intervals for s in sets], "m": str(m)})
    for s in range(maps):
        sigma = sample_sticky_map(n, s)
        for j in (1, 2):
            v = slab_uniformity(sigma, Slab.triadic(j))
            checked += 1
            if v.violated:
                return SuiteResult("uniformity", False, checked,
                                   counterexample={"n": n, "seed": s, "slab": j})
    return SuiteResult("uniformity", True, checked)


def suite_membership(count: int = 10_000, max_n: int = 6, seed: int = 6) -> SuiteResult:
    rng = np.random.default_rng(seed)
    cache = {}
    pts = random_points(count, seed)
    inside = 0
    for i, p in enumerate(pts):
        n = int(rng.integers(1, max_n + 1))
        s = int(rng.integers(0, 50))
        if (n, s) not in cache:
            sigma = sample_sticky_map(n, s)
            cache[(n, s)] = (sigma, kakeya_family(sigma))
        sigma, F = cache[(n, s)]
        if i % 2:
            # half the points are aimed at a tube center line so both outcomes occur
            k = int(rng.integers(0, len(F)))
            T = F.tube(k)
            p = Point(p.t, T.intercept + T.width / 2 + p.t * T.slope + Fraction(int(rng.integers(-3, 4)), 3 ** (n + 2)))
        a = membership_direct(sigma, p, F)
        b = membership_tree(sigma, p)
        inside += a
        if a != b:
            return SuiteResult("membership-dual", False, i + 1,
                               counterexample={"n": n, "seed": s, "t": str(p.t), "y": str(p.y)})
    return SuiteResult("membership-dual", True, count, {"inside": inside})


def suite_mc(count: int = 50, trials: int = 100_000, sigmas: float = 4.0, seed: int = 7) -> SuiteResult:
    """survival_mc within ``sigmas`` binomial standard deviations of survival_exact.

    If any subtree misses, the whole suite is rerun once with independent Monte
    Carlo seeds before failing.
    """
    rng = np.random.default_rng(seed)
    trees = []
    for _ in range(count):
        n = int(rng.integers(1, 7))
        trees.append(random_subtree(n, float(rng.uniform(0.3, 0.9)), int(rng.integers(2**32))))
    exact = [float(survival_exact(T)) for T in trees]
    first_miss = None
    for attempt in range(2):
        worst, miss = 0.0, None
        for i, (T, p) in enumerate(zip(trees, exact)):
            est = survival_mc(T, trials, seed=10_000 * (attempt + 1) + i).estimate
            sd = math.sqrt(p * (1 - p) / trials)
            z = abs(est - p) / sd if sd > 0 else (0.0 if est == p else INF)
            worst = max(worst, z)
            if z > sigmas and miss is None:
                miss = {"tree": json.loads(T.to_json()), "exact": p, "estimate": est, "z": z}
        if miss is None:
            return SuiteResult("monte-carlo", True, count, {"max_z": worst, "attempts": attempt + 1})
        first_miss = first_miss or miss
    return SuiteResult("monte-carlo", False, count, {"max_z": worst, "attempts": 2}, counterexample=first_miss)


@dataclass
class TheoremSweep:
    reports: dict
    C_upper: float
    c_lower: float

    def violations(self) -> list[str]:
        out = []
        for n, r in self.reports.items():
            if r.upper_scaled > self.C_upper:
                out.append(f"n={n}: upper*n={r.upper_scaled:.4f} > C_upper={self.C_upper:.4f}")
            if r.lower_scaled < self.c_lower:
                out.append(f"n={n}: lower*n/log3n={r.lower_scaled:.4f} < c_lower={self.c_lower:.4f}")
            if r.slab_min_scaled < self.c_lower:
                out.append(f"n={n}: min_j n|K&S_j|={r.slab_min_scaled:.4f} < c_lower={self.c_lower:.4f}")
            if r.lower < r.upper:
                out.append(f"n={n}: doubles measure below originals")
        return out


def theorem_sweep(ns: Sequence[int], seeds: Sequence[int], calib: Calibration, slices: int = 2000,
                  progress: Optional[Callable[[TheoremReport], None]] = None) -> TheoremSweep:
    reports = {}
    for n in ns:
        cfg = ExperimentConfig(n=n, seeds=list(seeds), slices=slices)
        reports[n] = cmd_theorem(cfg)
        if progress:
            progress(reports[n])
    return TheoremSweep(reports, calib.C_upper, calib.c_lower)


def suite_theorem(calib: Calibration, ns: Sequence[int] = (4, 5), seeds: Sequence[int] = range(20),
                  slices: int = 2000) -> SuiteResult:
    sweep = theorem_sweep(ns, seeds, calib, slices)
    bad = sweep.violations()
    detail = {n: {"upper*n": r.upper_scaled, "lower*n/log3n": r.lower_scaled, "slab_min*n": r.slab_min_scaled}
              for n, r in sweep.reports.items()}
    return SuiteResult("theorem", not bad, len(ns) * len(seeds), detail,
                       counterexample={"violations": bad} if bad else None)


SUITE_NAMES = ("percolation-oracle", "resistance-dual", "resistance-bound", "survival-bound", "level-counts", "resistance-growth",
               "membership-decay", "measure-oracle", "uniformity", "membership-dual", "monte-carlo", "theorem")


def run_suites(cfg: ExperimentConfig, quick: bool = True, only: Optional[Sequence[str]] = None) -> list[SuiteResult]:
    """Every property suite (or the named ones); ``quick`` shrinks the sample sizes for interactive use."""
    calib = cfg.constants()
    s = 5 if quick else 1
    suites = {
        "percolation-oracle": lambda: suite_percolation_oracle(random_count=500 // s),
        "resistance-dual": lambda: suite_resistance_dual(random_count=1000 // s),
        "resistance-bound": lambda: suite_resistance_bound(count=1000 // s, constant=cfg.bound_constant),
        "survival-bound": lambda: suite_survival_bound(count=100 // s),
        "level-counts": lambda: suite_level_counts(count=500 // s),
        "resistance-growth": lambda: suite_resistance_growth(calib.c0, ns=range(4, 9) if quick else range(4, 13), count=100 // s),
        "membership-decay": lambda: suite_membership_decay(count=50),
        "measure-oracle": lambda: suite_measure_oracle(count=20 // s, max_n=5 if quick else 6),
        "uniformity": lambda: suite_uniformity(random_count=500 // s, maps=100 // s),
        "membership-dual": lambda: suite_membership(count=10_000 // s),
        "monte-carlo": lambda: suite_mc(count=50 // s),
        "theorem": lambda: suite_theorem(calib, ns=(4, 5) if quick else range(4, 9), seeds=range(20 if quick else 200)),
    }
    names = list(only) if only else list(SUITE_NAMES)
    unknown = set(names) - set(suites)
    if unknown:
        raise ValueError(f"unknown suites: {sorted(unknown)}")
    results = []
    for name in names:
        r = suites[name]()
        log.info(r.line())
        results.append(r)
    return results
