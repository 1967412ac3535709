"""The twelve acceptance criteria at their stated sizes and tolerances.

Each test records one PASS/FAIL line (shown in the terminal summary) and asserts
both the property and the runtime limit.
"""

import math
import time

import pytest

from kakeya import experiments as ex

CALIB = ex.Calibration.load()


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start


def check(acceptance, number, name, result: ex.SuiteResult, seconds, limit, extra=""):
    ok = result.passed and seconds < limit
    detail = f"{result.checked} checked in {seconds:.1f}s (limit {limit}s) {extra or result.detail}"
    acceptance(number, name, ok, detail)
    assert result.passed, result.counterexample
    assert seconds < limit


def test_01_percolation_oracle(acceptance):
    with Timer() as t:
        r = ex.suite_percolation_oracle(random_count=500, max_edges=12)
    check(acceptance, 1, "survival_exact == brute force (<= 12 edges)", r, t.seconds, 60)


def test_02_resistance_dual(acceptance):
    with Timer() as t:
        r = ex.suite_resistance_dual(random_count=1000, max_n=8)
    check(acceptance, 2, "resistance recursion == network reduction", r, t.seconds, 60)


def test_03_resistance_bound(acceptance):
    with Timer() as t:
        r = ex.suite_resistance_bound(count=1000, max_n=10, constant=12)
    check(acceptance, 3, "P <= 12 / (2 + R) on random subtrees", r, t.seconds, 120)


def test_04_survival_bound(acceptance):
    with Timer() as t:
        r = ex.suite_survival_bound(ns=range(4, 9), count=100, exhaustive_points=4)
    check(acceptance, 4, "P_n <= slice-tree survival; exact at n <= 2", r, t.seconds, 180)


def test_05_level_count(acceptance):
    with Timer() as t:
        r = ex.suite_level_counts(count=500, max_n=10)
    check(acceptance, 5, "slice-tree level counts <= 4 * 2^k", r, t.seconds, 60)


def test_06_resistance_growth_trend(acceptance):
    with Timer() as t:
        r = ex.suite_resistance_growth(CALIB.c0, ns=range(4, 13), count=100)
    mins = r.detail["min_R_over_n"]
    extra = f"c0={CALIB.c0:.4f}, min R/n over n=4..12: {min(mins.values()):.4f}"
    check(acceptance, 6, "min R/n >= c0 for n = 4..12", r, t.seconds, 300, extra)


def test_07_membership_decay_trend(acceptance):
    with Timer() as t:
        r = ex.suite_membership_decay(ns=range(4, 10), count=50, growth=2.0)
    m = r.detail["max_n_times_P"]
    extra = f"max n*P_n: n=4 {m[4]:.3f}, n=9 {m[9]:.3f}, overall {max(m.values()):.3f}"
    check(acceptance, 7, "max n * P_n has no growth trend (n=9 <= 2 x n=4)", r, t.seconds, 300, extra)


def test_08_measure_oracles(acceptance):
    with Timer() as t:
        r = ex.suite_measure_oracle(count=20, max_n=6, slices=10_000, rel_tol=1e-3, raster_max_n=3)
    check(acceptance, 8, "exact area vs sampled (1e-3) and raster (one row)", r, t.seconds, 300)


def test_09_uniformity(acceptance):
    with Timer() as t:
        r = ex.suite_uniformity(random_count=500, maps=100, n=4)
    check(acceptance, 9, "union >= K alpha / (16 m) whenever the overlap hypothesis holds", r, t.seconds, 120)


def test_10_theorem(acceptance):
    with Timer() as t:
        sweep = ex.theorem_sweep(range(4, 9), range(200), CALIB, slices=2000)
    bad = sweep.violations()
    rows = ", ".join(f"n={n}: up*n={r.upper_scaled:.3f} low*n/log3n={r.lower_scaled:.3f} slab*n={r.slab_min_scaled:.3f}"
                     for n, r in sweep.reports.items())
    modes = {n: (r.upper_mode, r.lower_mode) for n, r in sweep.reports.items()}
    ok = not bad and t.seconds < 1800
    acceptance(10, "two-sided measure bounds for sigma*, n = 4..8, 200 seeds", ok,
               f"C_upper={CALIB.C_upper:.4f} c_lower={CALIB.c_lower:.4f}; {rows}; {t.seconds:.0f}s (limit 1800s)")
    assert not bad, bad
    assert all(m == ("sampled", "sampled") for n, m in modes.items() if n >= 7)
    for r in sweep.reports.values():
        assert r.upper <= r.lower
        assert len(r.slabs) >= max(1, math.floor(math.log(r.n, 3)))
    assert t.seconds < 1800


def test_11_membership_dual(acceptance):
    with Timer() as t:
        r = ex.suite_membership(count=10_000, max_n=6)
    check(acceptance, 11, "point-in-tube scan == tree criterion", r, t.seconds, 120)


def test_12_monte_carlo(acceptance):
    with Timer() as t:
        r = ex.suite_mc(count=50, trials=100_000, sigmas=4.0)
    check(acceptance, 12, "survival_mc within 4 sd of survival_exact", r, t.seconds, 120)
