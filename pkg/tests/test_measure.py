from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from kakeya import oracles
from kakeya.geometry import Slab, Tube, TubeFamily, kakeya_family
from kakeya.measure import (
    IntervalUnion,
    area,
    exact_area,
    exact_sum,
    floor_log3,
    slab_measure_check,
    lower_bound_slabs,
    sampled_area,
    slab_uniformity,
    slice_length,
    union_length,
    verify_uniformity,
)
from kakeya.sticky import EdgeLabeling, StickyMap, ones_to_zeros_map, sample_sticky_map
from kakeya.tree import BudgetExceeded

from strategies import sticky_maps

F_ = Fraction

intervals = st.lists(
    st.tuples(st.fractions(0, 2, max_denominator=30), st.fractions(0, 1, max_denominator=30)).map(
        lambda p: (p[0], p[0] + p[1])),
    max_size=8)


def constant_slope_map(n, label):
    return StickyMap(EdgeLabeling.from_flat(n, [label] * ((3 ** (n + 1) - 3) // 2)))


def test_union_length_examples():
    assert union_length([(0, F_(1, 3)), (F_(1, 4), F_(1, 2))]) == F_(1, 2)
    assert union_length([]) == 0
    assert union_length([(0, F_(1, 9)), (F_(2, 9), F_(3, 9))]) == F_(2, 9)


def test_interval_union_merges_touching():
    U = IntervalUnion([(0, 1), (1, 2), (3, 4)])
    assert U.intervals == ((0, 2), (3, 4))
    assert F_(3, 2) in U and F_(5, 2) not in U
    with pytest.raises(ValueError):
        IntervalUnion([(1, 0)])


@given(intervals, intervals)
def test_union_monotone_subadditive(a, b):
    A, B = IntervalUnion(a), IntervalUnion(b)
    assert (A | B).length >= max(A.length, B.length)
    assert (A | B).length <= A.length + B.length
    assert (A | B).length + (A & B).length == A.length + B.length


def test_exact_sum_pairwise():
    terms = [F_(1, k) for k in range(1, 200)]
    assert exact_sum(terms) == sum(terms, F_(0))


def test_slice_length_examples():
    for seed in range(5):
        assert slice_length(kakeya_family(sample_sticky_map(3, seed)), 0) == F_(1, 3)
    F = kakeya_family(constant_slope_map(1, 2))
    assert all(slice_length(F, F_(k, 7)) == F_(1, 3) for k in range(8))


def test_slice_length_matches_raster():
    for seed in range(5):
        F = kakeya_family(sample_sticky_map(2, seed))
        h = F_(1, 3**12)
        assert abs(slice_length(F, F_(1, 2)) - oracles.raster_slice_length(F, F_(1, 2), h)) <= h


def test_exact_area_examples():
    assert exact_area(kakeya_family(constant_slope_map(1, 0)), Slab(0, 1)).value == F_(1, 3)
    T = Tube(None, F_(1, 5), F_(1, 27), F_(2, 3))
    single = TubeFamily.from_tubes([T])
    assert exact_area(single, Slab(F_(1, 4), F_(3, 4))).value == T.width / 2
    F = kakeya_family(ones_to_zeros_map(2))
    slab = Slab(F_(1, 3), 1)
    ex = exact_area(F, slab).value
    assert abs(sampled_area(F, slab, 10_000).value - ex) / ex < 1e-3


def test_sampled_area_examples():
    F = kakeya_family(constant_slope_map(1, 0))
    for M in (2, 3, 17):
        assert sampled_area(F, Slab(0, 1), M).value == F_(1, 3)
    with pytest.raises(ValueError):
        sampled_area(F, None, 1)


def test_sampled_area_converges():
    F = kakeya_family(sample_sticky_map(3, 2))
    slab = Slab(F_(1, 3), 1)
    ex = exact_area(F, slab).value
    errs = [abs(sampled_area(F, slab, 2**k + 1).value - ex) for k in range(3, 12)]
    assert errs[-1] < errs[0] / 100
    assert errs[-1] < 1e-6


@given(sticky_maps(max_n=3), st.sampled_from([Slab(0, 1), Slab(F_(1, 3), 1), Slab.triadic(2)]))
def test_sampled_equals_exact_with_event_grid(sigma, slab):
    # trapezoid on a grid containing every event abscissa is exact
    from kakeya.measure import event_times

    F = kakeya_family(sigma)
    G = F.restrict(slab)
    ts = [G.t0] + event_times(G) + [G.t1]
    L = [slice_length(G, t) for t in ts]
    trap = sum((v - u) * (a + b) / 2 for u, v, a, b in zip(ts, ts[1:], L, L[1:]))
    assert trap == exact_area(F, slab).value


@given(sticky_maps(max_n=4))
def test_exact_area_bounds(sigma):
    a = exact_area(kakeya_family(sigma), Slab(0, 1)).value
    assert F_(1, 3 ** (sigma.n + 1)) <= a <= F_(1, 3)


def test_equal_slopes_sampled_is_exact():
    F = kakeya_family(constant_slope_map(3, 2))
    ex = exact_area(F, Slab(F_(1, 3), 1)).value
    assert all(sampled_area(F, Slab(F_(1, 3), 1), M).value == ex for M in (2, 5, 100))


def test_exact_vs_raster_small():
    h = 3.0**-12
    for n in (1, 2, 3):
        for seed in range(2):
            F = kakeya_family(sample_sticky_map(n, seed))
            for slab in (Slab(0, 1), Slab(F_(1, 3), 1)):
                assert abs(float(exact_area(F, slab).value) - oracles.raster_area(F, slab, h)) <= h * float(slab.length)


def test_area_dispatch_and_budget():
    F = kakeya_family(sample_sticky_map(3, 0))
    assert area(F, None, mode="auto").mode == "exact"
    assert area(F, None, mode="auto", exact_limit=10).mode == "sampled"
    with pytest.raises(BudgetExceeded):
        exact_area(F, None, limit=10)
    with pytest.raises(ValueError):
        area(F, None, mode="fast")


def test_uniformity_examples():
    A = IntervalUnion([(0, F_(1, 3)), (F_(1, 2), F_(2, 3))])
    K = 5
    v = verify_uniformity([A] * K, K)
    assert v.hypothesis_holds and v.holds
    disjoint = [IntervalUnion([(i, i + F_(1, 2))]) for i in range(K)]
    v = verify_uniformity(disjoint, 1)
    assert v.hypothesis_holds and v.lhs == K * F_(1, 2) and v.holds
    with pytest.raises(ValueError):
        verify_uniformity([A, IntervalUnion([(0, 1)])], 1)


def test_uniformity_hypothesis_failure_is_not_violation():
    A = IntervalUnion([(0, 1)])
    v = verify_uniformity([A] * 4, F_(1, 2))
    assert not v.hypothesis_holds and not v.violated


@given(st.lists(st.integers(0, 40), min_size=1, max_size=8), st.integers(1, 6), st.integers(1, 4))
def test_uniformity_property(starts, ln, slack):
    sets = [IntervalUnion([(F_(s, 7), F_(s + ln, 7))]) for s in starts]
    K, alpha = len(sets), sets[0].length
    total = sum((A & B).length for A in sets for B in sets)
    m = total / (K * alpha) * slack
    v = verify_uniformity(sets, m)
    assert v.hypothesis_holds and v.holds


def test_slab_uniformity_real_maps():
    for seed in range(10):
        for j in (1, 2):
            v = slab_uniformity(sample_sticky_map(4, seed), Slab.triadic(j))
            assert v.hypothesis_holds and v.holds


def test_floor_log3_and_slabs():
    assert [floor_log3(n) for n in (1, 2, 3, 8, 9, 26, 27)] == [0, 0, 1, 1, 2, 2, 3]
    assert lower_bound_slabs(4) == [1, 2]
    assert lower_bound_slabs(9) == [1, 2, 3]


def test_slab_measure_ones_to_zeros():
    rep = slab_measure_check(ones_to_zeros_map(3))
    assert rep.min_scaled > 0
    assert all(0 < r.value <= F_(1, 3) for r in rep.slab_measures.values())


def test_slab_measure_uniform_over_seeds():
    vals = [slab_measure_check(sample_sticky_map(5, s)).min_scaled for s in range(50)]
    assert min(vals) > 0.1


def test_trivial_slab_bound():
    for seed in range(8):
        F = kakeya_family(sample_sticky_map(1, seed))
        assert exact_area(F, Slab(0, 1)).value <= F_(1, 3)
