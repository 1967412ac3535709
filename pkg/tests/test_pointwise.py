from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from kakeya import oracles
from kakeya.geometry import kakeya_family
from kakeya.percolation import INF, Subtree, resistance_bound_check, resistance_recursive, survival_exact
from kakeya.pointwise import (
    LEVEL_COUNT_CONSTANT,
    Point,
    build_slice_tree,
    candidate_slope,
    membership_decay_check,
    survival_bound_check,
    level_count_check,
    resistance_growth_check,
    membership,
    membership_direct,
    membership_probability_exact,
    membership_tree,
    random_points,
    slice_interval,
)
from kakeya.sticky import apply, sample_sticky_map
from kakeya.tree import TernaryString, enumerate_level, prefix, value

from strategies import points, sticky_maps

F_ = Fraction
S = TernaryString.parse
HALF = F_(1, 2)


def test_point_validation():
    with pytest.raises(ValueError):
        Point(F_(1, 3), 0)
    with pytest.raises(ValueError):
        Point(1, 0)
    Point(F_(2, 5), -1)


def test_slice_interval_examples():
    assert slice_interval(S(".0"), S(".2"), HALF) == (F_(1, 3), F_(11, 18))
    assert slice_interval(S(".0"), S(".0"), HALF) == (0, F_(5, 18))
    with pytest.raises(ValueError):
        slice_interval(S(".0"), S(".02"), HALF)


@given(st.integers(1, 5).flatmap(lambda k: st.tuples(
    st.lists(st.integers(0, 2), min_size=k, max_size=k),
    st.lists(st.sampled_from([0, 2]), min_size=k, max_size=k))), st.fractions(F_(1, 3), 1))
def test_slice_interval_length(sc, t):
    s, c = TernaryString(tuple(sc[0])), TernaryString(tuple(sc[1]))
    lo, hi = slice_interval(s, c, t)
    assert hi - lo == (1 + 3 * t) / 3 ** (s.level + 1)


def test_slice_intervals_disjoint_exhaustive():
    import itertools

    for k in range(1, 5):
        cs = [TernaryString(d) for d in itertools.product((0, 2), repeat=k)]
        for t in (F_(34, 100), F_(1, 2), F_(9, 10)):
            for s in enumerate_level(k)[::5]:
                ivs = sorted(slice_interval(s, c, t) for c in cs)
                assert all(a[1] < b[0] for a, b in zip(ivs, ivs[1:]))


def test_candidate_slope_examples():
    p = Point(HALF, HALF)
    assert candidate_slope(S(".0"), p) == S(".2")
    assert candidate_slope(S(".0"), Point(HALF, 2)) is None


@given(points(), st.integers(1, 5).flatmap(lambda k: st.lists(st.integers(0, 2), min_size=k, max_size=k)))
def test_candidate_slope_matches_brute_force_and_nests(p, digits):
    s = TernaryString(tuple(digits))
    c = candidate_slope(s, p)
    assert c == oracles.brute_candidate_slope(s, p)
    if c is not None:
        for j in range(s.level + 1):
            assert candidate_slope(prefix(s, j), p) == prefix(c, j)


@given(points(), st.integers(1, 6))
def test_slice_tree_invariants(p, n):
    st_ = build_slice_tree(n, p)
    assert all(c <= LEVEL_COUNT_CONSTANT * 2**k for k, c in enumerate(st_.level_counts()))
    nodes = set(st_.tree.nodes())
    expected = {s for k in range(n + 1) for s in enumerate_level(k) if k == 0 or candidate_slope(s, p) is not None}
    assert nodes == expected
    for v in list(nodes)[:30]:
        if v.level:
            c = st_.candidate(v)
            assert c == candidate_slope(v, p)
            assert st_.req_digits(v.level)[list(st_.tree.levels[v.level]).index(v.rank)] == c.digits[-1]


def test_slice_tree_below_axis_is_root_only():
    st_ = build_slice_tree(5, Point(HALF, F_(-1, 100)))
    assert len(st_.tree) == 1
    assert membership_probability_exact(5, Point(HALF, F_(-1, 100))) == 0


def test_membership_examples():
    sigma = sample_sticky_map(3, 4)
    s = S(".120")
    c = value(apply(sigma, s))
    w = F_(1, 81)
    p = Point(F_(3, 5), value(s) / 3 + w / 2 + F_(3, 5) * c)
    assert membership(sigma, p)
    assert not membership(sigma, Point(HALF, F_(3, 2)))
    assert not membership(sigma, Point(HALF, F_(-1, 10)))


@given(sticky_maps(max_n=5), points())
def test_membership_paths_agree(sigma, p):
    F = kakeya_family(sigma)
    assert membership_direct(sigma, p, F) == membership_tree(sigma, p)
    assert membership_direct(sigma, p, F) == any(T.contains(p.t, p.y) for T in F.tubes)


def test_membership_probability_chain():
    # a point reached by exactly one narrow-hit path: n required bits
    n = 3
    p = Point(F_(43659, 65536), F_(1027, 32768))
    assert build_slice_tree(n, p).pruned().level_counts() == [1] * (n + 1)
    assert membership_probability_exact(n, p) == F_(1, 2**n)


def test_membership_probability_exhaustive():
    for n in (1, 2):
        for p in random_points(3, 50 + n):
            assert membership_probability_exact(n, p) == oracles.exhaustive_membership_probability(n, p)


@given(points(), st.integers(1, 7))
def test_survival_bound_property(p, n):
    v = survival_bound_check(n, p)
    assert v.holds
    st_ = build_slice_tree(n, p)
    if st_.narrow_hit.all():
        assert v.p_exact == v.survival


def test_survival_bound_root_only():
    v = survival_bound_check(4, Point(HALF, -1))
    assert v.p_exact == v.survival == 0


def test_level_count_check():
    for p in random_points(50, 1):
        assert level_count_check(6, p).holds


def test_resistance_growth_check():
    v = resistance_growth_check(4, Point(HALF, -1))
    assert v.resistance == INF and not v.flagged
    ratios = [resistance_growth_check(6, p, floor=0.3).ratio for p in random_points(30, 2)]
    assert min(ratios) > 0.3


def test_membership_decay_empty_points_contribute_zero():
    rep = membership_decay_check(4, [Point(HALF, -1), Point(HALF, 2)])
    assert rep.max_scaled == 0


@given(points(), st.integers(2, 8))
def test_composed_inequalities(p, n):
    st_ = build_slice_tree(n, p)
    P = membership_probability_exact(n, p, st_)
    surv = survival_exact(st_.tree)
    R = resistance_recursive(st_.tree)
    assert P <= surv
    if R != INF:
        assert surv <= 12 / (2 + R)
    assert resistance_bound_check(st_.tree).holds


def test_random_points_in_box():
    pts = random_points(200, 0)
    assert all(F_(1, 3) < p.t < 1 and 0 <= p.y <= F_(4, 3) for p in pts)
    assert random_points(5, 3) == random_points(5, 3)
