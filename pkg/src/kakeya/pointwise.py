"""Membership of a fixed point (t, y), 1/3 < t < 1, in the random set K_sigma.

For a node s at level k and a Cantor string c at level k, I_{s,c,t} is the set
of heights at abscissa t reached by lines with intercept in [s/3, s/3 + 3^-(k+1)]
and slope in [c, c + 3^-k]. Because t > 1/3 these intervals are disjoint in c, so
each s has at most one candidate slope c_{t,y}(s). The nodes with a candidate
form the slice tree; the point lies in K_sigma exactly when some leaf whose tube
actually covers the point has sigma agreeing with the candidate on every edge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .geometry import TubeFamily, kakeya_family
from .percolation import INF, Resistance, Subtree, resistance_recursive, survival_exact
from .sticky import CantorString, StickyMap
from .tree import TernaryString, value

LEVEL_COUNT_CONSTANT = 4


@dataclass(frozen=True)
class Point:
    t: Fraction
    y: Fraction

    def __post_init__(self):
        object.__setattr__(self, "t", Fraction(self.t))
        object.__setattr__(self, "y", Fraction(self.y))
        if not Fraction(1, 3) < self.t < 1:
            raise ValueError(f"point needs 1/3 < t < 1, got t = {self.t}")

    def __str__(self):
        return f"({self.t}, {self.y})"


def slice_interval(s: TernaryString, c: CantorString, t) -> tuple[Fraction, Fraction]:
    """I_{s,c,t} = [s/3 + t c, s/3 + (1 + 3t)/3^(k+1) + t c]."""
    if s.level != c.level:
        raise ValueError(f"levels differ: {s} vs {c}")
    t = Fraction(t)
    lo = value(s) / 3 + t * value(c)
    return lo, lo + (1 + 3 * t) / 3 ** (s.level + 1)


def candidate_slope(s: TernaryString, point: Point) -> Optional[CantorString]:
    """The unique c in C_k with y in I_{s,c,t}, or None.

    Found digit by digit: a candidate for s restricts to a candidate for each
    ancestor of s, so only two extensions need checking per level.
    """
    c: tuple[int, ...] = ()
    for j in range(1, s.level + 1):
        sj = TernaryString(s.digits[:j])
        hits = [d for d in (0, 2) if _in(point.y, slice_interval(sj, TernaryString(c + (d,)), point.t))]
        if not hits:
            return None
        if len(hits) > 1:
            raise AssertionError(f"two candidate slopes for {sj} at {point}")
        c = c + (hits[0],)
    return TernaryString(c)


def _in(y, iv) -> bool:
    return iv[0] <= y <= iv[1]


@dataclass(frozen=True, eq=False)
class SliceTree:
    """T*_{n,t,y} with the candidate slope numerators (c * 3^k) of every node.

    ``cands[k]`` is aligned with ``tree.levels[k]``; ``narrow_hit`` flags the
    level-n nodes whose own tube cross-section contains y.
    """

    n: int
    point: Point
    tree: Subtree
    cands: tuple[np.ndarray, ...]
    narrow_hit: np.ndarray

    def req_digits(self, k: int) -> np.ndarray:
        """pi_k of the candidate slope for each node at level k >= 1."""
        return self.cands[k] % 3

    def candidate(self, v: TernaryString) -> Optional[CantorString]:
        lv = self.tree.levels[v.level]
        i = int(np.searchsorted(lv, v.rank))
        if i >= lv.size or lv[i] != v.rank:
            return None
        return TernaryString.from_rank(int(self.cands[v.level][i]), v.level)

    def level_counts(self) -> list[int]:
        return self.tree.level_counts()

    @property
    def max_level_ratio(self) -> float:
        """max over k of #(level k) / 2^k."""
        return max(c / 2**k for k, c in enumerate(self.level_counts()))

    def pruned(self) -> Subtree:
        """The tree with leaves lacking a narrow hit removed."""
        return self.tree.prune_leaves(self.narrow_hit)


def _int_array(values, big: bool):
    return np.array(values, dtype=object if big else np.int64)


def build_slice_tree(n: int, point: Point) -> SliceTree:
    t, y = point.t, point.y
    D = math.lcm(t.denominator, y.denominator)
    tp, yp = int(t * D), int(y * D)
    big = (abs(yp) + 4 * D) * 3 ** (n + 2) > 2**62
    S = _int_array([0], big)
    C = _int_array([0], big)
    levels, cands = [np.array([0], dtype=np.int64)], [C]
    for k in range(1, n + 1):
        # children (3S + a, 3C + d); test y*3^(k+1)*D in [S'D + 3tp C', S'D + D + 3tp + 3tp C']
        target = yp * 3 ** (k + 1)
        Sc = (3 * S[:, None] + np.arange(3)[None, :]).ravel()
        base = Sc * D
        ok = []
        for d in (0, 2):
            Cc = (3 * np.repeat(C, 3) + d)
            lo = base + 3 * tp * Cc
            ok.append((lo <= target) & (target <= lo + D + 3 * tp))
        ok0, ok2 = ok
        if np.any(ok0 & ok2):
            raise AssertionError(f"candidate slope not unique at level {k} for {point}")
        keep = ok0 | ok2
        S = Sc[keep]
        C = (3 * np.repeat(C, 3) + np.where(ok2, 2, 0))[keep]
        levels.append(np.asarray(S, dtype=np.int64))
        cands.append(C)
    lo = S * D + 3 * tp * C
    target = yp * 3 ** (n + 1)
    narrow = np.asarray((lo <= target) & (target <= lo + D), dtype=bool)
    tree = Subtree(n, levels)
    return SliceTree(n, point, tree, tuple(np.asarray(c, dtype=np.int64) for c in cands), narrow)


# ---------------------------------------------------------------------------
# membership


def membership_direct(sigma: StickyMap, point: Point, family: Optional[TubeFamily] = None) -> bool:
    """Scan every tube of K_sigma for the point (exact integer half-plane tests)."""
    F = family if family is not None else kakeya_family(sigma)
    t, y = point.t, point.y
    if not F.t0 <= t <= F.t1:
        return False
    D = math.lcm(t.denominator, y.denominator)
    tp, yp = int(t * D), int(y * D)
    lower = F.intercepts * D + F.slopes * tp
    Y = yp * F.scale
    return bool(np.any((lower <= Y) & (Y <= lower + F.width * D)))


def membership_tree(sigma: StickyMap, point: Point, tree: Optional[SliceTree] = None) -> bool:
    """Some narrow-hit leaf whose root path has sigma's edge label equal to the required digit at every level."""
    st = tree if tree is not None else build_slice_tree(sigma.n, point)
    n = st.n
    ok = np.ones(1, dtype=bool)
    for k in range(1, n + 1):
        S = st.tree.levels[k]
        parent_pos = np.searchsorted(st.tree.levels[k - 1], S // 3)
        labels = sigma.labeling.levels[k - 1][S]
        ok = ok[parent_pos] & (labels == st.req_digits(k))
    return bool(np.any(ok & st.narrow_hit))


def membership(sigma: StickyMap, point: Point) -> bool:
    """(t, y) in K_sigma; both the geometric scan and the tree criterion are evaluated and must agree."""
    a = membership_direct(sigma, point)
    b = membership_tree(sigma, point)
    if a != b:
        raise AssertionError(f"membership paths disagree at {point} for seed {sigma.seed}")
    return a


def membership_probability_exact(n: int, point: Point, tree: Optional[SliceTree] = None) -> Fraction:
    """P_n(t, y): percolation survival on the slice tree after pruning leaves that miss the point."""
    st = tree if tree is not None else build_slice_tree(n, point)
    return survival_exact(st.pruned())


# ---------------------------------------------------------------------------
# checks


@dataclass(frozen=True)
class SurvivalBoundVerdict:
    point: Point
    p_exact: Fraction
    survival: Fraction

    @property
    def holds(self) -> bool:
        return self.p_exact <= self.survival


def survival_bound_check(n: int, point: Point) -> SurvivalBoundVerdict:
    st = build_slice_tree(n, point)
    return SurvivalBoundVerdict(point, membership_probability_exact(n, point, st), survival_exact(st.tree))


@dataclass(frozen=True)
class LevelCountVerdict:
    point: Point
    counts: tuple[int, ...]
    constant: int = LEVEL_COUNT_CONSTANT

    @property
    def holds(self) -> bool:
        return all(c <= self.constant * 2**k for k, c in enumerate(self.counts))


def level_count_check(n: int, point: Point) -> LevelCountVerdict:
    return LevelCountVerdict(point, tuple(build_slice_tree(n, point).level_counts()))


@dataclass(frozen=True)
class ResistanceGrowthVerdict:
    n: int
    point: Point
    resistance: Resistance
    floor: float

    @property
    def ratio(self) -> float:
        return INF if self.resistance == INF else float(self.resistance) / self.n

    @property
    def flagged(self) -> bool:
        return self.ratio < self.floor


def resistance_growth_check(n: int, point: Point, floor: float = 0.0) -> ResistanceGrowthVerdict:
    return ResistanceGrowthVerdict(n, point, resistance_recursive(build_slice_tree(n, point).tree), floor)


@dataclass(frozen=True)
class PointRecord:
    """One row of the per-point output table."""

    n: int
    point: Point
    tree_size: int
    max_level_ratio: float
    resistance: Resistance
    survival: Fraction
    p_exact: Fraction


def point_record(n: int, point: Point) -> PointRecord:
    st = build_slice_tree(n, point)
    return PointRecord(
        n,
        point,
        len(st.tree),
        st.max_level_ratio,
        resistance_recursive(st.tree),
        survival_exact(st.tree),
        membership_probability_exact(n, point, st),
    )


@dataclass(frozen=True)
class MembershipDecayReport:
    n: int
    values: tuple[Fraction, ...]

    @property
    def max_scaled(self) -> float:
        """max over the sample of n * P_n(t, y)."""
        return max((self.n * float(p) for p in self.values), default=0.0)


def membership_decay_check(n: int, points: Sequence[Point]) -> MembershipDecayReport:
    return MembershipDecayReport(n, tuple(membership_probability_exact(n, p) for p in points))


def random_points(count: int, seed: int, denominator: int = 2**16) -> list[Point]:
    """Uniform rational points in (1/3, 1) x [0, 4/3] with the given denominator."""
    rng = np.random.default_rng(seed)
    lo = denominator // 3 + 1
    ts = rng.integers(lo, denominator, size=count)
    ys = rng.integers(0, 4 * denominator // 3 + 1, size=count)
    return [Point(Fraction(int(a), denominator), Fraction(int(b), denominator)) for a, b in zip(ts, ys)]
