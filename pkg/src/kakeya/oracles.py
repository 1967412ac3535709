"""Brute-force reference computations used to cross-check the fast paths.

Nothing here is used by the main computations; these are deliberately naive.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Optional

import numpy as np

from .geometry import Slab, TubeFamily
from .percolation import Subtree
from .pointwise import Point, slice_interval
from .sticky import StickyMap, iter_all_labelings
from .tree import TernaryString, check_budget


def brute_force_survival(T: Subtree) -> Fraction:
    """Average over all 2^edges open/closed edge configurations."""
    E = T.edge_count
    check_budget(2**E, "brute force percolation")
    nodes = [(k, int(r)) for k in range(1, T.n + 1) for r in T.levels[k]]
    good = 0
    for mask in range(2**E):
        reach = {(0, 0)}
        for i, (k, r) in enumerate(nodes):
            if (mask >> i) & 1 and (k - 1, r // 3) in reach:
                reach.add((k, r))
        if T.n == 0 or any(k == T.n for k, _ in reach):
            good += 1
    return Fraction(good, 2**E)


def all_subtrees(n: int):
    """Every root-connected subtree of T*_n (n <= 2)."""
    if n > 2:
        raise ValueError("exhaustive subtree enumeration only for n <= 2")
    if n == 0:
        yield Subtree(0, [[0]])
        return
    for l1 in itertools.chain.from_iterable(itertools.combinations(range(3), r) for r in range(4)):
        if n == 1:
            yield Subtree(1, [[0], list(l1)])
            continue
        kids = [3 * a + d for a in l1 for d in range(3)]
        for r in range(len(kids) + 1):
            for l2 in itertools.combinations(kids, r):
                yield Subtree(2, [[0], list(l1), list(l2)])


def brute_candidate_slope(s: TernaryString, point: Point) -> Optional[TernaryString]:
    """Try every c in C_k."""
    hits = []
    for digits in itertools.product((0, 2), repeat=s.level):
        c = TernaryString(digits)
        lo, hi = slice_interval(s, c, point.t)
        if lo <= point.y <= hi:
            hits.append(c)
    if len(hits) > 1:
        raise AssertionError(f"several candidate slopes for {s} at {point}")
    return hits[0] if hits else None


def exhaustive_membership_probability(n: int, point: Point) -> Fraction:
    """Fraction of all labelings of T*_n whose Kakeya set contains the point (n <= 2)."""
    from .pointwise import membership_direct

    hits = total = 0
    for lab in iter_all_labelings(n):
        total += 1
        hits += membership_direct(StickyMap(lab), point)
    return Fraction(hits, total)


def numeric_overlap(T1, T2, slices: int = 10_000) -> float:
    """Midpoint-rule integral of the vertical intersection length."""
    ta, tb = float(max(T1.t0, T2.t0)), float(min(T1.t1, T2.t1))
    if ta >= tb:
        return 0.0
    h = (tb - ta) / slices
    t = ta + h * (np.arange(slices) + 0.5)
    lo1 = float(T1.intercept) + t * float(T1.slope)
    lo2 = float(T2.intercept) + t * float(T2.slope)
    ov = np.minimum(lo1 + float(T1.width), lo2 + float(T2.width)) - np.maximum(lo1, lo2)
    return float(np.clip(ov, 0, None).sum() * h)


def raster_slice_length(F: TubeFamily, t, h: Fraction = Fraction(1, 3**12)) -> Fraction:
    """Pixels of height h whose centers lie in some cross-section at t (half-open test)."""
    t = Fraction(t)
    covered: set[int] = set()
    for i in range(len(F)):
        T = F.tube(i)
        lo = T.intercept + t * T.slope
        hi = lo + T.width
        # centers (k + 1/2) h in [lo, hi)
        k0 = math.ceil(lo / h - Fraction(1, 2))
        k1 = math.ceil(hi / h - Fraction(1, 2))
        covered.update(range(k0, k1))
    return len(covered) * h


def raster_area(F: TubeFamily, slab: Optional[Slab] = None, h_y: float = 3.0**-12, columns: int = 3**8) -> float:
    """Area of the union by counting pixel centers on a columns x (1/h_y) grid.

    Column centers are at the midpoints of ``columns`` equal t-cells; in each column
    a pixel counts when its center lies between the tube's lower and upper edges,
    interpolated from the corner points.
    """
    G = F if slab is None else F.restrict(slab)
    if G is None:
        return 0.0
    ta, tb = float(G.t0), float(G.t1)
    dt = (tb - ta) / columns
    tc = ta + dt * (np.arange(columns) + 0.5)
    tubes = G.tubes
    # lower edge through corners (t0, y00) -> (t1, y10)
    y00 = np.array([float(T.corners[0][1]) for T in tubes])
    y10 = np.array([float(T.corners[1][1]) for T in tubes])
    y01 = np.array([float(T.corners[3][1]) for T in tubes])
    y11 = np.array([float(T.corners[2][1]) for T in tubes])
    frac = ((tc - ta) / (tb - ta))[:, None]
    lo = y00[None, :] + frac * (y10 - y00)[None, :]
    hi = y01[None, :] + frac * (y11 - y01)[None, :]
    first = np.ceil(lo / h_y - 0.5).astype(np.int64)
    last = np.ceil(hi / h_y - 0.5).astype(np.int64) - 1
    order = np.argsort(first, axis=1)
    first = np.take_along_axis(first, order, axis=1)
    last = np.take_along_axis(last, order, axis=1)
    prev = np.maximum.accumulate(last, axis=1)
    prev = np.concatenate([np.full((columns, 1), np.iinfo(np.int64).min // 2), prev[:, :-1]], axis=1)
    counts = np.clip(last - np.maximum(first - 1, prev), 0, None).sum(axis=1)
    return float(counts.sum()) * h_y * dt
