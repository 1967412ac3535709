"""Lebesgue measure of unions of tubes.

Vertical slices are unions of equal-length intervals, so the union length at a
given t only needs the sorted left endpoints: it is w plus the sum over
consecutive starts of min(w, gap). The slice length is piecewise linear in t and
only changes slope where two endpoints of *interacting* tubes (|gap| <= w) meet,
which keeps the event set close to linear in the family size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .geometry import Slab, TubeFamily, family_overlap_sum, kakeya_family
from .sticky import StickyMap
from .tree import BudgetExceeded, budget

EXACT_TUBE_LIMIT = 3**6
INT64_SAFE = 2**62


def exact_sum(terms: Iterable[Fraction]) -> Fraction:
    """Pairwise summation of Fractions; keeps intermediate denominators small."""
    items = list(terms)
    if not items:
        return Fraction(0)
    while len(items) > 1:
        paired = [items[i] + items[i + 1] for i in range(0, len(items) - 1, 2)]
        if len(items) % 2:
            paired.append(items[-1])
        items = paired
    return items[0]


# ---------------------------------------------------------------------------
# one dimension


class IntervalUnion:
    """Sorted, disjoint closed rational intervals; touching intervals are merged."""

    __slots__ = ("intervals",)

    def __init__(self, intervals: Iterable[tuple] = ()):
        merged: list[tuple[Fraction, Fraction]] = []
        for a, b in sorted((Fraction(a), Fraction(b)) for a, b in intervals):
            if a > b:
                raise ValueError(f"reversed interval [{a}, {b}]")
            if merged and a <= merged[-1][1]:
                if b > merged[-1][1]:
                    merged[-1] = (merged[-1][0], b)
            else:
                merged.append((a, b))
        self.intervals = tuple(merged)

    @property
    def length(self) -> Fraction:
        return sum((b - a for a, b in self.intervals), Fraction(0))

    def __or__(self, other: "IntervalUnion") -> "IntervalUnion":
        return IntervalUnion(self.intervals + other.intervals)

    def __and__(self, other: "IntervalUnion") -> "IntervalUnion":
        out = []
        i = j = 0
        A, B = self.intervals, other.intervals
        while i < len(A) and j < len(B):
            lo = max(A[i][0], B[j][0])
            hi = min(A[i][1], B[j][1])
            if lo <= hi:
                out.append((lo, hi))
            if A[i][1] < B[j][1]:
                i += 1
            else:
                j += 1
        return IntervalUnion(out)

    def __contains__(self, x) -> bool:
        x = Fraction(x)
        return any(a <= x <= b for a, b in self.intervals)

    def __eq__(self, other):
        return isinstance(other, IntervalUnion) and self.intervals == other.intervals

    def __repr__(self):
        return "IntervalUnion(" + ", ".join(f"[{a}, {b}]" for a, b in self.intervals) + ")"


def union_length(intervals: Iterable[tuple]) -> Fraction:
    return IntervalUnion(intervals).length


# ---------------------------------------------------------------------------
# slices and areas


def _scaled_slice_lengths(F: TubeFamily, nums: np.ndarray, den: int) -> np.ndarray:
    """Union lengths at t = nums[k] / den, in units of 1 / (F.scale * den).

    ``nums`` must lie inside the family's t-span.
    """
    if len(F) == 0:
        return np.zeros(len(nums), dtype=np.int64)
    bound = (int(np.abs(F.intercepts).max()) + 1) * den + (int(np.abs(F.slopes).max()) + 1) * int(np.abs(nums).max(initial=0))
    if bound * 2 > INT64_SAFE or F.width * den * len(F) > INT64_SAFE:
        raise BudgetExceeded("slice coordinates overflow 64-bit integers; use fewer slices")
    wd = F.width * den
    out = np.empty(len(nums), dtype=np.int64)
    chunk = max(1, 4_000_000 // max(1, len(F)))
    for lo in range(0, len(nums), chunk):
        p = np.asarray(nums[lo: lo + chunk], dtype=np.int64)
        X = F.intercepts[None, :] * den + F.slopes[None, :] * p[:, None]
        X.sort(axis=1)
        gaps = np.minimum(np.diff(X, axis=1), wd)
        out[lo: lo + chunk] = gaps.sum(axis=1) + wd
    return out


def slice_length(F: TubeFamily, t) -> Fraction:
    """Length of the union of the family's cross-sections at abscissa t."""
    t = Fraction(t)
    if not F.t0 <= t <= F.t1 or len(F) == 0:
        return Fraction(0)
    S = _scaled_slice_lengths(F, np.array([t.numerator]), t.denominator)
    return Fraction(int(S[0]), F.scale * t.denominator)


def cross_sections(F: TubeFamily, t) -> list[tuple[Fraction, Fraction]]:
    t = Fraction(t)
    if not F.t0 <= t <= F.t1:
        return []
    q, w = F.scale, F.width_value
    out = []
    for a, m in zip(F.intercepts.tolist(), F.slopes.tolist()):
        lo = Fraction(a, q) + t * Fraction(m, q)
        out.append((lo, lo + w))
    return out


@dataclass(frozen=True)
class AreaReport:
    value: Fraction
    mode: str
    slab: Slab
    slices: Optional[int] = None
    events: Optional[int] = None

    @property
    def estimate(self) -> float:
        return float(self.value)


def _clip(F: TubeFamily, slab: Optional[Slab]) -> Optional[TubeFamily]:
    return F if slab is None else F.restrict(slab)


def event_times(F: TubeFamily) -> list[Fraction]:
    """Abscissae in (t0, t1) where endpoints of two interacting tubes coincide."""
    ta, tb = F.t0, F.t1
    A, B, w = F.intercepts, F.slopes, F.width
    den = math.lcm(ta.denominator, tb.denominator)
    pa, pb = int(ta * den), int(tb * den)
    nums, dens = [], []
    for i in range(len(F) - 1):
        dA = A[i + 1:] - A[i]
        dB = B[i + 1:] - B[i]
        ga = dA * den + dB * pa
        gb = dA * den + dB * pb
        hit = (np.minimum(ga, gb) <= w * den) & (np.maximum(ga, gb) >= -w * den) & (dB != 0)
        if not hit.any():
            continue
        dA, dB = dA[hit], dB[hit]
        for shift in (-w, 0, w):
            # dA + t dB = shift
            num = shift - dA
            sgn = np.sign(dB)
            num, d = num * sgn, dB * sgn
            inside = (num * den > pa * d) & (num * den < pb * d)
            nums.append(num[inside])
            dens.append(d[inside])
    if not nums:
        return []
    num = np.concatenate(nums)
    d = np.concatenate(dens)
    g = np.gcd(num, d)
    pairs = np.unique(np.stack([num // g, d // g], axis=1), axis=0)
    return sorted(Fraction(int(a), int(b)) for a, b in pairs)


def exact_area(F: TubeFamily, slab: Optional[Slab] = None, limit: Optional[int] = None) -> AreaReport:
    """|union of F within slab| as an exact rational.

    Between consecutive events the slice length is linear, so the trapezoid rule
    over the sorted event abscissae is exact.
    """
    limit = EXACT_TUBE_LIMIT if limit is None else limit
    if len(F) > limit or len(F) ** 2 > budget() * 4096:
        raise BudgetExceeded(f"{len(F)} tubes exceed the exact-mode limit {limit}; use sampled_area")
    slab = slab or F.tspan
    G = _clip(F, slab)
    if G is None or len(G) == 0:
        return AreaReport(Fraction(0), "exact", slab, events=0)
    ts = [G.t0] + event_times(G) + [G.t1]
    den = 1
    for t in ts:
        den = math.lcm(den, t.denominator)
    if den > 2**40:
        # group evaluation by denominator to stay inside int64
        L = [slice_length(G, t) for t in ts]
    else:
        nums = np.array([int(t * den) for t in ts], dtype=np.int64)
        try:
            S = _scaled_slice_lengths(G, nums, den)
            L = [Fraction(int(s), G.scale * den) for s in S]
        except BudgetExceeded:
            L = [slice_length(G, t) for t in ts]
    area = exact_sum((v - u) * (a + b) / 2 for u, v, a, b in zip(ts, ts[1:], L, L[1:]))
    return AreaReport(area, "exact", slab, events=len(ts) - 2)


def sampled_area(F: TubeFamily, slab: Optional[Slab] = None, M: int = 1000) -> AreaReport:
    """Composite trapezoid rule on M equispaced exact slices of the clipped slab."""
    if M < 2:
        raise ValueError("need at least two slices")
    slab = slab or F.tspan
    G = _clip(F, slab)
    if G is None or len(G) == 0:
        return AreaReport(Fraction(0), "sampled", slab, slices=M)
    ta, tb = G.t0, G.t1
    den = math.lcm(ta.denominator, tb.denominator) * (M - 1)
    a, step = int(ta * den), int((tb - ta) * den) // (M - 1)
    nums = a + step * np.arange(M, dtype=np.int64)
    S = _scaled_slice_lengths(G, nums, den)
    total = int(S.sum()) * 2 - int(S[0]) - int(S[-1])
    area = Fraction(total, 2 * G.scale * den) * (tb - ta) / (M - 1)
    return AreaReport(area, "sampled", slab, slices=M)


def area(F: TubeFamily, slab: Optional[Slab] = None, mode: str = "auto", slices: int = 1000,
         exact_limit: Optional[int] = None) -> AreaReport:
    """Dispatch between exact and sampled measure; ``auto`` goes exact up to the tube limit."""
    limit = EXACT_TUBE_LIMIT if exact_limit is None else exact_limit
    if mode == "auto":
        mode = "exact" if len(F) <= limit else "sampled"
    if mode == "exact":
        return exact_area(F, slab, limit=max(limit, len(F)))
    if mode == "sampled":
        return sampled_area(F, slab, slices)
    raise ValueError(f"unknown measure mode {mode!r}")


# ---------------------------------------------------------------------------
# uniformity inequality


@dataclass(frozen=True)
class UniformityVerdict:
    K: int
    alpha: Fraction
    m: Fraction
    overlap_total: Fraction
    union_measure: Fraction
    hypothesis_holds: bool

    @property
    def lhs(self) -> Fraction:
        return self.union_measure

    @property
    def rhs(self) -> Fraction:
        return self.K * self.alpha / (16 * self.m)

    @property
    def holds(self) -> bool:
        """Conclusion of the inequality; only meaningful when the hypothesis holds."""
        return self.lhs >= self.rhs

    @property
    def violated(self) -> bool:
        return self.hypothesis_holds and not self.holds


def uniformity_verdict(K: int, alpha, overlap_total, union_measure, m) -> UniformityVerdict:
    """If sum_{j,k} mu(A_j & A_k) <= K m alpha then mu(union) >= K alpha / (16 m)."""
    alpha, overlap_total, union_measure, m = map(Fraction, (alpha, overlap_total, union_measure, m))
    if m <= 0 or alpha <= 0:
        raise ValueError("m and alpha must be positive")
    return UniformityVerdict(K, alpha, m, overlap_total, union_measure, overlap_total <= K * m * alpha)


def verify_uniformity(sets: Sequence[IntervalUnion], m) -> UniformityVerdict:
    """The uniformity inequality for sets on a line, all of the same measure."""
    if not sets:
        raise ValueError("need at least one set")
    alpha = sets[0].length
    if any(A.length != alpha for A in sets):
        raise ValueError("all sets must have the same measure")
    total = exact_sum((A & B).length for A in sets for B in sets)
    union = IntervalUnion(iv for A in sets for iv in A.intervals).length
    return uniformity_verdict(len(sets), alpha, total, union, m)


def slab_uniformity(sigma: StickyMap, slab: Slab, m=None) -> UniformityVerdict:
    """The inequality for the tube pieces P_{sigma,s} & slab; m defaults to the tightest admissible value."""
    F = kakeya_family(sigma).restrict(slab)
    if F is None:
        raise ValueError("slab misses the tubes")
    alpha = F.width_value * (F.t1 - F.t0)
    total = family_overlap_sum(F)
    K = len(F)
    if m is None:
        m = total / (K * alpha)
    return uniformity_verdict(K, alpha, total, exact_area(F, limit=max(EXACT_TUBE_LIMIT, K)).value, m)


# ---------------------------------------------------------------------------
# lower bound on |K_sigma|


def floor_log3(n: int) -> int:
    j = 0
    while 3 ** (j + 1) <= n:
        j += 1
    return j


def lower_bound_slabs(n: int) -> list[int]:
    """Slab indices used for the lower bound: S_j = [3^-j, 3^(1-j)] for 1 <= j <= floor(log3 n) + 1."""
    return list(range(1, floor_log3(n) + 2))


@dataclass
class SlabMeasureReport:
    n: int
    slab_measures: dict[int, AreaReport] = field(default_factory=dict)

    @property
    def min_scaled(self) -> float:
        """min over slabs of n * |K_sigma & S_j|."""
        return min(self.n * r.estimate for r in self.slab_measures.values())

    @property
    def total(self) -> Fraction:
        return sum((r.value for r in self.slab_measures.values()), Fraction(0))

    @property
    def log_ratio(self) -> float:
        """Sum of slab measures divided by log3(n) / n."""
        return float(self.total) / (math.log(self.n, 3) / self.n)


def slab_measure_check(sigma: StickyMap, mode: str = "auto", slices: int = 1000) -> SlabMeasureReport:
    F = kakeya_family(sigma)
    report = SlabMeasureReport(sigma.n)
    for j in lower_bound_slabs(sigma.n):
        report.slab_measures[j] = area(F, Slab.triadic(j), mode=mode, slices=slices)
    return report
