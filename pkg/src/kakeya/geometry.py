"""Tubes (thin parallelograms) over the t-axis and the families built from sticky maps.

A tube is the set {(t, y) : t0 <= t <= t1, a + m t <= y <= a + w + m t}. All
coordinates are exact rationals. ``TubeFamily`` keeps a whole family as integer
numerators over one common denominator so the measure code can work on numpy
arrays without leaving exact arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .sticky import StickyMap, apply
from .tree import TernaryString, check_budget, common_prefix_length, value


@dataclass(frozen=True)
class Slab:
    t0: Fraction
    t1: Fraction

    def __post_init__(self):
        object.__setattr__(self, "t0", Fraction(self.t0))
        object.__setattr__(self, "t1", Fraction(self.t1))
        if not (0 <= self.t0 < self.t1):
            raise ValueError(f"slab needs 0 <= t0 < t1, got [{self.t0}, {self.t1}]")

    @property
    def length(self) -> Fraction:
        return self.t1 - self.t0

    @classmethod
    def triadic(cls, j: int) -> "Slab":
        """[3^-j, 3^(1-j)]."""
        return cls(Fraction(1, 3**j), Fraction(3, 3**j))


@dataclass(frozen=True)
class Tube:
    source: Optional[TernaryString]
    intercept: Fraction
    width: Fraction
    slope: Fraction
    t0: Fraction = Fraction(0)
    t1: Fraction = Fraction(1)

    @property
    def length(self) -> Fraction:
        return self.t1 - self.t0

    @property
    def area(self) -> Fraction:
        return self.width * self.length

    @property
    def eccentricity(self) -> Fraction:
        return self.length / self.width

    @property
    def corners(self) -> tuple[tuple[Fraction, Fraction], ...]:
        """Counter-clockwise: lower-left, lower-right, upper-right, upper-left."""
        a, w, m = self.intercept, self.width, self.slope
        return (
            (self.t0, a + m * self.t0),
            (self.t1, a + m * self.t1),
            (self.t1, a + w + m * self.t1),
            (self.t0, a + w + m * self.t0),
        )

    @property
    def center(self) -> tuple[Fraction, Fraction]:
        tm = (self.t0 + self.t1) / 2
        return tm, self.intercept + self.width / 2 + self.slope * tm

    def contains(self, t, y) -> bool:
        """Closed point-in-parallelogram test by edge orientation (cross products)."""
        t, y = Fraction(t), Fraction(y)
        pts = self.corners
        for (x0, y0), (x1, y1) in zip(pts, pts[1:] + pts[:1]):
            if (x1 - x0) * (y - y0) - (y1 - y0) * (t - x0) < 0:
                return False
        return True


def tube(sigma: StickyMap, s: TernaryString) -> Tube:
    """P_{sigma,s}: starts at height s/3 on t = 0, width 3^-(n+1), slope sigma(s)."""
    n = sigma.n
    if s.level != n:
        raise ValueError(f"{s} is not in T_{n}")
    return Tube(s, value(s) / 3, Fraction(1, 3 ** (n + 1)), value(apply(sigma, s)))


def cross_section(T: Tube, t) -> Optional[tuple[Fraction, Fraction]]:
    """Vertical slice of ``T`` at abscissa t, or None when t is outside the tube."""
    t = Fraction(t)
    if not T.t0 <= t <= T.t1:
        return None
    lo = T.intercept + t * T.slope
    return lo, lo + T.width


def restrict(T: Tube, slab: Slab) -> Optional[Tube]:
    """T intersected with slab x R; None if the overlap has zero length."""
    t0, t1 = max(T.t0, slab.t0), min(T.t1, slab.t1)
    if t0 >= t1:
        return None
    return Tube(T.source, T.intercept, T.width, T.slope, t0, t1)


def double(T: Tube) -> Tube:
    """Dilation by 2 about the center: length and width doubled, same slope and center."""
    half = T.length / 2
    tm = T.t0 + half
    return Tube(T.source, T.intercept - T.width / 2, 2 * T.width, T.slope, tm - 2 * half, tm + 2 * half)


def _intersection_length(T1: Tube, T2: Tube, t: Fraction) -> Fraction:
    lo1 = T1.intercept + t * T1.slope
    lo2 = T2.intercept + t * T2.slope
    return max(Fraction(0), min(lo1 + T1.width, lo2 + T2.width) - max(lo1, lo2))


def overlap_area(T1: Tube, T2: Tube) -> Fraction:
    """Exact area of T1 & T2.

    The vertical intersection length is piecewise linear in t, with kinks only
    where two cross-section endpoints meet; it is integrated exactly piece by piece.
    """
    ta, tb = max(T1.t0, T2.t0), min(T1.t1, T2.t1)
    if ta >= tb:
        return Fraction(0)
    dm = T1.slope - T2.slope
    cuts = {ta, tb}
    if dm:
        da = T1.intercept - T2.intercept
        for shift in (0, T1.width, -T2.width, T1.width - T2.width):
            # lo1 + shift = lo2  <=>  da + shift + t dm = 0
            tc = -(da + shift) / dm
            if ta < tc < tb:
                cuts.add(tc)
    pts = sorted(cuts)
    total = Fraction(0)
    for u, v in zip(pts, pts[1:]):
        total += (v - u) * _intersection_length(T1, T2, (u + v) / 2)
    return total


@dataclass(frozen=True, eq=False)
class TubeFamily:
    """Equal-width tubes sharing one t-span.

    Tube i has intercept ``intercepts[i] / scale``, slope ``slopes[i] / scale``
    and width ``width / scale``. For families built from a sticky map, tube i
    comes from the i-th string of T_n in lexicographic order.
    """

    n: int
    scale: int
    intercepts: np.ndarray
    slopes: np.ndarray
    width: int
    t0: Fraction = Fraction(0)
    t1: Fraction = Fraction(1)
    sources: Optional[tuple[TernaryString, ...]] = None

    def __post_init__(self):
        for name in ("intercepts", "slopes"):
            arr = np.asarray(getattr(self, name), dtype=np.int64).copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "t0", Fraction(self.t0))
        object.__setattr__(self, "t1", Fraction(self.t1))
        if self.intercepts.shape != self.slopes.shape:
            raise ValueError("intercepts and slopes must have the same length")
        if self.t0 >= self.t1:
            raise ValueError("empty t-span")

    def __len__(self) -> int:
        return int(self.intercepts.size)

    @property
    def width_value(self) -> Fraction:
        return Fraction(self.width, self.scale)

    @property
    def tspan(self) -> Slab:
        return Slab(self.t0, self.t1)

    def source(self, i: int) -> TernaryString:
        if self.sources is not None:
            return self.sources[i]
        return TernaryString.from_rank(i, self.n)

    def tube(self, i: int) -> Tube:
        q = self.scale
        return Tube(
            self.source(i),
            Fraction(int(self.intercepts[i]), q),
            Fraction(self.width, q),
            Fraction(int(self.slopes[i]), q),
            self.t0,
            self.t1,
        )

    @property
    def tubes(self) -> list[Tube]:
        return [self.tube(i) for i in range(len(self))]

    def restrict(self, slab: Slab) -> Optional["TubeFamily"]:
        t0, t1 = max(self.t0, slab.t0), min(self.t1, slab.t1)
        if t0 >= t1:
            return None
        return TubeFamily(self.n, self.scale, self.intercepts, self.slopes, self.width, t0, t1, self.sources)

    def doubled(self) -> "TubeFamily":
        """Every tube replaced by its dilation by 2 about its center."""
        half = (self.t1 - self.t0) / 2
        tm = self.t0 + half
        # new intercept a - w/2 needs denominator 2 * scale
        return TubeFamily(
            self.n,
            2 * self.scale,
            2 * self.intercepts - self.width,
            2 * self.slopes,
            4 * self.width,
            tm - 2 * half,
            tm + 2 * half,
            self.sources,
        )

    @classmethod
    def from_tubes(cls, tubes: Sequence[Tube], n: int = 0) -> "TubeFamily":
        if not tubes:
            raise ValueError("empty family")
        w, t0, t1 = tubes[0].width, tubes[0].t0, tubes[0].t1
        if any(T.width != w or T.t0 != t0 or T.t1 != t1 for T in tubes):
            raise ValueError("TubeFamily needs equal widths and a common t-span")
        q = 1
        for T in tubes:
            q = math.lcm(q, T.intercept.denominator, T.slope.denominator)
        q = math.lcm(q, w.denominator)
        return cls(
            n,
            q,
            [int(T.intercept * q) for T in tubes],
            [int(T.slope * q) for T in tubes],
            int(w * q),
            t0,
            t1,
            tuple(T.source for T in tubes) if all(T.source is not None for T in tubes) else None,
        )

    def to_csv_rows(self) -> Iterable[list[str]]:
        yield ["source", "intercept", "width", "slope", "t0", "t1"]
        for T in self.tubes:
            yield [str(T.source), frac_str(T.intercept), frac_str(T.width), frac_str(T.slope),
                   frac_str(T.t0), frac_str(T.t1)]


def frac_str(x: Fraction) -> str:
    """Exact "p/q" rendering used in every output file."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def kakeya_family(sigma: StickyMap) -> TubeFamily:
    """K_sigma as a family: one tube per s in T_n, intercept s/3, slope sigma(s)."""
    n = sigma.n
    check_budget(3**n, f"kakeya_family(n={n})")
    q = 3 ** (n + 1)
    return TubeFamily(n, q, np.arange(3**n, dtype=np.int64), 3 * sigma.slope_numerators(), 1)


def theorem_tubes(sigma: StickyMap) -> tuple[TubeFamily, TubeFamily]:
    """(P_j, 2P_j): the tubes restricted to t in [1/3, 1], and their doubles."""
    P = kakeya_family(sigma).restrict(Slab(Fraction(1, 3), Fraction(1)))
    return P, P.doubled()


def _tent_primitive(u: Fraction, w: Fraction) -> Fraction:
    """Antiderivative of max(0, w - |u|), zero at -infinity."""
    if u <= -w:
        return Fraction(0)
    if u <= 0:
        return (u + w) ** 2 / 2
    if u < w:
        return w * w - (w - u) ** 2 / 2
    return w * w


def _equal_width_overlap(da: int, dm: int, w: int, ta: Fraction, tb: Fraction, q: int) -> Fraction:
    """Area of the intersection of two width-w/q tubes whose gap is (da + t dm)/q over [ta, tb]."""
    if dm == 0:
        return (tb - ta) * Fraction(max(0, w - abs(da)), q)
    u0, u1 = da + ta * dm, da + tb * dm
    if u0 > u1:
        u0, u1 = u1, u0
    return (_tent_primitive(u1, Fraction(w)) - _tent_primitive(u0, Fraction(w))) / (abs(dm) * q)


def overlap_pairs(F: TubeFamily) -> tuple[np.ndarray, np.ndarray]:
    """Index pairs i < j whose tubes can intersect on the family's t-span."""
    ta, tb = F.t0, F.t1
    A, B, w = F.intercepts, F.slopes, F.width
    # compare scaled gaps at both ends: gap(t) * den
    den = math.lcm(ta.denominator, tb.denominator)
    pa, pb = int(ta * den), int(tb * den)
    I, J = [], []
    for i in range(len(F) - 1):
        dA = A[i + 1:] - A[i]
        dB = B[i + 1:] - B[i]
        ga = dA * den + dB * pa
        gb = dA * den + dB * pb
        lo = np.minimum(ga, gb)
        hi = np.maximum(ga, gb)
        hit = np.nonzero((lo < w * den) & (hi > -w * den))[0]
        if hit.size:
            I.append(np.full(hit.size, i))
            J.append(hit + i + 1)
    if not I:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    return np.concatenate(I), np.concatenate(J)


def overlap_sum(sigma: StickyMap, slab: Slab) -> Fraction:
    """sum over ordered pairs (s1, s2), diagonal included, of |P_{s1} & P_{s2} & slab|."""
    F = kakeya_family(sigma).restrict(slab)
    if F is None:
        return Fraction(0)
    return family_overlap_sum(F)


def family_overlap_sum(F: TubeFamily) -> Fraction:
    check_budget(len(F) ** 2, "overlap_sum pairs")
    diag = len(F) * F.width_value * (F.t1 - F.t0)
    I, J = overlap_pairs(F)
    off = Fraction(0)
    for i, j in zip(I.tolist(), J.tolist()):
        off += _equal_width_overlap(
            int(F.intercepts[j] - F.intercepts[i]), int(F.slopes[j] - F.slopes[i]), F.width, F.t0, F.t1, F.scale
        )
    return diag + 2 * off


def pair_count_A(n: int, k: int, j: int) -> int:
    """Ordered pairs with d(s1,s2) >= 3^j |s1-s2| and 3^k <= 3^j |s1-s2| < 3^(k+1)."""
    check_budget(9**n, f"pair_count_A(n={n})")
    e = n + k - j  # band in rank units: 3^e <= |r1 - r2| < 3^(e+1)
    if e < 0:
        return 0
    r = np.arange(3**n, dtype=np.int64)
    r1, r2 = np.meshgrid(r, r, indexing="ij")
    diff = np.abs(r1 - r2)
    cp = np.zeros_like(r1)
    for m in range(1, n + 1):
        cp += (r1 // 3 ** (n - m)) == (r2 // 3 ** (n - m))
    # d >= 3^j |s1 - s2|  <=>  3^(n - cp) >= 3^j * diff
    close = 3 ** (n - cp) >= 3**j * diff
    band = (diff >= 3**e) & (diff < 3 ** (e + 1))
    return int(np.count_nonzero(close & band))


def slope_agreement(sigma: StickyMap, s1: TernaryString, s2: TernaryString) -> int:
    """Number of leading digits shared by sigma(s1) and sigma(s2)."""
    return common_prefix_length(apply(sigma, s1), apply(sigma, s2))
