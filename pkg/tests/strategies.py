from fractions import Fraction

from hypothesis import strategies as st

from kakeya.percolation import random_subtree
from kakeya.pointwise import Point
from kakeya.sticky import sample_sticky_map
from kakeya.tree import TernaryString


def ternary(level: int):
    return st.lists(st.integers(0, 2), min_size=level, max_size=level).map(lambda d: TernaryString(tuple(d)))


@st.composite
def same_level(draw, count=2, max_level=6):
    k = draw(st.integers(0, max_level))
    return [draw(ternary(k)) for _ in range(count)]


seeds = st.integers(0, 2**32 - 1)


@st.composite
def sticky_maps(draw, min_n=1, max_n=4):
    return sample_sticky_map(draw(st.integers(min_n, max_n)), draw(seeds))


@st.composite
def subtrees(draw, max_n=6):
    n = draw(st.integers(0, max_n))
    p = draw(st.floats(0.2, 1.0))
    return random_subtree(n, p, draw(seeds))


@st.composite
def points(draw, den=3**5 * 2**6):
    t = draw(st.integers(den // 3 + 1, den - 1))
    y = draw(st.integers(-den // 8, 4 * den // 3 + den // 8))
    return Point(Fraction(t, den), Fraction(y, den))
