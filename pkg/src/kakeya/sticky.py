"""Edge labelings of T*_n and the sticky maps T_n -> C_n they induce.

Every edge of T*_n is identified with the node it enters, so a labeling is one
{0, 2} value per non-root node. Canonical edge order is breadth-first by level,
lexicographic within a level; the edge into ``v`` at level k has index
``level_offset(k) + v.rank``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping, Optional, Union

import numpy as np

from .tree import (
    ROOT,
    TernaryString,
    check_budget,
    edge_count,
    enumerate_level,
    level_offset,
    prefix,
)

CantorString = TernaryString


def is_cantor(c: TernaryString) -> bool:
    return all(d != 1 for d in c.digits)


@dataclass(frozen=True)
class EdgeId:
    parent: TernaryString
    child_digit: int

    @property
    def child(self) -> TernaryString:
        return self.parent.child(self.child_digit)

    @property
    def index(self) -> int:
        c = self.child
        return level_offset(c.level) + c.rank


@dataclass(frozen=True, eq=False)
class EdgeLabeling:
    """Labels r_{t,a} in {0, 2} for every edge of T*_n.

    ``levels[k - 1]`` holds the labels of the 3^k edges entering level k, indexed
    by the rank of the child node.
    """

    n: int
    levels: tuple[np.ndarray, ...]
    seed: Optional[int] = None

    def __post_init__(self):
        if len(self.levels) != self.n:
            raise ValueError(f"expected {self.n} label levels, got {len(self.levels)}")
        frozen = []
        for k, arr in enumerate(self.levels, start=1):
            arr = np.asarray(arr, dtype=np.int64).copy()
            if arr.shape != (3**k,):
                raise ValueError(f"level {k} needs {3**k} labels, got shape {arr.shape}")
            if not np.all((arr == 0) | (arr == 2)):
                raise ValueError("edge labels must be 0 or 2")
            arr.setflags(write=False)
            frozen.append(arr)
        object.__setattr__(self, "levels", tuple(frozen))

    @classmethod
    def from_flat(cls, n: int, flat, seed: Optional[int] = None) -> "EdgeLabeling":
        flat = np.asarray(flat, dtype=np.int64)
        if flat.shape != (edge_count(n),):
            raise ValueError(f"expected {edge_count(n)} labels for n={n}, got {flat.size}")
        return cls(n, tuple(flat[level_offset(k): level_offset(k + 1)] for k in range(1, n + 1)), seed)

    @classmethod
    def from_mapping(cls, n: int, labels: Mapping[EdgeId, int]) -> "EdgeLabeling":
        flat = np.full(edge_count(n), -1, dtype=np.int64)
        for e, lab in labels.items():
            flat[e.index] = lab
        if np.any(flat < 0):
            raise ValueError("labeling must cover every edge of T*_n")
        return cls.from_flat(n, flat)

    def flat(self) -> np.ndarray:
        if not self.levels:
            return np.zeros(0, dtype=np.int64)
        return np.concatenate(self.levels)

    def label(self, edge: EdgeId) -> int:
        c = edge.child
        if not 1 <= c.level <= self.n:
            raise IndexError(f"edge into {c} is not an edge of T*_{self.n}")
        return int(self.levels[c.level - 1][c.rank])

    def label_into(self, v: TernaryString) -> int:
        """Label of the edge entering ``v``."""
        return self.label(EdgeId(v.parent, v.digits[-1]))

    def __eq__(self, other):
        if not isinstance(other, EdgeLabeling):
            return NotImplemented
        return self.n == other.n and all(np.array_equal(a, b) for a, b in zip(self.levels, other.levels))

    def __hash__(self):
        return hash((self.n, self.flat().tobytes()))

    # serialization

    def to_json(self) -> str:
        payload = {"n": self.n, "seed": self.seed, "labels": "".join(map(str, self.flat()))}
        return json.dumps(payload, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "EdgeLabeling":
        payload = json.loads(text)
        labels = payload["labels"]
        if set(labels) - {"0", "2"}:
            raise ValueError("labels string may only contain '0' and '2'")
        return cls.from_flat(int(payload["n"]), [int(c) for c in labels], payload.get("seed"))


def sample_edge_labels(n: int, seed: int) -> EdgeLabeling:
    """Independent fair {0, 2} labels, deterministic in ``(n, seed)``.

    Bits come from a Philox counter-based stream keyed on the seed and read off in
    canonical edge order, so the label of a given edge does not depend on n.
    """
    if n < 1:
        raise ValueError("depth must be at least 1")
    check_budget(edge_count(n), f"sample_edge_labels({n})")
    rng = np.random.Generator(np.random.Philox(key=seed & (2**64 - 1)))
    bits = rng.integers(0, 2, size=edge_count(n), dtype=np.int64)
    return EdgeLabeling.from_flat(n, 2 * bits, seed=seed)


@dataclass(frozen=True)
class StickyMap:
    """sigma: T_n -> C_n backed by an edge labeling; images are computed on demand."""

    labeling: EdgeLabeling
    _slopes: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    @property
    def n(self) -> int:
        return self.labeling.n

    @property
    def seed(self) -> Optional[int]:
        return self.labeling.seed

    def __call__(self, s: TernaryString) -> CantorString:
        return apply(self, s)

    def slope_numerators(self) -> np.ndarray:
        """Integers 3^n * value(sigma(s)) for every s in T_n, in lexicographic order."""
        if self._slopes is None:
            n = self.n
            ranks = np.arange(3**n, dtype=np.int64)
            out = np.zeros(3**n, dtype=np.int64)
            for j in range(1, n + 1):
                out += self.labeling.levels[j - 1][ranks // 3 ** (n - j)] * 3 ** (n - j)
            out.setflags(write=False)
            object.__setattr__(self, "_slopes", out)
        return self._slopes

    def as_dict(self) -> dict[TernaryString, CantorString]:
        return {s: apply(self, s) for s in enumerate_level(self.n)}


def apply(sigma: StickyMap, s: TernaryString) -> CantorString:
    """sigma(s): digit j is the label of the edge from prefix(s, j-1) towards digit(s, j)."""
    if s.level != sigma.n:
        raise ValueError(f"{s} is not in T_{sigma.n}")
    return TernaryString(tuple(sigma.labeling.label_into(prefix(s, j)) for j in range(1, s.level + 1)))


MapLike = Union[Mapping[TernaryString, TernaryString], Callable[[TernaryString], TernaryString]]


def _as_callable(f: MapLike) -> Callable[[TernaryString], TernaryString]:
    return f.__getitem__ if isinstance(f, Mapping) else f


def is_sticky(f: MapLike, n: int) -> bool:
    """True iff digit j of f(s) depends only on the first j digits of s, for every j."""
    g = _as_callable(f)
    images = {s: g(s) for s in enumerate_level(n)}
    for j in range(1, n + 1):
        seen: dict[tuple[int, ...], int] = {}
        for s, c in images.items():
            key = s.digits[:j]
            d = c.digits[j - 1]
            if seen.setdefault(key, d) != d:
                return False
    return True


def labeling_from_map(f: MapLike, n: int) -> EdgeLabeling:
    """Recover the edge labels from a sticky map (inverse of ``StickyMap``)."""
    g = _as_callable(f)
    flat = np.full(edge_count(n), -1, dtype=np.int64)
    for s in enumerate_level(n):
        c = g(s)
        if c.level != n or not is_cantor(c):
            raise ValueError(f"image of {s} is not in C_{n}: {c}")
        for j in range(1, n + 1):
            v = prefix(s, j)
            idx = level_offset(j) + v.rank
            if flat[idx] >= 0 and flat[idx] != c.digits[j - 1]:
                raise ValueError("map is not sticky")
            flat[idx] = c.digits[j - 1]
    return EdgeLabeling.from_flat(n, flat)


def ones_to_zeros_map(n: int) -> StickyMap:
    """The deterministic labeling r_{t,a} = 0 for a in {0, 1} and 2 for a = 2."""
    if n < 1:
        raise ValueError("depth must be at least 1")
    levels = tuple(np.where(np.arange(3**k) % 3 == 2, 2, 0) for k in range(1, n + 1))
    return StickyMap(EdgeLabeling(n, levels))


def iter_all_labelings(n: int) -> Iterator[EdgeLabeling]:
    e = edge_count(n)
    check_budget(2**e, f"enumerate_all_labelings({n})")
    for bits in itertools.product((0, 2), repeat=e):
        yield EdgeLabeling.from_flat(n, bits)


def enumerate_all_labelings(n: int) -> list[EdgeLabeling]:
    """Every labeling of T*_n exactly once (2^(3 + ... + 3^n) of them)."""
    return list(iter_all_labelings(n))


def sample_sticky_map(n: int, seed: int) -> StickyMap:
    return StickyMap(sample_edge_labels(n, seed))


__all__ = [
    "ROOT",
    "CantorString",
    "EdgeId",
    "EdgeLabeling",
    "StickyMap",
    "apply",
    "enumerate_all_labelings",
    "is_cantor",
    "is_sticky",
    "iter_all_labelings",
    "ones_to_zeros_map",
    "labeling_from_map",
    "sample_edge_labels",
    "sample_sticky_map",
]
