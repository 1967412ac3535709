"""Bernoulli(1/2) edge percolation and electrical resistance on subtrees of T*_n.

A subtree is stored level by level as sorted arrays of node ranks; the parent of
rank r at level k is r // 3 at level k - 1. An edge entering level k carries a
resistor of 2^k ohms and every surviving level-n node is wired to the sink.
"""

from __future__ import annotations

import json
import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Union

import numpy as np

from .tree import ROOT, TernaryString, check_budget

INF = math.inf
Resistance = Union[Fraction, float]  # float only for INF


class Subtree:
    """Root-connected subtree of T*_n (the root is always present)."""

    __slots__ = ("n", "levels", "_child_slices")

    def __init__(self, n: int, levels: Iterable[Iterable[int]]):
        levels = [np.unique(np.asarray(list(lv) if not isinstance(lv, np.ndarray) else lv, dtype=np.int64))
                  for lv in levels]
        if len(levels) != n + 1:
            raise ValueError(f"expected {n + 1} levels, got {len(levels)}")
        if levels[0].tolist() != [0]:
            raise ValueError("a subtree must contain exactly the root at level 0")
        for k in range(1, n + 1):
            lv = levels[k]
            if lv.size and (lv[0] < 0 or lv[-1] >= 3**k):
                raise ValueError(f"rank out of range at level {k}")
            if lv.size and not np.all(np.isin(lv // 3, levels[k - 1])):
                raise ValueError(f"level {k} has nodes whose parent is missing")
            lv.setflags(write=False)
        self.n = n
        self.levels = tuple(levels)
        self._child_slices = None

    @classmethod
    def full(cls, n: int) -> "Subtree":
        check_budget(3**n, f"full tree n={n}")
        return cls(n, [np.arange(3**k) for k in range(n + 1)])

    @classmethod
    def chain(cls, n: int) -> "Subtree":
        return cls(n, [[0]] * (n + 1))

    @classmethod
    def from_nodes(cls, n: int, nodes: Iterable[TernaryString]) -> "Subtree":
        levels: list[set[int]] = [set() for _ in range(n + 1)]
        levels[0].add(0)
        for v in nodes:
            if v.level > n:
                raise ValueError(f"{v} is deeper than n={n}")
            levels[v.level].add(v.rank)
        return cls(n, [sorted(s) for s in levels])

    def nodes(self) -> list[TernaryString]:
        """Canonical order: by level, lexicographic within a level."""
        return [TernaryString.from_rank(int(r), k) for k, lv in enumerate(self.levels) for r in lv]

    def __len__(self) -> int:
        return sum(lv.size for lv in self.levels)

    @property
    def edge_count(self) -> int:
        return len(self) - 1

    def level_counts(self) -> list[int]:
        return [int(lv.size) for lv in self.levels]

    def __contains__(self, v: TernaryString) -> bool:
        if v.level > self.n:
            return False
        lv = self.levels[v.level]
        i = np.searchsorted(lv, v.rank)
        return bool(i < lv.size and lv[i] == v.rank)

    def __eq__(self, other):
        return (isinstance(other, Subtree) and self.n == other.n
                and all(np.array_equal(a, b) for a, b in zip(self.levels, other.levels)))

    def __repr__(self):
        return f"Subtree(n={self.n}, counts={self.level_counts()})"

    def issubset(self, other: "Subtree") -> bool:
        return self.n == other.n and all(np.all(np.isin(a, b)) for a, b in zip(self.levels, other.levels))

    def child_slices(self) -> list[np.ndarray]:
        """For level k < n: boundaries so that children of node i are levels[k+1][b[i]:b[i+1]]."""
        if self._child_slices is None:
            out = []
            for k in range(self.n):
                parents = self.levels[k + 1] // 3
                out.append(np.searchsorted(parents, np.append(self.levels[k], np.iinfo(np.int64).max)))
            self._child_slices = out
        return self._child_slices

    def prune_leaves(self, keep: np.ndarray) -> "Subtree":
        """Drop the level-n nodes not flagged in ``keep`` and every node left without level-n descendants."""
        if self.n == 0:
            return self
        levels = [None] * (self.n + 1)
        levels[self.n] = self.levels[self.n][np.asarray(keep, dtype=bool)]
        for k in range(self.n - 1, 0, -1):
            levels[k] = np.unique(levels[k + 1] // 3)
        levels[0] = np.array([0])
        return Subtree(self.n, levels)

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "nodes": [str(v) for v in self.nodes()]})

    @classmethod
    def from_json(cls, text: str) -> "Subtree":
        payload = json.loads(text)
        return cls.from_nodes(int(payload["n"]), (TernaryString.parse(s) for s in payload["nodes"]))


# ---------------------------------------------------------------------------
# survival


def _bottom_up(T: Subtree, leaf_value, combine):
    """Fold ``combine(list_of_child_values)`` from level n up to the root."""
    vals = [leaf_value] * T.levels[T.n].size
    slices = T.child_slices()
    for k in range(T.n - 1, -1, -1):
        b = slices[k].tolist()
        vals = [combine(vals[b[i]: b[i + 1]]) for i in range(T.levels[k].size)]
    return vals[0]


def _survival_combine(children: list[Fraction]) -> Fraction:
    # 1 - prod(1 - P_c / 2); reduces to the three-child expansion
    q = Fraction(1)
    for p in children:
        q *= 1 - p / 2
    return 1 - q


def survival_exact(T: Subtree) -> Fraction:
    """Probability that a root-to-level-n path survives when every edge is kept with probability 1/2."""
    return _bottom_up(T, Fraction(1), _survival_combine)


def survival_three_children(P1, P2, P3) -> Fraction:
    """The expanded three-child form; missing children enter with probability zero."""
    return (Fraction(P1 + P2 + P3) / 2 - Fraction(P1 * P2 + P1 * P3 + P2 * P3) / 4
            + Fraction(P1 * P2 * P3) / 8)


@dataclass(frozen=True)
class MCResult:
    estimate: float
    successes: int
    trials: int

    @property
    def stderr(self) -> float:
        p = self.estimate
        return math.sqrt(max(p * (1 - p), 0.0) / self.trials)


def survival_mc(T: Subtree, trials: int, seed: int, batch: int = 20_000) -> MCResult:
    """Monte Carlo survival frequency; trial i uses row i of a Philox stream keyed on ``seed``."""
    if trials < 1:
        raise ValueError("need at least one trial")
    if T.n == 0:
        return MCResult(1.0, trials, trials)
    rng = np.random.Generator(np.random.Philox(key=seed & (2**64 - 1)))
    E = T.edge_count
    slices = T.child_slices()
    # edges in canonical order: the edges into level k occupy offsets[k-1]:offsets[k]
    offsets = np.cumsum([0] + [lv.size for lv in T.levels[1:]])
    hits = 0
    done = 0
    while done < trials:
        b = min(batch, trials - done)
        bits = rng.integers(0, 2, size=(b, E), dtype=np.int8).astype(bool)
        alive = bits[:, offsets[T.n - 1]: offsets[T.n]]
        for k in range(T.n - 1, -1, -1):
            bounds = slices[k]
            cs = np.zeros((b, alive.shape[1] + 1), dtype=np.int32)
            np.cumsum(alive, axis=1, out=cs[:, 1:])
            has = (cs[:, bounds[1:]] - cs[:, bounds[:-1]]) > 0
            alive = has & bits[:, offsets[k - 1]: offsets[k]] if k > 0 else has
        hits += int(alive[:, 0].sum())
        done += b
    return MCResult(hits / trials, hits, trials)


# ---------------------------------------------------------------------------
# resistance


def series(*rs: Resistance) -> Resistance:
    if any(r == INF for r in rs):
        return INF
    return sum(rs, Fraction(0))


def parallel(*rs: Resistance) -> Resistance:
    finite = [r for r in rs if r != INF]
    if not finite:
        return INF
    if any(r == 0 for r in finite):
        return Fraction(0)
    return 1 / sum((1 / Fraction(r) for r in finite), Fraction(0))


def _resistance_combine(children: list[Resistance]) -> Resistance:
    # 1/R = sum 1/(2 + 2 R_c), with the child subtree measured in its own rescaled units
    return parallel(*(series(Fraction(2), 2 * r if r != INF else INF) for r in children))


def resistance_recursive(T: Subtree) -> Resistance:
    """Root-to-bottom resistance through the self-similar recursion."""
    return _bottom_up(T, Fraction(0), _resistance_combine)


SINK = "sink"


def resistance_network(T: Subtree) -> Resistance:
    """Same quantity by series-parallel reduction of the explicit resistor network.

    Level-n nodes are identified with the sink. Dangling non-terminal nodes are
    discarded, parallel edges merged and degree-two nodes spliced out until a
    single root-sink resistor is left.
    """
    if T.n == 0:
        return Fraction(0)

    def name(k, r):
        return SINK if k == T.n else (k, r)

    # multigraph: edge id -> [u, v, R]
    edges: dict[int, list] = {}
    adj: dict = defaultdict(set)
    eid = 0
    for k in range(1, T.n + 1):
        for r in T.levels[k].tolist():
            u, v = name(k - 1, r // 3), name(k, r)
            edges[eid] = [u, v, Fraction(2**k)]
            adj[u].add(eid)
            adj[v].add(eid)
            eid += 1
    terminals = {(0, 0), SINK}

    def drop(e):
        u, v, _ = edges.pop(e)
        adj[u].discard(e)
        adj[v].discard(e)

    def add(u, v, R):
        nonlocal eid
        edges[eid] = [u, v, R]
        adj[u].add(eid)
        adj[v].add(eid)
        eid += 1

    changed = True
    while changed:
        changed = False
        for node in list(adj):
            if node in terminals or node not in adj:
                continue
            es = list(adj[node])
            if len(es) == 0:
                del adj[node]
                changed = True
            elif len(es) == 1:
                drop(es[0])
                del adj[node]
                changed = True
            elif len(es) == 2:
                (a, b) = es
                ua = edges[a][0] if edges[a][1] == node else edges[a][1]
                ub = edges[b][0] if edges[b][1] == node else edges[b][1]
                R = series(edges[a][2], edges[b][2])
                drop(a)
                drop(b)
                del adj[node]
                if ua != ub:
                    add(ua, ub, R)
                changed = True
        # merge parallel edges
        groups: dict = defaultdict(list)
        for e, (u, v, _) in edges.items():
            if u == v:
                groups[("loop", e)].append(e)
            else:
                groups[frozenset((u, v))].append(e)
        for key, es in groups.items():
            if isinstance(key, tuple):
                drop(es[0])
                changed = True
            elif len(es) > 1:
                u, v = edges[es[0]][0], edges[es[0]][1]
                R = parallel(*(edges[e][2] for e in es))
                for e in es:
                    drop(e)
                add(u, v, R)
                changed = True
    if not edges:
        return INF
    if len(edges) != 1:
        raise RuntimeError("network did not reduce to a single resistor; not series-parallel")
    (u, v, R), = edges.values()
    if {u, v} != terminals:
        return INF
    return R


resistance = resistance_recursive


@dataclass(frozen=True)
class ResistanceBoundVerdict:
    survival: Fraction
    resistance: Resistance
    constant: Fraction

    @property
    def bound(self) -> Fraction:
        if self.resistance == INF:
            return Fraction(0)
        return self.constant / (2 + self.resistance)

    @property
    def holds(self) -> bool:
        return self.survival <= self.bound

    @property
    def ratio(self) -> float:
        """P * (2 + R), the empirical constant."""
        if self.resistance == INF:
            return 0.0
        return float(self.survival * (2 + self.resistance))


def resistance_bound_check(T: Subtree, constant=12) -> ResistanceBoundVerdict:
    """P(T) <= constant / (2 + R(T))."""
    return ResistanceBoundVerdict(survival_exact(T), resistance_recursive(T), Fraction(constant))


def random_subtree(n: int, p: float, seed: int) -> Subtree:
    """Keep each child edge independently with probability p; take the root component."""
    if not 0 < p <= 1:
        raise ValueError("keep probability must be in (0, 1]")
    rng = np.random.default_rng(seed)
    levels = [np.array([0], dtype=np.int64)]
    for k in range(1, n + 1):
        kids = (3 * levels[-1][:, None] + np.arange(3)[None, :]).ravel()
        check_budget(kids.size, f"random_subtree level {k}")
        keep = rng.random(kids.size) < p
        levels.append(kids[keep])
    return Subtree(n, levels)


__all__ = [
    "INF",
    "ResistanceBoundVerdict",
    "MCResult",
    "ROOT",
    "Subtree",
    "resistance_bound_check",
    "parallel",
    "random_subtree",
    "resistance",
    "resistance_network",
    "resistance_recursive",
    "series",
    "survival_exact",
    "survival_mc",
    "survival_three_children",
]
