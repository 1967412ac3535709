"""Ternary strings, the tree of all strings up to depth n, and triadic intervals.

A node ``.a1a2...aj`` is stored as a tuple of digits. Its level is the number of
digits; the root is the empty string ``"."``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

DEFAULT_BUDGET = 3**12


class BudgetExceeded(RuntimeError):
    """Raised when an enumeration or computation would exceed the size budget."""


def budget() -> int:
    """Current cap on tube/event/node counts (env var ``KAKEYA_BUDGET``)."""
    raw = os.environ.get("KAKEYA_BUDGET")
    return int(raw) if raw else DEFAULT_BUDGET


def check_budget(count: int, what: str) -> None:
    cap = budget()
    if count > cap:
        raise BudgetExceeded(f"{what}: {count} exceeds budget {cap} (set KAKEYA_BUDGET)")


@dataclass(frozen=True, order=True)
class TernaryString:
    digits: tuple[int, ...] = ()

    def __post_init__(self):
        if not isinstance(self.digits, tuple):
            object.__setattr__(self, "digits", tuple(self.digits))
        for d in self.digits:
            if d not in (0, 1, 2):
                raise ValueError(f"not a ternary digit: {d!r}")

    @classmethod
    def parse(cls, text: str) -> "TernaryString":
        """Parse the canonical rendering, e.g. ``".102"``; ``"."`` is the root."""
        if not text.startswith("."):
            raise ValueError(f"ternary string must start with '.': {text!r}")
        return cls(tuple(int(c) for c in text[1:]))

    @classmethod
    def from_rank(cls, rank: int, level: int) -> "TernaryString":
        """Inverse of :attr:`rank`: the ``rank``-th string of T_level in lexicographic order."""
        if not 0 <= rank < 3**level:
            raise ValueError(f"rank {rank} out of range for level {level}")
        digits = []
        for _ in range(level):
            rank, d = divmod(rank, 3)
            digits.append(d)
        return cls(tuple(reversed(digits)))

    @property
    def level(self) -> int:
        return len(self.digits)

    @property
    def rank(self) -> int:
        """Position within its level in lexicographic order (the digits read as a base-3 integer)."""
        r = 0
        for d in self.digits:
            r = 3 * r + d
        return r

    def child(self, d: int) -> "TernaryString":
        return TernaryString(self.digits + (d,))

    @property
    def parent(self) -> "TernaryString":
        if not self.digits:
            raise ValueError("the root has no parent")
        return TernaryString(self.digits[:-1])

    def __str__(self) -> str:
        return "." + "".join(map(str, self.digits))

    def __repr__(self) -> str:
        return f"TernaryString({str(self)!r})"


ROOT = TernaryString()


@dataclass(frozen=True)
class TriadicInterval:
    left: Fraction
    length: Fraction

    @property
    def right(self) -> Fraction:
        return self.left + self.length

    def contains(self, other: "TriadicInterval") -> bool:
        return self.left <= other.left and other.right <= self.right


def digit(s: TernaryString, j: int) -> int:
    """The j-th digit of ``s`` (1-based)."""
    if not 1 <= j <= s.level:
        raise IndexError(f"digit index {j} out of range for {s}")
    return s.digits[j - 1]


def prefix(s: TernaryString, j: int) -> TernaryString:
    """The level-j ancestor of ``s``."""
    if not 0 <= j <= s.level:
        raise IndexError(f"prefix length {j} out of range for {s}")
    return TernaryString(s.digits[:j])


def value(s: TernaryString) -> Fraction:
    """``s`` read as a base-3 fraction."""
    return Fraction(s.rank, 3**s.level)


def interval(s: TernaryString) -> TriadicInterval:
    return TriadicInterval(value(s), Fraction(1, 3**s.level))


def is_ancestor(t: TernaryString, s: TernaryString) -> bool:
    """True when I(s) is contained in I(t); every node is its own ancestor."""
    return t.level <= s.level and s.digits[: t.level] == t.digits


def common_prefix_length(s1: TernaryString, s2: TernaryString) -> int:
    k = 0
    for a, b in zip(s1.digits, s2.digits):
        if a != b:
            break
        k += 1
    return k


def triadic_distance(s1: TernaryString, s2: TernaryString) -> Fraction:
    """3^-k with k the length of the longest common prefix; d(s, s) = 3^-level."""
    if s1.level != s2.level:
        raise ValueError(f"triadic distance needs equal levels: {s1} vs {s2}")
    return Fraction(1, 3 ** common_prefix_length(s1, s2))


def iter_level(n: int) -> Iterator[TernaryString]:
    for r in range(3**n):
        yield TernaryString.from_rank(r, n)


def enumerate_level(n: int) -> list[TernaryString]:
    """All 3^n strings of T_n in lexicographic order."""
    if n < 0:
        raise ValueError("level must be non-negative")
    check_budget(3**n, f"enumerate_level({n})")
    return list(iter_level(n))


def edge_count(n: int) -> int:
    """Number of edges of T*_n, i.e. 3 + 9 + ... + 3^n."""
    return (3 ** (n + 1) - 3) // 2


def level_offset(k: int) -> int:
    """Canonical index of the first edge entering level k (k >= 1)."""
    return (3**k - 3) // 2
