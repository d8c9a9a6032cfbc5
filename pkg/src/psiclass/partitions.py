"""Ordered partitions, canonical keys and the restricted families Pi_L.

A partition is a plain tuple of nonnegative ints.  The canonical form used
as a memoization key is the same multiset sorted non-increasing.
"""
from __future__ import annotations

from typing import Iterator, NamedTuple, Sequence

Partition = tuple

__all__ = [
    "Partition",
    "CorrelatorKey",
    "canonicalize",
    "make_key",
    "enumerate_partitions",
    "enumerate_pi_L",
    "canonical_pi_L",
    "in_pi_L",
    "dimension_ok",
    "parse_partition",
    "format_partition",
]


class CorrelatorKey(NamedTuple):
    """``(genus, parts)`` with parts sorted non-increasing.

    Being a tuple, a key compares and hashes equal to the plain
    ``(g, parts)`` pair, which is what the kernel stores.
    """

    genus: int
    parts: tuple


def canonicalize(d: Sequence[int]) -> tuple:
    return tuple(sorted(d, reverse=True))


def make_key(g: int, d: Sequence[int]) -> CorrelatorKey:
    return CorrelatorKey(g, canonicalize(d))


def enumerate_partitions(m: int, n: int) -> Iterator[tuple]:
    """Yield every ordered n-tuple of nonnegative ints summing to m, lexicographically.

    >>> list(enumerate_partitions(2, 2))
    [(0, 2), (1, 1), (2, 0)]
    """
    if m < 0 or n < 1:
        raise ValueError(f"need m >= 0 and n >= 1, got m={m}, n={n}")
    yield from _compositions(m, n, ())


def _compositions(m: int, n: int, prefix: tuple) -> Iterator[tuple]:
    if n == 1:
        yield prefix + (m,)
        return
    for first in range(m + 1):
        yield from _compositions(m - first, n - 1, prefix + (first,))


def _bounded_prefixes(k: int, budget: int, prefix: tuple) -> Iterator[tuple]:
    # k-tuples with sum <= budget, lexicographic
    if k == 0:
        yield prefix
        return
    for first in range(budget + 1):
        yield from _bounded_prefixes(k - 1, budget - first, prefix + (first,))


def enumerate_pi_L(m: int, n: int, L: int) -> Iterator[tuple]:
    """Ordered partitions of m into n parts whose first n-2 parts sum to at most L.

    For n <= 2 the restriction is void and all of Pi(m, n) is produced.
    Output is lexicographic, and a subsequence of ``enumerate_partitions``.
    """
    if m < 0 or n < 1 or L < 0:
        raise ValueError(f"need m >= 0, n >= 1, L >= 0, got m={m}, n={n}, L={L}")
    if n <= 2:
        yield from enumerate_partitions(m, n)
        return
    for head in _bounded_prefixes(n - 2, min(L, m), ()):
        rest = m - sum(head)
        for a in range(rest + 1):
            yield head + (a, rest - a)


def in_pi_L(d: Sequence[int], L: int) -> bool:
    """Whether the ordered tuple d lies in Pi_L."""
    return len(d) <= 2 or sum(d[:-2]) <= L


def canonical_pi_L(m: int, n: int, L: int) -> list[tuple]:
    """Sorted list of the distinct canonical forms of ``enumerate_pi_L(m, n, L)``."""
    return sorted({canonicalize(d) for d in enumerate_pi_L(m, n, L)})


def dimension_ok(g: int, d: Sequence[int]) -> bool:
    """True iff ``sum(d) == 3g - 3 + n`` and (g, n) is stable."""
    n = len(d)
    if g < 0 or n == 0 or any(x < 0 for x in d):
        return False
    if g == 0 and n < 3:
        return False
    return sum(d) == 3 * g - 3 + n


def parse_partition(text: str) -> tuple:
    """Parse ``"3,1,0"`` into ``(3, 1, 0)``."""
    try:
        parts = tuple(int(p) for p in text.split(","))
    except ValueError:
        raise ValueError(f"bad partition {text!r}: expected comma-separated integers") from None
    if any(p < 0 for p in parts):
        raise ValueError(f"bad partition {text!r}: parts must be nonnegative")
    return parts


def format_partition(d: Sequence[int]) -> str:
    return ",".join(str(x) for x in d)
