"""Pure-Python memoized recursion for psi-class correlators.

This is the fallback for ``_ckernel`` and must stay value-identical to it.
Keys are ``(g, parts)`` with parts sorted non-increasing.  Callers hand in
keys that are on the dimension shell; the kernel itself only ever produces
on-shell subkeys, plus negative-genus or unstable ones which evaluate to 0.
"""
from __future__ import annotations

from math import comb

from .arith import double_factorial as dfact
from .arith import kernel_number as Q
from .exceptions import BudgetExhausted

ZERO = Q(0)
BASE = {(0, (0, 0, 0)): Q(1), (1, (1,)): Q(1, 24)}


def _insert(parts: tuple, x: int) -> tuple:
    return tuple(sorted(parts + (x,), reverse=True))


def _submultisets(parts: tuple) -> list:
    """All splits parts = I + J as sub-multisets, with the number of index
    subsets each split stands for.  Entries are (I, J, sum(I), len(I), weight).
    """
    groups = []
    for x in parts:
        if groups and groups[-1][0] == x:
            groups[-1][1] += 1
        else:
            groups.append([x, 1])
    out = [((), (), 0, 0, 1)]
    for x, mult in groups:
        nxt = []
        for I, J, s, n, w in out:
            for c in range(mult + 1):
                nxt.append((I + (x,) * c, J + (x,) * (mult - c), s + c * x, n + c,
                            w * comb(mult, c)))
        out = nxt
    return out


class Evaluator:
    """Memoized evaluator writing into a caller-owned dict.

    ``largest_pivot`` switches the Virasoro pivot from the smallest part to
    the largest; both give the same values, the smallest is far cheaper.
    """

    backend = "python"

    def __init__(self, table: dict, budget: int | None = None, trace: list | None = None,
                 largest_pivot: bool = False):
        self.table = table
        self.budget = budget
        self.trace = trace
        self.largest_pivot = largest_pivot
        self.nodes = 0
        self.hits = 0
        self._depth = 0

    def value(self, g: int, d: tuple):
        if g < 0 or (g == 0 and len(d) < 3):
            return ZERO
        key = (g, d)
        v = self.table.get(key)
        if v is not None:
            self.hits += 1
            return v
        self.nodes += 1
        if self.budget is not None and self.nodes > self.budget:
            raise BudgetExhausted(self.budget)
        if self.trace is not None:
            self._depth += 1
            try:
                v = self._compute(g, d)
            finally:
                self._depth -= 1
        else:
            v = self._compute(g, d)
        self.table[key] = v
        return v

    def _compute(self, g: int, d: tuple):
        key = (g, d)
        if key in BASE:
            self._note("base", key)
            return BASE[key]
        last = d[-1]
        if last == 0:
            self._note("string", key)
            return self._string(g, d)
        if last == 1:
            self._note("dilaton", key)
            rest = d[:-1]
            return (2 * g - 2 + len(rest)) * self.value(g, rest)
        self._note("virasoro", key)
        return self.virasoro(g, d, 0 if self.largest_pivot else len(d) - 1)

    def _note(self, rule: str, key: tuple) -> None:
        if self.trace is not None:
            self.trace.append((self._depth, rule, key))

    def _string(self, g: int, d: tuple):
        rest = d[:-1]
        total = ZERO
        n = len(rest)
        j = 0
        while j < n:
            x = rest[j]
            m = 1
            while j + m < n and rest[j + m] == x:
                m += 1
            if x > 0:
                # lowering the last copy of x keeps the tuple sorted
                last = j + m - 1
                total += m * self.value(g, rest[:last] + (x - 1,) + rest[last + 1:])
            j += m
        return total

    def virasoro(self, g: int, d: tuple, i: int):
        """Apply the full three-term Virasoro relation with d[i] = k + 1 as pivot."""
        k = d[i] - 1
        if k < 0:
            raise ValueError("Virasoro pivot must be a part >= 1")
        rest = d[:i] + d[i + 1:]
        value = self.value

        lin = ZERO
        n = len(rest)
        j = 0
        while j < n:
            x = rest[j]
            m = 1
            while j + m < n and rest[j + m] == x:
                m += 1
            coef = dfact(2 * k + 2 * x + 1) // dfact(2 * x - 1)
            lin += (m * coef) * value(g, _insert(rest[:j] + rest[j + 1:], x + k))
            j += m

        quad = ZERO
        if k >= 1:
            splits = _submultisets(rest)
            for r in range(k):
                s = k - 1 - r
                c = dfact(2 * r + 1) * dfact(2 * s + 1)
                if g >= 1:
                    quad += c * value(g - 1, _insert(_insert(rest, r), s))
                for I, J, sI, nI, w in splits:
                    num = r + sI - nI + 2
                    if num % 3:
                        continue
                    gp = num // 3
                    if gp < 0 or gp > g:
                        continue
                    a = value(gp, _insert(I, r))
                    if a:
                        b = value(g - gp, _insert(J, s))
                        if b:
                            quad += (c * w) * a * b
        return (2 * lin + quad) / (2 * dfact(2 * k + 3))
