"""Exact Witten-Kontsevich correlators <tau_d1 ... tau_dn>_g.

Evaluation order for a canonical key: the two base values, then the string
equation while some part is 0, then the dilaton equation while some part is
1, and otherwise the full Virasoro (DVV) relation.  Unstable and
negative-genus terms contribute 0.
"""
from __future__ import annotations

import sys
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .arith import factorial, to_exact
from .cache import MemoCache
from .exceptions import DimensionError
from .kernel import Evaluator, PyEvaluator
from .partitions import CorrelatorKey, canonicalize, dimension_ok

__all__ = [
    "CorrelatorEngine",
    "RecursionTrace",
    "correlator",
    "correlator_genus0_oracle",
    "default_engine",
]

RULES = ("base", "string", "dilaton", "virasoro", "zero")


@dataclass
class RecursionTrace:
    """Rules applied to each newly evaluated key, in evaluation order.

    ``depth`` counts rule applications from the root (root = 1).  Keys served
    from the cache do not appear.
    """

    entries: list = field(default_factory=list)

    def max_depth(self) -> int:
        return max((depth for depth, _, _ in self.entries), default=0)

    def rules(self) -> list[str]:
        return [rule for _, rule, _ in self.entries]


def _check_partition(g: int, d: Sequence[int]) -> tuple:
    if g < 0:
        raise ValueError(f"genus must be >= 0, got {g}")
    d = tuple(int(x) for x in d)
    if not d:
        raise ValueError("partition must have at least one part")
    if any(x < 0 for x in d):
        raise ValueError(f"parts must be nonnegative: {d}")
    return d


@contextmanager
def _deep_recursion(limit: int = 200_000):
    old = sys.getrecursionlimit()
    if old < limit:
        sys.setrecursionlimit(limit)
    try:
        yield
    finally:
        sys.setrecursionlimit(old)


class CorrelatorEngine:
    """Memoized correlator evaluator bound to a :class:`MemoCache`.

    Parameters
    ----------
    cache : MemoCache, optional
        Shared memo table; a fresh one is created if omitted.
    budget : int, optional
        Maximum number of new keys evaluated per top-level call; exceeding
        it raises :class:`~psiclass.exceptions.BudgetExhausted`.
    trace : bool
        Record a :class:`RecursionTrace` of the last top-level call.
    largest_pivot : bool
        Pivot the Virasoro relation on the largest part instead of the
        smallest.  Same values, much more work.
    pure_python : bool
        Use the pure-Python kernel even if the compiled one is available.
    """

    def __init__(self, cache: MemoCache | None = None, *, budget: int | None = None,
                 trace: bool = False, largest_pivot: bool = False, pure_python: bool = False):
        self.cache = cache if cache is not None else MemoCache()
        self.budget = budget
        self.largest_pivot = largest_pivot
        self.trace: RecursionTrace | None = RecursionTrace() if trace else None
        self._evaluator_cls = PyEvaluator if pure_python else Evaluator

    @property
    def backend(self) -> str:
        return self._evaluator_cls.backend

    def _evaluator(self):
        if self.trace is not None:
            self.trace = RecursionTrace()
        return self._evaluator_cls(self.cache.table, self.budget,
                                   None if self.trace is None else self.trace.entries,
                                   self.largest_pivot)

    def _run(self, fn):
        ev = self._evaluator()
        try:
            with _deep_recursion():
                return fn(ev)
        finally:
            self.cache.hits += ev.hits
            self.cache.misses += ev.nodes

    def __call__(self, g: int, d: Sequence[int]) -> Fraction:
        d = _check_partition(g, d)
        if not dimension_ok(g, d):
            if self.trace is not None:
                self.trace = RecursionTrace([(1, "zero", CorrelatorKey(g, canonicalize(d)))])
            return Fraction(0)
        key = canonicalize(d)
        return to_exact(self._run(lambda ev: ev.value(g, key)))

    def virasoro_at(self, g: int, d: Sequence[int], index: int) -> Fraction:
        """Evaluate by applying the Virasoro relation at ``d[index]`` first.

        ``index`` refers to the tuple as given; the pivot part must be >= 1.
        Subterms use the normal dispatch.
        """
        d = _check_partition(g, d)
        if not dimension_ok(g, d):
            return Fraction(0)
        pivot = d[index]
        rest = canonicalize(d[:index] + d[index + 1:])
        key = (pivot,) + rest
        return to_exact(self._run(lambda ev: ev.virasoro(g, key, 0)))

    def evaluate_keys(self, keys) -> None:
        """Warm the cache for many keys in one evaluator pass."""
        def go(ev):
            for g, d in keys:
                if dimension_ok(g, d):
                    ev.value(g, canonicalize(d))
        self._run(go)


_default = None


def default_engine() -> CorrelatorEngine:
    global _default
    if _default is None:
        _default = CorrelatorEngine()
    return _default


def correlator(g: int, d: Sequence[int], engine: CorrelatorEngine | None = None) -> Fraction:
    """Exact value of <tau_d1 ... tau_dn>_g; 0 off the dimension shell.

    >>> correlator(1, (1,))
    Fraction(1, 24)
    >>> correlator(2, (4,))
    Fraction(1, 1152)
    """
    return (engine or default_engine())(g, d)


def correlator_genus0_oracle(d: Sequence[int]) -> Fraction:
    """Genus-0 multinomial closed form (n-3)! / prod(d_i!), independent of the recursion."""
    d = tuple(d)
    n = len(d)
    if n < 3 or any(x < 0 for x in d) or sum(d) != n - 3:
        raise DimensionError(f"genus-0 oracle needs n >= 3 and sum(d) = n - 3, got {d}")
    den = 1
    for x in d:
        den *= factorial(x)
    return Fraction(factorial(n - 3), den)
