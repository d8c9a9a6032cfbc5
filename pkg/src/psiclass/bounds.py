"""Closed-form approximants, relative errors and the uniform lower bound.

For a partition d of 3g - 3 + n into n parts the floor bracket is

    floor(d) = (6g-5+2n)!! / prod (2 d_i + 1)!! / (g! 24^g)

and epsilon(d) is defined by <d>_g = floor(d) * (1 + epsilon(d)).  On the
family Pi_L, epsilon(d) >= lambda(g, L) - 1.  Everything here is exact.
"""
from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Sequence

from .arith import double_factorial, factorial, format_rational, gmpy2
from .correlator import CorrelatorEngine, default_engine
from .exceptions import BudgetExhausted, DimensionError
from .partitions import (
    CorrelatorKey,
    canonicalize,
    dimension_ok,
    enumerate_pi_L,
    format_partition,
)

__all__ = [
    "EpsilonReport",
    "SweepSummary",
    "floor_bracket",
    "epsilon",
    "epsilon_report",
    "epsilon_ones_closed_form",
    "lambda_factor",
    "delta_string",
    "delta_dilaton",
    "delta_virasoro",
    "verify_theorem",
    "verify_two_point",
    "lambda_monotonicity_check",
    "lambda_sqrt_bound_check",
    "minimal_L",
]


def _floor_formula(g: int, d: Sequence[int]) -> Fraction:
    n = len(d)
    den = factorial(g) * 24**g
    for x in d:
        den *= double_factorial(2 * x + 1)
    return Fraction(double_factorial(6 * g - 5 + 2 * n), den)


def floor_bracket(g: int, d: Sequence[int]) -> Fraction:
    """The closed-form approximant; defined by the formula alone, for g >= 1."""
    if g < 1:
        raise ValueError(f"floor bracket is normalized for g >= 1, got g={g}")
    if not d or any(x < 0 for x in d):
        raise ValueError(f"need a nonempty partition of nonnegative parts, got {tuple(d)}")
    return _floor_formula(g, d)


def epsilon(g: int, d: Sequence[int], engine: CorrelatorEngine | None = None) -> Fraction:
    if g < 1 or not dimension_ok(g, d):
        raise DimensionError(
            f"epsilon needs g >= 1 and sum(d) = 3g-3+n = {3 * g - 3 + len(d)}, "
            f"got g={g}, d={tuple(d)}")
    value = (engine or default_engine())(g, d)
    return value / floor_bracket(g, d) - 1


def epsilon_ones_closed_form(g: int, n: int) -> Fraction:
    """epsilon(1^(n-1), 3g-2) from the telescoped dilaton product."""
    if g < 1 or n < 1:
        raise ValueError(f"need g >= 1 and n >= 1, got g={g}, n={n}")
    prod = Fraction(1)
    for j in range(n - 1):
        prod *= Fraction(6 * g - 3 + 3 * j, 6 * g - 1 + 2 * j)
    return prod - 1


def _lambda_parts(g: int, L: int) -> tuple[int, int]:
    # unreduced (num, den) of lambda(g, L); den > 0
    num = 6 * (g - L) - 3
    den = 6 * (g - L) - 1
    for i in range(L):
        num *= 6 * (g - i)
        den *= 6 * (g - i) + 1
    return num, den


def lambda_factor(g: int, L: int) -> Fraction:
    """lambda(g, L) = prod_{i<L} (1 - 1/(6(g-i)+1)) * (1 - 2/(6(g-L)-1)), for g > L >= 0."""
    if not 0 <= L < g:
        raise ValueError(f"lambda needs g > L >= 0, got g={g}, L={L}")
    return Fraction(*_lambda_parts(g, L))


def delta_string(g: int, n: int, k: int) -> Fraction:
    if g < 1 or k < 0 or n - k < 1:
        raise ValueError(f"delta_string needs g >= 1, k >= 0, n - k >= 1; got g={g}, n={n}, k={k}")
    return Fraction(n - k - 1, 6 * g - 3 + 2 * n)


def delta_dilaton(g: int, n: int) -> Fraction:
    if g < 1 or n < 1:
        raise ValueError(f"delta_dilaton needs g >= 1, n >= 1; got g={g}, n={n}")
    return Fraction(n - 3, 6 * g - 3 + 2 * n)


def delta_virasoro(g: int, n: int, k: int) -> Fraction:
    if g < 1 or n < 1 or k < 0:
        raise ValueError(f"delta_virasoro needs g >= 1, n >= 1, k >= 0; got g={g}, n={n}, k={k}")
    a = 6 * g - 3 + 2 * n
    b = 6 * g - 5 + 2 * n
    return Fraction(n - 3, a) - Fraction(2 * k * (2 * n - 5), a * b)


def minimal_L(d: Sequence[int]) -> int:
    """Smallest L with some ordering of d in Pi_L: the n-2 smallest parts' sum."""
    if len(d) <= 2:
        return 0
    return sum(sorted(d)[: len(d) - 2])


@dataclass(frozen=True)
class EpsilonReport:
    key: CorrelatorKey
    exact_value: Fraction
    floor_value: Fraction
    epsilon: Fraction
    lambda_bound: Fraction | None
    bound_satisfied: bool | None

    def row(self) -> dict:
        return {
            "g": self.key.genus,
            "n": len(self.key.parts),
            "partition": format_partition(self.key.parts),
            "correlator": format_rational(self.exact_value),
            "floor": format_rational(self.floor_value),
            "epsilon": format_rational(self.epsilon),
            "lambda": "" if self.lambda_bound is None else format_rational(self.lambda_bound),
            "satisfied": "" if self.bound_satisfied is None else str(self.bound_satisfied).lower(),
        }


def epsilon_report(g: int, d: Sequence[int], L: int | None = None,
                   engine: CorrelatorEngine | None = None) -> EpsilonReport:
    """Report for one partition; the bound uses lambda(g, L) when L < g is given."""
    key = CorrelatorKey(g, canonicalize(d))
    value = (engine or default_engine())(g, key.parts)
    fl = floor_bracket(g, key.parts)
    eps = value / fl - 1
    lam = sat = None
    if L is not None and 0 <= L < g:
        lam = lambda_factor(g, L)
        sat = eps >= lam - 1
    return EpsilonReport(key, value, fl, eps, lam, sat)


@dataclass
class SweepSummary:
    """Outcome of an exhaustive epsilon sweep.

    ``checked`` counts canonical partitions (each evaluated once) and
    ``ordered`` the ordered partitions they stand for.
    """

    g: int
    n: int
    L: int | None
    checked: int = 0
    ordered: int = 0
    min_epsilon: Fraction | None = None
    max_epsilon: Fraction | None = None
    violations: list = field(default_factory=list)
    complete: bool = True
    reports: list = field(default_factory=list, repr=False)

    @property
    def ok(self) -> bool:
        return self.complete and not self.violations

    def add(self, report: EpsilonReport, ordered: int = 1) -> None:
        self.checked += 1
        self.ordered += ordered
        eps = report.epsilon
        if self.min_epsilon is None or eps < self.min_epsilon:
            self.min_epsilon = eps
        if self.max_epsilon is None or eps > self.max_epsilon:
            self.max_epsilon = eps
        if report.bound_satisfied is False:
            self.violations.append(report.key.parts)
        self.reports.append(report)

    def merge(self, other: "SweepSummary") -> "SweepSummary":
        out = SweepSummary(self.g, max(self.n, other.n), self.L,
                           complete=self.complete and other.complete)
        for part in (self, other):
            out.checked += part.checked
            out.ordered += part.ordered
            out.violations.extend(part.violations)
            out.reports.extend(part.reports)
        eps = [e for e in (self.min_epsilon, other.min_epsilon) if e is not None]
        out.min_epsilon = min(eps) if eps else None
        eps = [e for e in (self.max_epsilon, other.max_epsilon) if e is not None]
        out.max_epsilon = max(eps) if eps else None
        out.violations.sort(key=lambda d: (len(d), d))
        out.reports.sort(key=lambda r: (len(r.key.parts), r.key.parts))
        return out

    def to_dict(self, rational=format_rational) -> dict:
        def r(x):
            return None if x is None else rational(x)
        return {
            "g": self.g,
            "n": self.n,
            "L": self.L,
            "checked": self.checked,
            "ordered": self.ordered,
            "min_epsilon": r(self.min_epsilon),
            "max_epsilon": r(self.max_epsilon),
            "violations": [format_partition(d) for d in self.violations],
            "complete": self.complete,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _sweep_family(g: int, n_max: int, L: int) -> dict:
    """canonical partition -> number of ordered partitions in Pi_L mapping to it."""
    family: dict = {}
    for n in range(1, n_max + 1):
        m = 3 * g - 3 + n
        if m < 0:
            continue
        for d in enumerate_pi_L(m, n, L):
            c = canonicalize(d)
            family[c] = family.get(c, 0) + 1
    return family


def _chunk_reports(args) -> list:
    g, L, parts_list, budget = args
    engine = CorrelatorEngine(budget=budget)
    return [epsilon_report(g, d, L, engine) for d in parts_list]


def verify_theorem(g: int, n_max: int, L: int, engine: CorrelatorEngine | None = None,
                   workers: int = 1) -> SweepSummary:
    """Check epsilon(d) >= lambda(g, L) - 1 on every canonical d in Pi_L(3g-3+n, n), n <= n_max.

    With ``workers > 1`` the canonical partitions are split into contiguous
    chunks evaluated in separate processes, each with its own cache.  The
    merged summary does not depend on the worker count.  On budget
    exhaustion the partial summary is returned with ``complete=False``.
    """
    if not 0 <= L < g:
        raise ValueError(f"need g > L >= 0, got g={g}, L={L}")
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    engine = engine or default_engine()
    family = _sweep_family(g, n_max, L)
    ordered_keys = sorted(family, key=lambda d: (len(d), d))
    summary = SweepSummary(g, n_max, L)

    if workers > 1 and len(ordered_keys) > 1:
        size = -(-len(ordered_keys) // workers)
        chunks = [ordered_keys[i:i + size] for i in range(0, len(ordered_keys), size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            try:
                results = list(pool.map(_chunk_reports,
                                        [(g, L, c, engine.budget) for c in chunks]))
            except BudgetExhausted:
                summary.complete = False
                return summary
        for reports in results:
            for rep in reports:
                engine.cache.insert(rep.key, rep.exact_value)
                summary.add(rep, family[rep.key.parts])
        return summary

    for d in ordered_keys:
        try:
            rep = epsilon_report(g, d, L, engine)
        except BudgetExhausted:
            summary.complete = False
            break
        summary.add(rep, family[d])
    return summary


def verify_two_point(g: int, engine: CorrelatorEngine | None = None) -> SweepSummary:
    """Check the two-point sandwich -2/(6g-1) = eps(1,3g-2) < eps(k,3g-1-k) < 0 = eps(0,3g-1)."""
    if g < 1:
        raise ValueError(f"need g >= 1, got {g}")
    engine = engine or default_engine()
    summary = SweepSummary(g, 2, None)
    low = Fraction(-2, 6 * g - 1)
    for k in range(0, (3 * g - 1) // 2 + 1):
        d = (3 * g - 1 - k, k)
        rep = epsilon_report(g, d, None, engine)
        if k == 0:
            ok = rep.epsilon == 0
        elif k == 1:
            ok = rep.epsilon == low
        else:
            ok = low < rep.epsilon < 0
        rep = EpsilonReport(rep.key, rep.exact_value, rep.floor_value, rep.epsilon, None, ok)
        summary.add(rep, 1 if 2 * k == 3 * g - 1 else 2)
    return summary


def _gt(a: tuple[int, int], b: tuple[int, int]) -> bool:
    # a > b for unreduced fractions with positive denominators
    return a[0] * b[1] > b[0] * a[1]


def lambda_monotonicity_check(g_max: int) -> bool:
    """Exact check of 1 > lambda(g+1,L) > lambda(g,L) > lambda(g,L+1) > 0 and of
    (1 - 1/(6g+1)) lambda(g-1, L-1) = lambda(g, L) wherever both sides are defined
    with every genus <= g_max.
    """
    if g_max < 2:
        raise ValueError(f"g_max must be >= 2, got {g_max}")
    one = (1, 1)
    zero = (0, 1)
    big = gmpy2.mpz if gmpy2 is not None else int
    prev_row: list | None = None
    for g in range(1, g_max + 1):
        # row[L] = lambda(g, L), built incrementally over L
        row = []
        head_num, head_den = big(1), big(1)
        for L in range(g):
            tail = 6 * (g - L)
            row.append((head_num * (tail - 3), head_den * (tail - 1)))
            head_num *= 6 * (g - L)
            head_den *= 6 * (g - L) + 1
        for L, lam in enumerate(row):
            if not (_gt(one, lam) and _gt(lam, zero)):
                return False
            if L + 1 < g and not _gt(lam, row[L + 1]):
                return False
            if prev_row is not None and L < g - 1:
                if not _gt(lam, prev_row[L]):
                    return False
            if prev_row is not None and L >= 1:
                num, den = prev_row[L - 1]
                if (6 * g * num) * lam[1] != lam[0] * ((6 * g + 1) * den):
                    return False
        prev_row = row
    return True


def lambda_sqrt_bound_check(g_max: int) -> list[int]:
    """Genera g in [2, g_max] where lambda(g, isqrt(g)) > 1 - 10/(6 sqrt g) FAILS.

    L(g) = isqrt(g) is capped at g - 1 to stay in the domain of lambda.  The
    comparison is exact: with t = 1 - lambda > 0 the inequality is
    t^2 < 100 / (36 g).
    """
    bad = []
    for g in range(2, g_max + 1):
        L = min(isqrt(g), g - 1)
        num, den = _lambda_parts(g, L)
        t = den - num
        if not (t > 0 and 36 * g * t * t < 100 * den * den):
            bad.append(g)
    return bad
