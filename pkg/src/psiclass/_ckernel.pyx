# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled memoized recursion; value-identical to ``_pykernel``.

Loop counters, genera and part values are C longs; keys stay Python tuples
and rational arithmetic stays on Python-level mpq objects.
"""
from math import comb

from psiclass.arith import double_factorial as dfact
from psiclass.arith import kernel_number as Q
from psiclass.exceptions import BudgetExhausted

cdef object ZERO = Q(0)
cdef dict BASE = {(0, (0, 0, 0)): Q(1), (1, (1,)): Q(1, 24)}


cdef tuple _insert(tuple parts, long x):
    # parts sorted non-increasing; returns a new sorted tuple with x added
    cdef Py_ssize_t n = len(parts), pos = 0
    while pos < n and <long>parts[pos] > x:
        pos += 1
    return parts[:pos] + (x,) + parts[pos:]


cdef list _submultisets(tuple parts):
    cdef list groups = []
    cdef Py_ssize_t i, n = len(parts)
    cdef long x
    i = 0
    while i < n:
        x = parts[i]
        if groups and groups[len(groups) - 1][0] == x:
            groups[len(groups) - 1][1] += 1
        else:
            groups.append([x, 1])
        i += 1
    cdef list out = [((), (), 0, 0, 1)]
    cdef list nxt
    cdef long mult, c
    for x, mult in groups:
        nxt = []
        for I, J, s, m, w in out:
            for c in range(mult + 1):
                nxt.append((I + (x,) * c, J + (x,) * (mult - c), s + c * x, m + c,
                            w * comb(mult, c)))
        out = nxt
    return out


cdef class Evaluator:
    cdef public dict table
    cdef public object budget
    cdef public object trace
    cdef public bint largest_pivot
    cdef public Py_ssize_t nodes
    cdef public Py_ssize_t hits
    cdef Py_ssize_t _depth
    cdef Py_ssize_t _budget
    cdef bint _has_budget

    backend = "cython"

    def __init__(self, dict table, budget=None, trace=None, bint largest_pivot=False):
        self.table = table
        self.budget = budget
        self._has_budget = budget is not None
        self._budget = budget if budget is not None else 0
        self.trace = trace
        self.largest_pivot = largest_pivot
        self.nodes = 0
        self.hits = 0
        self._depth = 0

    cpdef object value(self, long g, tuple d):
        if g < 0 or (g == 0 and len(d) < 3):
            return ZERO
        cdef tuple key = (g, d)
        cdef object v = self.table.get(key)
        if v is not None:
            self.hits += 1
            return v
        self.nodes += 1
        if self._has_budget and self.nodes > self._budget:
            raise BudgetExhausted(self.budget)
        if self.trace is not None:
            self._depth += 1
            try:
                v = self._compute(g, d, key)
            finally:
                self._depth -= 1
        else:
            v = self._compute(g, d, key)
        self.table[key] = v
        return v

    cdef object _compute(self, long g, tuple d, tuple key):
        cdef long last
        cdef tuple rest
        if key in BASE:
            self._note("base", key)
            return BASE[key]
        last = d[len(d) - 1]
        if last == 0:
            self._note("string", key)
            return self._string(g, d)
        if last == 1:
            self._note("dilaton", key)
            rest = d[:len(d) - 1]
            return (2 * g - 2 + len(rest)) * self.value(g, rest)
        self._note("virasoro", key)
        return self.virasoro(g, d, 0 if self.largest_pivot else len(d) - 1)

    cdef void _note(self, str rule, tuple key):
        if self.trace is not None:
            self.trace.append((self._depth, rule, key))

    cdef object _string(self, long g, tuple d):
        cdef tuple rest = d[:len(d) - 1]
        cdef object total = ZERO
        cdef Py_ssize_t n = len(rest), j = 0, m, lastpos
        cdef long x
        while j < n:
            x = rest[j]
            m = 1
            while j + m < n and <long>rest[j + m] == x:
                m += 1
            if x > 0:
                lastpos = j + m - 1
                total += m * self.value(g, rest[:lastpos] + (x - 1,) + rest[lastpos + 1:])
            j += m
        return total

    cpdef object virasoro(self, long g, tuple d, Py_ssize_t i):
        cdef long k = <long>d[i] - 1
        if k < 0:
            raise ValueError("Virasoro pivot must be a part >= 1")
        cdef tuple rest = d[:i] + d[i + 1:]
        cdef Py_ssize_t n = len(rest), j = 0, m
        cdef long x, r, s, num, gp, sI, nI
        cdef object lin = ZERO, quad = ZERO, coef, c, a, b, w
        cdef list splits
        cdef tuple I, J

        while j < n:
            x = rest[j]
            m = 1
            while j + m < n and <long>rest[j + m] == x:
                m += 1
            coef = dfact(2 * k + 2 * x + 1) // dfact(2 * x - 1)
            lin += (m * coef) * self.value(g, _insert(rest[:j] + rest[j + 1:], x + k))
            j += m

        if k >= 1:
            splits = _submultisets(rest)
            for r in range(k):
                s = k - 1 - r
                c = dfact(2 * r + 1) * dfact(2 * s + 1)
                if g >= 1:
                    quad += c * self.value(g - 1, _insert(_insert(rest, r), s))
                for I, J, sI, nI, w in splits:
                    num = r + sI - nI + 2
                    if num % 3 != 0:
                        continue
                    gp = num // 3
                    if gp < 0 or gp > g:
                        continue
                    a = self.value(gp, _insert(I, r))
                    if a:
                        b = self.value(g - gp, _insert(J, s))
                        if b:
                            quad += (c * w) * a * b
        return (2 * lin + quad) / (2 * dfact(2 * k + 3))
