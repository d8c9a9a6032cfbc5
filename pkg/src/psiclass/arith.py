"""Exact integer and rational primitives.

Every quantity in the package is an exact rational.  The public value type
is :class:`fractions.Fraction`, which already keeps itself reduced with a
positive denominator.  The recursion kernel may run on ``gmpy2.mpq`` for
speed; :func:`to_exact` converts such values back at the API boundary.
"""
from __future__ import annotations

import threading
from decimal import Decimal, localcontext
from fractions import Fraction

try:
    import gmpy2
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    gmpy2 = None

ExactRational = Fraction

__all__ = [
    "ExactRational",
    "double_factorial",
    "factorial",
    "rational",
    "to_exact",
    "format_rational",
    "parse_rational",
    "approx",
    "kernel_number",
]

# Growable tables; index k holds k!! (resp. k!).  Extension happens under a
# lock, reads never block.
_DFACT = [1, 1]
_FACT = [1]
_lock = threading.Lock()


def _grow(table: list, upto: int, step: int) -> None:
    with _lock:
        while len(table) <= upto:
            k = len(table)
            table.append(table[k - step] * k)


def double_factorial(k: int) -> int:
    """Return ``k!!`` for ``k >= -1``, with ``(-1)!! = 0!! = 1``."""
    if k < -1:
        raise ValueError(f"double factorial undefined for {k} < -1")
    if k <= 0:
        return 1
    if k >= len(_DFACT):
        _grow(_DFACT, k, 2)
    return _DFACT[k]


def factorial(k: int) -> int:
    if k < 0:
        raise ValueError(f"factorial undefined for negative {k}")
    if k >= len(_FACT):
        _grow(_FACT, k, 1)
    return _FACT[k]


def rational(num: int, den: int = 1) -> Fraction:
    """Build a reduced rational; the sign always ends up in the numerator."""
    if den == 0:
        raise ZeroDivisionError("rational with zero denominator")
    return Fraction(int(num), int(den))


if gmpy2 is not None:
    kernel_number = gmpy2.mpq
else:  # pragma: no cover
    kernel_number = Fraction


def to_exact(x) -> Fraction:
    """Convert an int, Fraction or mpq to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(int(x.numerator), int(x.denominator))


def format_rational(x) -> str:
    """Canonical text form: ``num/den``, or just ``num`` when ``den == 1``."""
    x = to_exact(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text: str) -> Fraction:
    """Inverse of :func:`format_rational` (also accepts ``num/1``)."""
    text = text.strip()
    num, sep, den = text.partition("/")
    try:
        n = int(num)
        d = int(den) if sep else 1
    except ValueError:
        raise ValueError(f"not a rational: {text!r}") from None
    if sep and (not den.strip().isdigit() or d == 0):
        raise ValueError(f"not a rational: {text!r}")
    return rational(n, d)


def approx(x, digits: int = 12) -> str:
    """Decimal rendering with ``digits`` significant digits (display only)."""
    x = to_exact(x)
    with localcontext() as ctx:
        ctx.prec = digits
        return str(+(Decimal(x.numerator) / Decimal(x.denominator)))
