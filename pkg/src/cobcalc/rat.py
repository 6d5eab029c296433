"""Exact rational scalars.

All coefficient arithmetic in the package is exact rational arithmetic.
gmpy2's mpq is used when available (it is several times faster than
fractions.Fraction on small rationals); both are arbitrary precision,
always stored in lowest terms with positive denominator.
"""

from __future__ import annotations

try:
    from gmpy2 import mpq as Rat
except ImportError:  # pragma: no cover
    from fractions import Fraction as Rat

ZERO = Rat(0)
ONE = Rat(1)


def rat(num, den=1):
    """Build a rational from integers (or pass an existing one through)."""
    return Rat(num, den)


def is_rat(x) -> bool:
    return isinstance(x, (int, type(ZERO)))


def p_valuation(q, p: int) -> int:
    """p-adic valuation of a nonzero rational; raises on zero."""
    if q == 0:
        raise ValueError("zero has no finite p-adic valuation")
    num, den = int(q.numerator), int(q.denominator)
    v = 0
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def is_p_integral(q, p: int) -> bool:
    """True iff p does not divide the denominator (q lies in Z_(p))."""
    return int(q.denominator) % p != 0


def is_integer(q) -> bool:
    return int(q.denominator) == 1


def rat_str(q) -> str:
    num, den = int(q.numerator), int(q.denominator)
    return str(num) if den == 1 else f"{num}/{den}"
