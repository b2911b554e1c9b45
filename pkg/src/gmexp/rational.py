"""Exact rational scalars.

Everything in this library is computed over Q.  We use gmpy2.mpq when
available (much faster for the elimination-heavy workloads) and fall back
to fractions.Fraction, which has the same canonical-form semantics
(reduced, positive denominator).
"""

from __future__ import annotations

from fractions import Fraction

try:
    from gmpy2 import mpq as Q

    HAVE_GMPY2 = True
except ImportError:  # pragma: no cover - gmpy2 is a hard dependency in practice
    Q = Fraction
    HAVE_GMPY2 = False

QZERO = Q(0)
QONE = Q(1)


def rat(x, y=None):
    """Build a rational from ints, strings like '3/2', or another rational."""
    if y is not None:
        return Q(x, y)
    if isinstance(x, str):
        x = x.strip()
        if "/" in x:
            num, den = x.split("/", 1)
            return Q(int(num), int(den))
        return Q(int(x))
    return Q(x)


def is_integer(q) -> bool:
    return q.denominator == 1


def qfloor(q) -> int:
    return q.numerator // q.denominator


def class_rep(q):
    """Canonical representative in (0, 1] of the class of q modulo Z."""
    r = q - qfloor(q)
    return Q(1) if r == 0 else r


def qstr(q) -> str:
    return str(q)
