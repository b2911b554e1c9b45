"""Arithmetic for truncated elements of k((t))[x1..xn, 1/g] over Q.

Elements are finite Q-linear combinations of monomials t^k * x^u * g^-m.
The denominator layer g^-m is purely formal here: multiplication adds the
layers and never cancels against numerator factors of g.  A separate
normalization pass (clear_g) produces the canonical minimal-layer form.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple

from .rational import Q, QZERO, qstr, rat


class Monomial(NamedTuple):
    """t^tdeg * x^xdeg * g^-gpow.  tdeg may be negative, xdeg and gpow not."""

    tdeg: int
    xdeg: tuple[int, ...]
    gpow: int = 0

    @property
    def total_xdeg(self) -> int:
        return sum(self.xdeg)

    def sort_key(self):
        return (self.tdeg, self.xdeg, self.gpow)


def mono(tdeg: int = 0, xdeg: Iterable[int] = (), gpow: int = 0) -> Monomial:
    return Monomial(tdeg, tuple(xdeg), gpow)


def unit_monomial(n: int) -> Monomial:
    return Monomial(0, (0,) * n, 0)


class RingElement:
    """Immutable finite sum of monomials with nonzero rational coefficients."""

    __slots__ = ("n", "terms", "_hash")

    def __init__(self, n: int, terms: dict[Monomial, object] | None = None):
        self.n = n
        clean = {}
        if terms:
            for m, c in terms.items():
                if len(m.xdeg) != n:
                    raise ValueError(f"monomial {m} has wrong variable count, expected {n}")
                if m.gpow < 0 or any(u < 0 for u in m.xdeg):
                    raise ValueError(f"invalid monomial {m}")
                if c != 0:
                    clean[m] = Q(c)
        self.terms = clean
        self._hash = None

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> "RingElement":
        return cls(n, {})

    @classmethod
    def constant(cls, n: int, c) -> "RingElement":
        return cls(n, {unit_monomial(n): rat(c)})

    @classmethod
    def one(cls, n: int) -> "RingElement":
        return cls.constant(n, 1)

    @classmethod
    def monomial(cls, n: int, m: Monomial, c=1) -> "RingElement":
        return cls(n, {m: rat(c)})

    @classmethod
    def var(cls, n: int, i: int) -> "RingElement":
        """x_i, with 1 <= i <= n."""
        if not 1 <= i <= n:
            raise IndexError(f"variable index {i} out of range 1..{n}")
        xdeg = tuple(1 if j == i - 1 else 0 for j in range(n))
        return cls(n, {Monomial(0, xdeg, 0): Q(1)})

    @classmethod
    def t(cls, n: int, power: int = 1) -> "RingElement":
        return cls(n, {Monomial(power, (0,) * n, 0): Q(1)})

    # -- predicates ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_one(self) -> bool:
        return self.terms == {unit_monomial(self.n): Q(1)}

    def is_polynomial(self) -> bool:
        """Pure polynomial in x: no t-dependence, no g-layer."""
        return all(m.tdeg == 0 and m.gpow == 0 for m in self.terms)

    def is_t_free(self) -> bool:
        return all(m.tdeg == 0 for m in self.terms)

    def max_xdeg(self) -> int:
        return max((m.total_xdeg for m in self.terms), default=0)

    def max_gpow(self) -> int:
        return max((m.gpow for m in self.terms), default=0)

    def tdeg_range(self) -> tuple[int, int]:
        degs = [m.tdeg for m in self.terms] or [0]
        return min(degs), max(degs)

    # -- arithmetic ----------------------------------------------------

    def _check_compatible(self, other: "RingElement") -> None:
        if self.n != other.n:
            raise ValueError(f"mismatched variable count: {self.n} vs {other.n}")

    def __add__(self, other: "RingElement") -> "RingElement":
        self._check_compatible(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, QZERO) + c
            if s == 0:
                out.pop(m, None)
            else:
                out[m] = s
        return RingElement(self.n, out)

    def __neg__(self) -> "RingElement":
        return RingElement(self.n, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "RingElement") -> "RingElement":
        return self + (-other)

    def __mul__(self, other: "RingElement") -> "RingElement":
        self._check_compatible(other)
        out: dict[Monomial, object] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = Monomial(
                    m1.tdeg + m2.tdeg,
                    tuple(a + b for a, b in zip(m1.xdeg, m2.xdeg)),
                    m1.gpow + m2.gpow,
                )
                s = out.get(m, QZERO) + c1 * c2
                if s == 0:
                    out.pop(m, None)
                else:
                    out[m] = s
        return RingElement(self.n, out)

    def scale(self, c) -> "RingElement":
        c = rat(c)
        if c == 0:
            return RingElement.zero(self.n)
        return RingElement(self.n, {m: c * v for m, v in self.terms.items()})

    def mul_t(self, power: int = 1) -> "RingElement":
        return RingElement(
            self.n, {Monomial(m.tdeg + power, m.xdeg, m.gpow): c for m, c in self.terms.items()}
        )

    def shift_gpow(self, delta: int) -> "RingElement":
        return RingElement(
            self.n, {Monomial(m.tdeg, m.xdeg, m.gpow + delta): c for m, c in self.terms.items()}
        )

    def __pow__(self, k: int) -> "RingElement":
        if k < 0:
            raise ValueError("negative powers of ring elements are not defined")
        out = RingElement.one(self.n)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- comparison ----------------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RingElement) and self.n == other.n and self.terms == other.terms
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"RingElement({serialize(self)!r})"


# ---------------------------------------------------------------------------
# Derivations and truncation
# ---------------------------------------------------------------------------


def partial_x(i: int, e: RingElement, g: RingElement) -> RingElement:
    """d/dx_i with the quotient rule on g^-m layers.

    g must be a pure polynomial; on a*g^-m the result is
    (d_i a) g^-m - m * a * (d_i g) * g^-(m+1).
    """
    if not 1 <= i <= e.n:
        raise IndexError(f"variable index {i} out of range 1..{e.n}")
    if not g.is_polynomial():
        raise ValueError("g must be a pure polynomial (no t, no g-layer)")
    dg = _poly_partial(i, g)
    out = RingElement.zero(e.n)
    acc: dict[Monomial, object] = {}
    for m, c in e.terms.items():
        u = m.xdeg[i - 1]
        if u:
            m2 = Monomial(m.tdeg, _dec(m.xdeg, i - 1), m.gpow)
            s = acc.get(m2, QZERO) + c * u
            if s == 0:
                acc.pop(m2, None)
            else:
                acc[m2] = s
        if m.gpow:
            piece = RingElement.monomial(e.n, Monomial(m.tdeg, m.xdeg, m.gpow + 1), -c * m.gpow)
            out = out + piece * dg
    return out + RingElement(e.n, acc)


def partial_t(e: RingElement) -> RingElement:
    out: dict[Monomial, object] = {}
    for m, c in e.terms.items():
        if m.tdeg:
            out[Monomial(m.tdeg - 1, m.xdeg, m.gpow)] = c * m.tdeg
    return RingElement(e.n, out)


def _poly_partial(i: int, g: RingElement) -> RingElement:
    out: dict[Monomial, object] = {}
    for m, c in g.terms.items():
        u = m.xdeg[i - 1]
        if u:
            out[Monomial(m.tdeg, _dec(m.xdeg, i - 1), m.gpow)] = c * u
    return RingElement(g.n, out)


def _dec(xdeg: tuple[int, ...], j: int) -> tuple[int, ...]:
    return tuple(u - 1 if k == j else u for k, u in enumerate(xdeg))


@dataclass(frozen=True)
class DegreeWindow:
    """Finite monomial window: tmin <= tdeg <= tmax, total xdeg <= xmax, gpow <= gmax."""

    tmin: int
    tmax: int
    xmax: int
    gmax: int = 0

    def __post_init__(self):
        if self.tmin > self.tmax:
            raise ValueError("tmin must not exceed tmax")
        if self.xmax < 0 or self.gmax < 0:
            raise ValueError("xmax and gmax must be nonnegative")

    def contains(self, m: Monomial) -> bool:
        return (
            self.tmin <= m.tdeg <= self.tmax
            and m.total_xdeg <= self.xmax
            and m.gpow <= self.gmax
        )

    def monomials(self, n: int) -> Iterator[Monomial]:
        """All window monomials in canonical (tdeg, xdeg, gpow) order."""
        for tdeg in range(self.tmin, self.tmax + 1):
            for xdeg in _xdegs_upto(n, self.xmax):
                for gpow in range(self.gmax + 1):
                    yield Monomial(tdeg, xdeg, gpow)

    def size(self, n: int) -> int:
        import math

        nx = math.comb(self.xmax + n, n)
        return (self.tmax - self.tmin + 1) * nx * (self.gmax + 1)

    def expand(self, dt: int = 0, dx: int = 0, dg: int = 0) -> "DegreeWindow":
        return DegreeWindow(self.tmin - dt, self.tmax + dt, self.xmax + dx, self.gmax + dg)

    def shrink(self, dt: int = 0, dx: int = 0, dg: int = 0) -> "DegreeWindow":
        return DegreeWindow(
            self.tmin + dt,
            max(self.tmin + dt, self.tmax - dt),
            max(0, self.xmax - dx),
            max(0, self.gmax - dg),
        )


def _xdegs_upto(n: int, xmax: int) -> Iterator[tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    for total in range(xmax + 1):
        yield from _xdegs_exact(n, total)


def _xdegs_exact(n: int, total: int) -> Iterator[tuple[int, ...]]:
    if n == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _xdegs_exact(n - 1, total - first):
            yield (first,) + rest


def truncate(e: RingElement, w: DegreeWindow) -> RingElement:
    return RingElement(e.n, {m: c for m, c in e.terms.items() if w.contains(m)})


# ---------------------------------------------------------------------------
# g-layer normalization
# ---------------------------------------------------------------------------


def clear_g(e: RingElement, g: RingElement) -> RingElement:
    """Canonical minimal g-layer form of e.

    Brings all terms over the common denominator g^M and then divides the
    numerator by g as long as the division is exact, decrementing the layer.
    """
    if not g.is_polynomial() or g.is_zero():
        raise ValueError("g must be a nonzero pure polynomial")
    if e.is_zero():
        return e
    big_m = e.max_gpow()
    if big_m == 0:
        return e
    if g.is_one():
        flat: dict[Monomial, object] = {}
        for m, c in e.terms.items():
            k = Monomial(m.tdeg, m.xdeg, 0)
            flat[k] = flat.get(k, QZERO) + c
        return RingElement(e.n, flat)
    # numerator = sum over layers m of (layer m) * g^(M-m)
    num = RingElement.zero(e.n)
    for m, c in e.terms.items():
        piece = RingElement.monomial(e.n, Monomial(m.tdeg, m.xdeg, 0), c)
        num = num + piece * (g ** (big_m - m.gpow))
    while big_m > 0:
        quo = exact_divide(num, g)
        if quo is None:
            break
        num = quo
        big_m -= 1
    return num.shift_gpow(big_m) if big_m else num


def exact_divide(p: RingElement, g: RingElement) -> RingElement | None:
    """p / g when the division of polynomials in x is exact, else None.

    p may carry t-degrees (they ride along); g must be a pure polynomial.
    """
    if not g.is_polynomial() or g.is_zero():
        raise ValueError("divisor must be a nonzero pure polynomial")
    slices: dict[int, dict[tuple[int, ...], object]] = {}
    for m, c in p.terms.items():
        if m.gpow != 0:
            raise ValueError("dividend must have no g-layer")
        slices.setdefault(m.tdeg, {})[m.xdeg] = c
    g_terms = {m.xdeg: c for m, c in g.terms.items()}
    g_lead = max(g_terms)
    out: dict[Monomial, object] = {}
    for tdeg, sl in slices.items():
        quo = _divide_xpoly(sl, g_terms, g_lead)
        if quo is None:
            return None
        for xdeg, c in quo.items():
            out[Monomial(tdeg, xdeg, 0)] = c
    return RingElement(p.n, out)


def _divide_xpoly(p, g, g_lead):
    p = dict(p)
    quo: dict[tuple[int, ...], object] = {}
    while p:
        lead = max(p)
        diff = tuple(a - b for a, b in zip(lead, g_lead))
        if any(d < 0 for d in diff):
            return None
        coef = p[lead] / g[g_lead]
        quo[diff] = quo.get(diff, QZERO) + coef
        for gm, gc in g.items():
            m = tuple(a + b for a, b in zip(diff, gm))
            s = p.get(m, QZERO) - coef * gc
            if s == 0:
                p.pop(m, None)
            else:
                p[m] = s
    return quo


# ---------------------------------------------------------------------------
# Canonical text serialization
# ---------------------------------------------------------------------------


def serialize(e: RingElement) -> str:
    """Canonical text form, e.g. '3/2*t^-1*x1^2*x2*ginv^1'."""
    if e.is_zero():
        return "0"
    parts = []
    for m in sorted(e.terms, key=Monomial.sort_key):
        c = e.terms[m]
        factors = []
        if m.tdeg != 0:
            factors.append("t" if m.tdeg == 1 else f"t^{m.tdeg}")
        for j, u in enumerate(m.xdeg):
            if u == 1:
                factors.append(f"x{j + 1}")
            elif u:
                factors.append(f"x{j + 1}^{u}")
        if m.gpow:
            factors.append(f"ginv^{m.gpow}")
        if not factors:
            term = qstr(c)
        elif c == 1:
            term = "*".join(factors)
        elif c == -1:
            term = "-" + "*".join(factors)
        else:
            term = qstr(c) + "*" + "*".join(factors)
        parts.append(term)
    out = parts[0]
    for term in parts[1:]:
        if term.startswith("-"):
            out += " - " + term[1:]
        else:
            out += " + " + term
    return out
