"""Front-end reductions and the univariate indicial-polynomial oracle.

A family cut out by p(x) - lam^d q(x) = 0, with a localizing factor r,
reduces to a single surjectivity problem: after the degree-d base change
its exponents are d times those of the instance with f = pbar/qbar and
g = r*qbar, where pbar, qbar are p, q with their r-denominators cleared.

Separately, a univariate operator L = sum_i t^i A_i(D) written by its
coefficient polynomials A_i has a regular part of rank deg A_0, with
exponent classes the roots of A_0 (counted with multiplicity).  Only the
rational roots are extracted exactly; the rest stays in an unfactored
residual.
"""

from __future__ import annotations

from dataclasses import dataclass

from .engine import ProblemInstance
from .parser import parse_poly
from .rational import Q, class_rep, rat
from .ring import RingElement, clear_g


@dataclass(frozen=True)
class FamilySpec:
    """p, q may carry powers of 1/r (as their formal denominator layer)."""

    p: RingElement
    q: RingElement
    r: RingElement
    d: int

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be a positive integer")
        if self.r.is_zero() or not self.r.is_polynomial():
            raise ValueError("r must be a nonzero polynomial")
        if self.q.is_zero():
            raise ValueError("q must be nonzero")
        for e in (self.p, self.q):
            if not e.is_t_free():
                raise ValueError("p and q must not depend on t")


def reduce_family(fam: FamilySpec, alpha=0) -> tuple[ProblemInstance, int]:
    """(instance template, scale).  Exponents of the family are scale times
    the exponents of the instance; alpha is the per-query class and may be
    replaced later."""
    n = fam.p.n
    big_n = max(fam.p.max_gpow(), fam.q.max_gpow())
    r_pow = fam.r ** big_n
    pbar = clear_g(fam.p * r_pow, fam.r)
    qbar = clear_g(fam.q * r_pow, fam.r)
    for name, e in (("p", pbar), ("q", qbar)):
        if not e.is_polynomial():
            raise ValueError(f"{name} does not clear its r-denominator")
    if qbar.is_zero():
        raise ValueError("q vanishes after clearing denominators")
    g = fam.r * qbar
    f = (pbar * fam.r).shift_gpow(1)  # pbar/qbar rewritten over g = r*qbar
    return ProblemInstance(n=n, f=f, g=g, alpha=alpha), fam.d


def scale_exponents(exps, d: int):
    """Each class alpha -> d*alpha mod Z, canonical representative in (0,1];
    multiplicities preserved.  Input and output are sorted lists."""
    if d < 1:
        raise ValueError("d must be a positive integer")
    return sorted(class_rep(rat(a) * d) for a in exps)


# ---------------------------------------------------------------------------
# Univariate indicial oracle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UnivariateOperator:
    """L = sum_i t^i A_i(D), stored as {i: dense coefficient list of A_i}."""

    coefficients: tuple[tuple[int, tuple], ...]

    @classmethod
    def from_polys(cls, polys: dict[int, list]) -> "UnivariateOperator":
        items = []
        for i, coefs in sorted(polys.items()):
            if i < 0:
                raise ValueError("t-powers must be nonnegative")
            coefs = _strip([rat(c) for c in coefs])
            if coefs:
                items.append((i, tuple(coefs)))
        return cls(tuple(items))

    @classmethod
    def parse(cls, src: str) -> "UnivariateOperator":
        """Textual form 'A0=(D-1/2)*(D-1/3); A1=D^5'."""
        polys: dict[int, list] = {}
        for part in src.split(";"):
            part = part.strip()
            if not part:
                continue
            lhs, _, rhs = part.partition("=")
            lhs = lhs.strip()
            if not lhs.startswith("A") or not lhs[1:].isdigit():
                raise ValueError(f"expected 'Ai=<polynomial in D>', got {part!r}")
            i = int(lhs[1:])
            e = parse_poly(rhs, 1, var_names={"D": 0})
            coefs = [Q(0)] * (e.max_xdeg() + 1)
            for m, c in e.terms.items():
                coefs[m.xdeg[0]] = c
            polys[i] = coefs
        return cls.from_polys(polys)

    def a0(self) -> tuple:
        for i, coefs in self.coefficients:
            if i == 0:
                return coefs
        return ()


def _strip(coefs):
    while coefs and coefs[-1] == 0:
        coefs.pop()
    return coefs


def univariate_regular_exponents(op: UnivariateOperator):
    """(rank, rational roots with multiplicities, residual factor).

    rank = deg A_0; the exponent classes of the regular part are the roots
    of A_0 counted with multiplicity.  Rational roots are extracted by the
    rational root theorem with deflation; the residual is the unfactored
    rational-root-free cofactor (dense coefficient list).
    """
    a0 = list(op.a0())
    if not a0:
        raise ValueError("A0 = 0: the regular-part query is undefined")
    rank = len(a0) - 1
    roots: list[tuple] = []
    cur = a0
    while len(cur) > 1:
        root = _find_rational_root(cur)
        if root is None:
            break
        mult = 0
        while len(cur) > 1:
            quo = _deflate(cur, root)
            if quo is None:
                break
            cur = quo
            mult += 1
        roots.append((root, mult))
    roots.sort(key=lambda rm: (rm[0], rm[1]))
    return rank, roots, tuple(cur)


def _find_rational_root(coefs):
    """Smallest rational root of a dense Q-polynomial, or None."""
    # clear denominators to integers
    den = 1
    for c in coefs:
        den = den * c.denominator // _gcd(den, c.denominator)
    ints = [int(c * den) for c in coefs]
    if ints[0] == 0:
        return Q(0)
    a0, an = abs(ints[0]), abs(ints[-1])
    candidates = set()
    for p in _divisors(a0):
        for q in _divisors(an):
            candidates.add(Q(p, q))
            candidates.add(Q(-p, q))
    hits = [r for r in sorted(candidates) if _eval_poly(coefs, r) == 0]
    return hits[0] if hits else None


def _divisors(m: int):
    out = []
    d = 1
    while d * d <= m:
        if m % d == 0:
            out.append(d)
            out.append(m // d)
        d += 1
    return out


def _eval_poly(coefs, x):
    acc = Q(0)
    for c in reversed(coefs):
        acc = acc * x + c
    return acc


def _deflate(coefs, root):
    """coefs / (X - root) when exact, else None."""
    out = [Q(0)] * (len(coefs) - 1)
    carry = Q(0)
    for k in range(len(coefs) - 1, 0, -1):
        carry = coefs[k] + carry * root
        out[k - 1] = carry
    rem = coefs[0] + carry * root
    return out if rem == 0 else None


def _gcd(a: int, b: int) -> int:
    import math

    return math.gcd(int(a), int(b))
