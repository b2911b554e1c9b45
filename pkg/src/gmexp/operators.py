"""The k((t))-linear operator calculus.

Symbolic operator trees with exact per-monomial actions:

    PartialT        d/dt
    PartialX(i)     d/dx_i (with the quotient rule on g-layers)
    MulByT          multiplication by t
    MulByTInv       multiplication by t^-1
    MulByElem(e)    multiplication by a ring element
    PhiC(c)         d/dt + c*t^-1,            t^k -> (k+c) t^(k-1)
    Dtr(r)          t*d/dt + r,               t^k -> (k+r) t^k
    ArS(a, r, s)    t + r * PhiC(a+s)^-1,     t^k -> ((k+1+a+r+s)/(k+1+a+s)) t^(k+1)
    AbetaD(a, b, i, r, s)
                    t + b*(x_i d_i + r) * PhiC(a+s)^-1,
                    t^k x^u -> ((k+1+a+s+b(u_i+r))/(k+1+a+s)) t^(k+1) x^u

plus Sum, Compose (right-to-left) and Scale nodes.  Applications are exact:
terms falling outside any window are retained; truncation is the caller's
business.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .rational import Q, is_integer, rat
from .ring import DegreeWindow, Monomial, RingElement, partial_t, partial_x


class OperatorError(ValueError):
    pass


class UndefinedInverseError(OperatorError):
    """A PhiC(c) with integer c is being inverted inside ArS/AbetaD."""


class Operator:
    __slots__ = ()


@dataclass(frozen=True)
class Identity(Operator):
    pass


@dataclass(frozen=True)
class PartialT(Operator):
    pass


@dataclass(frozen=True)
class PartialX(Operator):
    i: int


@dataclass(frozen=True)
class MulByT(Operator):
    pass


@dataclass(frozen=True)
class MulByTInv(Operator):
    pass


@dataclass(frozen=True)
class MulByElem(Operator):
    elem: RingElement


@dataclass(frozen=True)
class PhiC(Operator):
    c: object

    def __post_init__(self):
        object.__setattr__(self, "c", rat(self.c))


@dataclass(frozen=True)
class Dtr(Operator):
    r: object

    def __post_init__(self):
        object.__setattr__(self, "r", rat(self.r))


@dataclass(frozen=True)
class ArS(Operator):
    alpha: object
    r: object
    s: object

    def __post_init__(self):
        object.__setattr__(self, "alpha", rat(self.alpha))
        object.__setattr__(self, "r", rat(self.r))
        object.__setattr__(self, "s", rat(self.s))
        if is_integer(self.alpha + self.s):
            raise UndefinedInverseError(
                f"ArS requires alpha + s not an integer, got {self.alpha + self.s}"
            )


@dataclass(frozen=True)
class AbetaD(Operator):
    alpha: object
    beta: object
    i: int
    r: object
    s: object

    def __post_init__(self):
        object.__setattr__(self, "alpha", rat(self.alpha))
        object.__setattr__(self, "beta", rat(self.beta))
        object.__setattr__(self, "r", rat(self.r))
        object.__setattr__(self, "s", rat(self.s))
        if is_integer(self.alpha + self.s):
            raise UndefinedInverseError(
                f"AbetaD requires alpha + s not an integer, got {self.alpha + self.s}"
            )


@dataclass(frozen=True)
class Sum(Operator):
    ops: tuple[Operator, ...]

    def __init__(self, *ops: Operator):
        object.__setattr__(self, "ops", tuple(ops))


@dataclass(frozen=True)
class Compose(Operator):
    """Compose(a, b) applies b first, then a."""

    ops: tuple[Operator, ...]

    def __init__(self, *ops: Operator):
        object.__setattr__(self, "ops", tuple(ops))


@dataclass(frozen=True)
class Scale(Operator):
    c: object
    op: Operator

    def __post_init__(self):
        object.__setattr__(self, "c", rat(self.c))


# ---------------------------------------------------------------------------
# Application
# ---------------------------------------------------------------------------


def apply(op: Operator, e: RingElement, g: RingElement | None = None) -> RingElement:
    """Exact action of op on e.  g is needed only for PartialX on g-layers."""
    if isinstance(op, Identity):
        return e
    if isinstance(op, PartialT):
        return partial_t(e)
    if isinstance(op, PartialX):
        if g is None:
            g = RingElement.one(e.n)
        return partial_x(op.i, e, g)
    if isinstance(op, MulByT):
        return e.mul_t(1)
    if isinstance(op, MulByTInv):
        return e.mul_t(-1)
    if isinstance(op, MulByElem):
        return op.elem * e
    if isinstance(op, Sum):
        out = RingElement.zero(e.n)
        for sub in op.ops:
            out = out + apply(sub, e, g)
        return out
    if isinstance(op, Compose):
        for sub in reversed(op.ops):
            e = apply(sub, e, g)
        return e
    if isinstance(op, Scale):
        return apply(op.op, e, g).scale(op.c)
    # per-monomial leaves
    out: dict[Monomial, object] = {}
    for m, c in e.terms.items():
        for coef, m2 in _act_monomial(op, m):
            s = out.get(m2, 0) + c * coef
            if s == 0:
                out.pop(m2, None)
            else:
                out[m2] = s
    return RingElement(e.n, out)


def _act_monomial(op: Operator, m: Monomial):
    k = m.tdeg
    if isinstance(op, Dtr):
        ev = k + op.r
        return [(ev, m)] if ev else []
    if isinstance(op, PhiC):
        ev = k + op.c
        return [(ev, Monomial(k - 1, m.xdeg, m.gpow))] if ev else []
    if isinstance(op, ArS):
        num = k + 1 + op.alpha + op.r + op.s
        den = k + 1 + op.alpha + op.s
        return [(Q(num) / den, Monomial(k + 1, m.xdeg, m.gpow))] if num else []
    if isinstance(op, AbetaD):
        u = m.xdeg[op.i - 1]
        num = k + 1 + op.alpha + op.s + op.beta * (u + op.r)
        den = k + 1 + op.alpha + op.s
        return [(Q(num) / den, Monomial(k + 1, m.xdeg, m.gpow))] if num else []
    raise OperatorError(f"cannot apply operator {op!r}")


# ---------------------------------------------------------------------------
# Invertibility and diagonal inversion
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InvertibilityVerdict:
    invertible: bool
    witness: Optional[Monomial] = None
    eigenvalue: Optional[object] = None

    def __post_init__(self):
        if self.invertible and self.witness is not None:
            raise ValueError("witness only accompanies a non-invertible verdict")


def _phi_mult(op: Operator):
    """Unwrap Compose/Scale chains of monomial-wise operators into a flat list."""
    if isinstance(op, Compose):
        out = []
        for sub in op.ops:
            out.extend(_phi_mult(sub))
        return out
    if isinstance(op, Scale):
        return [op] + _phi_mult(op.op)
    return [op]


def invertible_on(op: Operator, w: DegreeWindow, n: int = 1) -> InvertibilityVerdict:
    """Global closed-form invertibility criterion, with an in-window witness.

    Supported: Dtr, PhiC, ArS, AbetaD, MulByT/MulByTInv, Identity, and
    Scale/Compose combinations thereof.  The verdict reports the global
    (untruncated) criterion; when non-invertible, the witness is a monomial
    whose eigenvalue vanishes (taken inside the window when one exists
    there, else the nearest one outside).
    """
    for leaf in _phi_mult(op):
        v = _leaf_invertible(leaf, w, n)
        if not v.invertible:
            return v
    return InvertibilityVerdict(True)


def _witness_mono(k: int, n: int, xdeg: tuple[int, ...] | None = None) -> Monomial:
    return Monomial(k, xdeg if xdeg is not None else (0,) * n, 0)


def _leaf_invertible(op: Operator, w: DegreeWindow, n: int) -> InvertibilityVerdict:
    if isinstance(op, (Identity, MulByT, MulByTInv)):
        return InvertibilityVerdict(True)
    if isinstance(op, Scale):
        if op.c == 0:
            return InvertibilityVerdict(False, _witness_mono(w.tmin, n), Q(0))
        return InvertibilityVerdict(True)
    if isinstance(op, Dtr):
        if not is_integer(op.r):
            return InvertibilityVerdict(True)
        k = -int(op.r)
        return InvertibilityVerdict(False, _witness_mono(k, n), Q(0))
    if isinstance(op, PhiC):
        if not is_integer(op.c):
            return InvertibilityVerdict(True)
        k = -int(op.c)
        return InvertibilityVerdict(False, _witness_mono(k, n), Q(0))
    if isinstance(op, ArS):
        tot = op.alpha + op.r + op.s
        if not is_integer(tot):
            return InvertibilityVerdict(True)
        k = -int(tot) - 1
        return InvertibilityVerdict(False, _witness_mono(k, n), Q(0))
    if isinstance(op, AbetaD):
        hit = _abetad_offending_xdeg(op)
        if hit is None:
            return InvertibilityVerdict(True)
        u = hit
        k = -int(op.beta * (u + op.r) + op.alpha + op.s) - 1
        xdeg = tuple(u if j == op.i - 1 else 0 for j in range(n))
        return InvertibilityVerdict(False, Monomial(k, xdeg, 0), Q(0))
    raise OperatorError(f"invertibility criterion undefined for {op!r}")


def _abetad_offending_xdeg(op: AbetaD) -> Optional[int]:
    """Smallest u >= 0 with beta*(u+r)+alpha+s an integer, or None."""
    if op.beta == 0:
        return None
    q = op.beta.denominator
    for u in range(q):
        if is_integer(op.beta * (u + op.r) + op.alpha + op.s):
            return u
    return None


def invert_diagonal(op: Operator, e: RingElement, w: DegreeWindow) -> RingElement:
    """Solve op(result) = e monomial by monomial.

    Requires invertible_on(op, w); raises on a vanishing eigenvalue.
    """
    if isinstance(op, Compose):
        for sub in op.ops:  # invert outermost first
            e = invert_diagonal(sub, e, w)
        return e
    if isinstance(op, Scale):
        if op.c == 0:
            raise OperatorError("cannot invert the zero operator")
        return invert_diagonal(op.op, e.scale(Q(1) / op.c), w)
    if isinstance(op, Identity):
        return e
    if isinstance(op, MulByT):
        return e.mul_t(-1)
    if isinstance(op, MulByTInv):
        return e.mul_t(1)
    out: dict[Monomial, object] = {}
    for m, c in e.terms.items():
        coef, pre = _invert_monomial(op, m)
        out[pre] = out.get(pre, 0) + c * coef
    return RingElement(e.n, {m: c for m, c in out.items() if c != 0})


def _invert_monomial(op: Operator, m: Monomial):
    k = m.tdeg
    if isinstance(op, Dtr):
        ev = k + op.r
        if ev == 0:
            raise OperatorError(f"vanishing eigenvalue at {m}")
        return Q(1) / ev, m
    if isinstance(op, PhiC):
        ev = k + 1 + op.c
        if ev == 0:
            raise OperatorError(f"vanishing eigenvalue at {m}")
        return Q(1) / ev, Monomial(k + 1, m.xdeg, m.gpow)
    if isinstance(op, ArS):
        num = k + op.alpha + op.r + op.s
        den = k + op.alpha + op.s
        if num == 0:
            raise OperatorError(f"vanishing eigenvalue at {m}")
        return Q(den) / num, Monomial(k - 1, m.xdeg, m.gpow)
    if isinstance(op, AbetaD):
        u = m.xdeg[op.i - 1]
        num = k + op.alpha + op.s + op.beta * (u + op.r)
        den = k + op.alpha + op.s
        if num == 0:
            raise OperatorError(f"vanishing eigenvalue at {m}")
        return Q(den) / num, Monomial(k - 1, m.xdeg, m.gpow)
    raise OperatorError(f"not a diagonal-style operator: {op!r}")


# ---------------------------------------------------------------------------
# Commutation identities
# ---------------------------------------------------------------------------


def commutation_identities(alpha, beta, r, rp, s, sp, i: int = 1, n: int = 1):
    """The displayed commutation relations, as (name, lhs, rhs) triples.

    Requires alpha+s and alpha+s' not integers.
    """
    alpha, beta, r, rp, s, sp = map(rat, (alpha, beta, r, rp, s, sp))
    for v in (alpha + s, alpha + sp):
        if is_integer(v):
            raise OperatorError(f"alpha + s must not be an integer, got {v}")
    A = lambda rr, ss: ArS(alpha, rr, ss)
    phi = PhiC
    D = Dtr
    t, tinv = MulByT(), MulByTInv()
    return [
        ("ArS.phi = Dtr", Compose(A(r, s), phi(alpha + s)), D(alpha + r + s)),
        ("phi.ArS = Dtr+1", Compose(phi(alpha + s), A(r, s)), D(alpha + r + s + 1)),
        ("phi = tinv.Dtr", phi(alpha), Compose(tinv, D(alpha))),
        ("phi = Dtr+1.tinv", phi(alpha), Compose(D(alpha + 1), tinv)),
        ("t.phi = phi-1.t", Compose(t, phi(alpha)), Compose(phi(alpha - 1), t)),
        ("Dtr.phi = phi-1.Dtr", Compose(D(alpha), phi(beta)), Compose(phi(alpha - 1), D(beta))),
        ("Dtr.Dtr commute", Compose(D(alpha), D(beta)), Compose(D(beta), D(alpha))),
        ("phi.phi shift", Compose(phi(alpha), phi(beta)), Compose(phi(beta + 1), phi(alpha - 1))),
        ("ArS.ArS shift", Compose(A(r, s), A(rp, sp)), Compose(A(rp, sp - 1), A(r, s + 1))),
        ("ArS.t = t.ArS+1", Compose(A(r, s), t), Compose(t, A(r, s + 1))),
        (
            "AbetaD.x = x.AbetaD+1",
            Compose(AbetaD(alpha, beta, i, r, s), _mul_x(i, n)),
            Compose(_mul_x(i, n), AbetaD(alpha, beta, i, r + 1, s)),
        ),
    ]


def _mul_x(i: int, n: int) -> MulByElem:
    return MulByElem(RingElement.var(n, i))


def check_commutation(w: DegreeWindow, alpha, beta, r, rp, s, sp, n: int = 1):
    """Evaluate both sides of every identity on all window monomials.

    Applications are untruncated, so the comparison is exact equality.
    Returns [(name, holds)].
    """
    n_for_x = max(n, 1)
    monos = list(w.monomials(n_for_x))
    results = []
    for name, lhs, rhs in commutation_identities(alpha, beta, r, rp, s, sp, i=1, n=n_for_x):
        holds = True
        for m in monos:
            e = RingElement.monomial(n_for_x, m)
            if apply(lhs, e) != apply(rhs, e):
                holds = False
                break
        results.append((name, holds))
    return results


# ---------------------------------------------------------------------------
# Perturbation solving (order-by-order in t)
# ---------------------------------------------------------------------------


def perturbation_solve(
    phi: Operator,
    psi: Operator,
    w: DegreeWindow,
    targets: list[RingElement],
    g: RingElement | None = None,
) -> list[RingElement]:
    """Solve (phi + psi) a = b for each b, truncated at w.tmax.

    phi must preserve t-degree and be invertible monomial-by-monomial on
    the window; psi must raise t-degree by at least 1.  The recursion
    solves the lowest remaining t-order with phi and pushes the error up
    through psi; the residual of the returned solution vanishes below
    t^(tmax+1).
    """
    _check_degree_preserving(phi, w)
    solutions = []
    for b in targets:
        a = RingElement.zero(b.n)
        resid = b
        while not resid.is_zero():
            low = min(m.tdeg for m in resid.terms)
            if low > w.tmax:
                break
            slice_low = RingElement(
                b.n, {m: c for m, c in resid.terms.items() if m.tdeg == low}
            )
            delta = invert_diagonal(phi, slice_low, w)
            if any(m.tdeg != low for m in delta.terms):
                raise OperatorError("phi does not preserve t-degree")
            a = a + delta
            resid = resid - apply(phi, delta, g) - apply(psi, delta, g)
        solutions.append(a)
    return solutions


def _check_degree_preserving(phi: Operator, w: DegreeWindow) -> None:
    for leaf in _phi_mult(phi):
        if isinstance(leaf, (MulByT, MulByTInv, PhiC, ArS, AbetaD, PartialT)):
            raise OperatorError(f"phi must preserve t-degree, found {leaf!r}")
        if isinstance(leaf, Dtr) and is_integer(leaf.r):
            k = -int(leaf.r)
            if w.tmin <= k <= w.tmax:
                raise OperatorError(f"phi is not invertible on the window (t^{k})")


# ---------------------------------------------------------------------------
# Textual operator expressions (CLI debugging grammar)
# ---------------------------------------------------------------------------


def parse_operator(src: str) -> Operator:
    """Parse expressions like 'Dtr(1/2)', 'Phi(-1/3)', 'ArS(1/3,1,0)',
    'AbetaD(1/2,1/3,1,0,0)', 'compose(...)', 'sum(...)', 'scale(1/2, op)',
    'id', 't', 'tinv', 'dt', 'dx1'."""
    src = src.strip()
    op, rest = _parse_op(src, 0)
    if src[rest:].strip():
        raise ValueError(f"trailing input in operator expression: {src[rest:]!r}")
    return op


def _parse_op(src: str, pos: int):
    while pos < len(src) and src[pos].isspace():
        pos += 1
    m = re.match(r"[A-Za-z]+\d*", src[pos:])
    if not m:
        raise ValueError(f"expected operator name at position {pos}")
    name = m.group(0)
    pos += m.end()
    lname = name.lower()
    if lname == "id":
        return Identity(), pos
    if lname == "t":
        return MulByT(), pos
    if lname == "tinv":
        return MulByTInv(), pos
    if lname == "dt":
        return PartialT(), pos
    if lname.startswith("dx"):
        return PartialX(int(lname[2:])), pos
    if src[pos : pos + 1] != "(":
        raise ValueError(f"expected '(' after {name} at position {pos}")
    pos += 1
    if lname in ("compose", "sum"):
        ops = []
        while True:
            op, pos = _parse_op(src, pos)
            ops.append(op)
            pos = _skip_ws(src, pos)
            if src[pos : pos + 1] == ",":
                pos += 1
                continue
            break
        pos = _expect_char(src, pos, ")")
        return (Compose(*ops) if lname == "compose" else Sum(*ops)), pos
    if lname == "scale":
        c, pos = _parse_rat(src, pos)
        pos = _expect_char(src, pos, ",")
        op, pos = _parse_op(src, pos)
        pos = _expect_char(src, pos, ")")
        return Scale(c, op), pos
    args = []
    while True:
        c, pos = _parse_rat(src, pos)
        args.append(c)
        pos = _skip_ws(src, pos)
        if src[pos : pos + 1] == ",":
            pos += 1
            continue
        break
    pos = _expect_char(src, pos, ")")
    if lname == "dtr":
        return Dtr(*args), pos
    if lname == "phi":
        return PhiC(*args), pos
    if lname == "ars":
        return ArS(*args), pos
    if lname == "abetad":
        alpha, beta, i, r, s = args
        return AbetaD(alpha, beta, int(i), r, s), pos
    raise ValueError(f"unknown operator {name!r}")


def _skip_ws(src: str, pos: int) -> int:
    while pos < len(src) and src[pos].isspace():
        pos += 1
    return pos


def _expect_char(src: str, pos: int, ch: str) -> int:
    pos = _skip_ws(src, pos)
    if src[pos : pos + 1] != ch:
        raise ValueError(f"expected {ch!r} at position {pos}")
    return pos + 1


def _parse_rat(src: str, pos: int):
    pos = _skip_ws(src, pos)
    m = re.match(r"-?\d+(/\d+)?", src[pos:])
    if not m:
        raise ValueError(f"expected rational at position {pos}")
    return rat(m.group(0)), pos + m.end()
