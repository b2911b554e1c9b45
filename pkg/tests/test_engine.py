import os

import pytest

from gmexp.engine import (
    DegreeWindow,
    ProblemInstance,
    ResourceLimitError,
    Verdict,
    WindowError,
    assemble_phi,
    check_corollary_dominance,
    check_row_commutation,
    default_schedule,
    exponent_test,
    koszul_cohomology,
    phi_row,
)
from gmexp.linalg import rank
from gmexp.operators import apply
from gmexp.parser import parse_poly
from gmexp.rational import Q
from gmexp.ring import Monomial, RingElement


def instance(fs, n=1, gs="1", alpha="0"):
    f = parse_poly(fs, n, allow_ginv=True)
    g = parse_poly(gs, n)
    return ProblemInstance(n=n, f=f, g=g, alpha=alpha)


def test_instance_validation():
    with pytest.raises(ValueError):
        instance("x1", gs="0")
    with pytest.raises(ValueError):
        ProblemInstance(n=1, f=RingElement.t(1), g=RingElement.one(1), alpha=0)
    # f is normalized to the minimal g-layer
    p = instance("x1^2*ginv", gs="x1")
    assert p.f == parse_poly("x1", 1)


def test_phi_row_components_commute():
    for fs, n, gs in [("x1^2*(1-x1)", 1, "1"), ("x1*x2", 2, "1"), ("x1^2*ginv", 1, "x1")]:
        p = instance(fs, n=n, gs=gs, alpha="1/2")
        probe = DegreeWindow(-2, 2, 2, 0 if gs == "1" else 2)
        assert check_row_commutation(p, probe)


def test_phi_row_shape():
    p = instance("x1*(1-x1)", alpha="1/3")
    comps = phi_row(p)
    assert len(comps) == 2
    # first component is multiplication by f - t
    one = RingElement.one(1)
    assert apply(comps[0], one, p.g) == p.f - RingElement.t(1)
    # second is d/dx + f' (d/dt - alpha/t)
    e = RingElement.t(1, 2)
    df = parse_poly("1 - 2*x1", 1)
    assert apply(comps[1], e, p.g) == df * RingElement.t(1, 1).scale(2 - Q(1, 3))


def test_assemble_phi_window_error():
    p = instance("x1^3", alpha="1/2")
    win = DegreeWindow(-2, 2, 3, 0)
    with pytest.raises(WindowError):
        assemble_phi(p, win, win)  # too small to hold the image
    mat = assemble_phi(p, win, win.expand(1, 3, 0))
    assert mat.ncols == 2 * win.size(1)
    assert rank(mat) <= min(mat.nrows, mat.ncols)


def test_exponent_test_identity_map():
    # smooth coordinate: the direct image is trivial, only the integer
    # class survives with a single block
    rep = exponent_test(instance("x1", alpha="0"))
    assert rep.verdict is Verdict.EXPONENT and rep.cokernel_dim == 1
    rep = exponent_test(instance("x1", alpha="1/2"))
    assert rep.verdict is Verdict.NOT_EXPONENT and rep.cokernel_dim == 0
    assert rep.stabilized


def test_exponent_test_cusp():
    # f = x^3: classes 0, 1/3, 2/3
    for a, verdict in [("1/3", Verdict.EXPONENT), ("2/3", Verdict.EXPONENT),
                       ("1/2", Verdict.NOT_EXPONENT), ("1", Verdict.EXPONENT)]:
        rep = exponent_test(instance("x1^3", alpha=a))
        assert rep.verdict is verdict, a


def test_exponent_test_nontrivial_g():
    # f = x^2/(1-x) behaves like x^2 near the origin
    for a, verdict in [("1/2", Verdict.EXPONENT), ("1/3", Verdict.NOT_EXPONENT)]:
        rep = exponent_test(instance("x1^2*ginv", gs="1-x1", alpha=a))
        assert rep.verdict is verdict, a


def test_report_invariant_not_exponent_means_zero():
    rep = exponent_test(instance("x1*(1-x1)", alpha="1/5"))
    assert rep.verdict is Verdict.NOT_EXPONENT
    assert rep.cokernel_dim == 0 and rep.stabilized
    d = rep.to_dict()
    assert d["verdict"] == "not-exponent" and d["estimates"] == rep.estimates


def test_schedule_validation():
    p = instance("x1")
    with pytest.raises(ValueError):
        exponent_test(p, [DegreeWindow(-3, 3, 3, 0)])
    with pytest.raises(ValueError):
        exponent_test(p, [DegreeWindow(-3, 3, 3, 0), DegreeWindow(-3, 3, 3, 0)])


def test_default_schedule_growth():
    p = instance("x1^2*(1-x1)")
    sched = default_schedule(p, rounds=3)
    assert len(sched) == 3
    for a, b in zip(sched, sched[1:]):
        assert b.tmax > a.tmax and b.xmax > a.xmax and b.tmin < a.tmin
    pg = instance("x1^2*ginv", gs="x1")
    assert all(w.gmax == w.xmax for w in default_schedule(pg))


def test_resource_cap(monkeypatch):
    monkeypatch.setenv("GM_MAX_WINDOW_CELLS", "10")
    with pytest.raises(ResourceLimitError):
        exponent_test(instance("x1"))


def test_koszul_top_matches_cokernel():
    for fs, a in [("x1", "0"), ("x1", "1/2"), ("x1^3", "1/3"), ("x1^2*(1-x1)", "1/2")]:
        p = instance(fs, alpha=a)
        rep = exponent_test(p)
        dims = koszul_cohomology(p, default_schedule(p)[0])
        assert dims[p.n + 1] == rep.cokernel_dim, (fs, a)


def test_koszul_dominance():
    for fs, gs, a in [("x1", "1", "1/2"), ("x1*(1-x1)", "1", "1/3"),
                      ("x1^2*ginv", "x1", "1/5")]:
        p = instance(fs, gs=gs, alpha=a)
        assert check_corollary_dominance(p, default_schedule(p)[0])


def test_determinism():
    p = instance("x1^2*(1-x1)", alpha="1/2")
    r1 = exponent_test(p)
    r2 = exponent_test(p)
    assert r1.to_dict() == r2.to_dict()
