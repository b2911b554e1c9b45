import pytest

from gmexp.parser import ParseError, parse_poly
from gmexp.rational import Q
from gmexp.ring import Monomial, RingElement, serialize


def test_expansion_examples():
    e = parse_poly("x1*x2*(1-x1-x2)", 2)
    assert len(e.terms) == 3
    assert serialize(e) == "x1*x2 - x1*x2^2 - x1^2*x2"

    e = parse_poly("x1^2*(1-x1)", 1)
    assert serialize(e) == "x1^2 - x1^3"

    e = parse_poly("3/2*x1 + x2^0", 2)
    assert e == parse_poly("1 + 3/2*x1", 2)


def test_rational_coefficients():
    e = parse_poly("2/4", 1)
    assert e == RingElement.constant(1, Q(1, 2))
    e = parse_poly("-1/3*x1", 1)
    assert e.terms[Monomial(0, (1,), 0)] == Q(-1, 3)


def test_t_and_ginv_gating():
    e = parse_poly("t^-2 + t*x1", 1, allow_t=True)
    assert Monomial(-2, (0,), 0) in e.terms
    with pytest.raises(ParseError):
        parse_poly("t", 1)
    with pytest.raises(ParseError):
        parse_poly("ginv", 1)
    e = parse_poly("x1*ginv^2", 1, allow_ginv=True)
    assert e.terms == {Monomial(0, (1,), 2): Q(1)}


def test_negative_exponent_only_on_t():
    with pytest.raises(ParseError):
        parse_poly("x1^-1", 1, allow_t=True)


def test_error_positions():
    with pytest.raises(ParseError) as exc:
        parse_poly("x1 + @", 1)
    assert exc.value.position == 5

    with pytest.raises(ParseError) as exc:
        parse_poly("x1 + ", 1)
    assert "expected" in str(exc.value)

    with pytest.raises(ParseError) as exc:
        parse_poly("x3", 2)
    assert "unknown variable" in str(exc.value)

    with pytest.raises(ParseError):
        parse_poly("(x1", 1)

    with pytest.raises(ParseError):
        parse_poly("1/0", 1)


def test_precedence_and_unary_minus():
    assert parse_poly("-x1^2", 1) == -parse_poly("x1^2", 1)
    assert parse_poly("2*x1 + 3*x1", 1) == parse_poly("5*x1", 1)
    assert parse_poly("(1 + x1)^3", 1) == parse_poly("1 + 3*x1 + 3*x1^2 + x1^3", 1)


def test_var_names_override():
    e = parse_poly("(D - 1/2)*(D - 1/3)", 1, var_names={"D": 0})
    assert e == parse_poly("x1^2 - 5/6*x1 + 1/6", 1)
