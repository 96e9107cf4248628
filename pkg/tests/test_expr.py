import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from diracpolar.errors import ParseError
from diracpolar.expr import Const, as_expr, compile_many, parse_field_expr, parse_guard


def test_parses_with_bound_symbol():
    e = parse_field_expr("exp(2*A)")
    assert e.free_symbols() == {"A"}
    assert e.evaluate({"A": 0.5}) == pytest.approx(math.e)


def test_derivative_of_sin_squared():
    e = parse_field_expr("sin(theta)^2").diff("theta")
    for th in (0.1, 0.7, 2.0):
        assert e.evaluate({"theta": th}) == pytest.approx(2 * math.sin(th) * math.cos(th), abs=1e-15)


@pytest.mark.parametrize("text, offset", [("1/+", 2), ("(x + 1", 6), ("sin(x", 5), ("2 ** x", 3),
                                          ("x $ y", 2), ("", 0)])
def test_parse_error_offsets(text, offset):
    with pytest.raises(ParseError) as info:
        parse_field_expr(text)
    assert info.value.offset == offset
    assert info.value.expected or text == "x $ y"


def test_non_ascii_identifier_reported_at_its_offset():
    with pytest.raises(ParseError) as info:
        parse_field_expr("x + θ")
    assert info.value.offset == 4


def test_unknown_function_rejected():
    with pytest.raises(ParseError):
        parse_field_expr("erf(x)")


def test_constants_and_precedence():
    assert parse_field_expr("-2^2").evaluate({}) == -4
    assert parse_field_expr("2^3^2").evaluate({}) == 512
    assert parse_field_expr("pi/2").evaluate({}) == pytest.approx(math.pi / 2)
    assert parse_field_expr("1e-3*x").evaluate({"x": 2}) == pytest.approx(2e-3)


def test_atan2_derivatives():
    e = parse_field_expr("atan2(y, x)")
    x, y = 0.3, -0.7
    r2 = x * x + y * y
    assert e.diff("x").evaluate({"x": x, "y": y}) == pytest.approx(-y / r2)
    assert e.diff("y").evaluate({"x": x, "y": y}) == pytest.approx(x / r2)


SAMPLES = ["exp(-r/4)*cos(theta)", "log(1 - 2/r)/2", "sqrt(r^2 + t^2)", "tanh(r)*sinh(t) + cot(theta)",
           "r^theta", "atan2(r, t)*tan(theta/3)", "cosh(r)/(1 + t^2)"]


@pytest.mark.parametrize("text", SAMPLES)
def test_second_derivatives_match_sympy(text):
    t, r, th = sp.symbols("t r theta")
    ref = sp.sympify(text.replace("^", "**"), locals={"theta": th})
    e = parse_field_expr(text)
    env = {"t": 0.4, "r": 3.1, "theta": 0.9}
    subs = {t: 0.4, r: 3.1, th: 0.9}
    for a, sa in (("t", t), ("r", r), ("theta", th)):
        assert e.diff(a).evaluate(env) == pytest.approx(float(sp.diff(ref, sa).subs(subs)), rel=1e-12, abs=1e-13)
        for b, sb in (("r", r), ("theta", th)):
            got = e.diff(a).diff(b).evaluate(env)
            assert got == pytest.approx(float(sp.diff(ref, sa, sb).subs(subs)), rel=1e-11, abs=1e-12)


def test_simplification_of_constants():
    assert isinstance(parse_field_expr("2*3 + 1").diff("x"), Const)
    assert parse_field_expr("x*0").is_zero()


def test_compiled_matches_tree():
    exprs = [parse_field_expr(s) for s in SAMPLES]
    fn = compile_many(exprs, ("t", "r", "theta"))
    got = fn(0.4, 3.1, 0.9)
    for e, g in zip(exprs, got):
        assert g == pytest.approx(e.evaluate({"t": 0.4, "r": 3.1, "theta": 0.9}), rel=1e-15)


def test_substitute():
    e = parse_field_expr("A*r").substitute({"A": as_expr("exp(r)")})
    assert e.evaluate({"r": 1.0}) == pytest.approx(math.e)


def test_guards():
    g = parse_guard("r > 2*M")
    assert g.substitute({"M": as_expr(1.0)}).holds({"r": 2.5})
    assert not g.substitute({"M": as_expr(1.0)}).holds({"r": 2.0})
    assert parse_guard("theta <= pi").holds({"theta": math.pi})
    with pytest.raises(ParseError):
        parse_guard("r = 1")
    with pytest.raises(ParseError) as info:
        parse_guard("r > 1/+")
    assert info.value.offset == 6


finite = st.floats(-3, 3, allow_nan=False)


@given(finite, finite)
def test_roundtrip_through_str(a, b):
    e = parse_field_expr(f"({a!r})*x^2 - sin({b!r}*x)")
    again = parse_field_expr(str(e))
    for x in (-1.0, 0.5, 2.0):
        assert again.evaluate({"x": x}) == pytest.approx(e.evaluate({"x": x}), rel=1e-14, abs=1e-14)


def test_numpy_float_repr_is_not_an_expression():
    # str(np.float64) is plain on numpy 2, repr is not; callers must cast
    with pytest.raises(ParseError):
        parse_field_expr(repr(np.float64(0.5)) + "*x")
    assert as_expr(np.float64(0.5)).evaluate({}) == 0.5
