from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fuzzing import fuzz_inputs
from naphase.errors import ExpressionSyntaxError, NAPhaseError, NonPolynomial
from naphase.polynomial import RationalPoly, parse_phase


@pytest.mark.parametrize("src, text", [
    ("x1^2 + x1^3", "x1^2 + x1^3"),
    ("x1^2 + x1*x2 + x2^2", "x1^2 + x1*x2 + x2^2"),
    ("x2^2 + x1*x2 + x1^2", "x1^2 + x1*x2 + x2^2"),
    ("(x1 + 1/2)^3 - x2", "1/8 + 3/4*x1 - x2 + 3/2*x1^2 + x1^3"),
    ("-x1*x1 + 3/6", "1/2 - x1^2"),
    ("x1^3 - 3*x1", "-3*x1 + x1^3"),
    ("(x1 - x1)", "0"),
])
def test_canonical_text(src, text):
    assert parse_phase(src).to_text() == text


@pytest.mark.parametrize("src, exc, col", [
    ("1/x1", NonPolynomial, 3),
    ("x1^", ExpressionSyntaxError, 4),
    ("x1 +* 2", ExpressionSyntaxError, 5),
    ("x0", ExpressionSyntaxError, 1),
    ("(x1", ExpressionSyntaxError, 4),
    ("2/0", ExpressionSyntaxError, 3),
])
def test_errors_carry_positions(src, exc, col):
    with pytest.raises(exc) as info:
        parse_phase(src)
    assert info.value.line == 1
    assert info.value.col == col


def test_second_line_position():
    with pytest.raises(ExpressionSyntaxError) as info:
        parse_phase("x1 +\n  * x2")
    assert info.value.line == 2


def test_evaluation_and_derivatives():
    f = parse_phase("x1^3 - 3*x1 + x1*x2")
    assert f(2, 5) == Fraction(12)
    assert f.derivative(0).to_text() == "-3 + x2 + 3*x1^2"
    assert f.degree() == 3


def test_translate():
    f = parse_phase("x1^3 - 3*x1")
    g = f.translate([1])
    assert g.to_text() == "-2 + 3*x1^2 + x1^3"


polys = st.dictionaries(
    st.tuples(st.integers(0, 3), st.integers(0, 3)),
    st.fractions(min_value=-20, max_value=20, max_denominator=12),
    max_size=6,
).map(lambda t: RationalPoly(2, t))


@given(polys)
def test_print_parse_round_trip(f):
    text = f.to_text()
    g = parse_phase(text, 2)
    assert g == f
    assert g.to_text() == text


@given(polys, polys)
def test_arithmetic_agrees_with_evaluation(f, g):
    pt = (Fraction(2, 3), Fraction(-5))
    assert (f * g)(*pt) == f(*pt) * g(*pt)
    assert (f - g)(*pt) == f(*pt) - g(*pt)


def test_fuzz_never_crashes():
    for src in fuzz_inputs(2000, seed=1):
        try:
            parse_phase(src)
        except NAPhaseError:
            pass
