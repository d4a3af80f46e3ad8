from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import laurent_integral, padic_integral
from naphase.charfun import StepFunction, indicator
from naphase.cyclotomic import CycloNum, gauss_sum
from naphase.errors import ConvergenceDomain, DepthOverflow
from naphase.integrate import (
    gauss_brute,
    gauss_closed,
    gauss_lemma_hypotheses,
    gauss_shift_invariance,
    oscillatory_brute,
)
from naphase.localfield import LAURENT, PADIC, FieldConfig, from_rational
from naphase.polynomial import RationalPoly


def terms(p, M, pairs):
    return CycloNum.from_terms(p, M, [(j, Fraction(c)) for j, c in pairs])


# values frozen from the enumeration oracle in tests/oracles.py
FROZEN = [
    # (kind, p, f, λ, (centre, depth), expected)
    (PADIC, 3, {(2,): 1}, Fraction(1, 81), (0, 1), terms(3, 1, [(0, "1/27"), (1, "2/27")])),
    (LAURENT, 3, {(2,): 1}, (-4, 1), (0, 1), terms(3, 1, [(0, "1/27"), (1, "2/27")])),
    (PADIC, 5, {(2,): 1}, Fraction(2, 25), (0, 0), terms(5, 1, [(0, "1/25"), (2, "2/25"), (3, "2/25")])),
    (PADIC, 5, {(2,): 1, (3,): 1}, Fraction(1, 125), (0, 0),
     terms(5, 4, [(0, "1/25"), (102, "-1/25"), (227, "-1/25"), (352, "-1/25"), (477, "-1/25")])),
    (LAURENT, 5, {(2,): 1, (3,): 1}, (-3, 1), (0, 0), terms(5, 0, [(0, "2/25")])),
    (PADIC, 5, {(2, 0): 1, (1, 1): 1, (0, 2): 1}, Fraction(1, 25), (0, 0), terms(5, 0, [(0, "-1/125")])),
]


def _lam(cfg, lam):
    if cfg.kind == LAURENT:
        ell, u = lam
        return cfg.from_int(u).shift(ell)
    return from_rational(cfg, lam.numerator, lam.denominator)


@pytest.mark.parametrize("kind, p, f, lam, cell, expected", FROZEN)
@pytest.mark.parametrize("mode", ["linear", "full"])
def test_frozen_integrals(kind, p, f, lam, cell, expected, mode):
    cfg = FieldConfig(kind, p, 24)
    n = len(next(iter(f)))
    phi = indicator(cfg, [cell[0]] * n, cell[1])
    assert oscillatory_brute(RationalPoly(n, f), phi, _lam(cfg, lam), mode=mode) == expected


def test_frozen_gauss_value():
    cfg = FieldConfig(PADIC, 3, 24)
    c = cfg.one().shift(-4)
    assert gauss_closed(c, 1) == terms(3, 1, [(0, "1/27"), (1, "2/27")])
    assert gauss_closed(c, 1) == gauss_sum(3, 1) * Fraction(1, 27)


small_polys = st.dictionaries(st.sampled_from([(1,), (2,), (3,)]), st.integers(-6, 6), min_size=1, max_size=3)


@given(st.sampled_from([3, 5, 7]), small_polys, st.integers(-3, 0), st.integers(1, 6),
       st.integers(0, 6), st.integers(0, 2), st.sampled_from(["linear", "full"]))
def test_padic_agrees_with_oracle(p, f, ell, u, centre, depth, mode):
    if u % p == 0:
        u += 1
    cfg = FieldConfig(PADIC, p, 24)
    lam = Fraction(u) * Fraction(p) ** ell
    phi = indicator(cfg, [centre], depth, 2)
    got = oscillatory_brute(RationalPoly(1, f), phi, from_rational(cfg, lam.numerator, lam.denominator), mode=mode)
    assert got == padic_integral(f, 1, p, lam, [((centre,), depth, 2)])


@given(st.sampled_from([3, 5]), small_polys, st.integers(-3, 0), st.integers(1, 4), st.integers(0, 4),
       st.integers(0, 2))
def test_laurent_agrees_with_oracle(p, f, ell, u, centre, depth):
    if u % p == 0:
        u += 1
    cfg = FieldConfig(LAURENT, p, 24)
    centre %= p
    phi = indicator(cfg, [centre], depth)
    got = oscillatory_brute(RationalPoly(1, f), phi, cfg.from_int(u).shift(ell))
    assert got == laurent_integral(f, 1, p, ell, u, [((centre,), depth, 1)])


two_var = st.dictionaries(st.sampled_from([(1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (2, 1), (0, 3)]),
                          st.integers(-4, 4), min_size=1, max_size=4)


@given(two_var, st.integers(-2, 0), st.integers(1, 2), st.sampled_from([PADIC, LAURENT]))
def test_two_variables_agree_with_oracle(f, ell, u, kind):
    p = 3
    cfg = FieldConfig(kind, p, 24)
    phi = indicator(cfg, [0, 0], 0)
    got = oscillatory_brute(RationalPoly(2, f), phi, cfg.from_int(u).shift(ell))
    if kind == PADIC:
        want = padic_integral(f, 2, p, Fraction(u) * Fraction(p) ** ell, [((0, 0), 0, 1)])
    else:
        want = laurent_integral(f, 2, p, ell, u, [((0, 0), 0, 1)])
    assert got == want


@pytest.mark.parametrize("kind", [PADIC, LAURENT])
@pytest.mark.parametrize("p", [3, 5])
def test_gauss_closed_small_grid(kind, p):
    cfg = FieldConfig(kind, p, 24)
    for o in range(-4, 2):
        for alpha in range(0, 2):
            for u in range(1, p):
                c = cfg.from_int(u).shift(o)
                assert gauss_closed(c, alpha) == gauss_brute(c, alpha)


@given(st.sampled_from([PADIC, LAURENT]), st.sampled_from([3, 5]), st.integers(-4, 1), st.integers(-2, 3),
       st.integers(1, 4), st.integers(1, 4), st.integers(0, 2))
def test_linear_term_is_invisible_under_hypotheses(kind, p, oa, ob, ua, ub, alpha):
    cfg = FieldConfig(kind, p, 24)
    a = cfg.from_int(ua % p or 1).shift(oa)
    b = cfg.from_int(ub % p or 1).shift(ob)
    if gauss_lemma_hypotheses(a, b, alpha):
        assert gauss_shift_invariance(a, b, alpha)


def test_linear_term_matters_without_hypotheses():
    cfg = FieldConfig(PADIC, 5, 24)
    a, b = cfg.one().shift(-2), cfg.one().shift(-1)
    assert not gauss_lemma_hypotheses(a, b, 0)
    assert not gauss_shift_invariance(a, b, 0)


def test_support_outside_unit_ball_rejected():
    cfg = FieldConfig(PADIC, 3, 24)
    phi = indicator(cfg, [0], -1)
    with pytest.raises(ConvergenceDomain):
        oscillatory_brute(RationalPoly(1, {(2,): 1}), phi, cfg.one())


def test_budget_is_enforced():
    cfg = FieldConfig(PADIC, 3, 24)
    phi = StepFunction(cfg, 2, [((0, 0), 0, 1)])
    with pytest.raises(DepthOverflow):
        oscillatory_brute(RationalPoly(2, {(3, 0): 1, (0, 3): 1}), phi, cfg.one().shift(-12), budget=1000)
