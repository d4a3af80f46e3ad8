import random
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from naphase.errors import BadConstantTerm, NonIntegralRescale, NonzeroConstantTerm, SingularJacobian
from naphase.localfield import LAURENT, PADIC, FieldConfig
from naphase.series import (
    MultiSeries,
    SeriesMap,
    invert_map,
    random_series,
    rescale_map,
    series_inverse,
    sqrt_series,
)

D = 8


def catalan(k):
    return comb(2 * k, k) // (k + 1)


def test_sqrt_matches_catalan_numbers():
    # (1 - sqrt(1 - 4x)) / 2 = Σ_{k>=1} C_{k-1} x^k
    cfg = FieldConfig(PADIC, 5, 24)
    s = MultiSeries.from_poly(cfg, {(0,): 1, (1,): -4}, D=D)
    r = sqrt_series(s)
    for k in range(1, D + 1):
        assert r.coeff((k,)) == cfg.coerce(Fraction(-2 * catalan(k - 1)))


def test_geometric_inverse():
    cfg = FieldConfig(LAURENT, 3, 24)
    s = MultiSeries.from_poly(cfg, {(0, 0): 1, (1, 0): -1, (0, 1): -1}, D=D)
    inv = series_inverse(s)
    # 1/(1 - x - y) = Σ binom(i+j, i) x^i y^j
    for i in range(D + 1):
        for j in range(D + 1 - i):
            assert inv.coeff((i, j)) == cfg.from_int(comb(i + j, i))


def test_constant_term_errors():
    cfg = FieldConfig(PADIC, 3, 24)
    x = MultiSeries.variable(cfg, 1, 0, D)
    with pytest.raises(BadConstantTerm):
        series_inverse(x.scale(cfg.from_int(3)) + 3)
    with pytest.raises(BadConstantTerm):
        sqrt_series(x + 2)


def test_invert_map_errors():
    cfg = FieldConfig(PADIC, 3, 24)
    x = MultiSeries.variable(cfg, 1, 0, D)
    with pytest.raises(NonzeroConstantTerm):
        invert_map(SeriesMap([x + 1]))
    with pytest.raises(SingularJacobian):
        invert_map(SeriesMap([x.scale(cfg.from_int(3))]))
    with pytest.raises(NonIntegralRescale):
        rescale_map(SeriesMap([x + 1]), 1)


@st.composite
def unit_maps(draw):
    kind = draw(st.sampled_from([PADIC, LAURENT]))
    p = draw(st.sampled_from([3, 5]))
    n = draw(st.integers(1, 2))
    cfg = FieldConfig(kind, p, 12)
    rng = random.Random(draw(st.integers(0, 10**6)))
    comps = []
    for i in range(n):
        s = random_series(cfg, n, 5, rng, density=0.4)
        coeffs = {e: c for e, c in s.coeffs.items() if sum(e) >= 2}
        e = [0] * n
        e[i] = 1
        coeffs[tuple(e)] = rng.randrange(1, p)
        comps.append(MultiSeries(cfg, n, 5, coeffs, 12))
    return SeriesMap(comps)


@given(unit_maps())
def test_inverse_composes_to_identity(g):
    h = invert_map(g)
    ident = SeriesMap.identity(g.cfg, g.n, 5, 12)
    assert g.compose(h) == ident
    assert h.compose(g) == ident


@given(st.sampled_from([PADIC, LAURENT]), st.sampled_from([3, 5, 7]), st.integers(0, 10**6))
def test_sqrt_squares_back(kind, p, seed):
    cfg = FieldConfig(kind, p, 16)
    rng = random.Random(seed)
    s = random_series(cfg, 2, 6, rng, density=0.5)
    s = s.like({e: c for e, c in s.coeffs.items() if sum(e)}) + 1
    r = sqrt_series(s)
    assert (r * r).truncate(6) == s.truncate(6)


@given(st.sampled_from([PADIC, LAURENT]), st.integers(0, 10**6))
def test_multiplication_is_associative(kind, seed):
    cfg = FieldConfig(kind, 5, 12)
    rng = random.Random(seed)
    a, b, c = (random_series(cfg, 2, 4, rng) for _ in range(3))
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


def test_eval_matches_polynomial_value():
    cfg = FieldConfig(PADIC, 7, 24)
    s = MultiSeries.from_poly(cfg, {(2, 0): 1, (1, 1): 3, (0, 3): -2})
    x, y = cfg.from_int(4), cfg.from_int(9).shift(1)
    val, _ = s.eval((x, y))
    assert val == x * x + cfg.from_int(3) * x * y - cfg.from_int(2) * y * y * y
