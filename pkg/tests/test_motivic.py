from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from naphase.charfun import indicator
from naphase.cyclotomic import gauss_sum
from naphase.errors import BadPrime, DegenerateHessianOverQ, NotCriticalOverQ
from naphase.integrate import gauss_closed
from naphase.localfield import LAURENT, PADIC, FieldConfig
from naphase.motivic import LPoly, check_uniform, gauss_factor, specialize, uniform_normal_form
from naphase.polynomial import parse_phase
from naphase.stationary import stationary_phase

lpolys = st.dictionaries(st.integers(-4, 4), st.integers(-9, 9), max_size=4).map(LPoly)


@given(lpolys, lpolys, st.sampled_from([3, 5, 7, 11]))
def test_specialisation_is_a_ring_map(a, b, q):
    assert (a + b).specialize(q) == a.specialize(q) + b.specialize(q)
    assert (a * b).specialize(q) == a.specialize(q) * b.specialize(q)
    assert (a - a) == LPoly()


def test_lpoly_text():
    assert (LPoly.monomial(-2, 3) - LPoly.monomial(1)).to_text() == "-L + 3*L^-2"
    assert LPoly().to_text() == "0"


@pytest.mark.parametrize("kind", [PADIC, LAURENT])
@pytest.mark.parametrize("p", [3, 5, 7])
def test_gauss_factor_specialises_to_closed_form(kind, p):
    cfg = FieldConfig(kind, p, 24)
    for ell in range(-6, 3):
        for alpha in range(0, 3):
            lp, sym = gauss_factor(ell, alpha)
            for u in range(1, p):
                c = cfg.from_int(u).shift(ell)
                want = gauss_closed(c, alpha)
                got = gauss_sum(p, c.ac()) * Fraction(1, p) * lp.specialize(p) if sym else lp.specialize(p)
                assert want == got


@pytest.mark.parametrize("src, x0, a, bad, pivot", [
    ("x1^2", None, (1,), {2}, ((1,),)),
    ("x1^2 + x1*x2 + x2^2", None, (1, Fraction(3, 4)), {2, 3}, ((1, 0), (0, 1))),
    ("x1^3 - 3*x1", (1,), (3,), {2, 3}, ((1,),)),
    ("x1*x2 + x1^3", None, (1, Fraction(-1, 4)), {2}, ((1, 0), (1, 1))),
    ("x1^2/5 + x1^3", None, (Fraction(1, 5),), {2, 5}, ((1,),)),
])
def test_uniform_data(src, x0, a, bad, pivot):
    uf = uniform_normal_form(parse_phase(src), x0)
    assert uf.a == a
    assert set(uf.bad_primes) == bad
    assert uf.pivot == pivot


def test_uniform_errors():
    with pytest.raises(NotCriticalOverQ):
        uniform_normal_form(parse_phase("x1^2 + x1"))
    with pytest.raises(DegenerateHessianOverQ):
        uniform_normal_form(parse_phase("x1^3"))
    uf = uniform_normal_form(parse_phase("x1^2 + x1*x2 + x2^2"))
    with pytest.raises(BadPrime):
        specialize(uf, 3, -1)


def test_symbolic_rhs_shape():
    uf = uniform_normal_form(parse_phase("x1^2 + x1*x2 + x2^2"))
    even = uf.symbolic_rhs(-2)
    assert even["L"] == "L^-2" and len(even["symbols"]) == 4
    odd = uf.symbolic_rhs(-3)
    assert odd["L"] == "L^-4" and len(odd["symbols"]) == 2


@pytest.mark.parametrize("kind", [PADIC, LAURENT])
@pytest.mark.parametrize("p", [5, 7])
def test_specialised_rhs_equals_certificate(kind, p):
    f = parse_phase("x1^2 + x1*x2 + x2^2")
    uf = uniform_normal_form(f)
    cfg = FieldConfig(kind, p, 24)
    phi = indicator(cfg, [0, 0], 0)
    cert = stationary_phase(f, phi)
    for ell in range(cert.N - 3, cert.N + 1):
        rhs = specialize(uf, p, ell, kind, phi=phi)
        for u in range(1, p):
            assert rhs(u) == cert.closed_rhs(cfg.from_int(u).shift(ell))


def test_check_uniform_report():
    rep = check_uniform(parse_phase("x1^2"), primes=(3, 5), depth=2)
    assert rep.ok
    assert [e["status"] for e in rep.entries] == ["pass"] * 4
    rep = check_uniform(parse_phase("x1^2 + x1*x2 + x2^2"), primes=(3,), kinds=("padic",), depth=1)
    assert rep.entries[0]["status"] == "bad_prime"
