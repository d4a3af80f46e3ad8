import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from naphase.charfun import Region, StepFunction, indicator, random_step_function
from naphase.cyclotomic import CycloNum
from naphase.errors import GradientVanishes
from naphase.integrate import oscillatory_brute
from naphase.localfield import LAURENT, PADIC, FieldConfig
from naphase.polynomial import parse_phase
from naphase.stationary import (
    nonstationary_bound,
    nonstationary_data,
    pulled_back_amplitude,
    select_alpha,
    stationary_phase,
    theta_support_bound,
    verify_certificate,
)


def shell(cfg, n=1):
    """Indicator of the units of O (n = 1)."""
    return StepFunction(cfg, n, [((r,), 1, 1) for r in range(1, cfg.p)])


@pytest.mark.parametrize("src", ["x1^2", "x1^2 + x1^3"])
def test_certificate_is_exact_and_tight(cfg, src):
    f = parse_phase(src)
    phi = indicator(cfg, [0], 0)
    cert = stationary_phase(f, phi)
    assert (cert.alpha, cert.betas[0], cert.N) == (1, 0, -1)
    rep = verify_certificate(cert, f, phi, None, range(cert.N - 3, cert.N + 2))
    assert rep.ok
    # one step past N the closed form no longer matches
    assert not all(r["equal"] for r in rep.records if r["ord"] == cert.N + 1)


def test_binary_form_certificate():
    cfg = FieldConfig(PADIC, 5, 24)
    f = parse_phase("x1^2 + x1*x2 + x2^2")
    phi = indicator(cfg, [0, 0], 0)
    cert = stationary_phase(f, phi)
    assert cert.N == -1 and cert.N2 == [-1, -1]
    assert verify_certificate(cert, f, phi, None, range(-3, 0)).ok


def test_linear_phase_has_no_critical_points(cfg):
    f = parse_phase("x1")
    phi = indicator(cfg, [0], 0)
    assert nonstationary_bound(f, phi, Region.full(cfg, 1)) == 0
    lam = cfg.one()
    assert oscillatory_brute(f, phi, lam).is_zero()
    assert not oscillatory_brute(f, phi, lam.shift(1)).is_zero()


def test_shell_bound_is_tight(cfg):
    f = parse_phase("x1^2")
    phi = shell(cfg)
    data = nonstationary_data(f, phi, Region.full(cfg, 1))
    assert data == {"V": 0, "M_prime": 0, "depth": 1, "N1": -1}
    for ell in (-1, -2, -3):
        for u in range(1, cfg.p):
            assert oscillatory_brute(f, phi, cfg.from_int(u).shift(ell)).is_zero()
    assert not oscillatory_brute(f, phi, cfg.one()).is_zero()


def test_gradient_vanishing_detected(cfg):
    f = parse_phase("x1^3")
    phi = indicator(cfg, [0], 1)
    with pytest.raises(GradientVanishes):
        nonstationary_data(f, phi, Region.full(cfg, 1))


def test_theta_support(cfg):
    f = parse_phase("x1^2")
    cert = stationary_phase(f, indicator(cfg, [0], 0))
    md = cert.critical_points[0][1]
    assert theta_support_bound(indicator(cfg, [0], 0), md) == 0
    fine = StepFunction(cfg, 1, [((cfg.from_int(r).shift(1),), 2, r + 1) for r in range(cfg.p)])
    assert theta_support_bound(fine, md) == -1
    assert pulled_back_amplitude(fine, md).max_depth() == 2


def test_alpha_separates_points():
    cfg = FieldConfig(PADIC, 5, 24)
    pts = [(cfg.one(),), (cfg.from_int(6),)]
    assert select_alpha(pts, Region.full(cfg, 1)) == 2


def test_two_critical_points():
    cfg = FieldConfig(PADIC, 7, 24)
    f = parse_phase("x1^3 - 3*x1")
    phi = StepFunction(cfg, 1, [((1,), 1, 2), ((-1,), 1, CycloNum.from_terms(7, 1, [(1, 1)]))])
    cert = stationary_phase(f, phi)
    assert len(cert.critical_points) == 2
    assert verify_certificate(cert, f, phi, None, range(cert.N - 2, cert.N + 1)).ok


def test_amplitude_does_not_change_normal_form(cfg):
    f = parse_phase("x1^2 + x1^3")
    a = stationary_phase(f, indicator(cfg, [0], 0))
    b = stationary_phase(f, StepFunction(cfg, 1, [((r,), 1, r + 2) for r in range(cfg.p)]))
    assert a.alpha == b.alpha
    assert [md.units for _, md in a.critical_points] == [md.units for _, md in b.critical_points]


def test_json_is_deterministic(cfg):
    f = parse_phase("x1^2")
    phi = indicator(cfg, [0], 0)
    assert stationary_phase(f, phi).to_json() == stationary_phase(f, phi).to_json()


@settings(max_examples=15)
@given(st.sampled_from([PADIC, LAURENT]), st.sampled_from([5, 7]), st.integers(0, 10**9),
       st.sampled_from(["x1^2", "x1^2 + x1^3", "x1^2 - 2*x1^4"]))
def test_random_amplitudes(kind, p, seed, src):
    cfg = FieldConfig(kind, p, 24)
    f = parse_phase(src)
    phi = random_step_function(cfg, 1, random.Random(seed), max_depth=2)
    cert = stationary_phase(f, phi)
    rep = verify_certificate(cert, f, phi, None, range(cert.N - 1, cert.N + 1))
    assert rep.ok, rep.first_mismatch()


@pytest.mark.parametrize("p", [3, 5, 7])
def test_shell_bound_with_divisible_coefficient(p):
    cfg = FieldConfig(PADIC, p, 24)
    f = parse_phase(f"{p}*x1^2")
    phi = shell(cfg)
    data = nonstationary_data(f, phi, Region.full(cfg, 1))
    assert (data["V"], data["M_prime"], data["N1"]) == (1, 1, -2)
    for ell in (-2, -3, -4):
        for u in range(1, cfg.p):
            assert oscillatory_brute(f, phi, cfg.from_int(u).shift(ell)).is_zero()
    assert not oscillatory_brute(f, phi, cfg.one().shift(-1)).is_zero()
