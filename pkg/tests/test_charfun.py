import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from naphase.charfun import Region, StepFunction, indicator, psi, random_step_function, restrict
from naphase.cyclotomic import CycloNum, zeta_pow
from naphase.errors import OverlappingCells
from naphase.localfield import LAURENT, PADIC, FieldConfig, from_rational


def test_conductor(cfg):
    one = CycloNum.rational(cfg.p, 1)
    assert psi(cfg.uniformizer()) == one
    assert psi(cfg.one()) != one
    assert psi(cfg.one()) == zeta_pow(cfg.p, 1, 1)


def test_padic_character_is_fractional_part():
    cfg = FieldConfig(PADIC, 5, 24)
    # {x/5} for x = 7/25 is 7/125
    assert psi(from_rational(cfg, 7, 25)) == zeta_pow(5, 3, 7)


def test_laurent_character_reads_constant_digit():
    cfg = FieldConfig(LAURENT, 5, 24)
    x = cfg.from_digits(-2, [3, 1, 4])  # 3 t^-2 + t^-1 + 4
    assert psi(x) == zeta_pow(5, 1, 4)


@given(st.sampled_from([PADIC, LAURENT]), st.sampled_from([3, 5, 7]),
       st.integers(1, 10**6), st.integers(1, 10**6), st.integers(-4, 2), st.integers(-4, 2))
def test_psi_is_additive(kind, p, a, b, va, vb):
    cfg = FieldConfig(kind, p, 24)
    x, y = cfg.from_int(a).shift(va), cfg.from_int(b).shift(vb)
    assert psi(x + y) == psi(x) * psi(y)
    assert psi(-x) == psi(x).conj()


def test_region_algebra(cfg):
    full = Region.full(cfg, 1)
    ball = Region.ball(cfg, [cfg.one()], 1)
    rest = full.subtract(ball)
    assert rest.volume() == 1 - Fraction(1, cfg.p)
    assert not rest.contains([cfg.one()])
    assert rest.contains([cfg.zero()])
    assert full.contains_region(ball)
    assert rest.intersect(ball).is_empty()
    assert full.refine(2).volume() == 1
    assert Region.from_json(cfg, rest.to_json()).volume() == rest.volume()


def test_overlapping_cells_rejected(cfg):
    with pytest.raises(OverlappingCells):
        StepFunction(cfg, 1, [((cfg.zero(),), 0, 1), ((cfg.zero(),), 1, 2)])


def test_restrict_and_evaluate(cfg):
    phi = indicator(cfg, [cfg.zero()], 0, 3)
    part = restrict(phi, Region.ball(cfg, [cfg.one()], 2))
    assert part((cfg.one(),)) == CycloNum.rational(cfg.p, 3)
    assert part((cfg.zero(),)).is_zero()


@given(st.sampled_from([PADIC, LAURENT]), st.sampled_from([3, 5]), st.integers(0, 10**6))
def test_normalized_is_same_function(kind, p, seed):
    cfg = FieldConfig(kind, p, 24)
    rng = random.Random(seed)
    phi = random_step_function(cfg, 1, rng, max_depth=2)
    norm = phi.normalized()
    assert norm.equals(phi)
    for r in range(p ** 2):
        x = (cfg.from_int(r),)
        assert norm(x) == phi(x)
    assert StepFunction.from_json(cfg, phi.to_json()).equals(phi)
