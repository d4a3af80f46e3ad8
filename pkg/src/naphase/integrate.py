"""Exact integrals: step functions, oscillatory sums and Gauss integrals.

Haar measure is normalised so that O has volume 1; a coset of depth ``d``
in ``K^n`` has volume ``q^{-nd}``.

``oscillatory_brute`` evaluates ``∫ φ(x) Ψ(λ f(x)) dx`` for a polynomial
``f`` with integral coefficients.  Write ``λf = c + F`` with ``F`` free of
constant term, ``m`` the smallest valuation of a coefficient of ``F`` and
``M = 1 - m``.  Then ``G = ϖ^{M-1} F`` is integral and
``Ψ(F(x)) = Ψ(ϖ^{1-M} G(x))`` depends on ``G(x) mod ϖ^M``.

* ``mode="full"`` enumerates each cell down to depth ``M``.
* ``mode="linear"`` (default) stops at ``k = max(d, ⌈M/2⌉)``: on a coset
  ``x0 + (ϖ^k O)^n`` we have ``G(x0 + y) ≡ G(x0) + ∇G(x0)·y (mod ϖ^{2k})``
  because higher Taylor coefficients of an integral polynomial are
  integral, so the coset integrates to ``q^{-nk} Ψ(ϖ^{1-M} G(x0))`` when
  every ``∂_i G(x0) ≡ 0 (mod ϖ^{M-k})`` and to zero otherwise.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from . import kernels
from .charfun import Region, StepFunction, indicator, psi, restrict
from .cyclotomic import CycloNum, gauss_sum
from .errors import ConvergenceDomain, DepthOverflow
from .grid import DenseStep, double_fourier_check, fourier, fourier_brute, plancherel
from .localfield import LAURENT, FieldConfig, LocalNum, digits_of
from .series import MultiSeries

DEFAULT_BUDGET = 10 ** 7


def integrate_step(phi: StepFunction) -> CycloNum:
    p = phi.cfg.p
    total = CycloNum.rational(p, 0)
    for _, d, v in phi.cells:
        total = total + v * (Fraction(1, p) ** (phi.n * d))
    return total


def _as_series(cfg, f, n=None) -> MultiSeries:
    if isinstance(f, MultiSeries):
        return f
    return MultiSeries.from_poly(cfg, f, n=n, D=max(2, getattr(f, "degree", lambda: 2)()))


def phase_data(f: MultiSeries, lam: LocalNum):
    """Split λf into (constant, M, G-coefficients) as described in the module docstring.

    Returns ``(const, M, terms)`` where ``terms`` maps exponents to residues of
    ``G`` modulo ϖ^M; ``M <= 0`` means the nonconstant part is invisible to Ψ.
    """
    cfg = f.cfg
    zero = (0,) * f.n
    const = lam * f.coeff(zero)
    prods = {}
    for e in f.coeffs:
        if e != zero:
            prods[e] = lam * f.coeff(e)
    nonzero = [v for v in prods.values() if not v.is_zero]
    if not nonzero:
        return const, 0, {}
    m = min(v.valuation for v in nonzero)
    M = 1 - m
    if M <= 0:
        return const, M, {}
    terms = {}
    for e, v in prods.items():
        r = v.shift(M - 1).residue(M)
        if r:
            terms[e] = r
    return const, M, terms


def _cell_residues(cfg: FieldConfig, center, d: int, M: int):
    """Centre coordinates modulo ϖ^min(d, M) in kernel layout."""
    k = min(d, M)
    res = [x.residue(k) if k > 0 else 0 for x in center]
    if cfg.kind == LAURENT:
        out = np.zeros((len(center), M), np.int64)
        for i, r in enumerate(res):
            out[i, :] = digits_of(r, cfg.p, M)
        return out
    return np.array(res, dtype=np.int64)


def oscillatory_brute(f, phi: StepFunction, lam: LocalNum, omega: Region | None = None,
                      budget: int = DEFAULT_BUDGET, mode: str = "linear") -> CycloNum:
    """∫_Ω φ(x) Ψ(λ f(x)) dx by exact coset enumeration."""
    cfg, n, p = phi.cfg, phi.n, phi.cfg.p
    f = _as_series(cfg, f, n)
    if not f.exact:
        raise ConvergenceDomain("brute-force integration needs an exact polynomial phase")
    if omega is not None:
        phi = restrict(phi, omega)
    for c, d, _ in phi.cells:
        if d < 0 or any(not x.is_zero and x.valuation < 0 for x in c):
            raise ConvergenceDomain("integrand must be supported in O^n")
    lam = cfg.coerce(lam)
    const, M, terms = phase_data(f, lam)
    if M <= 0 or not terms:
        return psi(const) * integrate_step(phi)
    exps = np.array(list(terms.keys()), dtype=np.int64).reshape(-1, n)
    if cfg.kind == LAURENT:
        coefs = np.array([digits_of(r, p, M) for r in terms.values()], dtype=np.int64).reshape(-1, M)
    else:
        coefs = np.array(list(terms.values()), dtype=np.int64)
    half = -(-M // 2)
    plan = []
    spent = 0
    for c, d, v in phi.cells:
        if d >= M:
            k, d_eff = M, M
        else:
            k = max(d, half) if mode == "linear" else M
            d_eff = d
        spent += p ** (n * (k - d_eff))
        plan.append((c, d, d_eff, k, v))
    if spent > budget:
        raise DepthOverflow(f"{spent} cosets exceed the enumeration budget {budget}")
    total = CycloNum.rational(p, 0)
    for c, d, d_eff, k, v in plan:
        center = _cell_residues(cfg, c, d_eff, M)
        if cfg.kind == LAURENT:
            counts = kernels.laurent_histogram(exps, coefs, center, p, d_eff, k, M, mode == "linear")
            s = CycloNum.from_dense(p, 1, counts, 1)
        else:
            counts = kernels.padic_histogram(exps, coefs, center, p, d_eff, k, M, mode == "linear")
            s = CycloNum.from_dense(p, M, counts, 1)
        # a cell deeper than M is a single point of its own volume
        vol_exp = d if d >= M else k
        total = total + v * s * (Fraction(1, p) ** (n * vol_exp))
    return psi(const) * total


# ---------------------------------------------------------------------------
# Gauss integrals


def _square(cfg):
    return MultiSeries.from_poly(cfg, {(2,): 1}, n=1, D=2)


def gauss_brute(c: LocalNum, alpha: int, budget: int = DEFAULT_BUDGET, mode: str = "linear") -> CycloNum:
    """∫_{ϖ^α O} Ψ(c u²) du by enumeration."""
    cfg = c.cfg
    return oscillatory_brute(_square(cfg), indicator(cfg, [0], alpha), c, budget=budget, mode=mode)


def gauss_closed(c: LocalNum, alpha: int) -> CycloNum:
    """Closed form of ∫_{ϖ^α O} Ψ(c u²) du.

    With ``e = ord c + 2α`` the integral is ``q^{-α}`` for ``e >= 1``,
    ``q^{-α-j-1}·Σ_{x mod p} ζ_p^{ac(c) x²}`` for ``e = -2j`` and
    ``q^{-α-j-1}`` for ``e = -2j-1``.
    """
    p = c.cfg.p
    if c.is_zero:
        return CycloNum.rational(p, Fraction(1, p ** alpha))
    e = c.valuation + 2 * alpha
    if e >= 1:
        return CycloNum.rational(p, Fraction(1, p ** alpha))
    if e % 2 == 0:
        j = -e // 2
        return gauss_sum(p, c.ac()) * Fraction(1, p ** (alpha + j + 1))
    j = (-e - 1) // 2
    return CycloNum.rational(p, Fraction(1, p ** (alpha + j + 1)))


def gauss_lemma_hypotheses(a: LocalNum, b: LocalNum, alpha: int) -> bool:
    """ord b - ord a >= α and 2 ord b - ord a >= 1."""
    return b.valuation - a.valuation >= alpha and 2 * b.valuation - a.valuation >= 1


def quadratic_integral(a: LocalNum, b: LocalNum, alpha: int, budget: int = DEFAULT_BUDGET) -> CycloNum:
    """∫_{ϖ^α O} Ψ(a x² + b x) dx by enumeration."""
    cfg = a.cfg
    vals = [v.valuation for v in (a, b) if not v.is_zero]
    if not vals:
        return CycloNum.rational(cfg.p, Fraction(1, cfg.p ** alpha))
    m = min(vals)
    f = MultiSeries.from_poly(cfg, {(2,): a.shift(-m), (1,): b.shift(-m)}, n=1, D=2)
    return oscillatory_brute(f, indicator(cfg, [0], alpha), cfg.uniformizer() ** m, budget=budget)


def gauss_shift_invariance(a: LocalNum, b: LocalNum, alpha: int, budget: int = DEFAULT_BUDGET) -> bool:
    """Whether ∫_{ϖ^α O} Ψ(ax² + bx) = ∫_{ϖ^α O} Ψ(ax²), computed exactly."""
    zero = a.cfg.zero()
    return quadratic_integral(a, b, alpha, budget) == quadratic_integral(a, zero, alpha, budget)


__all__ = [
    "DenseStep",
    "DEFAULT_BUDGET",
    "double_fourier_check",
    "fourier",
    "fourier_brute",
    "gauss_brute",
    "gauss_closed",
    "gauss_lemma_hypotheses",
    "gauss_shift_invariance",
    "integrate_step",
    "oscillatory_brute",
    "phase_data",
    "plancherel",
    "quadratic_integral",
]
