"""Exact stationary phase: bounds, closed right-hand side and oracle sweeps.

For ``ord λ <= N`` the integral ``∫_Ω φ(x) Ψ(λ f(x)) dx`` equals

    Σ_j Ψ(λ f(x_j)) φ(x_j) ∏_i ∫_{ϖ^α O} Ψ(λ a_{j,i} u²) du

where ``x_j`` runs over the critical points in Ω and ``a_{j,i}`` are the units
of the diagonal normal form on the polydisc ``B_j = x_j + (ϖ^α O)^n``.

``N = min(N1, N2)``.  ``N2`` comes from the support of the Fourier transform
of the pulled-back amplitude on each ``B_j``.  ``N1`` makes the integral over
``Ω ∖ ∪ B_j`` vanish.  Split that region into cosets ``y + (ϖ^b O)^n`` on which
φ is constant.  There

    λf(y + z) = λf(y) + λ∇f(y)·z + λR(z),   ord R(z) >= M' + 2b,

with ``M'`` the least valuation of a coefficient of degree >= 2.  The coset
integral is zero once ``ord λ + M' + 2b >= 1`` (Ψ ignores R) and
``ord λ + V + b <= 0`` (the linear character is nontrivial), ``V`` being
the largest value of ``min_i ord ∂_i f`` on the region.  Some admissible
``b >= d`` exists iff ``ord λ <= min(-d - V, M' - 1 - 2V)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .charfun import Region, StepFunction, children, coset_key, psi, restrict, step_eval
from .cyclotomic import CycloNum
from .errors import BudgetExhausted, GradientVanishes
from .grid import fourier
from .integrate import DEFAULT_BUDGET, gauss_closed, oscillatory_brute
from .localfield import FieldConfig, residue_valuation
from .morse import MorseData, _as_series, find_critical_points, morse_normal_form
from .series import MultiSeries

INFINITE = math.inf


# ---------------------------------------------------------------------------
# nonstationary region


def _ord_residue(r: int, p: int, K: int):
    return INFINITE if r == 0 else residue_valuation(r, p, K)


def _variation_floor(g: MultiSeries, center, e: int, K: int) -> float:
    """Lower bound for ``ord(g(c + z) - g(c))`` over ``z ∈ (ϖ^e O)^n``."""
    t = g.translate(center)
    p = g.cfg.p
    return min((_ord_residue(c, p, K) + sum(x) * e for x, c in t.coeffs.items() if sum(x)),
               default=INFINITE)


def gradient_floor(f: MultiSeries, cells, budget: int = 100_000) -> int:
    """max over the union of ``cells`` of ``min_i ord ∂_i f(x)``.

    On a coset ``c + (ϖ^e O)^n`` each ``∂_i f`` moves by elements of ord at
    least ``w_i`` (read off its Taylor expansion at ``c``).  When
    ``m = min_i ord ∂_i f(c)`` is below every ``w_i`` the minimum equals
    ``m`` on the whole coset.  Otherwise split.
    """
    cfg, K = f.cfg, f.prec
    grad = [f.derivative(i) for i in range(f.n)]
    best = None
    stack = [(tuple(c), d) for c, d in cells]
    visited = 0
    while stack:
        c, e = stack.pop()
        visited += 1
        if visited > budget:
            raise BudgetExhausted(f"gradient subdivision exceeded {budget} cosets")
        xs = [x.residue(K) if not x.is_zero else 0 for x in c]
        m = min(_ord_residue(g.eval_residue(xs, K), cfg.p, K) for g in grad)
        if m < min(_variation_floor(g, c, e, K) for g in grad):
            best = m if best is None else max(best, m)
            continue
        if e >= K:
            raise GradientVanishes("gradient vanishes (to working precision) on the region")
        stack.extend((ch, e + 1) for ch in children(cfg, c, e))
    return best


def nonstationary_data(f, phi: StepFunction, region: Region, budget: int = 100_000) -> dict:
    """``V``, ``M'``, the cell depth ``d`` and ``N1`` for φ on ``region``."""
    f = _as_series(phi.cfg, f, phi.n)
    part = restrict(phi, region)
    if part.is_zero():
        return {"V": None, "M_prime": None, "depth": None, "N1": None}
    d = max(0, part.max_depth())
    V = gradient_floor(f, [(c, dd) for c, dd, _ in part.cells], budget)
    mp = f.min_coeff_ord(2)
    bounds = [-d - V]
    if mp is not None:
        bounds.append(mp - 1 - 2 * V)
    return {"V": V, "M_prime": mp, "depth": d, "N1": min(bounds)}


def nonstationary_bound(f, phi: StepFunction, region: Region, budget: int = 100_000):
    """Largest ``N1`` with ``∫_region φ Ψ(λf) = 0`` for every ``ord λ <= N1`` (None if φ vanishes there)."""
    return nonstationary_data(f, phi, region, budget)["N1"]


# ---------------------------------------------------------------------------
# amplitude pulled back through the normal form


def _ball(md: MorseData) -> Region:
    return Region.ball(md.cfg, md.center, md.alpha)


def theta_depth(phi: StepFunction, md: MorseData) -> int:
    part = restrict(phi, _ball(md))
    return max(md.alpha, part.max_depth() if not part.is_zero() else md.alpha)


def pulled_back_amplitude(phi: StepFunction, md: MorseData) -> StepFunction:
    """θ(y) = φ(c + T^{-1}(y)) on ``(ϖ^α O)^n``.

    ``T`` is an isometry of the polydisc (integral coefficients, unit Jacobian),
    so it maps each coset of depth ``e >= α`` onto the coset of depth ``e``
    around the image of its centre.  ``|det Jac T^{-1}| = 1`` there.
    """
    cfg = md.cfg
    part = restrict(phi, _ball(md))
    cells = []
    # restricting to the ball leaves only cells of depth >= α
    for c, d, v in part.cells:
        y = tuple(a - b for a, b in zip(c, md.center))
        ty, _ = md.T.eval(y)
        cells.append((tuple(t.truncate(d) for t in ty), d, v))
    return StepFunction(cfg, md.n, cells)


def theta_support_bound(phi: StepFunction, md: MorseData) -> int:
    """β with ``supp θ̂ ⊂ (ϖ^β O)^n``: ``β = 1 - max(depth φ on the ball, α)``."""
    return 1 - theta_depth(phi, md)


def theta_transform_check(phi: StepFunction, md: MorseData, beta: int) -> bool:
    """Compute θ̂ and confirm it vanishes outside ``(ϖ^β O)^n``."""
    theta = pulled_back_amplitude(phi, md)
    if theta.is_zero():
        return True
    for c, d, _ in fourier(theta).cells:
        if d < beta or any(not x.is_zero and x.valuation < beta for x in c):
            return False
    return True


# ---------------------------------------------------------------------------
# certificate


def select_alpha(points, omega: Region, limit: int = 64) -> int:
    """Least α >= 1 with the balls ``x_j + (ϖ^α O)^n`` disjoint and inside Ω."""
    if not points:
        return 1
    cfg = omega.cfg
    for alpha in range(1, limit + 1):
        keys = {coset_key(pt, alpha) for pt in points}
        if len(keys) < len(points):
            continue
        if all(omega.contains_region(Region.ball(cfg, pt, alpha)) for pt in points):
            return alpha
    raise BudgetExhausted("no α separates the critical points inside the region")


@dataclass
class PhaseCertificate:
    cfg: FieldConfig
    n: int
    critical_points: list
    phi_values: list
    alpha: int
    betas: list
    N1: int | None
    N2: list
    N: int
    gamma: int = 1
    nonstationary: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)

    def closed_rhs(self, lam) -> CycloNum:
        lam = self.cfg.coerce(lam)
        total = CycloNum.rational(self.cfg.p, 0)
        for (x, md), v in zip(self.critical_points, self.phi_values):
            if v.is_zero():
                continue
            term = psi(lam * md.value) * v
            for a in md.units:
                term = term * gauss_closed(lam * a, self.alpha)
            total = total + term
        return total

    def to_json(self) -> dict:
        return {
            "field": self.cfg.kind,
            "p": self.cfg.p,
            "n": self.n,
            "alpha": self.alpha,
            "beta": self.betas,
            "N1": self.N1,
            "N2": self.N2,
            "N": self.N,
            "gamma": self.gamma,
            "critical_points": [
                {"x": [c.to_text() for c in x], "phi": v.to_json(), "morse": md.to_json()}
                for (x, md), v in zip(self.critical_points, self.phi_values)
            ],
            "nonstationary": self.nonstationary,
            "checks": dict(sorted(self.checks.items())),
        }


def stationary_phase(f, phi: StepFunction, omega: Region | None = None, alpha: int | None = None,
                     budget: int = 100_000) -> PhaseCertificate:
    """Certificate for ``∫_Ω φ Ψ(λ f)`` valid for ``ord λ <= N``."""
    cfg, n = phi.cfg, phi.n
    f = _as_series(cfg, f, n)
    omega = Region.full(cfg, n) if omega is None else omega
    points = find_critical_points(f, omega)
    alpha = select_alpha(points, omega) if alpha is None else alpha
    mds = [morse_normal_form(f, x, alpha) for x in points]
    betas, N2, checks = [], [], {}
    for j, md in enumerate(mds):
        beta = theta_support_bound(phi, md)
        checks[f"theta_support_{j}"] = theta_transform_check(phi, md, beta)
        betas.append(beta)
        for a in md.units:
            oa = a.valuation
            N2.append(min(beta - oa - alpha, 2 * beta - oa - 1))
    rest = omega
    for md in mds:
        rest = rest.subtract(_ball(md))
    ns = nonstationary_data(f, phi, rest, budget)
    bounds = list(N2) + ([ns["N1"]] if ns["N1"] is not None else [])
    N = min(bounds) if bounds else 0
    return PhaseCertificate(
        cfg=cfg,
        n=n,
        critical_points=list(zip(points, mds)),
        phi_values=[step_eval(phi, x) for x in points],
        alpha=alpha,
        betas=betas,
        N1=ns["N1"],
        N2=N2,
        N=N,
        nonstationary=ns,
        checks=checks,
    )


# ---------------------------------------------------------------------------
# verification


@dataclass
class CertificateReport:
    records: list
    N: int

    @property
    def ok(self) -> bool:
        return all(r["equal"] for r in self.records if r["guaranteed"])

    def first_mismatch(self):
        return next((r for r in self.records if r["guaranteed"] and not r["equal"]), None)

    def to_json(self) -> dict:
        return {"ok": self.ok, "N": self.N, "count": len(self.records),
                "first_mismatch": self.first_mismatch()}


def unit_representatives(cfg: FieldConfig):
    return list(range(1, cfg.p))


def verify_certificate(cert: PhaseCertificate, f, phi: StepFunction, omega: Region | None, ord_range,
                       units=None, budget: int = DEFAULT_BUDGET) -> CertificateReport:
    """Compare ``closed_rhs`` with exact enumeration at ``λ = u ϖ^ℓ``."""
    cfg = cert.cfg
    f = _as_series(cfg, f, cert.n)
    units = unit_representatives(cfg) if units is None else list(units)
    records = []
    for ell in ord_range:
        for u in units:
            lam = cfg.from_int(u).shift(ell)
            rhs = cert.closed_rhs(lam)
            lhs = oscillatory_brute(f, phi, lam, omega, budget=budget)
            records.append({
                "ord": ell,
                "unit": u,
                "guaranteed": ell <= cert.N,
                "equal": lhs == rhs,
                "lhs": lhs.to_json(),
                "rhs": rhs.to_json(),
            })
    return CertificateReport(records, cert.N)


__all__ = [
    "CertificateReport",
    "PhaseCertificate",
    "gradient_floor",
    "nonstationary_bound",
    "nonstationary_data",
    "pulled_back_amplitude",
    "select_alpha",
    "stationary_phase",
    "theta_support_bound",
    "theta_transform_check",
    "unit_representatives",
    "verify_certificate",
]
