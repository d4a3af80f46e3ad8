"""Critical points and the diagonal normal form ``f(c + x) = f(c) + Σ a_i T_i(x)²``.

The normal form is an LDLᵀ factorisation over the ring of power series.
Write ``f̃(x) = f(c + x) - f(c) = xᵀ H(x) x`` with a symmetric matrix of
series ``H`` (``H(0)`` is half the Hessian).  Eliminating one pivot at a time,
``H_jk ← H_jk - H_ij H_ik / H_ii``, gives

    f̃ = Σ_i H_ii^{(i)} · (x_i + Σ_{k>i} x_k H_ik^{(i)}/H_ii^{(i)})²,

and ``H_ii^{(i)} = a_i · s_i²`` with ``a_i = H_ii^{(i)}(0)`` and ``s_i`` the
square root with constant term 1.  So ``T_i = s_i · (x_i + …)`` and no
series inversion is ever needed.  Pivots must be units; when a diagonal
entry of the current Schur complement is not, a permutation or a shear
``x_k ← x_k + x_i`` is applied first (``pivot_matrix``).
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .charfun import Region
from .errors import DegenerateCriticalClass, DegenerateHessian, NotCritical, PrecisionExhausted
from .localfield import FieldConfig, LocalNum
from .series import (
    MultiSeries,
    SeriesMap,
    det_mod_p,
    mat_inverse,
    residue_of,
    series_inverse,
    sqrt_series,
)


def _as_series(cfg: FieldConfig, f, n=None) -> MultiSeries:
    if isinstance(f, MultiSeries):
        return f
    return MultiSeries.from_poly(cfg, f, n=n, D=max(2, f.degree()) if hasattr(f, "degree") else 12)


def _unit_vec(n, i, k=1):
    return tuple(k if j == i else 0 for j in range(n))


# ---------------------------------------------------------------------------
# critical points


def _grad_hess_residues(f: MultiSeries, xs, K):
    n = f.n
    grad = [f.derivative(i) for i in range(n)]
    g = [gi.eval_residue(xs, K) for gi in grad]
    H = [[grad[i].derivative(j).eval_residue(xs, K) for j in range(n)] for i in range(n)]
    return g, H


def newton_lift(f: MultiSeries, xs, K: int | None = None, max_steps: int = 64):
    """Lift residues ``xs`` (grad ≡ 0, det Hess unit mod ϖ) to a critical point mod ϖ^K."""
    cfg = f.cfg
    ring = cfg.ring
    K = f.prec if K is None else K
    n = f.n
    xs = [ring.reduce(x, K) for x in xs]
    for _ in range(max_steps):
        g, H = _grad_hess_residues(f, xs, K)
        if not any(g):
            return xs
        Hinv = mat_inverse(cfg, H, K)
        step = [0] * n
        for i in range(n):
            acc = 0
            for j in range(n):
                acc = ring.add(acc, ring.mul(Hinv[i][j], g[j], K), K)
            step[i] = acc
        xs = [ring.sub(x, s, K) for x, s in zip(xs, step)]
    raise PrecisionExhausted("Newton iteration did not reach the working precision")


def _classes(cfg: FieldConfig, center, d: int, n: int):
    """Residue vectors mod ϖ meeting the cell ``center + (ϖ^d O)^n``."""
    if d <= 0:
        return itertools.product(range(cfg.p), repeat=n)
    return [tuple(x.residue(1) if not x.is_zero else 0 for x in center)]


def find_critical_points(f, omega: Region, K: int | None = None):
    """All critical points of ``f`` in ``omega`` (nondegenerate mod ϖ), as LocalNum tuples.

    Every residue class mod ϖ meeting ``omega`` with ``grad f ≡ 0`` is
    Newton-lifted; a class where also ``det Hess f ≡ 0`` raises
    :class:`DegenerateCriticalClass`.
    """
    cfg = omega.cfg
    f = _as_series(cfg, f, omega.n)
    n = f.n
    K = f.prec if K is None else K
    if not omega.is_integral():
        raise ValueError("the region must lie in O^n")
    seen = set()
    found = []
    for center, d in omega.cells:
        for cls in _classes(cfg, center, d, n):
            if cls in seen:
                continue
            seen.add(cls)
            g, H = _grad_hess_residues(f, list(cls), 1)
            if any(g):
                continue
            if det_mod_p(cfg, H) == 0:
                raise DegenerateCriticalClass(f"class {cls} has a degenerate critical point mod ϖ")
            xs = newton_lift(f, list(cls), K)
            pt = tuple(cfg.from_residue(x, K) for x in xs)
            if omega.contains(pt):
                found.append(pt)
    return sorted(found, key=lambda pt: tuple(x.residue_padded(K) if not x.is_zero else 0 for x in pt))


# ---------------------------------------------------------------------------
# pivoting


def pivot_matrix(Q, is_unit, inv, reduce=lambda x: x):
    """Integer unimodular ``P`` such that ``Pᵀ Q P`` has unit pivots in order.

    ``Q`` is a symmetric matrix over a field-like ring given by ``is_unit``,
    ``inv`` and ``reduce``.  At stage ``i`` the diagonal entry of the Schur
    complement is kept if it is a unit, else swapped with the first later unit
    diagonal entry, else made a unit by the shear ``x_k ← x_k + x_i`` with the
    first ``k`` such that ``S_ik`` is a unit (``S_ii' = 2 S_ik``).
    Raises :class:`DegenerateHessian` if no pivot exists.
    """
    n = len(Q)
    S = [[reduce(x) for x in row] for row in Q]
    P = [[int(i == j) for j in range(n)] for i in range(n)]

    def apply(E):
        # S <- Eᵀ S E, P <- P E
        nonlocal S, P
        SE = [[reduce(sum(S[r][t] * E[t][c] for t in range(n))) for c in range(n)] for r in range(n)]
        S = [[reduce(sum(E[t][r] * SE[t][c] for t in range(n))) for c in range(n)] for r in range(n)]
        P = [[sum(P[r][t] * E[t][c] for t in range(n)) for c in range(n)] for r in range(n)]

    for i in range(n):
        if not is_unit(S[i][i]):
            j = next((j for j in range(i + 1, n) if is_unit(S[j][j])), None)
            E = [[int(r == c) for c in range(n)] for r in range(n)]
            if j is not None:
                E[i][i] = E[j][j] = 0
                E[i][j] = E[j][i] = 1
            else:
                k = next((k for k in range(i + 1, n) if is_unit(S[i][k])), None)
                if k is None:
                    raise DegenerateHessian("Hessian is degenerate")
                E[k][i] = 1
            apply(E)
        piv = inv(S[i][i])
        for r in range(i + 1, n):
            for c in range(i + 1, n):
                S[r][c] = reduce(S[r][c] - S[r][i] * S[i][c] * piv)
        for t in range(i + 1, n):
            S[i][t] = S[t][i] = reduce(0)
    return P


def _int_inverse(P):
    """Inverse of an integer unimodular matrix, exactly."""
    n = len(P)
    M = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(P)]
    for col in range(n):
        piv = next(r for r in range(col, n) if M[r][col] != 0)
        M[col], M[piv] = M[piv], M[col]
        lead = M[col][col]
        M[col] = [x / lead for x in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                fct = M[r][col]
                M[r] = [x - fct * y for x, y in zip(M[r], M[col])]
    out = [[x for x in row[n:]] for row in M]
    if any(x.denominator != 1 for row in out for x in row):
        raise ValueError("matrix is not unimodular")
    return [[int(x) for x in row] for row in out]


def quadratic_matrix(coeff, n, half):
    """Half-Hessian matrix from a coefficient lookup ``coeff(exponent)``."""
    Q = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == j:
                Q[i][i] = coeff(_unit_vec(n, i, 2))
            else:
                e = tuple(int(t == i) + int(t == j) for t in range(n))
                Q[i][j] = half(coeff(e))
    return Q


def symmetric_split(g: MultiSeries, D: int):
    """Series matrix ``H`` with ``g = xᵀ H x`` for ``g`` without terms of degree < 2.

    A monomial ``m`` is charged to ``(j, k)`` with ``j`` the first variable of
    ``m`` and ``k`` the first variable of ``m / x_j``; off-diagonal charges are
    split evenly between ``(j, k)`` and ``(k, j)``.
    """
    cfg, n, K = g.cfg, g.n, g.prec
    ring = cfg.ring
    half = residue_of(cfg, Fraction(1, 2), K)
    buckets = [[{} for _ in range(n)] for _ in range(n)]
    for e, c in g.coeffs.items():
        if sum(e) < 2:
            raise NotCritical("phase has terms of degree below 2 after recentring")
        j = next(t for t, a in enumerate(e) if a)
        rest = list(e)
        rest[j] -= 1
        k = next(t for t, a in enumerate(rest) if a)
        rest[k] -= 1
        rest = tuple(rest)
        if j == k:
            buckets[j][j][rest] = ring.add(buckets[j][j].get(rest, 0), c, K)
        else:
            hc = ring.mul(c, half, K)
            for a, b in ((j, k), (k, j)):
                buckets[a][b][rest] = ring.add(buckets[a][b].get(rest, 0), hc, K)
    return [[MultiSeries(cfg, n, D, buckets[a][b], K, exact=False) for b in range(n)] for a in range(n)]


# ---------------------------------------------------------------------------
# normal form


@dataclass(frozen=True)
class MorseData:
    center: tuple
    units: tuple
    T: SeriesMap
    alpha: int
    residual_floor: int
    value: LocalNum
    pivot: tuple = ()
    certificates: dict = field(default_factory=dict)

    @property
    def cfg(self) -> FieldConfig:
        return self.T.cfg

    @property
    def n(self) -> int:
        return len(self.units)

    def to_json(self) -> dict:
        return {
            "center": [x.to_text() for x in self.center],
            "value": self.value.to_text(),
            "units": [a.to_text() for a in self.units],
            "T": [c.to_text() for c in self.T],
            "alpha": self.alpha,
            "residual_floor": self.residual_floor,
            "pivot": [list(r) for r in self.pivot],
            "certificates": dict(sorted(self.certificates.items())),
        }


def recentre(f: MultiSeries, x0):
    """``(f(x0 + x) - f(x0), f(x0))``."""
    ft = f.translate(x0)
    zero = (0,) * f.n
    value = ft.coeff(zero)
    return ft.like({e: c for e, c in ft.coeffs.items() if e != zero}), value


def _ldl_series(g: MultiSeries, D: int):
    """Units ``a`` and map ``T'`` with ``g = Σ a_i T'_i²`` (unit pivots assumed)."""
    cfg, n, K = g.cfg, g.n, g.prec
    ring = cfg.ring
    H = symmetric_split(g, D - 2)
    units, comps = [], []
    for i in range(n):
        hii = H[i][i]
        a = hii.coeff_residue((0,) * n)
        if a % cfg.p == 0:
            raise DegenerateHessian(f"pivot {i} is not a unit")
        inv = series_inverse(hii)
        ratio = hii.scale(cfg.from_residue(ring.inv_unit(a, K), K))
        root = sqrt_series(ratio)
        s = root.like(root.coeffs, D=D - 1)
        lin = MultiSeries.variable(cfg, n, i, D - 1, K)
        u = {}
        for k in range(i + 1, n):
            u[k] = H[i][k] * inv
            lin = lin + MultiSeries.variable(cfg, n, k, D - 1, K) * u[k].like(u[k].coeffs, D=D - 1)
        t = s * lin
        comps.append(t.like(t.coeffs, exact=False))
        units.append(a)
        for j in range(i + 1, n):
            for k in range(j, n):
                upd = H[j][k] - H[i][j] * u[k]
                H[j][k] = upd
                H[k][j] = upd
    return units, SeriesMap(comps)


def morse_normal_form(f, x0, alpha: int = 1, D: int | None = None) -> MorseData:
    """Diagonal normal form of ``f`` around the nondegenerate critical point ``x0``."""
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    x0 = tuple(x0)
    cfg = x0[0].cfg if isinstance(x0[0], LocalNum) else None
    if cfg is None:
        if not isinstance(f, MultiSeries):
            raise ValueError("cannot infer the field")
        cfg = f.cfg
    f = _as_series(cfg, f, len(x0))
    D = f.D if D is None else D
    if D < 2:
        raise ValueError("degree cutoff must be >= 2")
    n, K, p = f.n, f.prec, cfg.p
    ring = cfg.ring
    x0 = tuple(cfg.coerce(x) for x in x0)
    ft, value = recentre(f, x0)
    if any(ft.coeff_residue(_unit_vec(n, i)) for i in range(n)):
        raise NotCritical("gradient does not vanish at the given point")
    half = residue_of(cfg, Fraction(1, 2), K)
    Q = quadratic_matrix(ft.coeff_residue, n, lambda c: ring.mul(c, half, K))
    Qp = [[x % p for x in row] for row in Q]
    if det_mod_p(cfg, Qp) == 0:
        raise DegenerateHessian("Hessian determinant is not a unit")
    # in both layouts the residue mod ϖ is the lowest base-p digit
    P = pivot_matrix(Qp, lambda x: x % p != 0, lambda x: pow(x, -1, p), lambda x: x % p)
    Pres = [[residue_of(cfg, x, K) for x in row] for row in P]
    Pinv = [[residue_of(cfg, x, K) for x in row] for row in _int_inverse(P)]
    g = ft.compose(SeriesMap.linear(cfg, Pres, ft.D, K)) if P != _identity(n) else ft
    units, Tp = _ldl_series(g, D)
    T = Tp.compose(SeriesMap.linear(cfg, Pinv, D - 1, K)) if P != _identity(n) else Tp
    md = MorseData(
        center=x0,
        units=tuple(cfg.from_residue(a, K) for a in units),
        T=T,
        alpha=alpha,
        residual_floor=min(K, (D + 1) * alpha),
        value=value,
        pivot=tuple(tuple(r) for r in P),
    )
    certs = certify(md, ft, D)
    bad = [k for k, v in certs.items() if v is False]
    if bad:
        raise PrecisionExhausted(f"normal form certificate failed: {', '.join(bad)}")
    return MorseData(md.center, md.units, md.T, md.alpha, md.residual_floor, md.value, md.pivot, certs)


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _squares_sum(md: MorseData, D: int) -> MultiSeries:
    cfg = md.cfg
    n = md.n
    total = MultiSeries.zero(cfg, n, D, md.T[0].prec)
    for a, t in zip(md.units, md.T):
        tt = t.like(t.coeffs, D=D, exact=False)
        total = total + (tt * tt).scale(a)
    return total


def _series_det(J):
    n = len(J)
    if n == 1:
        return J[0][0]
    total = None
    for c in range(n):
        minor = [row[:c] + row[c + 1:] for row in J[1:]]
        term = J[0][c] * _series_det(minor)
        if c % 2:
            term = -term
        total = term if total is None else total + term
    return total


def certify(md: MorseData, ft: MultiSeries, D: int) -> dict:
    """Symbolic checks of a normal form against the recentred phase ``ft``.

    * ``residual``: ``ft - Σ a_i T_i²`` vanishes through degree ``D``;
    * ``origin``: ``T(0) = 0``;
    * ``units``: every ``a_i`` is a unit;
    * ``jacobian_unit``: ``det Jac T`` has unit constant term, so with integral
      coefficients it is a unit on the whole polydisc;
    * ``gradient_factor``: ``grad ft = 2 Jac(T)ᵀ diag(a) T`` through degree ``D-1``,
      hence grad vanishes on the polydisc exactly where ``T`` does, i.e. only at 0.
    """
    cfg, n = md.cfg, md.n
    p = cfg.p
    out = {}
    out["residual"] = (ft - _squares_sum(md, D)).truncate(D).is_zero()
    out["origin"] = not any(md.T.constant_residues())
    out["units"] = all(not a.is_zero and a.valuation == 0 for a in md.units)
    J = md.T.jacobian()
    det = _series_det(J)
    out["jacobian_unit"] = det.coeff_residue((0,) * n) % p != 0
    grad = ft.gradient()
    ok = True
    for j in range(n):
        rhs = MultiSeries.zero(cfg, n, D - 1, ft.prec)
        for i in range(n):
            Jij = J[i][j].like(J[i][j].coeffs, D=D - 1)
            Ti = md.T[i].like(md.T[i].coeffs, D=D - 1)
            rhs = rhs + (Jij * Ti).scale(md.units[i]).scale(2)
        if not (grad[j] - rhs).truncate(D - 1).is_zero():
            ok = False
    out["gradient_factor"] = ok
    return out


# ---------------------------------------------------------------------------
# pointwise verification


@dataclass
class MorseReport:
    ok: bool
    samples: int
    floor: int
    mismatches: list

    def to_json(self) -> dict:
        return {"ok": self.ok, "samples": self.samples, "floor": self.floor,
                "mismatches": self.mismatches[:5]}


def _random_point(cfg, n, alpha, K, rng):
    return tuple(cfg.from_residue(rng.randrange(cfg.p ** (K - alpha)), K - alpha, alpha) for _ in range(n))


def verify_morse(md: MorseData, f, sample_count: int = 100, seed: int = 0) -> MorseReport:
    """Check ``f(c + y) = f(c) + Σ a_i T_i(y)²`` at random ``y ∈ (ϖ^α O)^n``."""
    cfg, n = md.cfg, md.n
    f = _as_series(cfg, f, n)
    K = f.prec
    rng = random.Random(seed)
    floor = md.residual_floor
    bad = []
    for _ in range(sample_count):
        y = _random_point(cfg, n, md.alpha, K, rng)
        x = tuple(c + v for c, v in zip(md.center, y))
        lhs, fl_lhs = f.eval(x)
        ts, fl_t = md.T.eval(y)
        rhs = md.value
        for a, t in zip(md.units, ts):
            rhs = rhs + a * t * t
        # T_i(y) has ord >= α, so an error of ord e in T_i costs e + α in T_i²
        lim = min(floor, fl_lhs, fl_t + md.alpha, md.value.abs_prec)
        diff = lhs - rhs
        if not diff.is_zero and diff.valuation < lim:
            bad.append({"y": [v.to_text() for v in y], "ord": diff.valuation, "floor": lim})
    return MorseReport(not bad, sample_count, floor, bad)


__all__ = [
    "MorseData",
    "MorseReport",
    "certify",
    "find_critical_points",
    "morse_normal_form",
    "newton_lift",
    "pivot_matrix",
    "quadratic_matrix",
    "recentre",
    "symmetric_split",
    "verify_morse",
]
