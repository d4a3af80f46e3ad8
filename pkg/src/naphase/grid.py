"""Dense grid form of step functions and the exact Fourier transform.

A :class:`DenseStep` samples a step function on the cosets of
``(ϖ^D O)^n`` inside ``(ϖ^s O)^n``.  Grid index ``r`` (per coordinate, in
``[0, p^{D-s})``) stands for the point ``ϖ^s·r`` where ``r`` is read as a
packed digit string, so both field kinds share the layout.  Each grid value
is a group-ring vector over ``Z[C_{p^M}]`` and the whole array carries one
rational ``scale``; nothing is reduced modulo the cyclotomic polynomial until
values are compared or extracted.

For ``x = ϖ^s r`` and ``ξ = ϖ^{1-D} ρ`` we have ``xξ = ϖ^{1-m} rρ`` with
``m = D - s``, so the Fourier kernel is a root of unity whose exponent
depends only on ``rρ mod ϖ^m``; the transform is applied one axis at a time.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np

from .charfun import StepFunction, psi, step_eval
from .cyclotomic import CycloNum, raise_level, reduce_dense
from .errors import ConstantNotScalar
from .localfield import LAURENT, FieldConfig

_LIMIT = 2 ** 62


def _digits_matrix(N, p, m):
    idx = np.arange(N, dtype=np.int64)
    out = np.empty((N, m), np.int64)
    for j in range(m):
        out[:, j] = idx % p
        idx //= p
    return out


def _pack(digs, p):
    out = np.zeros(digs.shape[:-1], np.int64)
    for j in range(digs.shape[-1] - 1, -1, -1):
        out = out * p + digs[..., j]
    return out


def kernel_exponents(cfg: FieldConfig, m: int, M: int) -> np.ndarray:
    """E[r, ρ] with Ψ(ϖ^{1-m}·rρ) = ζ_{p^M}^{E[r, ρ]}."""
    p = cfg.p
    N = p ** m
    if cfg.kind == LAURENT:
        d = _digits_matrix(N, p, m)
        top = np.zeros((N, N), np.int64)
        for j in range(m):
            top += np.outer(d[:, j], d[:, m - 1 - j])
        return (top % p) * p ** (M - 1)
    r = np.arange(N, dtype=np.int64)
    return (np.outer(r, r) % N) * p ** (M - m)


def negation_index(cfg: FieldConfig, m: int) -> np.ndarray:
    p = cfg.p
    N = p ** m
    if cfg.kind == LAURENT:
        return _pack((-_digits_matrix(N, p, m)) % p, p)
    return (-np.arange(N, dtype=np.int64)) % N


def _fits(arr, factor=1):
    if arr.dtype == object:
        return True
    big = int(np.abs(arr).max()) if arr.size else 0
    return big * factor < _LIMIT


def _as_safe(arr, factor=1):
    if arr.dtype != object and not _fits(arr, factor):
        return arr.astype(object)
    return arr


class DenseStep:
    """Step function sampled on a regular coset grid (see module docstring)."""

    __slots__ = ("cfg", "n", "s", "D", "M", "data", "scale")

    def __init__(self, cfg, n, s, D, M, data, scale=Fraction(1)):
        if D <= s:
            raise ValueError("grid needs D > s")
        self.cfg, self.n, self.s, self.D, self.M = cfg, n, s, D, M
        self.data = data
        self.scale = Fraction(scale)

    @property
    def m(self) -> int:
        return self.D - self.s

    @property
    def N(self) -> int:
        return self.cfg.p ** self.m

    # conversion ---------------------------------------------------------
    @classmethod
    def from_step(cls, phi: StepFunction, s=None, D=None, M=None) -> "DenseStep":
        cfg, n, p = phi.cfg, phi.n, phi.cfg.p
        lo = 0
        for c, d, _ in phi.cells:
            lo = min(lo, d)
            for x in c:
                t = x.truncate(d)
                if not t.is_zero:
                    lo = min(lo, t.valuation)
        hi = max([d for _, d, _ in phi.cells] + [lo + 1])
        s = lo if s is None else min(s, lo)
        D = hi if D is None else max(D, hi)
        if D <= s:
            D = s + 1
        level = max([v.M for _, _, v in phi.cells] + [0])
        M = level if M is None else max(M, level)
        m = D - s
        N = p ** m
        denom = math.lcm(1, *(v.denominator() for _, _, v in phi.cells))
        data = np.zeros((N,) * n + (p ** M,), dtype=object)
        for c, d, v in phi.cells:
            vec = v.dense(M, denom)
            # indices of the grid points inside the cell, per axis
            axes = []
            for x in c:
                base = x.truncate(d)
                r0 = 0 if base.is_zero else base.shift(-s).residue(d - s)
                step = p ** (d - s)
                axes.append(np.arange(r0, N, step, dtype=np.int64))
            data[np.ix_(*axes)] += vec
        if _small(data):
            data = data.astype(np.int64)
        return cls(cfg, n, s, D, M, data, Fraction(1, denom))

    def value_at(self, index) -> CycloNum:
        vec = np.asarray(self.data[tuple(index)])
        return CycloNum.from_dense(self.cfg.p, self.M, vec, 1) * self.scale

    def to_step(self) -> StepFunction:
        cfg, p, n = self.cfg, self.cfg.p, self.n
        red = reduce_dense(p, self.M, self.data)
        nz = np.argwhere(np.any(red != 0, axis=-1))
        cells = []
        for idx in nz:
            center = tuple(cfg.from_residue(int(r), self.m, self.s) if r else cfg.zero() for r in idx)
            vec = red[tuple(idx)]
            terms = {int(j): Fraction(int(vec[j])) * self.scale for j in np.flatnonzero(vec)}
            val = CycloNum._from_reduced(p, self.M, terms)
            cells.append((center, self.D, val))
        return StepFunction(cfg, n, cells).normalized()

    # regridding ---------------------------------------------------------
    def regrid(self, s: int, D: int) -> "DenseStep":
        """Same function on the finer/larger grid (s' <= s, D' >= D)."""
        if s > self.s or D < self.D:
            raise ValueError("can only enlarge the grid")
        if s == self.s and D == self.D:
            return self
        p = self.cfg.p
        N2 = p ** (D - s)
        r2 = np.arange(N2, dtype=np.int64)
        lowq = p ** (self.s - s)
        valid = r2 % lowq == 0
        src = np.where(valid, (r2 // lowq) % self.N, self.N)
        pad = [(0, 1)] * self.n + [(0, 0)]
        data = np.pad(self.data, pad)
        for ax in range(self.n):
            data = np.take(data, src, axis=ax)
        return DenseStep(self.cfg, self.n, s, D, self.M, data, self.scale)

    def relevel(self, M: int) -> "DenseStep":
        if M == self.M:
            return self
        return DenseStep(self.cfg, self.n, self.s, self.D, M,
                         raise_level(self.data, self.cfg.p, self.M, M), self.scale)

    @staticmethod
    def common(a: "DenseStep", b: "DenseStep"):
        s, D, M = min(a.s, b.s), max(a.D, b.D), max(a.M, b.M)
        return a.regrid(s, D).relevel(M), b.regrid(s, D).relevel(M)

    # algebra ------------------------------------------------------------
    def _combine(self, other, sign):
        a, b = DenseStep.common(self, other)
        sa, sb = a.scale, b.scale
        den = sa.denominator * sb.denominator
        fa, fb = sa.numerator * sb.denominator, sb.numerator * sa.denominator
        da = _as_safe(a.data, abs(fa) * 2)
        db = _as_safe(b.data, abs(fb) * 2)
        if da.dtype == object or db.dtype == object:
            da, db = da.astype(object), db.astype(object)
        return DenseStep(a.cfg, a.n, a.s, a.D, a.M, da * fa + sign * db * fb, Fraction(1, den))

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def scaled(self, c) -> "DenseStep":
        return DenseStep(self.cfg, self.n, self.s, self.D, self.M, self.data, self.scale * Fraction(c))

    def reflect(self) -> "DenseStep":
        """x -> φ(-x)."""
        neg = negation_index(self.cfg, self.m)
        data = self.data
        for ax in range(self.n):
            data = np.take(data, neg, axis=ax)
        return DenseStep(self.cfg, self.n, self.s, self.D, self.M, data, self.scale)

    def reduced(self):
        return reduce_dense(self.cfg.p, self.M, self.data)

    def equals(self, other: "DenseStep") -> bool:
        a, b = DenseStep.common(self, other)
        ra, rb = a.reduced(), b.reduced()
        fa = a.scale.numerator * b.scale.denominator
        fb = b.scale.numerator * a.scale.denominator
        ra = _as_safe(ra, abs(fa))
        rb = _as_safe(rb, abs(fb))
        if ra.dtype == object or rb.dtype == object:
            ra, rb = ra.astype(object), rb.astype(object)
        return bool(np.all(ra * fa == rb * fb))

    def is_zero(self) -> bool:
        return not self.reduced().any()

    def integral(self) -> CycloNum:
        p = self.cfg.p
        total = self.data.reshape(-1, p ** self.M).sum(axis=0)
        vol = Fraction(1, p) ** (self.n * self.D)
        return CycloNum.from_dense(p, self.M, total, 1) * (self.scale * vol)

    def pair_integral(self, other: "DenseStep") -> CycloNum:
        """∫ self·other over the common grid (pointwise group-ring product)."""
        a, b = DenseStep.common(self, other)
        p = self.cfg.p
        L = p ** a.M
        A = a.data.reshape(-1, L)
        B = b.data.reshape(-1, L)
        rows = A.any(axis=1) & B.any(axis=1)
        A, B = A[rows], B[rows]
        big = (int(np.abs(A).max()) if A.size else 0) * (int(np.abs(B).max()) if B.size else 0) * A.shape[0] * L
        if big >= _LIMIT:
            A, B = A.astype(object), B.astype(object)
        # loop over the factor with fewer occupied exponents
        if np.count_nonzero(A.any(axis=0)) > np.count_nonzero(B.any(axis=0)):
            A, B = B, A
        acc = np.zeros(L, dtype=A.dtype)
        for k in np.flatnonzero(A.any(axis=0)):
            # terms ζ^k · ζ^j land on exponent j + k
            acc += np.roll((A[:, k:k + 1] * B).sum(axis=0), k)
        vol = Fraction(1, p) ** (a.n * a.D)
        return CycloNum.from_dense(p, a.M, acc, 1) * (a.scale * b.scale * vol)

    # Fourier ------------------------------------------------------------
    def fourier(self) -> "DenseStep":
        """φ̂(ξ) = ∫ φ(x) Ψ(⟨x, ξ⟩) dx, exactly."""
        cfg, p, n, m = self.cfg, self.cfg.p, self.n, self.m
        M = max(self.M, m if cfg.kind != LAURENT else 1)
        src = self.relevel(M)
        L = p ** M
        N = self.N
        E = kernel_exponents(cfg, m, M)
        data = _as_safe(src.data, N ** n)
        k = np.arange(L)
        for ax in range(n):
            X = np.moveaxis(data, ax, 0)
            shape = X.shape
            Xf = X.reshape(N, -1, L)
            out = np.zeros_like(Xf)
            for r in range(N):
                row = Xf[r]
                if not row.any():
                    continue
                idx = (k[None, :] - E[r][:, None]) % L  # (ρ, L)
                out += row[:, idx].transpose(1, 0, 2)
            data = np.moveaxis(out.reshape(shape), 0, ax)
        vol = Fraction(1, p) ** (n * self.D)
        return DenseStep(cfg, n, 1 - self.D, 1 - self.s, M, data, self.scale * vol)


def _small(data) -> bool:
    return max((abs(int(v)) for v in data.reshape(-1)), default=0) < _LIMIT // 4


def fourier(phi: StepFunction) -> StepFunction:
    """Closed-form Fourier transform of a step function."""
    return DenseStep.from_step(phi).fourier().to_step()


def fourier_brute(phi: StepFunction, xi, extra_depth: int = 0) -> CycloNum:
    """φ̂(ξ) by a direct character sum over a fine coset grid (slow oracle)."""
    cfg, p, n = phi.cfg, phi.cfg.p, phi.n
    xi = tuple(cfg.coerce(v) for v in xi)
    lo = min([0] + [d for _, d, _ in phi.cells])
    for c, d, _ in phi.cells:
        for x in c:
            t = x.truncate(d)
            if not t.is_zero:
                lo = min(lo, t.valuation)
    min_xi = min([0] + [v.valuation for v in xi if not v.is_zero])
    k = max(phi.max_depth(), 1 - min_xi - lo, lo + 1) + extra_depth
    total = CycloNum.rational(p, 0)
    span = p ** (k - lo)
    for rs in itertools.product(range(span), repeat=n):
        x = tuple(cfg.from_residue(r, k - lo, lo) for r in rs)
        v = step_eval(phi, x)
        if v.is_zero():
            continue
        pair = cfg.zero()
        for a, b in zip(x, xi):
            pair = pair + a * b
        total = total + v * psi(pair)
    return total * Fraction(1, p) ** (n * k)


def double_fourier_check(phi: StepFunction) -> dict:
    """Compute hat-hat φ, measure κ with hat-hat φ(x) = κ·φ(-x), check Plancherel."""
    A = DenseStep.from_step(phi)
    B = A.fourier().fourier()
    R = A.reflect()
    Bc, Rc = DenseStep.common(B, R)
    rb, rr = Bc.reduced(), Rc.reduced()
    nz = np.argwhere(np.any(rr != 0, axis=-1))
    if len(nz) == 0:
        if Bc.is_zero():
            return {"kappa": None, "scalar": True, "expected": Fraction(1, phi.cfg.p ** phi.n)}
        raise ConstantNotScalar("hat-hat φ is nonzero while φ vanishes")
    i = tuple(nz[0])
    kappa = Bc.value_at(i) / Rc.value_at(i)
    if kappa.is_rational():
        ok = Bc.equals(Rc.scaled(kappa.to_fraction()))
    else:
        ok = all(Bc.value_at(tuple(j)) == kappa * Rc.value_at(tuple(j))
                 for j in np.ndindex(*rb.shape[:-1]))
    if not ok:
        raise ConstantNotScalar("hat-hat φ is not a scalar multiple of φ(-x)")
    return {"kappa": kappa, "scalar": True, "expected": Fraction(1, phi.cfg.p ** phi.n)}


def plancherel(f: StepFunction, g: StepFunction):
    """(∫ f̂ g, ∫ f ĝ)."""
    F, G = DenseStep.from_step(f), DenseStep.from_step(g)
    return F.fourier().pair_integral(G), F.pair_integral(G.fourier())


__all__ = ["DenseStep", "fourier", "fourier_brute", "double_fourier_check", "plancherel"]
