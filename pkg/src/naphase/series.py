"""Multivariate truncated power series with integral coefficients.

A :class:`MultiSeries` stores its coefficients as residues modulo ϖ^prec
(packed integers, see :mod:`naphase.localfield`) keyed by exponent tuples.
Every monomial of total degree at most ``D`` is represented; higher degrees
are discarded.  The ``exact`` flag records that nothing has been discarded,
i.e. the object is a genuine polynomial; exact polynomials may be evaluated
anywhere on O^n and translated, truncated series only on polydiscs of
radius < 1.
"""
from __future__ import annotations

import math
from fractions import Fraction

from .errors import (
    BadConstantTerm,
    ConfigMismatch,
    ConvergenceDomain,
    DenominatorNotUnit,
    NonIntegralCoefficient,
    NonIntegralRescale,
    NonzeroConstantTerm,
    PrecisionExhausted,
    SingularJacobian,
)
from .localfield import PADIC, FieldConfig, LocalNum, digits_of

DEFAULT_DEGREE = 12


# ---------------------------------------------------------------------------
# residue helpers


def residue_of(cfg: FieldConfig, value, K: int) -> int:
    """Residue modulo ϖ^K of an integral int, Fraction or LocalNum."""
    p = cfg.p
    if isinstance(value, LocalNum):
        if not value.is_zero and value.valuation < 0:
            raise NonIntegralCoefficient(f"{value} is not integral")
        return value.residue(K)
    v = Fraction(value)
    if cfg.kind == PADIC:
        if v.denominator % p == 0:
            raise NonIntegralCoefficient(f"{v} is not {p}-integral")
        m = p ** K
        return v.numerator * pow(v.denominator, -1, m) % m
    if v.denominator % p == 0:
        raise DenominatorNotUnit(f"{v} has no reduction mod {p}")
    return v.numerator * pow(v.denominator, -1, p) % p if K > 0 else 0


def is_unit_residue(r: int, p: int) -> bool:
    return r % p != 0


def mat_inverse(cfg: FieldConfig, A, K: int):
    """Inverse modulo ϖ^K of a square residue matrix with unit determinant."""
    ring, p = cfg.ring, cfg.p
    n = len(A)
    M = [list(row) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(A)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] % p), None)
        if piv is None:
            raise SingularJacobian("matrix is singular modulo ϖ")
        M[col], M[piv] = M[piv], M[col]
        inv = ring.inv_unit(M[col][col], K)
        M[col] = [ring.mul(inv, x, K) for x in M[col]]
        for r in range(n):
            if r != col and M[r][col]:
                f = M[r][col]
                M[r] = [ring.sub(x, ring.mul(f, y, K), K) for x, y in zip(M[r], M[col])]
    return [row[n:] for row in M]


def det_mod_p(cfg: FieldConfig, A) -> int:
    """Determinant of a residue matrix reduced modulo ϖ (an element of F_p)."""
    p = cfg.p
    M = [[x % p for x in row] for row in A]
    n = len(M)
    det = 1
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col]), None)
        if piv is None:
            return 0
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
            det = -det
        det = det * M[col][col] % p
        inv = pow(M[col][col], -1, p)
        for r in range(col + 1, n):
            f = M[r][col] * inv % p
            if f:
                M[r] = [(x - f * y) % p for x, y in zip(M[r], M[col])]
    return det % p


def monomials(n: int, D: int):
    """All exponent tuples of total degree <= D in graded-lex order."""
    out = []
    for deg in range(D + 1):
        out.extend(_monomials_of_degree(n, deg))
    return out


def _monomials_of_degree(n, deg):
    if n == 1:
        return [(deg,)]
    res = []
    for a in range(deg, -1, -1):
        for rest in _monomials_of_degree(n - 1, deg - a):
            res.append((a,) + rest)
    return res


def grlex_key(e):
    return (sum(e), tuple(-x for x in e))


# ---------------------------------------------------------------------------


class MultiSeries:
    """Immutable truncated series in ``n`` variables over O."""

    __slots__ = ("cfg", "n", "D", "prec", "coeffs", "exact")

    def __init__(self, cfg: FieldConfig, n: int, D: int, coeffs: dict, prec: int | None = None,
                 exact: bool = True):
        if n < 1:
            raise ValueError("need at least one variable")
        prec = cfg.precision if prec is None else prec
        mod = cfg.p ** prec
        clean = {}
        for e, c in coeffs.items():
            if len(e) != n:
                raise ValueError(f"exponent {e} does not have {n} entries")
            if sum(e) > D:
                exact = False
                continue
            c %= mod
            if c:
                clean[tuple(e)] = c
        object.__setattr__(self, "cfg", cfg)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "prec", prec)
        object.__setattr__(self, "coeffs", clean)
        object.__setattr__(self, "exact", exact)

    def __setattr__(self, name, value):
        raise AttributeError("MultiSeries is immutable")

    # constructors -------------------------------------------------------
    @classmethod
    def zero(cls, cfg, n, D=DEFAULT_DEGREE, prec=None):
        return cls(cfg, n, D, {}, prec)

    @classmethod
    def constant(cls, cfg, n, value, D=DEFAULT_DEGREE, prec=None):
        prec = cfg.precision if prec is None else prec
        return cls(cfg, n, D, {(0,) * n: residue_of(cfg, value, prec)}, prec)

    @classmethod
    def variable(cls, cfg, n, i, D=DEFAULT_DEGREE, prec=None):
        e = [0] * n
        e[i] = 1
        return cls(cfg, n, D, {tuple(e): 1}, prec)

    @classmethod
    def from_poly(cls, cfg, poly, n=None, D=DEFAULT_DEGREE, prec=None):
        """From a mapping exponent-tuple -> int/Fraction/LocalNum (or a polynomial object)."""
        terms = poly.terms if hasattr(poly, "terms") and not isinstance(poly, dict) else poly
        if n is None:
            n = poly.n if hasattr(poly, "n") else len(next(iter(terms)))
        prec = cfg.precision if prec is None else prec
        return cls(cfg, n, D, {tuple(e): residue_of(cfg, c, prec) for e, c in terms.items()}, prec)

    def like(self, coeffs, exact=None, D=None, prec=None):
        return MultiSeries(self.cfg, self.n, self.D if D is None else D, coeffs,
                           self.prec if prec is None else prec,
                           self.exact if exact is None else exact)

    # queries ------------------------------------------------------------
    def coeff(self, e) -> LocalNum:
        return self.cfg.from_residue(self.coeffs.get(tuple(e), 0), self.prec)

    def coeff_residue(self, e) -> int:
        return self.coeffs.get(tuple(e), 0)

    def constant_term(self) -> LocalNum:
        return self.coeff((0,) * self.n)

    def degree(self) -> int:
        return max((sum(e) for e in self.coeffs), default=-1)

    def is_zero(self) -> bool:
        return not self.coeffs

    def homogeneous_part(self, deg):
        return self.like({e: c for e, c in self.coeffs.items() if sum(e) == deg})

    def min_coeff_ord(self, min_degree=0):
        """Smallest valuation among coefficients of degree >= ``min_degree`` (None if none)."""
        p = self.cfg.p
        best = None
        for e, c in self.coeffs.items():
            if sum(e) >= min_degree:
                v = 0
                while c % p == 0:
                    c //= p
                    v += 1
                best = v if best is None else min(best, v)
        return best

    # arithmetic ---------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, MultiSeries):
            other = MultiSeries.constant(self.cfg, self.n, other, self.D, self.prec)
        if other.cfg != self.cfg or other.n != self.n:
            raise ConfigMismatch("series over different fields or variable counts")
        if other.D != self.D:
            if not self.exact and not other.exact:
                raise ConfigMismatch(f"degree cutoffs {self.D} and {other.D} differ")
        return other

    def _combine_params(self, other):
        if self.D == other.D:
            D = self.D
        elif self.exact and not other.exact:
            D = other.D
        elif other.exact and not self.exact:
            D = self.D
        else:
            D = max(self.D, other.D)
        return D, min(self.prec, other.prec)

    def __add__(self, other):
        other = self._check(other)
        D, K = self._combine_params(other)
        ring = self.cfg.ring
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = ring.add(out.get(e, 0), c, K) if e in out else c
        exact = self.exact and other.exact
        return MultiSeries(self.cfg, self.n, D, out, K, exact and all(sum(e) <= D for e in out))

    __radd__ = __add__

    def __neg__(self):
        ring = self.cfg.ring
        return self.like({e: ring.neg(c, self.prec) for e, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, LocalNum)):
            return self.scale(other)
        other = self._check(other)
        D, K = self._combine_params(other)
        out, dropped = _mul_dicts(self.cfg, self.coeffs, other.coeffs, K, D)
        exact = self.exact and other.exact and not dropped
        return MultiSeries(self.cfg, self.n, D, out, K, exact)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a series; use series_inverse")
        out = MultiSeries.constant(self.cfg, self.n, 1, self.D, self.prec)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def scale(self, s) -> "MultiSeries":
        """Multiply by an integral scalar."""
        r = residue_of(self.cfg, s, self.prec)
        ring = self.cfg.ring
        return self.like({e: ring.mul(r, c, self.prec) for e, c in self.coeffs.items()})

    def shift(self, s: int) -> "MultiSeries":
        """Multiply by ϖ^s; negative ``s`` divides and costs |s| digits of precision."""
        p = self.cfg.p
        if s >= 0:
            return self.like({e: c * p ** s for e, c in self.coeffs.items()})
        q = p ** (-s)
        for e, c in self.coeffs.items():
            if c % q:
                raise NonIntegralCoefficient(f"coefficient of {e} not divisible by ϖ^{-s}")
        return self.like({e: c // q for e, c in self.coeffs.items()}, prec=self.prec + s)

    def truncate(self, D: int) -> "MultiSeries":
        exact = self.exact and self.degree() <= D
        return MultiSeries(self.cfg, self.n, D, self.coeffs, self.prec, exact)

    def __eq__(self, other):
        if not isinstance(other, MultiSeries):
            return NotImplemented
        if self.cfg != other.cfg or self.n != other.n:
            return False
        K = min(self.prec, other.prec)
        D = min(self.D, other.D)
        mod = self.cfg.p ** K
        keys = {e for e in set(self.coeffs) | set(other.coeffs) if sum(e) <= D}
        return all(self.coeffs.get(e, 0) % mod == other.coeffs.get(e, 0) % mod for e in keys)

    __hash__ = None

    # calculus -----------------------------------------------------------
    def derivative(self, i: int) -> "MultiSeries":
        ring = self.cfg.ring
        out = {}
        for e, c in self.coeffs.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                out[tuple(f)] = ring.mul(ring.from_int(e[i], self.prec), c, self.prec)
        D = self.D if self.exact else self.D - 1
        return MultiSeries(self.cfg, self.n, D, out, self.prec, self.exact)

    def gradient(self) -> "SeriesMap":
        return SeriesMap([self.derivative(i) for i in range(self.n)])

    def hessian(self):
        g = [self.derivative(i) for i in range(self.n)]
        return [[g[i].derivative(j) for j in range(self.n)] for i in range(self.n)]

    # substitution -------------------------------------------------------
    def compose(self, m: "SeriesMap") -> "MultiSeries":
        """``self(m_1, …, m_n)``; the components of ``m`` must vanish at 0."""
        if len(m) != self.n:
            raise ValueError(f"need {self.n} components, got {len(m)}")
        for comp in m:
            if comp.coeffs.get((0,) * comp.n, 0):
                raise NonzeroConstantTerm("composition needs components with zero constant term")
        return _compose(self, m)

    def translate(self, point) -> "MultiSeries":
        """Exact polynomial ``x -> self(point + x)`` for an integral ``point``."""
        if not self.exact:
            raise ConvergenceDomain("only exact polynomials can be re-expanded about another point")
        xs = [residue_of(self.cfg, c, self.prec) for c in point]
        shifted = SeriesMap([
            MultiSeries(self.cfg, self.n, self.D, {(0,) * self.n: xs[i],
                                                   tuple(1 if j == i else 0 for j in range(self.n)): 1},
                        self.prec)
            for i in range(self.n)
        ])
        return _compose(self, shifted)

    # evaluation ---------------------------------------------------------
    def eval_residue(self, xs, K: int) -> int:
        """Value modulo ϖ^K at residue coordinates ``xs`` (no domain checks)."""
        cfg = self.cfg
        ring = cfg.ring
        K = min(K, self.prec)
        if K <= 0:
            return 0
        if cfg.kind == PADIC:
            mod = cfg.p ** K
            pw = _power_table([x % mod for x in xs], self.coeffs, lambda a, b: a * b % mod)
            total = 0
            for e, c in self.coeffs.items():
                v = c
                for i, a in enumerate(e):
                    if a:
                        v = v * pw[i][a] % mod
                total += v
            return total % mod
        pw = _power_table([ring.reduce(x, K) for x in xs], self.coeffs, lambda a, b: ring.mul(a, b, K))
        total = 0
        for e, c in self.coeffs.items():
            v = ring.reduce(c, K)
            for i, a in enumerate(e):
                if a:
                    v = ring.mul(v, pw[i][a], K)
            total = ring.add(total, v, K)
        return total

    def eval(self, point):
        """Value at ``point`` with the valuation floor of the certified error.

        Returns ``(value, floor)``: ``value`` is correct modulo ϖ^floor.
        """
        cfg = self.cfg
        pts = [cfg.coerce(x) for x in point]
        if len(pts) != self.n:
            raise ValueError(f"need {self.n} coordinates")
        floor = self.prec
        min_ord = min((x.valuation for x in pts), default=0)
        if not self.exact:
            if min_ord <= 0:
                raise ConvergenceDomain("truncated series can only be evaluated where every coordinate has ord >= 1")
            floor = min(floor, (self.D + 1) * min_ord)
        elif min_ord < 0:
            raise ConvergenceDomain("polynomial evaluation needs integral coordinates")
        for x in pts:
            floor = min(floor, x.abs_prec)
        floor = int(floor)
        xs = [x.residue(floor) for x in pts]
        return cfg.from_residue(self.eval_residue(xs, floor), floor), floor

    def __call__(self, *point):
        return self.eval(point)[0]

    # printing -----------------------------------------------------------
    def to_text(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for e in sorted(self.coeffs, key=grlex_key):
            c = _coeff_text(self.cfg, self.coeffs[e], self.prec)
            mono = "*".join(f"x{i + 1}^{a}" if a > 1 else f"x{i + 1}" for i, a in enumerate(e) if a)
            parts.append(f"{c} * {mono}" if mono else c)
        return " + ".join(parts)

    __str__ = to_text

    def __repr__(self):
        tag = "poly" if self.exact else f"O(deg>{self.D})"
        return f"MultiSeries[{self.cfg.kind}, p={self.cfg.p}, n={self.n}, {tag}]({self.to_text()})"


def rational_reconstruct(r: int, m: int):
    """The unique a/b ≡ r (mod m) with |a|, b <= sqrt(m/2), or None."""
    bound = math.isqrt(m // 2)
    r0, r1 = m, r % m
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound or math.gcd(r1, abs(s1)) != 1:
        return None
    return Fraction(r1, s1)


def _coeff_text(cfg, c, prec):
    p = cfg.p
    if cfg.kind == PADIC:
        mod = p ** prec
        frac = rational_reconstruct(c, mod) if prec >= 2 else None
        if frac is not None:
            return str(frac)
        return str(c - mod if c > mod // 2 else c)
    if c < p:
        return str(c)
    ds = digits_of(c, p, prec)
    return "(" + " + ".join(f"{d}*t^{j}" if j else str(d) for j, d in enumerate(ds) if d) + ")"


def _power_table(xs, coeffs, mul):
    maxdeg = [0] * len(xs)
    for e in coeffs:
        for i, a in enumerate(e):
            if a > maxdeg[i]:
                maxdeg[i] = a
    table = []
    for x, m in zip(xs, maxdeg):
        row = [1]
        for _ in range(m):
            row.append(mul(row[-1], x))
        table.append(row)
    return table


def _mul_dicts(cfg, a, b, K, D):
    """Truncated product of coefficient dictionaries; also reports truncation."""
    by_deg: dict[int, list] = {}
    for e, c in b.items():
        by_deg.setdefault(sum(e), []).append((e, c))
    max_b = max(by_deg, default=-1)
    dropped = False
    out: dict = {}
    if cfg.kind == PADIC:
        for ea, ca in a.items():
            da = sum(ea)
            if da + max_b > D:
                dropped = dropped or any(da + db > D for db in by_deg)
            for db in range(0, min(D - da, max_b) + 1):
                for eb, cb in by_deg.get(db, ()):
                    e = tuple(x + y for x, y in zip(ea, eb))
                    out[e] = out.get(e, 0) + ca * cb
        mod = cfg.p ** K
        return {e: c % mod for e, c in out.items() if c % mod}, dropped
    ring = cfg.ring
    for ea, ca in a.items():
        da = sum(ea)
        if da + max_b > D:
            dropped = dropped or any(da + db > D for db in by_deg)
        for db in range(0, min(D - da, max_b) + 1):
            for eb, cb in by_deg.get(db, ()):
                e = tuple(x + y for x, y in zip(ea, eb))
                out[e] = ring.add(out.get(e, 0), ring.mul(ca, cb, K), K)
    return {e: c for e, c in out.items() if c}, dropped


def _compose(s: MultiSeries, m) -> MultiSeries:
    cfg, n = s.cfg, s.n
    comps = list(m)
    D = min([s.D] + [c.D for c in comps if not c.exact] or [s.D])
    K = min([s.prec] + [c.prec for c in comps])
    exact = s.exact and all(c.exact for c in comps)
    inner_n = comps[0].n
    one = MultiSeries(cfg, inner_n, D, {(0,) * inner_n: 1}, K)
    # monomials of the outer series built incrementally, one product each
    cache = {(0,) * n: one}
    result: dict = {}
    ring = cfg.ring
    for e in sorted(s.coeffs, key=grlex_key):
        mono = _mono(cache, e, comps)
        if not mono.exact:
            exact = False
        c = s.coeffs[e]
        for f, v in mono.coeffs.items():
            result[f] = ring.add(result.get(f, 0), ring.mul(c, v, K), K)
    return MultiSeries(cfg, inner_n, D, result, K, exact)


def _mono(cache, e, comps):
    if e in cache:
        return cache[e]
    i = next(j for j, a in enumerate(e) if a)
    f = list(e)
    f[i] -= 1
    val = _mono(cache, tuple(f), comps) * comps[i]
    cache[e] = val
    return val


# ---------------------------------------------------------------------------


class SeriesMap:
    """A tuple of series in a common set of variables."""

    __slots__ = ("components",)

    def __init__(self, components):
        comps = tuple(components)
        if not comps:
            raise ValueError("empty map")
        first = comps[0]
        for c in comps:
            if c.cfg != first.cfg or c.n != first.n:
                raise ConfigMismatch("inconsistent components")
        object.__setattr__(self, "components", comps)

    def __setattr__(self, name, value):
        raise AttributeError("SeriesMap is immutable")

    @classmethod
    def identity(cls, cfg, n, D=DEFAULT_DEGREE, prec=None):
        return cls([MultiSeries.variable(cfg, n, i, D, prec) for i in range(n)])

    @classmethod
    def linear(cls, cfg, matrix, D=DEFAULT_DEGREE, prec=None):
        """x -> A x for a residue (or integer) matrix A."""
        n = len(matrix[0])
        comps = []
        for row in matrix:
            comps.append(MultiSeries(cfg, n, D, {tuple(1 if j == i else 0 for j in range(n)): row[i]
                                                  for i in range(n)}, prec))
        return cls(comps)

    @property
    def cfg(self):
        return self.components[0].cfg

    @property
    def n(self):
        return self.components[0].n

    def __len__(self):
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __eq__(self, other):
        if not isinstance(other, SeriesMap):
            return NotImplemented
        return len(self) == len(other) and all(a == b for a, b in zip(self, other))

    __hash__ = None

    def compose(self, other: "SeriesMap") -> "SeriesMap":
        """``self ∘ other``."""
        return SeriesMap([c.compose(other) for c in self.components])

    def constant_residues(self):
        return [c.coeffs.get((0,) * c.n, 0) for c in self.components]

    def jacobian(self):
        return [[c.derivative(j) for j in range(self.n)] for c in self.components]

    def jacobian_at_zero(self):
        n = self.n
        return [[c.coeffs.get(tuple(1 if k == j else 0 for k in range(n)), 0) for j in range(n)]
                for c in self.components]

    def eval(self, point):
        vals = [c.eval(point) for c in self.components]
        return [v for v, _ in vals], min(f for _, f in vals)

    def truncate(self, D):
        return SeriesMap([c.truncate(D) for c in self.components])

    def to_text(self):
        return "(" + ", ".join(c.to_text() for c in self.components) + ")"


def gradient(s: MultiSeries) -> SeriesMap:
    return s.gradient()


def hessian(s: MultiSeries):
    return s.hessian()


def jacobian(m: SeriesMap):
    return m.jacobian()


def compose(s: MultiSeries, m: SeriesMap) -> MultiSeries:
    return s.compose(m)


def apply_linear(m: SeriesMap, A, K) -> SeriesMap:
    """Components ``Σ_j A[i][j] m_j`` for a residue matrix ``A``."""
    cfg = m.cfg
    out = []
    for row in A:
        acc = MultiSeries.zero(cfg, m.n, m[0].D, K)
        for a, comp in zip(row, m):
            if a:
                acc = acc + comp.scale(cfg.from_residue(a, K))
        out.append(acc)
    return SeriesMap(out)


def invert_map(g: SeriesMap) -> SeriesMap:
    """Compositional inverse of ``g`` with ``g(0) = 0`` and unit Jacobian at 0."""
    cfg, n = g.cfg, g.n
    if any(g.constant_residues()):
        raise NonzeroConstantTerm("the map must fix the origin")
    D = min(c.D for c in g)
    K = min(c.prec for c in g)
    J = g.jacobian_at_zero()
    if det_mod_p(cfg, J) == 0:
        raise SingularJacobian("Jacobian at 0 is not invertible modulo ϖ")
    Jinv = mat_inverse(cfg, J, K)
    ident = SeriesMap.identity(cfg, n, D, K)
    h = SeriesMap.linear(cfg, Jinv, D, K)
    # each pass fixes one more degree of h
    for _ in range(D):
        err = SeriesMap([a - b for a, b in zip(g.compose(h), ident)])
        if all(c.is_zero() for c in err):
            break
        corr = apply_linear(err, Jinv, K)
        h = SeriesMap([a - b for a, b in zip(h, corr)])
    else:
        err = SeriesMap([a - b for a, b in zip(g.compose(h), ident)])
        if not all(c.is_zero() for c in err):
            raise PrecisionExhausted("inverse did not stabilise")
    return SeriesMap([c.truncate(D) for c in h])


def rescale_map(g: SeriesMap, beta: int) -> SeriesMap:
    """x -> ϖ^{-β} g(ϖ^β x), asserting integral coefficients."""
    if beta < 0:
        raise ValueError("beta must be >= 0")
    if beta == 0:
        return g
    p = g.cfg.p
    out = []
    for comp in g:
        q = p ** beta
        coeffs = {}
        has_const = (0,) * comp.n in comp.coeffs
        for e, c in comp.coeffs.items():
            k = sum(e)
            if k == 0:
                if c % q:
                    raise NonIntegralRescale("constant term is not divisible by ϖ^β")
                coeffs[e] = c // q
            else:
                coeffs[e] = c * p ** (beta * (k - 1))
        lose = has_const or not comp.exact
        out.append(MultiSeries(comp.cfg, comp.n, comp.D, coeffs,
                               comp.prec - beta if lose else comp.prec, comp.exact))
    return SeriesMap(out)


def series_inverse(s: MultiSeries) -> MultiSeries:
    """1/s for a series with unit constant term."""
    cfg = s.cfg
    c0 = s.coeff_residue((0,) * s.n)
    if c0 % cfg.p == 0:
        raise BadConstantTerm("constant term is not a unit")
    inv0 = cfg.ring.inv_unit(c0, s.prec)
    r = (s.scale(cfg.from_residue(inv0, s.prec)) - 1)  # zero constant term
    out = MultiSeries.constant(cfg, s.n, 1, s.D, s.prec)
    term = out
    neg_r = -r
    for _ in range(s.D):
        term = term * neg_r
        if term.is_zero():
            break
        out = out + term
    res = out.scale(cfg.from_residue(inv0, s.prec))
    return MultiSeries(cfg, s.n, s.D, res.coeffs, s.prec, s.exact and r.is_zero())


def sqrt_series(s: MultiSeries) -> MultiSeries:
    """Square root with constant term 1 of a series with constant term 1."""
    cfg = s.cfg
    if s.coeff_residue((0,) * s.n) != 1 % cfg.p ** s.prec:
        raise BadConstantTerm("constant term must be 1")
    r = s - 1
    out = MultiSeries.constant(cfg, s.n, 1, s.D, s.prec)
    term = out
    binom = Fraction(1)
    for k in range(1, s.D + 1):
        term = term * r
        if term.is_zero():
            break
        binom = binom * (Fraction(1, 2) - (k - 1)) / k
        out = out + term.scale(binom)
    return MultiSeries(cfg, s.n, s.D, out.coeffs, s.prec, r.is_zero())


def random_series(cfg, n, D, rng, density=0.5, max_coeff=None, prec=None):
    """Random integral series (test helper; ``rng`` is a ``random.Random``)."""
    prec = cfg.precision if prec is None else prec
    top = cfg.p ** prec if max_coeff is None else max_coeff
    coeffs = {}
    for e in monomials(n, D):
        if rng.random() < density:
            coeffs[e] = rng.randrange(top)
    return MultiSeries(cfg, n, D, coeffs, prec, exact=False)


__all__ = [
    "MultiSeries",
    "SeriesMap",
    "compose",
    "gradient",
    "hessian",
    "invert_map",
    "jacobian",
    "rescale_map",
    "series_inverse",
    "sqrt_series",
    "monomials",
]
