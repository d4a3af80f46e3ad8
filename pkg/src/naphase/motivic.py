"""Prime-independent right-hand side and its specialisation to Q_p and F_p((t)).

The diagonal normal form is computed once over Q.  Its stage pivots
``a_i`` are rationals; for every prime outside a finite computed set they
reduce to units, and the same pivoting choices are made prime by prime.  The
right-hand side is then a polynomial in ``L`` and ``L^{-1}`` times two kinds
of formal symbol:

* ``E(r)``: the character value Ψ(r);
* ``G(c)``: the normalised quadratic sum ``q^{-1} Σ_{x mod ϖ} Ψ(ϖ^{-1} c x²)``,

and specialisation substitutes ``L -> p`` and evaluates the symbols.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from sympy import factorint

from .charfun import Region, StepFunction, psi
from .cyclotomic import CycloNum, gauss_sum
from .errors import BadPrime, DegenerateHessianOverQ, NAPhaseError, NotCriticalOverQ
from .integrate import DEFAULT_BUDGET, oscillatory_brute
from .localfield import FieldConfig, from_rational
from .morse import pivot_matrix, quadratic_matrix
from .polynomial import RationalPoly
from .series import MultiSeries
from .stationary import stationary_phase


# ---------------------------------------------------------------------------
# Laurent polynomials in L


class LPoly:
    """Element of Z[L, L^{-1}]."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        object.__setattr__(self, "terms", {int(k): int(v) for k, v in (terms or {}).items() if v})

    def __setattr__(self, name, value):
        raise AttributeError("LPoly is immutable")

    @classmethod
    def monomial(cls, k: int, c: int = 1) -> "LPoly":
        return cls({k: c})

    def _lift(self, other):
        return other if isinstance(other, LPoly) else LPoly({0: other})

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return LPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return LPoly({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __mul__(self, other):
        other = self._lift(other)
        out: dict = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                out[k1 + k2] = out.get(k1 + k2, 0) + v1 * v2
        return LPoly(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, int):
            other = LPoly({0: other})
        return isinstance(other, LPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def specialize(self, q: int) -> Fraction:
        return sum((Fraction(q) ** k * v for k, v in self.terms.items()), Fraction(0))

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms, reverse=True):
            v = self.terms[k]
            mono = "" if k == 0 else ("L" if k == 1 else f"L^{k}")
            if not mono:
                parts.append(str(v))
            elif v == 1:
                parts.append(mono)
            elif v == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{v}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"LPoly({self.to_text()})"


def gauss_factor(ell: int, alpha: int):
    """``(LPoly, has_symbol)`` for ∫_{ϖ^α O} Ψ(c u²) du with ``ord c = ell``."""
    e = ell + 2 * alpha
    if e >= 1:
        return LPoly.monomial(-alpha), False
    if e % 2 == 0:
        return LPoly.monomial(-alpha + e // 2), True
    return LPoly.monomial(-alpha + (e - 1) // 2), False


# ---------------------------------------------------------------------------
# uniform normal form


def _primes_of(x: Fraction):
    out = set()
    for part in (x.numerator, x.denominator):
        if abs(part) > 1:
            out.update(factorint(abs(part)))
    return out


@dataclass(frozen=True)
class UniformFormula:
    f: RationalPoly
    x0: tuple
    f_at_x0: Fraction
    a: tuple
    alpha: int
    bad_primes: frozenset
    pivot: tuple = ()
    checked_entries: tuple = ()

    @property
    def n(self) -> int:
        return self.f.n

    def symbolic_rhs(self, ell: int) -> dict:
        """Right-hand side at ``ord λ = ell`` as L-power times symbols."""
        coeff = LPoly({0: 1})
        symbols = [f"E(lambda*{self.f_at_x0})", "phi(x0)"]
        for a in self.a:
            lp, sym = gauss_factor(ell, self.alpha)
            coeff = coeff * lp
            if sym:
                symbols.append(f"G(lambda*{a})")
        return {"ord": ell, "L": coeff.to_text(), "symbols": symbols}

    def to_json(self) -> dict:
        return {
            "f": self.f.to_text(),
            "n": self.n,
            "x0": [str(x) for x in self.x0],
            "f_at_x0": str(self.f_at_x0),
            "a": [str(x) for x in self.a],
            "alpha": self.alpha,
            "bad_primes": sorted(self.bad_primes),
            "pivot": [list(r) for r in self.pivot],
        }


def rational_ldl(Q):
    """Pivot matrix ``P`` and the pivots of ``Pᵀ Q P`` plus every Schur entry seen."""
    P = pivot_matrix(Q, lambda x: x != 0, lambda x: 1 / x)
    n = len(Q)
    S = [[sum(P[t][r] * Q[t][u] * P[u][c] for t in range(n) for u in range(n)) for c in range(n)]
         for r in range(n)]
    pivots, seen = [], []
    for i in range(n):
        seen.extend(x for row in S[i:] for x in row[i:] if x != 0)
        piv = S[i][i]
        pivots.append(piv)
        for r in range(i + 1, n):
            for c in range(i + 1, n):
                S[r][c] = S[r][c] - S[r][i] * S[i][c] / piv
    return P, pivots, seen


def uniform_normal_form(f: RationalPoly, x0=None, alpha: int = 1) -> UniformFormula:
    """Stage pivots and bad primes of ``f`` at the rational critical point ``x0``."""
    n = f.n
    x0 = tuple(Fraction(x) for x in (x0 if x0 is not None else (0,) * n))
    if len(x0) != n:
        raise ValueError(f"need {n} coordinates")
    if any(g(*x0) != 0 for g in f.gradient()):
        raise NotCriticalOverQ("gradient does not vanish at the given point")
    ft = f.translate(x0)
    Q = quadratic_matrix(lambda e: ft.terms.get(e, Fraction(0)), n, lambda c: c / 2)
    try:
        P, pivots, seen = rational_ldl(Q)
    except NAPhaseError as exc:
        raise DegenerateHessianOverQ("Hessian is singular over Q") from exc
    if any(x == 0 for x in pivots):
        raise DegenerateHessianOverQ("Hessian is singular over Q")
    bad = {2}
    for x in list(pivots) + list(seen):
        bad |= _primes_of(x)
    for c in f.terms.values():
        bad |= _primes_of(Fraction(c.denominator))
    for x in x0:
        bad |= _primes_of(Fraction(x.denominator))
    return UniformFormula(
        f=f,
        x0=x0,
        f_at_x0=f(*x0),
        a=tuple(pivots),
        alpha=alpha,
        bad_primes=frozenset(bad),
        pivot=tuple(tuple(r) for r in P),
        checked_entries=tuple(seen),
    )


# ---------------------------------------------------------------------------
# specialisation


@dataclass
class SpecializedRHS:
    uf: UniformFormula
    cfg: FieldConfig
    ell: int
    phi_at_x0: CycloNum
    L_power: LPoly = field(default_factory=LPoly)
    symbol_count: int = 0

    def __call__(self, unit: int) -> CycloNum:
        """Value at ``λ = unit · ϖ^ell``."""
        cfg, p = self.cfg, self.cfg.p
        lam = cfg.from_int(unit).shift(self.ell)
        value = psi(lam * from_rational(cfg, self.uf.f_at_x0.numerator, self.uf.f_at_x0.denominator))
        value = value * self.phi_at_x0 * self.L_power.specialize(p)
        e = self.ell + 2 * self.uf.alpha
        if e <= 0 and e % 2 == 0:
            for a in self.uf.a:
                c = lam * from_rational(cfg, a.numerator, a.denominator)
                value = value * gauss_sum(p, c.ac()) * Fraction(1, p)
        return value

    def to_json(self) -> dict:
        return {"p": self.cfg.p, "field": self.cfg.kind, "ord": self.ell,
                "L": self.L_power.to_text(), "gauss_symbols": self.symbol_count}


def specialize(uf: UniformFormula, p: int, ell: int, kind: str = "padic", precision: int = 24,
               phi: StepFunction | None = None) -> SpecializedRHS:
    """The right-hand side over Q_p or F_p((t)) at ``ord λ = ell`` with ``L -> p``."""
    if p in uf.bad_primes or p == 2:
        raise BadPrime(f"{p} is a bad prime for this formula")
    cfg = FieldConfig(kind, p, precision)
    L = LPoly({0: 1})
    count = 0
    for _ in uf.a:
        lp, sym = gauss_factor(ell, uf.alpha)
        L = L * lp
        count += sym
    if phi is None:
        phi_val = CycloNum.rational(p, 1)
    else:
        phi_val = phi(tuple(from_rational(cfg, x.numerator, x.denominator) for x in uf.x0))
    return SpecializedRHS(uf, cfg, ell, phi_val, L, count)


def phi_from_spec(cfg: FieldConfig, n: int, spec) -> StepFunction:
    """Step function from ``[(centre rationals, depth, value), ...]``; None means ``1_{O^n}``."""
    if spec is None:
        return Region.full(cfg, n).indicator()
    cells = []
    for centre, depth, value in spec:
        cells.append((tuple(cfg.coerce(Fraction(x)) for x in centre), int(depth), Fraction(value)))
    return StepFunction(cfg, n, cells)


@dataclass
class UniformReport:
    formula: UniformFormula
    entries: list

    @property
    def ok(self) -> bool:
        return all(e["status"] in ("pass", "bad_prime") for e in self.entries)

    def to_json(self) -> dict:
        return {"ok": self.ok, "formula": self.formula.to_json(), "primes": self.entries}


def check_uniform(f: RationalPoly, phi_spec=None, primes=(3, 5, 7, 11, 13), x0=None,
                  kinds=("padic", "laurent"), depth: int = 4, precision: int = 24,
                  budget: int = DEFAULT_BUDGET) -> UniformReport:
    """Specialised formula = per-prime certificate = enumeration, prime by prime."""
    uf = uniform_normal_form(f, x0)
    n = f.n
    entries = []
    for kind in kinds:
        for p in primes:
            entry = {"field": kind, "p": p}
            entries.append(entry)
            if p in uf.bad_primes:
                entry.update(status="bad_prime", reason=str(BadPrime(f"{p} divides the formula data")))
                continue
            cfg = FieldConfig(kind, p, precision)
            fp = MultiSeries.from_poly(cfg, f, n=n, D=max(2, f.degree()))
            phi = phi_from_spec(cfg, n, phi_spec)
            cert = stationary_phase(fp, phi)
            entry["N"] = cert.N
            x0p = tuple(from_rational(cfg, x.numerator, x.denominator) for x in uf.x0)
            problems = []
            if len(cert.critical_points) != 1 or any(
                    not (a == b) for a, b in zip(cert.critical_points[0][0], x0p)):
                problems.append("critical points differ from the uniform datum")
            else:
                md = cert.critical_points[0][1]
                if cert.alpha != uf.alpha:
                    problems.append("alpha differs")
                if any(not (u == from_rational(cfg, a.numerator, a.denominator)) for u, a in zip(md.units, uf.a)):
                    problems.append("units differ")
            witnesses = 0
            if not problems:
                for ell in range(cert.N, cert.N - depth, -1):
                    rhs_u = specialize(uf, p, ell, kind, precision, phi)
                    for u in range(1, p):
                        lam = cfg.from_int(u).shift(ell)
                        a = rhs_u(u)
                        b = cert.closed_rhs(lam)
                        c = oscillatory_brute(fp, phi, lam, budget=budget)
                        witnesses += 1
                        if not (a == b == c):
                            problems.append(f"mismatch at ord {ell}, unit {u}")
                            break
                    if problems:
                        break
            entry["witnesses"] = witnesses
            entry["status"] = "fail" if problems else "pass"
            if problems:
                entry["problems"] = problems
    return UniformReport(uf, entries)


__all__ = [
    "LPoly",
    "SpecializedRHS",
    "UniformFormula",
    "UniformReport",
    "check_uniform",
    "gauss_factor",
    "phi_from_spec",
    "rational_ldl",
    "specialize",
    "uniform_normal_form",
]
