"""Exact arithmetic in Q(ζ_{p^M}).

Values live in the power basis ``{ζ^j : 0 <= j < φ(p^M)}`` of the smallest
level ``M`` containing them.  Work happens in the group ring ``Q[C_{p^M}]``
(exponent -> coefficient); reduction modulo ``Φ_{p^M}(x) = Σ_{b<p} x^{b p^{M-1}}``
rewrites each exponent with top digit ``p-1`` as minus the other ``p-1``
members of its class.  Storage is sparse so that large levels stay cheap
when only a few exponents occur.
"""
from __future__ import annotations

import cmath
import math
from fractions import Fraction

import numpy as np
from sympy import QQ, Dummy, Poly, cyclotomic_poly

from .errors import DivisionByZero, PrimeMismatch


def totient(p: int, M: int) -> int:
    return 1 if M == 0 else (p - 1) * p ** (M - 1)


def _reduce_sparse(p: int, M: int, terms) -> dict[int, Fraction]:
    acc: dict[int, Fraction] = {}
    if M == 0:
        s = sum((Fraction(c) for _, c in terms), Fraction(0))
        return {0: s} if s else {}
    L = p ** M
    step = p ** (M - 1)
    top = (p - 1) * step
    for e, c in terms:
        if not c:
            continue
        e %= L
        if e >= top:
            a = e - top
            for bb in range(p - 1):
                j = a + bb * step
                acc[j] = acc.get(j, 0) - c
        else:
            acc[e] = acc.get(e, 0) + c
    return {j: Fraction(c) for j, c in acc.items() if c}


def reduce_dense(p: int, M: int, arr: np.ndarray) -> np.ndarray:
    """Vectorised reduction of group-ring vectors (last axis of length p^M)."""
    if M == 0:
        return arr
    step = p ** (M - 1)
    shaped = arr.reshape(arr.shape[:-1] + (p, step))
    top = shaped[..., p - 1, :]
    low = shaped[..., : p - 1, :] - top[..., None, :]
    return low.reshape(arr.shape[:-1] + (totient(p, M),))


def raise_level(arr: np.ndarray, p: int, M: int, M2: int) -> np.ndarray:
    """Embed group-ring vectors of level ``M`` into level ``M2 >= M``."""
    if M2 == M:
        return arr
    out = np.zeros(arr.shape[:-1] + (p ** M2,), dtype=arr.dtype)
    out[..., :: p ** (M2 - M)] = arr
    return out


class CycloNum:
    """Immutable element of Q(ζ_{p^M}) at its minimal level."""

    __slots__ = ("p", "M", "_terms")

    def __init__(self, p: int, M: int, coeffs):
        coeffs = list(coeffs)
        if len(coeffs) != totient(p, M):
            raise ValueError(f"expected {totient(p, M)} coefficients, got {len(coeffs)}")
        terms = {j: Fraction(c) for j, c in enumerate(coeffs) if c}
        self._init(p, M, terms)

    def _init(self, p, M, terms):
        while M >= 1 and all(j % p == 0 for j in terms):
            terms = {j // p: c for j, c in terms.items()}
            M -= 1
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "_terms", terms)

    @classmethod
    def _from_reduced(cls, p, M, terms) -> "CycloNum":
        obj = cls.__new__(cls)
        obj._init(p, M, terms)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("CycloNum is immutable")

    # constructors -------------------------------------------------------
    @classmethod
    def rational(cls, p: int, value) -> "CycloNum":
        v = Fraction(value)
        return cls._from_reduced(p, 0, {0: v} if v else {})

    @classmethod
    def from_terms(cls, p: int, M: int, terms) -> "CycloNum":
        """From group-ring pairs ``(exponent, coefficient)`` at level ``M``."""
        return cls._from_reduced(p, M, _reduce_sparse(p, M, terms))

    @classmethod
    def from_dense(cls, p: int, M: int, vec, denom=1) -> "CycloNum":
        """From a group-ring vector of length p^M over ``denom``."""
        red = reduce_dense(p, M, np.asarray(vec))
        nz = np.flatnonzero(red)
        return cls._from_reduced(p, M, {int(j): Fraction(int(red[j]), denom) for j in nz})

    # structure ----------------------------------------------------------
    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        out = [Fraction(0)] * totient(self.p, self.M)
        for j, c in self._terms.items():
            out[j] = c
        return tuple(out)

    def terms(self):
        """Nonzero ``(exponent, coefficient)`` pairs at level ``M``, sorted."""
        return sorted(self._terms.items())

    def at_level(self, M: int):
        if M < self.M:
            raise ValueError("cannot lower the level")
        f = self.p ** (M - self.M)
        return [(j * f, c) for j, c in self._terms.items()]

    def dense(self, M: int, denom: int = 1) -> np.ndarray:
        """Group-ring vector (length p^M) of ``denom * self``; must be integral."""
        out = np.zeros(self.p ** M, dtype=object)
        for j, c in self.at_level(M):
            v = c * denom
            if v.denominator != 1:
                raise ValueError("denominator does not clear the value")
            out[j] = int(v)
        return out

    def denominator(self) -> int:
        return math.lcm(1, *(c.denominator for c in self._terms.values()))

    def is_rational(self) -> bool:
        return self.M == 0

    def is_zero(self) -> bool:
        return not self._terms

    def to_fraction(self) -> Fraction:
        if self.M != 0:
            raise ValueError("value is not rational")
        return self._terms.get(0, Fraction(0))

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, CycloNum):
            if other.p != self.p:
                raise PrimeMismatch(f"p={self.p} vs p={other.p}")
            return other
        if isinstance(other, (int, Fraction)):
            return CycloNum.rational(self.p, other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        M = max(self.M, o.M)
        acc = dict(self.at_level(M))
        for j, c in o.at_level(M):
            acc[j] = acc.get(j, 0) + c
        return CycloNum._from_reduced(self.p, M, {j: c for j, c in acc.items() if c})

    __radd__ = __add__

    def __neg__(self):
        return CycloNum._from_reduced(self.p, self.M, {j: -c for j, c in self._terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o.M == 0 or self.M == 0:
            a, b = (self, o) if o.M == 0 else (o, self)
            c = b.to_fraction()
            if not c:
                return CycloNum.rational(self.p, 0)
            return CycloNum._from_reduced(self.p, a.M, {j: x * c for j, x in a._terms.items()})
        M = max(self.M, o.M)
        L = self.p ** M
        acc: dict[int, Fraction] = {}
        right = o.at_level(M)
        for e1, c1 in self.at_level(M):
            for e2, c2 in right:
                e = (e1 + e2) % L
                acc[e] = acc.get(e, 0) + c1 * c2
        return CycloNum.from_terms(self.p, M, acc.items())

    __rmul__ = __mul__

    def galois(self, t: int) -> "CycloNum":
        """Image under ζ -> ζ^t (t prime to p)."""
        return CycloNum.from_terms(self.p, self.M, [(j * t, c) for j, c in self._terms.items()])

    def conj(self) -> "CycloNum":
        return self.galois(-1)

    def inverse(self) -> "CycloNum":
        if self.is_zero():
            raise DivisionByZero("inverse of zero")
        if self.M == 0:
            return CycloNum.rational(self.p, 1 / self.to_fraction())
        # invert modulo the cyclotomic polynomial of order p^M
        L = self.p ** self.M
        x = Dummy("z")
        num = Poly(dict(((j,), c) for j, c in self._terms.items()), x, domain=QQ)
        inv = num.invert(Poly(cyclotomic_poly(L, x), x, domain=QQ))
        return CycloNum.from_terms(self.p, self.M,
                                   [(m[0], Fraction(int(c.numerator), int(c.denominator)))
                                    for m, c in inv.terms()])

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = CycloNum.rational(self.p, 1)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, (CycloNum, int, Fraction)):
            return NotImplemented
        o = self._coerce(other)
        return self.M == o.M and self._terms == o._terms

    def __hash__(self):
        return hash((self.p, self.M, frozenset(self._terms.items())))

    # output -------------------------------------------------------------
    def embed_complex(self) -> tuple[float, float]:
        if self.M == 0:
            return (float(self.to_fraction()), 0.0)
        L = self.p ** self.M
        z = complex(0.0)
        for j, c in self._terms.items():
            z += float(c) * cmath.exp(2j * math.pi * j / L)
        return (z.real, z.imag)

    def to_json(self) -> dict:
        re_, im_ = self.embed_complex()
        return {
            "p": self.p,
            "M": self.M,
            "terms": [[j, str(c)] for j, c in self.terms()],
            "approx": [round_float(re_), round_float(im_)],
        }

    @classmethod
    def from_json(cls, obj) -> "CycloNum":
        p, M = int(obj["p"]), int(obj["M"])
        if "terms" in obj:
            return cls.from_terms(p, M, [(int(j), Fraction(c)) for j, c in obj["terms"]])
        return cls(p, M, [Fraction(c) for c in obj["coeffs"]])

    def __repr__(self):
        if self.M == 0:
            return f"CycloNum({self.to_fraction()})"
        body = " + ".join(f"({c})*z^{j}" for j, c in self.terms())
        return f"CycloNum[p={self.p}, M={self.M}]({body})"


def round_float(x: float, digits: int = 12) -> float:
    r = round(x, digits)
    return 0.0 if r == 0 else r


def zeta_pow(p: int, M: int, e: int) -> CycloNum:
    return CycloNum.from_terms(p, M, [(e, 1)])


def embed_complex(a: CycloNum) -> tuple[float, float]:
    return a.embed_complex()


def gauss_sum(p: int, c: int) -> CycloNum:
    """Σ_{x mod p} ζ_p^{c x^2}."""
    return CycloNum.from_terms(p, 1, [(c * x * x, 1) for x in range(p)])
