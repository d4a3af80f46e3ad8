"""Truncated arithmetic in Q_p and F_p((t)) for odd primes p.

Elements are stored as ``ϖ^v * u`` where ``u`` is a unit known modulo
``ϖ^prec`` (capped relative precision).  Residues modulo ``ϖ^k`` are plain
Python integers in both branches: for ``padic`` the integer itself, for
``laurent`` the base-p packing ``Σ d_j p^j`` of the t-adic digits.  This keeps
digit extraction, valuations and shifts by ϖ identical for both kinds; only
addition and multiplication differ (carries vs. digitwise mod p).

Precision rules (documented contract):

* ``mul``/``inv``: relative precision is the minimum of the operands'.
* ``add``: absolute precision is the minimum of the operands' absolute
  precisions; if the sum is zero to that precision the result is an
  *inexact zero* ``O(ϖ^A)`` (valuation +∞, digits empty, ``abs_prec == A``).
* Exact zero has ``abs_prec == inf``.
* Any operation that needs digits that are not known raises
  :class:`PrecisionExhausted`.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .errors import (
    ConfigMismatch,
    DenominatorNotUnit,
    DivisionByZero,
    NoSquareRoot,
    PrecisionExhausted,
)

INF = math.inf

PADIC = "padic"
LAURENT = "laurent"


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def p_valuation(n: int, p: int) -> int:
    """Exponent of ``p`` in the nonzero integer ``n``."""
    if n == 0:
        raise ValueError("valuation of 0")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def sqrt_mod_p(a: int, p: int) -> int:
    """Square root of a nonzero quadratic residue modulo an odd prime (Tonelli-Shanks)."""
    a %= p
    if legendre(a, p) != 1:
        raise NoSquareRoot(f"{a} is not a square mod {p}")
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while legendre(z, p) != -1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return r


# ---------------------------------------------------------------------------
# residue rings O / ϖ^k


def digits_of(a: int, p: int, k: int) -> list[int]:
    out = []
    for _ in range(k):
        a, d = divmod(a, p)
        out.append(d)
    return out


def pack_digits(ds, p: int) -> int:
    a = 0
    for d in reversed(list(ds)):
        a = a * p + int(d)
    return a


def residue_valuation(a: int, p: int, k: int) -> int:
    """Number of trailing zero digits of a residue modulo ϖ^k (``k`` if zero)."""
    if a == 0:
        return k
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v


class PadicResidues:
    """Z_p / p^k as integers."""

    kind = PADIC

    def __init__(self, p: int):
        self.p = p

    def mod(self, k):
        return self.p ** k

    def reduce(self, a, k):
        return a % self.p ** k

    def add(self, a, b, k):
        return (a + b) % self.p ** k

    def sub(self, a, b, k):
        return (a - b) % self.p ** k

    def neg(self, a, k):
        return (-a) % self.p ** k

    def mul(self, a, b, k):
        return (a * b) % self.p ** k

    def inv_unit(self, a, k):
        return pow(a, -1, self.p ** k)

    def from_int(self, n, k):
        return n % self.p ** k


class LaurentResidues:
    """F_p[[t]] / t^k, packed as base-p integers (no carries)."""

    kind = LAURENT

    def __init__(self, p: int):
        self.p = p

    def mod(self, k):
        return self.p ** k

    def reduce(self, a, k):
        return a % self.p ** k

    def add(self, a, b, k):
        p = self.p
        if k <= 0:
            return 0
        if a < p and b < p:
            return (a + b) % p
        da, db = digits_of(a, p, k), digits_of(b, p, k)
        return pack_digits([(x + y) % p for x, y in zip(da, db)], p)

    def neg(self, a, k):
        p = self.p
        if a < p:
            return (-a) % p if k > 0 else 0
        return pack_digits([(-x) % p for x in digits_of(a, p, k)], p)

    def sub(self, a, b, k):
        return self.add(a, self.neg(b, k), k)

    def _scalar(self, c, b, k):
        p = self.p
        if c == 0:
            return 0
        return pack_digits([(c * x) % p for x in digits_of(b, p, k)], p)

    def mul(self, a, b, k):
        p = self.p
        if k <= 0:
            return 0
        if a < p:
            return (a * b) % p if b < p else self._scalar(a, b, k)
        if b < p:
            return self._scalar(b, a, k)
        da, db = digits_of(a, p, k), digits_of(b, p, k)
        out = [0] * k
        for i, x in enumerate(da):
            if x:
                for j in range(k - i):
                    out[i + j] += x * db[j]
        return pack_digits([c % p for c in out], p)

    def inv_unit(self, a, k):
        p = self.p
        da = digits_of(a, p, k)
        c0 = pow(da[0], -1, p)
        out = [0] * k
        out[0] = c0
        for j in range(1, k):
            s = sum(da[i] * out[j - i] for i in range(1, j + 1))
            out[j] = (-c0 * s) % p
        return pack_digits(out, p)

    def from_int(self, n, k):
        return (n % self.p) if k > 0 else 0


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldConfig:
    kind: str
    p: int
    precision: int

    def __post_init__(self):
        if self.kind not in (PADIC, LAURENT):
            raise ValueError(f"unknown field kind {self.kind!r}")
        if not is_prime(self.p) or self.p == 2:
            raise ValueError(f"p must be an odd prime, got {self.p}")
        if self.precision < 1:
            raise ValueError("precision must be >= 1")

    @cached_property
    def ring(self):
        return PadicResidues(self.p) if self.kind == PADIC else LaurentResidues(self.p)

    @property
    def symbol(self) -> str:
        return "p" if self.kind == PADIC else "t"

    @property
    def q(self) -> int:
        return self.p

    # constructors -------------------------------------------------------
    def zero(self) -> "LocalNum":
        return LocalNum(self, INF, 0, 0, INF)

    def one(self) -> "LocalNum":
        return LocalNum(self, 0, 1, self.precision)

    def uniformizer(self) -> "LocalNum":
        return LocalNum(self, 1, 1, self.precision)

    def from_int(self, n: int) -> "LocalNum":
        return from_rational(self, n, 1)

    def from_residue(self, r: int, k: int, shift: int = 0) -> "LocalNum":
        """Element ``ϖ^shift * r`` where ``r`` is a residue known modulo ϖ^k."""
        r %= self.p ** k
        if r == 0:
            return LocalNum(self, INF, 0, 0, k + shift)
        t = residue_valuation(r, self.p, k)
        return LocalNum(self, shift + t, r // self.p ** t, min(k - t, self.precision))

    def from_digits(self, valuation: int, digits) -> "LocalNum":
        ds = list(digits)
        if not ds:
            return self.zero()
        return self.from_residue(pack_digits(ds, self.p), len(ds), valuation)

    def coerce(self, x) -> "LocalNum":
        if isinstance(x, LocalNum):
            if x.cfg != self:
                raise ConfigMismatch(f"{x.cfg} vs {self}")
            return x
        if isinstance(x, int):
            return from_rational(self, x, 1)
        if isinstance(x, Fraction):
            return from_rational(self, x.numerator, x.denominator)
        if isinstance(x, str):
            return parse_localnum(self, x)
        raise TypeError(f"cannot coerce {type(x).__name__} to LocalNum")


class LocalNum:
    """Immutable truncated element of Q_p or F_p((t))."""

    __slots__ = ("cfg", "valuation", "unit", "prec", "abs_prec")

    def __init__(self, cfg: FieldConfig, valuation, unit: int, prec: int, abs_prec=None):
        object.__setattr__(self, "cfg", cfg)
        object.__setattr__(self, "valuation", valuation)
        object.__setattr__(self, "unit", unit)
        object.__setattr__(self, "prec", prec)
        if abs_prec is None:
            abs_prec = valuation + prec
        object.__setattr__(self, "abs_prec", abs_prec)

    def __setattr__(self, name, value):
        raise AttributeError("LocalNum is immutable")

    # basic queries ------------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return self.valuation == INF

    @property
    def is_exact_zero(self) -> bool:
        return self.is_zero and self.abs_prec == INF

    @property
    def digits(self) -> list[int]:
        if self.is_zero:
            return []
        return digits_of(self.unit, self.cfg.p, self.prec)

    def ord(self):
        return self.valuation

    def abs_value(self):
        """|x| reported as ``(q, e)`` meaning ``q**e``; zero gives ``0``."""
        if self.is_zero:
            return 0
        return (self.cfg.q, -self.valuation)

    def ac(self) -> int:
        if self.is_zero:
            return 0
        return self.unit % self.cfg.p

    def is_integral(self) -> bool:
        return self.valuation >= 0

    # arithmetic ---------------------------------------------------------
    def _other(self, other):
        if isinstance(other, LocalNum):
            if other.cfg != self.cfg:
                raise ConfigMismatch(f"{self.cfg} vs {other.cfg}")
            return other
        return self.cfg.coerce(other)

    def __add__(self, other):
        b = self._other(other)
        a = self
        cfg = a.cfg
        if a.is_zero and b.is_zero:
            return LocalNum(cfg, INF, 0, 0, min(a.abs_prec, b.abs_prec))
        if a.is_zero:
            a, b = b, a
        if b.is_zero:
            A = min(b.abs_prec, a.abs_prec)
            if a.valuation >= A:
                return LocalNum(cfg, INF, 0, 0, A)
            k = int(A - a.valuation)
            if k >= a.prec:
                return a
            return LocalNum(cfg, a.valuation, a.unit % cfg.p ** k, k)
        A = min(a.abs_prec, b.abs_prec)
        v0 = min(a.valuation, b.valuation)
        k = A - v0
        p = cfg.p
        ring = cfg.ring
        ua = ring.reduce(a.unit * p ** (a.valuation - v0), k)
        ub = ring.reduce(b.unit * p ** (b.valuation - v0), k)
        s = ring.add(ua, ub, k)
        if s == 0:
            return LocalNum(cfg, INF, 0, 0, A)
        t = residue_valuation(s, p, k)
        return LocalNum(cfg, v0 + t, s // p ** t, min(k - t, cfg.precision))

    __radd__ = __add__

    def __neg__(self):
        if self.is_zero:
            return self
        return LocalNum(self.cfg, self.valuation, self.cfg.ring.neg(self.unit, self.prec), self.prec)

    def __sub__(self, other):
        return self + (-self._other(other))

    def __rsub__(self, other):
        return self._other(other) + (-self)

    def __mul__(self, other):
        b = self._other(other)
        a = self
        cfg = a.cfg
        if a.is_zero and b.is_zero:
            return LocalNum(cfg, INF, 0, 0, a.abs_prec + b.abs_prec)
        if a.is_zero:
            a, b = b, a
        if b.is_zero:
            return LocalNum(cfg, INF, 0, 0, b.abs_prec + a.valuation)
        k = min(a.prec, b.prec)
        return LocalNum(cfg, a.valuation + b.valuation, cfg.ring.mul(a.unit, b.unit, k), k)

    __rmul__ = __mul__

    def inv(self) -> "LocalNum":
        if self.is_zero:
            raise DivisionByZero("inverse of zero")
        return LocalNum(self.cfg, -self.valuation, self.cfg.ring.inv_unit(self.unit, self.prec), self.prec)

    def __truediv__(self, other):
        return self * self._other(other).inv()

    def __rtruediv__(self, other):
        return self._other(other) * self.inv()

    def __pow__(self, e: int):
        if e < 0:
            return self.inv() ** (-e)
        out = self.cfg.one()
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def shift(self, s: int) -> "LocalNum":
        """Multiply by ϖ^s."""
        if self.is_zero:
            return LocalNum(self.cfg, INF, 0, 0, self.abs_prec + s)
        return LocalNum(self.cfg, self.valuation + s, self.unit, self.prec)

    def __eq__(self, other):
        try:
            d = self - other
        except (TypeError, ConfigMismatch):
            return NotImplemented
        return d.is_zero

    __hash__ = None

    # conversions --------------------------------------------------------
    def residue(self, k: int) -> int:
        """Residue modulo ϖ^k of an integral element (packed integer)."""
        if k <= 0:
            return 0
        if self.is_zero:
            if self.abs_prec < k:
                raise PrecisionExhausted(f"zero known only mod ϖ^{self.abs_prec}, need {k}")
            return 0
        if self.valuation < 0:
            raise ValueError("residue of a non-integral element")
        if self.valuation >= k:
            return 0
        if self.abs_prec < k:
            raise PrecisionExhausted(f"known mod ϖ^{self.abs_prec}, need ϖ^{k}")
        keep = k - self.valuation
        return (self.unit % self.cfg.p ** keep) * self.cfg.p ** self.valuation

    def residue_padded(self, k: int) -> int:
        """Like :meth:`residue` but treats unknown digits as zero."""
        if k <= 0 or self.is_zero or self.valuation >= k:
            return 0
        if self.valuation < 0:
            raise ValueError("residue of a non-integral element")
        keep = min(k - self.valuation, self.prec)
        return (self.unit % self.cfg.p ** keep) * self.cfg.p ** self.valuation

    def truncate(self, k: int) -> "LocalNum":
        """Drop all digits at positions >= k (representative of x mod ϖ^k)."""
        if self.is_zero or self.valuation >= k:
            return self.cfg.zero()
        keep = min(k - self.valuation, self.prec)
        # the representative is exact: every dropped digit is zero
        return LocalNum(self.cfg, self.valuation, self.unit % self.cfg.p ** keep, self.cfg.precision)

    def sqrt(self) -> "LocalNum":
        return sqrt_hensel(self)

    def __repr__(self):
        return f"LocalNum({self.to_text()!r}, {self.cfg.kind}, p={self.cfg.p})"

    def to_text(self) -> str:
        w = self.cfg.symbol
        if self.is_zero:
            return "0" if self.abs_prec == INF else f"O({w}^{self.abs_prec})"
        terms = []
        for j, d in enumerate(self.digits):
            if j == 0:
                terms.append(f"{d}")
            elif j == 1:
                terms.append(f"{d}*{w}")
            else:
                terms.append(f"{d}*{w}^{j}")
        return f"{w}^{self.valuation} * ({' + '.join(terms)})"

    __str__ = to_text


def ord(a: LocalNum):  # noqa: A001 - domain name
    return a.valuation


def ac(a: LocalNum) -> int:
    return a.ac()


def add(a: LocalNum, b: LocalNum) -> LocalNum:
    return a + b


def mul(a: LocalNum, b: LocalNum) -> LocalNum:
    return a * b


def neg(a: LocalNum) -> LocalNum:
    return -a


def inv(a: LocalNum) -> LocalNum:
    return a.inv()


def abs_exp(a: LocalNum):
    return a.abs_value()


def from_rational(cfg: FieldConfig, num: int, den: int = 1) -> LocalNum:
    if den == 0:
        raise DivisionByZero("zero denominator")
    if den < 0:
        num, den = -num, -den
    p, P = cfg.p, cfg.precision
    if cfg.kind == LAURENT:
        if den % p == 0:
            raise DenominatorNotUnit(f"{den} is divisible by {p}")
        r = num * pow(den, -1, p) % p
        if r == 0:
            return cfg.zero()
        return LocalNum(cfg, 0, r, P)
    if num == 0:
        return cfg.zero()
    v = p_valuation(num, p) - p_valuation(den, p)
    nu = num // p ** p_valuation(num, p)
    de = den // p ** p_valuation(den, p)
    m = p ** P
    return LocalNum(cfg, v, nu * pow(de, -1, m) % m, P)


def sqrt_hensel(a: LocalNum) -> LocalNum:
    """Square root with leading digit in ``[1, (p-1)/2]``."""
    if a.is_zero:
        raise NoSquareRoot("zero has no unit square root")
    if a.valuation % 2:
        raise NoSquareRoot("odd valuation")
    cfg, p, k = a.cfg, a.cfg.p, a.prec
    r0 = sqrt_mod_p(a.unit % p, p)
    if r0 > p // 2:
        r0 = p - r0
    ring = cfg.ring
    r = r0
    known = 1
    while known < k:
        known = min(2 * known, k)
        # Newton step r <- r - (r^2 - u) / (2r)
        f = ring.sub(ring.mul(r, r, known), ring.reduce(a.unit, known), known)
        step = ring.mul(f, ring.inv_unit(ring.mul(2, r, known), known), known)
        r = ring.sub(r, step, known)
    return LocalNum(cfg, a.valuation // 2, r, k)


_TEXT_RE = re.compile(r"^\s*([pt])\^(-?\d+)\s*\*\s*\((.*)\)\s*$")
_ZERO_RE = re.compile(r"^\s*O\(\s*([pt])\^(-?\d+)\s*\)\s*$")
_RAT_RE = re.compile(r"^\s*(-?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_localnum(cfg: FieldConfig, text: str) -> LocalNum:
    """Inverse of :meth:`LocalNum.to_text`; also accepts plain rationals ``a/b``."""
    s = text.strip()
    if s == "0":
        return cfg.zero()
    m = _RAT_RE.match(s)
    if m:
        return from_rational(cfg, int(m.group(1)), int(m.group(2) or 1))
    m = _ZERO_RE.match(s)
    if m:
        if m.group(1) != cfg.symbol:
            raise ValueError(f"uniformizer {m.group(1)!r} does not match {cfg.kind}")
        return LocalNum(cfg, INF, 0, 0, int(m.group(2)))
    m = _TEXT_RE.match(s)
    if not m:
        raise ValueError(f"cannot parse local number {text!r}")
    w, v, body = m.group(1), int(m.group(2)), m.group(3)
    if w != cfg.symbol:
        raise ValueError(f"uniformizer {w!r} does not match {cfg.kind}")
    digits = []
    for j, term in enumerate(t.strip() for t in body.split("+")):
        parts = [x.strip() for x in term.split("*")]
        d = int(parts[0])
        pos = 0
        if len(parts) == 2:
            sym = parts[1]
            if sym == w:
                pos = 1
            elif sym.startswith(w + "^"):
                pos = int(sym[2:])
            else:
                raise ValueError(f"bad term {term!r}")
        elif len(parts) != 1:
            raise ValueError(f"bad term {term!r}")
        if pos != j or not 0 <= d < cfg.p:
            raise ValueError(f"bad digit term {term!r} at position {j}")
        digits.append(d)
    if not digits or digits[0] == 0:
        raise ValueError("leading digit must be nonzero")
    return LocalNum(cfg, v, pack_digits(digits, cfg.p), len(digits))
