"""The additive character Ψ, coset regions and Schwartz-Bruhat step functions.

Ψ is fixed as ``Ψ(x) = exp(2πi·{x/p})`` on Q_p (``{·}`` the p-adic
fractional part) and ``Ψ(x) = ζ_p^{c_0(x)}`` on F_p((t)), ``c_0`` being the
coefficient of ``t^0``.  Both are trivial on ``{ord >= 1}`` and nontrivial
on O.

A coset ``c + (ϖ^d O)^n`` is identified by its *key*: the tuple of the
centre coordinates truncated below position ``d``.  Two cosets of depths
``d <= e`` meet iff the deeper centre truncated at ``d`` has the shallower key,
which makes disjointness checks, point lookup and products dictionary
operations instead of pairwise scans.
"""
from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .cyclotomic import CycloNum
from .errors import OverlappingCells, PrecisionExhausted
from .localfield import LAURENT, FieldConfig, LocalNum, digits_of


# ---------------------------------------------------------------------------
# character


def psi(x: LocalNum) -> CycloNum:
    """Ψ(x) as an exact root of unity."""
    cfg = x.cfg
    p = cfg.p
    if x.is_zero:
        if x.abs_prec < 1:
            raise PrecisionExhausted("value unknown at the unit digit")
        return CycloNum.rational(p, 1)
    if x.valuation >= 1:
        return CycloNum.rational(p, 1)
    if x.abs_prec < 1:
        raise PrecisionExhausted("value unknown at the unit digit")
    M = 1 - x.valuation
    if cfg.kind == LAURENT:
        d = digits_of(x.unit, p, M)[M - 1]
        return CycloNum.from_terms(p, 1, [(d, 1)])
    return CycloNum.from_terms(p, M, [(x.unit % p ** M, 1)])


def psi_exponent(x: LocalNum):
    """``(M, e)`` with Ψ(x) = ζ_{p^M}^e, without building a CycloNum."""
    v = psi(x)
    if v.M == 0:
        return 0, 0
    (e, _), = v.terms()
    return v.M, e


def psi_square_depth(lam: LocalNum) -> int:
    """Depth β on which u -> Ψ(λu²) is constant on O."""
    if lam.is_zero:
        return 0
    o = lam.valuation
    return max(0, 1 - o, -((o - 1) // 2))


# ---------------------------------------------------------------------------
# cosets


def coord_key(x: LocalNum, d: int):
    t = x.truncate(d)
    return None if t.is_zero else (t.valuation, t.unit)


def coset_key(center, d: int):
    return tuple(coord_key(x, d) for x in center)


def children(cfg: FieldConfig, center, d: int):
    """The p^n sub-cosets of depth d+1 of ``center + (ϖ^d O)^n``."""
    p = cfg.p
    digit = [cfg.from_int(j).shift(d) if j else None for j in range(p)]
    base = [x.truncate(d) for x in center]
    for js in itertools.product(range(p), repeat=len(center)):
        yield tuple(b if j == 0 else b + digit[j] for b, j in zip(base, js))


class _CosetTable:
    """Disjoint cosets indexed by depth and key."""

    def __init__(self, cells):
        self.by_depth: dict[int, dict] = {}
        for idx, (center, d) in sorted(enumerate(cells), key=lambda t: t[1][1]):
            for dd, table in self.by_depth.items():
                if dd <= d and coset_key(center, dd) in table:
                    raise OverlappingCells(f"cells at depths {dd} and {d} overlap")
            self.by_depth.setdefault(d, {})[coset_key(center, d)] = idx

    def locate(self, x):
        for d, table in self.by_depth.items():
            i = table.get(coset_key(x, d))
            if i is not None:
                return i
        return None


def _meets(c1, d1, c2, d2) -> bool:
    d = min(d1, d2)
    return coset_key(c1, d) == coset_key(c2, d)


class Region:
    """Finite disjoint union of cosets ``c + (ϖ^d O)^n``."""

    __slots__ = ("cfg", "n", "cells", "_table")

    def __init__(self, cfg: FieldConfig, n: int, cells):
        cells = tuple((tuple(cfg.coerce(x) for x in c), int(d)) for c, d in cells)
        for c, _ in cells:
            if len(c) != n:
                raise ValueError(f"centre {c} does not have {n} coordinates")
        object.__setattr__(self, "cfg", cfg)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "_table", _CosetTable(cells))

    def __setattr__(self, name, value):
        raise AttributeError("Region is immutable")

    @classmethod
    def full(cls, cfg, n):
        return cls(cfg, n, [((cfg.zero(),) * n, 0)])

    @classmethod
    def ball(cls, cfg, center, depth):
        center = tuple(cfg.coerce(x) for x in center)
        return cls(cfg, len(center), [(center, depth)])

    @classmethod
    def empty(cls, cfg, n):
        return cls(cfg, n, [])

    def is_empty(self) -> bool:
        return not self.cells

    def contains(self, x) -> bool:
        x = tuple(self.cfg.coerce(v) for v in x)
        return self._table.locate(x) is not None

    def volume(self) -> Fraction:
        p = self.cfg.p
        return sum((Fraction(1, p) ** (self.n * d) for _, d in self.cells), Fraction(0))

    def is_integral(self) -> bool:
        return all(d >= 0 and all(x.is_zero or x.valuation >= 0 for x in c) for c, d in self.cells)

    def max_depth(self) -> int:
        return max((d for _, d in self.cells), default=0)

    def indicator(self) -> "StepFunction":
        one = CycloNum.rational(self.cfg.p, 1)
        return StepFunction(self.cfg, self.n, [(c, d, one) for c, d in self.cells])

    def intersect(self, other: "Region") -> "Region":
        out = []
        for c1, d1 in self.cells:
            for c2, d2 in other.cells:
                if _meets(c1, d1, c2, d2):
                    out.append((c1, d1) if d1 >= d2 else (c2, d2))
        return Region(self.cfg, self.n, out)

    def subtract(self, other: "Region") -> "Region":
        """Cells of ``self`` minus ``other``, refining where ``other`` cuts a cell."""
        out = []
        stack = list(self.cells)
        while stack:
            c, d = stack.pop()
            hits = [(c2, d2) for c2, d2 in other.cells if _meets(c, d, c2, d2)]
            if not hits:
                out.append((c, d))
            elif any(d2 <= d for _, d2 in hits):
                continue
            else:
                stack.extend((ch, d + 1) for ch in children(self.cfg, c, d))
        return Region(self.cfg, self.n, out)

    def contains_region(self, other: "Region") -> bool:
        return self.intersect(other).volume() == other.volume()

    def refine(self, depth: int) -> "Region":
        """Same set with every cell split down to at least ``depth``."""
        out = []
        stack = list(self.cells)
        while stack:
            c, d = stack.pop()
            if d >= depth:
                out.append((c, d))
            else:
                stack.extend((ch, d + 1) for ch in children(self.cfg, c, d))
        return Region(self.cfg, self.n, out)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "cells": [{"center": [x.to_text() for x in c], "depth": d} for c, d in self.cells],
        }

    @classmethod
    def from_json(cls, cfg, obj) -> "Region":
        n = int(obj["n"])
        return cls(cfg, n, [([cfg.coerce(x) for x in cell["center"]], int(cell["depth"]))
                            for cell in obj["cells"]])

    def __repr__(self):
        body = ", ".join(f"({', '.join(x.to_text() for x in c)}) + ϖ^{d}" for c, d in self.cells)
        return f"Region[n={self.n}]({body})"


# ---------------------------------------------------------------------------


class StepFunction:
    """Finite sum of ``value * 1_{c + (ϖ^d O)^n}`` over disjoint cells."""

    __slots__ = ("cfg", "n", "cells", "_table")

    def __init__(self, cfg: FieldConfig, n: int, cells):
        p = cfg.p
        clean = []
        for c, d, v in cells:
            if not isinstance(v, CycloNum):
                v = CycloNum.rational(p, v)
            if v.is_zero():
                continue
            c = tuple(cfg.coerce(x) for x in c)
            if len(c) != n:
                raise ValueError(f"centre {c} does not have {n} coordinates")
            clean.append((c, int(d), v))
        clean = tuple(clean)
        object.__setattr__(self, "cfg", cfg)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "cells", clean)
        object.__setattr__(self, "_table", _CosetTable([(c, d) for c, d, _ in clean]))

    def __setattr__(self, name, value):
        raise AttributeError("StepFunction is immutable")

    @classmethod
    def zero(cls, cfg, n):
        return cls(cfg, n, [])

    # queries ------------------------------------------------------------
    def __call__(self, x) -> CycloNum:
        return step_eval(self, x)

    def support(self) -> Region:
        return Region(self.cfg, self.n, [(c, d) for c, d, _ in self.cells])

    def max_depth(self) -> int:
        return max((d for _, d, _ in self.cells), default=0)

    def min_depth(self) -> int:
        return min((d for _, d, _ in self.cells), default=0)

    def is_zero(self) -> bool:
        return not self.cells

    def level(self) -> int:
        return max((v.M for _, _, v in self.cells), default=0)

    # algebra ------------------------------------------------------------
    def scale(self, s) -> "StepFunction":
        return StepFunction(self.cfg, self.n, [(c, d, v * s) for c, d, v in self.cells])

    def __neg__(self):
        return self.scale(-1)

    def __add__(self, other: "StepFunction") -> "StepFunction":
        from .grid import DenseStep

        a, b = DenseStep.common(DenseStep.from_step(self), DenseStep.from_step(other))
        return (a + b).to_step()

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, StepFunction):
            return step_product(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    def reflect(self) -> "StepFunction":
        """x -> φ(-x)."""
        return StepFunction(self.cfg, self.n, [(tuple(-x for x in c), d, v) for c, d, v in self.cells])

    def normalized(self) -> "StepFunction":
        """Merge complete families of equal-valued sibling cells."""
        p, n = self.cfg.p, self.n
        by_depth: dict[int, dict] = {}
        for c, d, v in self.cells:
            by_depth.setdefault(d, {})[coset_key(c, d)] = (c, v)
        if not by_depth:
            return self
        d = max(by_depth)
        while d >= min(by_depth):
            level = by_depth.get(d, {})
            groups: dict = {}
            for key, (c, v) in level.items():
                groups.setdefault(coset_key(c, d - 1), []).append((key, c, v))
            for pkey, members in groups.items():
                if len(members) == p ** n and all(m[2] == members[0][2] for m in members):
                    for key, _, _ in members:
                        del level[key]
                    parent = tuple(x.truncate(d - 1) for x in members[0][1])
                    by_depth.setdefault(d - 1, {})[pkey] = (parent, members[0][2])
            d -= 1
        cells = []
        for dd in sorted(by_depth):
            for key in sorted(by_depth[dd], key=_key_sort):
                c, v = by_depth[dd][key]
                cells.append((c, dd, v))
        return StepFunction(self.cfg, self.n, cells)

    def equals(self, other: "StepFunction") -> bool:
        """Pointwise equality (independent of the cell decomposition)."""
        from .grid import DenseStep

        a, b = DenseStep.common(DenseStep.from_step(self), DenseStep.from_step(other))
        return a.equals(b)

    # serialisation ------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "n": self.n,
            "cells": [
                {"center": [x.to_text() for x in c], "depth": d, "value": v.to_json()}
                for c, d, v in self.cells
            ],
        }

    @classmethod
    def from_json(cls, cfg, obj) -> "StepFunction":
        n = int(obj["n"])
        cells = []
        for cell in obj["cells"]:
            val = cell.get("value", 1)
            if isinstance(val, dict):
                val = CycloNum.from_json(val)
            else:
                val = CycloNum.rational(cfg.p, Fraction(val))
            cells.append(([cfg.coerce(x) for x in cell["center"]], int(cell["depth"]), val))
        return cls(cfg, n, cells)

    def __repr__(self):
        body = "; ".join(f"{v!r} on ({', '.join(x.to_text() for x in c)}) + ϖ^{d}" for c, d, v in self.cells)
        return f"StepFunction[n={self.n}]({body})"


def _key_sort(key):
    return tuple((-1, 0) if k is None else k for k in key)


def indicator(cfg: FieldConfig, center, depth: int, value=1) -> StepFunction:
    center = tuple(cfg.coerce(x) for x in center)
    return StepFunction(cfg, len(center), [(center, depth, value)])


def step_eval(phi: StepFunction, x) -> CycloNum:
    x = tuple(phi.cfg.coerce(v) for v in x)
    i = phi._table.locate(x)
    if i is None:
        return CycloNum.rational(phi.cfg.p, 0)
    return phi.cells[i][2]


def step_product(phi: StepFunction, chi: StepFunction) -> StepFunction:
    if phi.n != chi.n or phi.cfg != chi.cfg:
        raise ValueError("step functions over different spaces")
    out = []
    for c1, d1, v1 in phi.cells:
        for c2, d2, v2 in chi.cells:
            if _meets(c1, d1, c2, d2):
                c, d = (c1, d1) if d1 >= d2 else (c2, d2)
                out.append((c, d, v1 * v2))
    return StepFunction(phi.cfg, phi.n, out)


def restrict(phi: StepFunction, omega: Region) -> StepFunction:
    return step_product(phi, omega.indicator())


def random_step_function(cfg: FieldConfig, n: int, rng: random.Random, max_depth: int = 2,
                         split_prob: float = 0.5, keep_prob: float = 0.7,
                         cyclotomic_values: bool = True) -> StepFunction:
    """Random step function supported in O^n with cells of depth <= max_depth."""
    p = cfg.p
    cells = []
    stack = [((cfg.zero(),) * n, 0)]
    while stack:
        c, d = stack.pop()
        if d < max_depth and rng.random() < split_prob:
            stack.extend((ch, d + 1) for ch in children(cfg, c, d))
            continue
        if rng.random() > keep_prob:
            continue
        if cyclotomic_values and rng.random() < 0.3:
            val = CycloNum.from_terms(p, 1, [(rng.randrange(p), rng.randint(-3, 3)),
                                             (rng.randrange(p), rng.randint(-3, 3))])
        else:
            val = CycloNum.rational(p, Fraction(rng.randint(-5, 5), rng.choice([1, 1, 2, 3])))
        cells.append((c, d, val))
    return StepFunction(cfg, n, cells)


__all__ = [
    "psi",
    "psi_square_depth",
    "Region",
    "StepFunction",
    "indicator",
    "step_eval",
    "step_product",
    "restrict",
    "random_step_function",
    "coset_key",
    "children",
]
