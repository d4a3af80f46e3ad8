"""Rational polynomials in x1..xn and the phase-expression parser.

Grammar (whitespace and newlines are insignificant)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("+" | "-") unary | power
    power  := atom ("^" INT)?
    atom   := INT | VAR | "(" expr ")"
    VAR    := "x" [1-9][0-9]*

Division is allowed only by nonzero constants.  Every failure is reported
as :class:`ExpressionSyntaxError` or :class:`NonPolynomial` carrying the
1-based line and column of the offending token.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ExpressionSyntaxError, NonPolynomial

MAX_EXPONENT = 64
MAX_TERMS = 20000
MAX_VARIABLES = 64
MAX_LITERAL_DIGITS = 400
_DIGITS = frozenset("0123456789")


def _grlex(e):
    return (sum(e), tuple(-x for x in e))


class RationalPoly:
    """Immutable polynomial with rational coefficients in ``n`` variables."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms=None):
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != n:
                raise ValueError(f"exponent {e} does not have {n} entries")
            c = Fraction(c)
            if c:
                clean[e] = c
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("RationalPoly is immutable")

    @classmethod
    def const(cls, n, c):
        return cls(n, {(0,) * n: c})

    @classmethod
    def var(cls, n, i):
        return cls(n, {tuple(1 if j == i else 0 for j in range(n)): 1})

    def widen(self, n: int) -> "RationalPoly":
        if n < self.n:
            raise ValueError("cannot drop variables")
        return RationalPoly(n, {e + (0,) * (n - self.n): c for e, c in self.terms.items()})

    def _lift(self, other):
        if isinstance(other, RationalPoly):
            n = max(self.n, other.n)
            return self.widen(n), other.widen(n)
        return self, RationalPoly.const(self.n, other)

    def __add__(self, other):
        a, b = self._lift(other)
        out = dict(a.terms)
        for e, c in b.terms.items():
            out[e] = out.get(e, 0) + c
        return RationalPoly(a.n, out)

    __radd__ = __add__

    def __neg__(self):
        return RationalPoly(self.n, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        a, b = self._lift(other)
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._lift(other)
        out: dict = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return RationalPoly(a.n, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = RationalPoly.const(self.n, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RationalPoly.const(self.n, other)
        if not isinstance(other, RationalPoly):
            return NotImplemented
        a, b = self._lift(other)
        return a.terms == b.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant(self) -> Fraction:
        return self.terms.get((0,) * self.n, Fraction(0))

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def derivative(self, i: int) -> "RationalPoly":
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                out[tuple(f)] = c * e[i]
        return RationalPoly(self.n, out)

    def gradient(self):
        return [self.derivative(i) for i in range(self.n)]

    def __call__(self, *point) -> Fraction:
        total = Fraction(0)
        for e, c in self.terms.items():
            v = c
            for x, a in zip(point, e):
                if a:
                    v *= Fraction(x) ** a
            total += v
        return total

    def hessian_at(self, point):
        g = self.gradient()
        return [[g[i].derivative(j)(*point) for j in range(self.n)] for i in range(self.n)]

    def translate(self, point) -> "RationalPoly":
        """x -> self(point + x)."""
        n = self.n
        subs = [RationalPoly.var(n, i) + Fraction(point[i]) for i in range(n)]
        out = RationalPoly(n)
        for e, c in self.terms.items():
            term = RationalPoly.const(n, c)
            for i, a in enumerate(e):
                if a:
                    term = term * subs[i] ** a
            out = out + term
        return out

    def denominators(self):
        return [c.denominator for c in self.terms.values()]

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for e in sorted(self.terms, key=_grlex):
            c = self.terms[e]
            mono = "*".join(f"x{i + 1}^{a}" if a > 1 else f"x{i + 1}" for i, a in enumerate(e) if a)
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            if not out:
                out.append(body if sign == "+" else f"-{body}")
            else:
                out.append(f"{sign} {body}")
        return " ".join(out)

    __str__ = to_text

    def __repr__(self):
        return f"RationalPoly({self.to_text()!r})"


# ---------------------------------------------------------------------------
# tokenizer and parser


@dataclass(frozen=True)
class Token:
    kind: str  # INT VAR OP LPAREN RPAREN END
    text: str
    line: int
    col: int


def tokenize(src: str):
    toks = []
    line, col = 1, 1
    i = 0
    n = len(src)
    while i < n:
        ch = src[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        start_col = col
        if ch in _DIGITS:
            j = i
            while j < n and src[j] in _DIGITS:
                j += 1
            text = src[i:j]
            if len(text) > MAX_LITERAL_DIGITS:
                raise ExpressionSyntaxError("integer literal too long", line, start_col)
            toks.append(Token("INT", text, line, start_col))
            col += j - i
            i = j
            continue
        if ch == "x":
            j = i + 1
            while j < n and src[j] in _DIGITS:
                j += 1
            digits = src[i + 1:j]
            if not digits or digits[0] == "0":
                raise ExpressionSyntaxError("variables are written x1, x2, ...", line, start_col)
            if len(digits) > 3 or int(digits) > MAX_VARIABLES:
                raise ExpressionSyntaxError(f"at most {MAX_VARIABLES} variables", line, start_col)
            if j < n and (src[j].isalnum() or src[j] == "_"):
                raise ExpressionSyntaxError(f"unexpected character {src[j]!r}", line, col + j - i)
            toks.append(Token("VAR", src[i:j], line, start_col))
            col += j - i
            i = j
            continue
        if ch in "+-*/^":
            toks.append(Token("OP", ch, line, start_col))
        elif ch == "(":
            toks.append(Token("LPAREN", ch, line, start_col))
        elif ch == ")":
            toks.append(Token("RPAREN", ch, line, start_col))
        else:
            raise ExpressionSyntaxError(f"unexpected character {ch!r}", line, start_col)
        i += 1
        col += 1
    toks.append(Token("END", "", line, col))
    return toks


class _Parser:
    def __init__(self, src: str, nvars: int | None):
        self.toks = tokenize(src)
        self.pos = 0
        # number of variables: explicit, or the largest index mentioned
        mentioned = [int(t.text[1:]) for t in self.toks if t.kind == "VAR"]
        top = max(mentioned, default=1)
        if nvars is not None:
            if top > nvars:
                bad = next(t for t in self.toks if t.kind == "VAR" and int(t.text[1:]) > nvars)
                raise ExpressionSyntaxError(f"{bad.text} exceeds the declared {nvars} variables", bad.line, bad.col)
            top = nvars
        self.n = top
        self.depth = 0

    def peek(self) -> Token:
        return self.toks[self.pos]

    def take(self) -> Token:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, kind, text=None) -> Token:
        t = self.peek()
        if t.kind != kind or (text is not None and t.text != text):
            want = repr(text) if text else {"RPAREN": "')'", "LPAREN": "'('"}.get(kind, kind.lower())
            got = t.text or "end of input"
            raise ExpressionSyntaxError(f"expected {want}, found {got!r}", t.line, t.col)
        return self.take()

    def check_size(self, poly: RationalPoly, tok: Token):
        if len(poly.terms) > MAX_TERMS:
            raise ExpressionSyntaxError("expression expands to too many terms", tok.line, tok.col)
        return poly

    def parse(self) -> RationalPoly:
        if self.peek().kind == "END":
            t = self.peek()
            raise ExpressionSyntaxError("empty expression", t.line, t.col)
        out = self.expr()
        t = self.peek()
        if t.kind != "END":
            raise ExpressionSyntaxError(f"unexpected {t.text!r}", t.line, t.col)
        return out

    def expr(self) -> RationalPoly:
        left = self.term()
        while self.peek().kind == "OP" and self.peek().text in "+-":
            op = self.take()
            right = self.term()
            left = left + right if op.text == "+" else left - right
            self.check_size(left, op)
        return left

    def term(self) -> RationalPoly:
        left = self.unary()
        while self.peek().kind == "OP" and self.peek().text in "*/":
            op = self.take()
            rtok = self.peek()
            right = self.unary()
            if op.text == "*":
                left = self.check_size(left * right, op)
            else:
                if not right.is_constant():
                    raise NonPolynomial("division by an expression containing variables", rtok.line, rtok.col)
                c = right.constant()
                if c == 0:
                    raise ExpressionSyntaxError("division by zero", rtok.line, rtok.col)
                left = left * (1 / c)
        return left

    def unary(self) -> RationalPoly:
        t = self.peek()
        if t.kind == "OP" and t.text in "+-":
            self.take()
            self.enter(t)
            inner = self.unary()
            self.depth -= 1
            return inner if t.text == "+" else -inner
        return self.power()

    def enter(self, t):
        self.depth += 1
        if self.depth > 200:
            raise ExpressionSyntaxError("expression nested too deeply", t.line, t.col)

    def power(self) -> RationalPoly:
        base = self.atom()
        if self.peek().kind == "OP" and self.peek().text == "^":
            op = self.take()
            t = self.peek()
            if t.kind != "INT":
                raise ExpressionSyntaxError("exponent must be a nonnegative integer literal", t.line, t.col)
            self.take()
            k = int(t.text)
            if k > MAX_EXPONENT:
                raise ExpressionSyntaxError(f"exponent larger than {MAX_EXPONENT}", t.line, t.col)
            if self.peek().kind == "OP" and self.peek().text == "^":
                nt = self.peek()
                raise ExpressionSyntaxError("chained exponents need parentheses", nt.line, nt.col)
            if len(base.terms) > 1 and k > 1 and len(base.terms) ** min(k, 8) > MAX_TERMS * 50:
                raise ExpressionSyntaxError("expression expands to too many terms", op.line, op.col)
            out = RationalPoly.const(self.n, 1)
            for _ in range(k):
                out = self.check_size(out * base, op)
            return out
        return base

    def atom(self) -> RationalPoly:
        t = self.peek()
        if t.kind == "INT":
            self.take()
            return RationalPoly.const(self.n, int(t.text))
        if t.kind == "VAR":
            self.take()
            return RationalPoly.var(self.n, int(t.text[1:]) - 1)
        if t.kind == "LPAREN":
            self.take()
            self.enter(t)
            inner = self.expr()
            self.depth -= 1
            self.expect("RPAREN")
            return inner
        got = t.text or "end of input"
        raise ExpressionSyntaxError(f"unexpected {got!r}", t.line, t.col)


def parse_phase(src: str, nvars: int | None = None) -> RationalPoly:
    """Parse a phase expression into a :class:`RationalPoly`."""
    return _Parser(src, nvars).parse()
