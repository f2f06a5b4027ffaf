"""Polynomial symbols ``sum a_{u,v} z^u zbar^v`` on the closed polydisc.

Terms are never simplified by cancelling ``z_j zbar_j``: that product is
``|z_j|^2``, which is 1 only on the torus. The collapse happens in
:func:`boundary_restrict`, for the pinned coordinates of a boundary part.
"""

from __future__ import annotations

import cmath
import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from numbers import Rational
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .numeric import Gaussian, format_complex, format_real, parse_rational

MultiIndex = tuple  # tuple[int, ...]


def succeq(a: Sequence[int], b: Sequence[int] | None = None) -> bool:
    """Componentwise ``a >= b`` (``b`` defaults to the zero index)."""
    if b is None:
        return all(x >= 0 for x in a)
    return all(x >= y for x, y in zip(a, b))


def madd(a: Sequence[int], b: Sequence[int]) -> MultiIndex:
    return tuple(x + y for x, y in zip(a, b))


def msub(a: Sequence[int], b: Sequence[int]) -> MultiIndex:
    return tuple(x - y for x, y in zip(a, b))


class SymbolParseError(ValueError):
    pass


def _term_order(key):
    u, v = key
    return (sum(u) + sum(v), u, v)


class Symbol:
    """Finite linear combination of ``z^u zbar^v`` with Gaussian-rational coefficients."""

    __slots__ = ("n", "_terms")

    def __init__(self, n: int, terms: Mapping | Iterable = ()):
        if n < 1:
            raise ValueError("dimension must be positive")
        acc: dict = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for (u, v), a in items:
            u, v = tuple(u), tuple(v)
            if len(u) != n or len(v) != n:
                raise ValueError(f"exponent length mismatch for dimension {n}: {u}, {v}")
            if any(x < 0 for x in u + v):
                raise ValueError(f"negative exponent in {u}, {v}")
            acc[(u, v)] = acc.get((u, v), Gaussian(0)) + Gaussian.coerce(a)
        self.n = n
        self._terms = MappingProxyType({k: acc[k] for k in sorted(acc, key=_term_order) if acc[k]})

    def __reduce__(self):
        return (Symbol, (self.n, dict(self._terms)))

    # constructors

    @classmethod
    def zero(cls, n: int) -> "Symbol":
        return cls(n)

    @classmethod
    def constant(cls, n: int, c=1) -> "Symbol":
        return cls(n, {((0,) * n, (0,) * n): c})

    @classmethod
    def monomial(cls, n: int, u: Sequence[int], v: Sequence[int] | None = None, c=1) -> "Symbol":
        v = (0,) * n if v is None else v
        return cls(n, {(tuple(u), tuple(v)): c})

    @classmethod
    def z(cls, n: int, j: int) -> "Symbol":
        """The coordinate ``z_j`` (0-based ``j``)."""
        e = tuple(int(i == j) for i in range(n))
        return cls.monomial(n, e)

    @classmethod
    def zbar(cls, n: int, j: int) -> "Symbol":
        e = tuple(int(i == j) for i in range(n))
        return cls.monomial(n, (0,) * n, e)

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> "Symbol":
        return parse_symbol(text, n)

    # basic structure

    @property
    def terms(self) -> Mapping:
        return self._terms

    def __iter__(self):
        return iter(self._terms.items())

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_holomorphic(self) -> bool:
        return all(not any(v) for (_, v) in self._terms)

    def quasi_degrees(self) -> list:
        return sorted({msub(u, v) for (u, v) in self._terms})

    def max_abs_degree(self) -> int:
        return max((abs(x) for s in self.quasi_degrees() for x in s), default=0)

    def corner_value(self) -> Gaussian:
        """Value at (1,...,1): the plain coefficient sum, exact."""
        return sum(self._terms.values(), Gaussian(0))

    def conjugate(self) -> "Symbol":
        return Symbol(self.n, {(v, u): a.conjugate() for (u, v), a in self._terms.items()})

    def _check(self, other: "Symbol"):
        if other.n != self.n:
            raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")

    def __add__(self, other):
        if not isinstance(other, Symbol):
            other = Symbol.constant(self.n, other)
        self._check(other)
        return Symbol(self.n, list(self._terms.items()) + list(other._terms.items()))

    __radd__ = __add__

    def __neg__(self):
        return Symbol(self.n, {k: -a for k, a in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Symbol):
            other = Symbol.constant(self.n, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Symbol):
            c = Gaussian.coerce(other)
            return Symbol(self.n, {k: a * c for k, a in self._terms.items()})
        self._check(other)
        out = []
        for (u1, v1), a in self._terms.items():
            for (u2, v2), b in other._terms.items():
                out.append(((madd(u1, u2), madd(v1, v2)), a * b))
        return Symbol(self.n, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Symbol.constant(self.n)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, Symbol):
            return self.n == other.n and dict(self._terms) == dict(other._terms)
        return NotImplemented

    def __hash__(self):
        return hash((self.n, tuple(self._terms.items())))

    def __repr__(self):
        return f"Symbol({self.n}, {self.to_literal()!r})"

    def __str__(self):
        return self.to_literal()

    def to_literal(self) -> str:
        """Render in the CLI grammar; :func:`parse_symbol` inverts it."""
        if not self._terms:
            return "0"
        pieces = []
        for (u, v), a in self._terms.items():
            factors = []
            for j in range(self.n):
                if u[j]:
                    factors.append(f"z{j + 1}" + (f"^{u[j]}" if u[j] > 1 else ""))
                if v[j]:
                    factors.append(f"zbar{j + 1}" + (f"^{v[j]}" if v[j] > 1 else ""))
            neg = a.is_real() and a.re < 0
            mag = -a if neg else a
            if mag.is_real():
                coeff = format_real(mag.re)
            else:
                coeff = f"({format_complex(mag)})"
            if factors and coeff == "1":
                body = " ".join(factors)
            else:
                body = " ".join([coeff] + factors)
            pieces.append(("- " if neg else "+ ") + body)
        text = " ".join(pieces)
        return text[2:] if text.startswith("+ ") else "-" + text[1:]


# ---------------------------------------------------------------------------
# literal grammar

_VAR = re.compile(r"(zbar|z|r)(\d+)")
_NUM = re.compile(r"\d+(?:\.\d+)?(?:/\d+)?")


def parse_complex(text: str) -> Gaussian:
    """Parse ``a``, ``bi`` or ``a+bi`` with rational parts (``i`` alone is 1i)."""
    s = text.replace(" ", "")
    if not s:
        raise SymbolParseError("empty coefficient")
    parts = re.findall(r"[+-]?[^+-]+", s)
    if "".join(parts) != s:
        raise SymbolParseError(f"bad complex literal {text!r}")
    re_, im = Fraction(0), Fraction(0)
    for part in parts:
        if part.endswith("i"):
            body = part[:-1]
            if body in ("", "+"):
                im += 1
            elif body == "-":
                im -= 1
            else:
                im += _rational(body)
        else:
            re_ += _rational(part)
    return Gaussian(re_, im)


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise SymbolParseError(str(exc)) from exc


class _Parser:
    def __init__(self, text: str):
        self.s = "".join(text.split())
        self.i = 0

    def peek(self, k: int = 1) -> str:
        return self.s[self.i:self.i + k]

    def error(self, msg: str):
        raise SymbolParseError(f"{msg} at position {self.i} in {self.s!r}")

    def parse(self) -> list:
        if not self.s:
            self.error("empty symbol")
        terms = []
        sign = 1
        if self.peek() in "+-":
            sign = -1 if self.peek() == "-" else 1
            self.i += 1
        while True:
            coeff, factors = self.term()
            terms.append((coeff * sign, factors))
            if self.i >= len(self.s):
                return terms
            c = self.peek()
            if c not in "+-":
                self.error("expected '+' or '-'")
            sign = -1 if c == "-" else 1
            self.i += 1

    def term(self):
        coeff = Gaussian(1)
        seen = False
        if self.peek() == "(":
            close = self.s.find(")", self.i)
            if close < 0:
                self.error("unbalanced parenthesis")
            coeff = parse_complex(self.s[self.i + 1:close])
            self.i = close + 1
            seen = True
        else:
            m = _NUM.match(self.s, self.i)
            if m:
                coeff = Gaussian(_rational(m.group()))
                self.i = m.end()
                seen = True
            if self.peek() == "i":
                coeff = coeff * Gaussian(0, 1)
                self.i += 1
                seen = True
        factors = []
        while True:
            if self.peek() == "*":
                self.i += 1
            m = _VAR.match(self.s, self.i)
            if not m:
                break
            self.i = m.end()
            power = 1
            if self.peek() == "^":
                self.i += 1
                pm = re.compile(r"\d+").match(self.s, self.i)
                if not pm:
                    self.error("expected exponent")
                power = int(pm.group())
                self.i = pm.end()
            idx = int(m.group(2))
            if idx < 1:
                self.error("coordinates are numbered from 1")
            factors.append((m.group(1) == "zbar", idx - 1, power))
            seen = True
        if not seen:
            self.error("expected a term")
        return coeff, factors


def parse_symbol(text: str, n: int | None = None) -> Symbol:
    """Parse e.g. ``"(3/2+1/2i) z1^2 zbar2 - 5"``.

    ``zbarJ`` is the conjugate of coordinate J (1-based); ``rJ`` is accepted
    as an alias of ``zJ`` for radial profiles. The dimension is the largest
    coordinate used unless ``n`` is given.
    """
    raw = _Parser(text).parse()
    used = max((idx + 1 for _, fs in raw for _, idx, _ in fs), default=1)
    if n is None:
        n = used
    elif used > n:
        raise SymbolParseError(f"coordinate {used} exceeds dimension {n}")
    out = []
    for coeff, factors in raw:
        u, v = [0] * n, [0] * n
        for bar, idx, power in factors:
            (v if bar else u)[idx] += power
        out.append(((tuple(u), tuple(v)), coeff))
    return Symbol(n, out)


# ---------------------------------------------------------------------------
# quasi-homogeneous structure


@dataclass(frozen=True)
class QuasiPart:
    """The terms of a symbol of one quasi-degree ``s = u - v``."""

    s: MultiIndex
    symbol: Symbol

    def __post_init__(self):
        for (u, v) in self.symbol.terms:
            if msub(u, v) != tuple(self.s):
                raise ValueError(f"term {u},{v} does not have quasi-degree {self.s}")


def quasi_decompose(f: Symbol) -> dict:
    """Group terms by ``u - v``; the parts sum back to ``f`` exactly."""
    groups: dict = {}
    for (u, v), a in f:
        groups.setdefault(msub(u, v), []).append(((u, v), a))
    return {s: QuasiPart(s, Symbol(f.n, groups[s])) for s in sorted(groups)}


def quasi_part(f: Symbol, s: Sequence[int]) -> QuasiPart:
    s = tuple(s)
    return QuasiPart(s, Symbol(f.n, [(k, a) for k, a in f if msub(*k) == s]))


def _as_point(z):
    if isinstance(z, (Gaussian, Rational)):
        return Gaussian.coerce(z)
    return complex(z)


def evaluate(f: Symbol, z: Sequence):
    """Evaluate at a point of the closed polydisc.

    Rational or Gaussian coordinates give an exact Gaussian result; any
    float or complex coordinate switches to complex arithmetic.
    """
    if len(z) != f.n:
        raise ValueError(f"point of length {len(z)} for dimension {f.n}")
    pts = [_as_point(x) for x in z]
    exact = all(isinstance(p, Gaussian) for p in pts)
    for p in pts:
        mod2 = p.abs2() if isinstance(p, Gaussian) else abs(p) ** 2
        if mod2 > (1 if exact else 1 + 1e-12):
            raise ValueError(f"point {p} outside the closed unit disc")
    total = Gaussian(0) if exact else 0j
    for (u, v), a in f:
        val = a if exact else complex(a)
        for p, uj, vj in zip(pts, u, v):
            if uj:
                val = val * p ** uj
            if vj:
                val = val * p.conjugate() ** vj
        total = total + val
    return total


def evaluate_polar(f: Symbol, r: Sequence[float], theta: Sequence[float]) -> complex:
    return evaluate(f, [ri * cmath.exp(1j * ti) for ri, ti in zip(r, theta)])


def fejer_weight(s: Sequence[int], N: int) -> Fraction:
    """Product Fejer weight ``prod (1 - |s_j|/(N+1))_+``."""
    w = Fraction(1)
    for sj in s:
        if abs(sj) > N:
            return Fraction(0)
        w *= Fraction(N + 1 - abs(sj), N + 1)
    return w


def cesaro_mean(f: Symbol, N: int) -> Symbol:
    """N-th Cesaro mean: each quasi-part scaled by its Fejer weight."""
    if N < 1:
        raise ValueError("Cesaro index must be >= 1")
    out = []
    for (u, v), a in f:
        w = fejer_weight(msub(u, v), N)
        if w:
            out.append(((u, v), a * w))
    return Symbol(f.n, out)


# ---------------------------------------------------------------------------
# boundary of the polydisc


@dataclass(frozen=True)
class BoundaryPart:
    """``A_1 x ... x A_n`` with ``A_j = T`` for pinned ``j`` and ``D`` otherwise."""

    n: int
    pinned: frozenset

    def __post_init__(self):
        object.__setattr__(self, "pinned", frozenset(self.pinned))
        if not self.pinned:
            raise ValueError("a boundary part pins at least one coordinate")
        if not all(0 <= j < self.n for j in self.pinned):
            raise ValueError(f"pinned coordinates {sorted(self.pinned)} out of range")

    @property
    def label(self) -> str:
        return ",".join("T" if j in self.pinned else "D" for j in range(self.n))

    @property
    def disc_coords(self) -> tuple:
        return tuple(j for j in range(self.n) if j not in self.pinned)

    @classmethod
    def from_label(cls, label: str) -> "BoundaryPart":
        letters = [x.strip().upper() for x in label.replace("x", ",").split(",")]
        if any(x not in ("T", "D") for x in letters):
            raise ValueError(f"bad boundary part label {label!r}")
        return cls(len(letters), frozenset(j for j, x in enumerate(letters) if x == "T"))

    def __str__(self):
        return self.label


def boundary_parts(n: int) -> list:
    """The ``2^n - 1`` parts, fewest pinned coordinates first, then by label with T < D."""
    parts = [BoundaryPart(n, frozenset(c)) for k in range(1, n + 1) for c in combinations(range(n), k)]
    return sorted(parts, key=lambda W: (len(W.pinned), tuple(0 if j in W.pinned else 1 for j in range(n))))


@dataclass(frozen=True)
class RestrictedSymbol:
    """A symbol restricted to a boundary part, in canonical form.

    Keys hold, per coordinate, ``(u_j, v_j)`` for a disc coordinate or the
    toral exponent ``u_j - v_j`` (an int) for a pinned one. Distinct keys
    are linearly independent functions on the part.
    """

    part: BoundaryPart
    terms: Mapping

    def is_zero(self) -> bool:
        return not self.terms

    def evaluate(self, w: Sequence) -> complex:
        total = 0j
        for key, a in self.terms.items():
            val = complex(a)
            for j, e in enumerate(key):
                x = complex(w[j])
                if j in self.part.pinned:
                    val *= x ** e if e >= 0 else x.conjugate() ** (-e)
                else:
                    val *= x ** e[0] * x.conjugate() ** e[1]
            total += val
        return total


def boundary_restrict(f: Symbol, W: BoundaryPart) -> RestrictedSymbol:
    if W.n != f.n:
        raise ValueError(f"part of dimension {W.n} for symbol of dimension {f.n}")
    acc: dict = {}
    for (u, v), a in f:
        key = tuple(u[j] - v[j] if j in W.pinned else (u[j], v[j]) for j in range(f.n))
        acc[key] = acc.get(key, Gaussian(0)) + a
    return RestrictedSymbol(W, MappingProxyType({k: c for k, c in acc.items() if c}))


def boundary_vanishes(f: Symbol, W: BoundaryPart) -> bool:
    """True iff ``f`` is identically zero on the part ``W``."""
    return boundary_restrict(f, W).is_zero()


def model_monomial(fs: QuasiPart) -> Symbol:
    """``f_s(1,...,1) z^s`` when ``s >= 0``, otherwise the zero symbol."""
    n = fs.symbol.n
    if not succeq(fs.s):
        return Symbol.zero(n)
    return Symbol.monomial(n, fs.s, None, fs.symbol.corner_value())
