"""Scalars shared by every module: the exact/float mode switch, Gaussian
rationals, and square-root-scaled values.

In exact mode all moments are :class:`fractions.Fraction` and no rounding
ever happens. In float mode moments are doubles and comparisons use
:data:`DEFAULT_FLOAT_TOL` unless the caller supplies a tolerance.
"""

from __future__ import annotations

import math
import threading
from contextlib import contextmanager
from fractions import Fraction
from numbers import Rational

EXACT = "exact"
FLOAT = "float"
DEFAULT_FLOAT_TOL = 1e-10

_state = threading.local()


def get_mode() -> str:
    return getattr(_state, "mode", EXACT)


def set_mode(mode: str) -> None:
    if mode not in (EXACT, FLOAT):
        raise ValueError(f"unknown numeric mode {mode!r}")
    _state.mode = mode


@contextmanager
def numeric_mode(mode: str):
    """Temporarily switch the numeric mode for the current thread."""
    previous = get_mode()
    set_mode(mode)
    try:
        yield
    finally:
        set_mode(previous)


def is_exact() -> bool:
    return get_mode() == EXACT


def to_scalar(x):
    """Coerce a real number to the scalar type of the active mode."""
    if is_exact():
        if isinstance(x, float):
            raise TypeError("float value used in exact mode")
        return Fraction(x)
    return float(x)


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"``, an integer or a finite decimal into a Fraction."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational literal: {text!r}") from exc


def format_real(x) -> str:
    if isinstance(x, Rational):
        x = Fraction(x)
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return repr(float(x))


def exact_sqrt(q: Fraction) -> Fraction | None:
    """Square root of a nonnegative rational if it is rational, else None."""
    q = Fraction(q)
    if q < 0:
        return None
    p, d = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if p * p == q.numerator and d * d == q.denominator:
        return Fraction(p, d)
    return None


class Gaussian:
    """Complex number with real and imaginary parts of a common real type.

    With Fraction parts this is an exact Gaussian rational; arithmetic with
    floats degrades gracefully to float parts.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, Gaussian):
            re, im = re.re, re.im
        elif isinstance(re, complex):
            re, im = re.real, re.imag
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)

    def __setattr__(self, name, value):
        raise AttributeError("Gaussian is immutable")

    def __reduce__(self):
        return (Gaussian, (self.re, self.im))

    @staticmethod
    def coerce(x) -> "Gaussian":
        if isinstance(x, Gaussian):
            return x
        if isinstance(x, complex):
            return Gaussian(x.real, x.imag)
        return Gaussian(x, 0)

    def __add__(self, other):
        if isinstance(other, complex):
            return complex(self) + other
        o = Gaussian.coerce(other)
        return Gaussian(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return Gaussian(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-Gaussian.coerce(other))

    def __rsub__(self, other):
        return Gaussian.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, complex):
            return complex(self) * other
        o = Gaussian.coerce(other)
        return Gaussian(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Gaussian):
            d = other.abs2()
            num = self * other.conjugate()
            return Gaussian(num.re / d, num.im / d)
        return Gaussian(self.re / other, self.im / other)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = Gaussian(1, 0)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "Gaussian":
        return Gaussian(self.re, -self.im)

    def abs2(self):
        return self.re * self.re + self.im * self.im

    def __abs__(self):
        return math.sqrt(float(self.abs2()))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def is_zero(self, tol: float = 0.0) -> bool:
        if tol <= 0:
            return self.re == 0 and self.im == 0
        return abs(self) <= tol

    def __eq__(self, other):
        if isinstance(other, (Gaussian, int, Fraction, float, complex)):
            o = Gaussian.coerce(other)
            return self.re == o.re and self.im == o.im
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def is_real(self) -> bool:
        return self.im == 0

    def __repr__(self):
        return f"Gaussian({format_real(self.re)}, {format_real(self.im)})"

    def __str__(self):
        return format_complex(self)


def format_complex(z) -> str:
    """Render ``a``, ``bi`` or ``a+bi`` (``a-bi``) with rational or decimal parts."""
    z = Gaussian.coerce(z)
    if z.im == 0:
        return format_real(z.re)
    im = format_real(abs(z.im)) if z.im != 0 else "0"
    sign = "-" if z.im < 0 else "+"
    if z.re == 0:
        return f"{'-' if z.im < 0 else ''}{im}i"
    return f"{format_real(z.re)}{sign}{im}i"


class RootScalar:
    """The number ``coeff * sqrt(radicand)`` with rational radicand.

    Normalised Gram entries and projection coefficients carry factors
    ``1/sqrt(c_m c_k)``; keeping the radicand apart keeps them exact.
    """

    __slots__ = ("coeff", "radicand")

    def __init__(self, coeff, radicand=1):
        coeff = Gaussian.coerce(coeff)
        if isinstance(radicand, Rational):
            root = exact_sqrt(radicand)
            if root is not None:
                coeff, radicand = coeff * root, Fraction(1)
        if not coeff:
            radicand = Fraction(1) if isinstance(radicand, Rational) else 1.0
        self.coeff = coeff
        self.radicand = radicand

    def abs2(self):
        return self.coeff.abs2() * self.radicand

    def is_zero(self) -> bool:
        return not self.coeff

    def is_rational(self) -> bool:
        return self.radicand == 1

    def __complex__(self):
        return complex(self.coeff) * math.sqrt(float(self.radicand))

    def __eq__(self, other):
        # a sqrt(r) == b sqrt(t) iff a conj(b) is a nonnegative real and |a|^2 r == |b|^2 t;
        # this avoids factoring radicands into a canonical square-free form
        if not isinstance(other, RootScalar):
            if not isinstance(other, (Rational, Gaussian)):
                return NotImplemented
            other = RootScalar(other)
        if self.abs2() != other.abs2():
            return False
        cross = self.coeff * other.coeff.conjugate()
        return cross.im == 0 and cross.re >= 0

    def __hash__(self):
        if self.is_rational():
            return hash(self.coeff)
        return hash(self.abs2())

    def __repr__(self):
        return f"RootScalar({self.coeff!s}, {format_real(self.radicand)})"

    def __str__(self):
        if self.is_rational():
            return format_complex(self.coeff)
        c = format_complex(self.coeff)
        if not self.coeff.is_real() and self.coeff.re != 0:
            c = f"({c})"
        return f"{c}*sqrt({format_real(self.radicand)})"


def format_scalar(x) -> str:
    if isinstance(x, RootScalar):
        return str(x)
    if isinstance(x, (Gaussian, complex)):
        return format_complex(x)
    return format_real(x)


def to_complex(x) -> complex:
    if isinstance(x, (Gaussian, RootScalar, complex)):
        return complex(x)
    return complex(float(x))
