"""Radial probability measures on [0,1) and their products on the polydisc.

Every inner product in the package reduces to calls of :meth:`moment`.
Measures are immutable; the per-measure moment memo is guarded by a lock so
instances can be shared between threads.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct
from math import prod
from numbers import Integral, Rational
from typing import Sequence

from . import numeric
from .numeric import is_exact, to_scalar


class MeasureError(ValueError):
    """Base class for invalid measure descriptions."""


class InvalidParameter(MeasureError):
    pass


class NotProbability(MeasureError):
    pass


class SupportGap(MeasureError):
    """The measure gives zero mass to some interval [r, 1)."""


class TailIncomplete(MeasureError):
    """A truncated infinite atomic measure was used in exact mode."""


class _Memo:
    def __init__(self):
        self.lock = threading.Lock()
        self.values: dict = {}

    def __reduce__(self):
        return (_Memo, ())


@dataclass(frozen=True)
class RadialMeasure:
    """A probability measure on [0,1), exposed only through its moments."""

    _memo: _Memo = field(default_factory=_Memo, init=False, repr=False, compare=False, hash=False)

    def _raw_moment(self, p):
        raise NotImplementedError

    def moment(self, p):
        """Return the integral of t**p; exact in exact mode."""
        key = (numeric.get_mode(), p)
        memo = self._memo
        with memo.lock:
            if key in memo.values:
                return memo.values[key]
        value = self._raw_moment(p)
        with memo.lock:
            memo.values[key] = value
        return value

    def cdf(self, t):
        """Mass of [0, t]."""
        raise NotImplementedError


@dataclass(frozen=True)
class PowerWeight(RadialMeasure):
    """``(beta+1) t**beta dt`` on [0,1); ``beta=1`` gives the Lebesgue disc."""

    beta: int = 1

    def _raw_moment(self, p):
        if is_exact():
            if not isinstance(p, Integral):
                raise TypeError("exact moments need integer exponents")
            return Fraction(self.beta + 1, p + self.beta + 1)
        if p <= -self.beta - 1:
            raise ValueError(f"moment diverges at p={p}")
        return (self.beta + 1) / (p + self.beta + 1)

    def cdf(self, t):
        return to_scalar(t) ** (self.beta + 1)

    def kernel_closed_form(self, x):
        """Sum over k of x**k / moment(2k) for |x| < 1."""
        one = to_scalar(1)
        x = to_scalar(x)
        return (one / (1 - x) + 2 * x / ((self.beta + 1) * (1 - x) ** 2))


@dataclass(frozen=True)
class Atomic(RadialMeasure):
    """Finite sum of point masses ``w_i`` at ``t_i``.

    ``tail_incomplete=True`` marks a finite truncation of an infinite atomic
    measure accumulating at 1; such measures are only accepted in float mode.
    """

    atoms: tuple = ()
    tail_incomplete: bool = False

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple((t, w) for t, w in self.atoms))

    @classmethod
    def truncated_sequence(cls, points: Sequence, weights: Sequence, renormalize: bool = True) -> "Atomic":
        """Truncate an infinite atomic measure, rescaling the kept weights to sum 1."""
        total = sum(weights)
        if renormalize:
            weights = [w / total for w in weights]
        return cls(atoms=tuple(zip(points, weights)), tail_incomplete=True)

    def _raw_moment(self, p):
        if is_exact():
            if not isinstance(p, Integral):
                raise TypeError("exact moments need integer exponents")
            return sum((Fraction(w) * Fraction(t) ** p for t, w in self.atoms), Fraction(0))
        return sum(float(w) * float(t) ** p for t, w in self.atoms)

    def cdf(self, t):
        return sum((to_scalar(w) for ti, w in self.atoms if ti <= t), to_scalar(0))


def validate(m: RadialMeasure) -> RadialMeasure:
    """Check parameters and the support condition; return ``m`` or raise."""
    if isinstance(m, PowerWeight):
        if not isinstance(m.beta, Integral) or isinstance(m.beta, bool) or m.beta < 0:
            raise InvalidParameter(f"PowerWeight needs an integer beta >= 0, got {m.beta!r}")
        return m
    if isinstance(m, Atomic):
        if not m.atoms:
            raise InvalidParameter("Atomic measure without atoms")
        for t, w in m.atoms:
            if not 0 <= t < 1:
                raise InvalidParameter(f"atom position {t} outside [0,1)")
            if not w > 0:
                raise InvalidParameter(f"atom weight {w} is not positive")
        if m.tail_incomplete and is_exact():
            raise TailIncomplete("truncated infinite atomic measure cannot be used in exact mode")
        total = sum(w for _, w in m.atoms)
        if is_exact():
            if any(not isinstance(x, Rational) for pair in m.atoms for x in pair):
                raise InvalidParameter("exact mode needs rational atoms and weights")
            ok = total == 1
        else:
            ok = abs(float(total) - 1.0) <= numeric.DEFAULT_FLOAT_TOL
        if not ok:
            raise NotProbability(f"atom weights sum to {numeric.format_real(total)}, not 1")
        if not m.tail_incomplete:
            top = max(t for t, _ in m.atoms)
            raise SupportGap(f"largest atom {numeric.format_real(top)} < 1 is isolated; mu([r,1)) = 0 for r > it")
        return m
    raise InvalidParameter(f"unsupported measure {m!r}")


@dataclass(frozen=True)
class ProductMeasure:
    """Product of ``n`` radial measures; the base geometry of the polydisc."""

    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise InvalidParameter("ProductMeasure needs at least one factor")

    @classmethod
    def power_weight(cls, n: int, beta: int = 1) -> "ProductMeasure":
        return cls(tuple(PowerWeight(beta) for _ in range(n)))

    @property
    def n(self) -> int:
        return len(self.factors)

    def validate(self) -> "ProductMeasure":
        for f in self.factors:
            validate(f)
        return self

    def moment(self, j: int, p):
        return self.factors[j].moment(p)

    def c_index(self, m: Sequence[int]):
        return c_index(self, m)


def c_index(pm: ProductMeasure, m: Sequence[int]):
    """Squared norm of the monomial ``z**m``: product of even moments."""
    if len(m) != pm.n:
        raise ValueError(f"multi-index of length {len(m)} for dimension {pm.n}")
    return prod((f.moment(2 * mj) for f, mj in zip(pm.factors, m)), start=to_scalar(1))


def _check_moduli(pm: ProductMeasure, r: Sequence) -> list:
    if len(r) != pm.n:
        raise ValueError(f"{len(r)} moduli for dimension {pm.n}")
    out = [to_scalar(x) for x in r]
    for x in out:
        if not 0 <= x < 1:
            raise ValueError(f"modulus {x} outside [0,1)")
    return out


def kernel_diag(pm: ProductMeasure, r: Sequence, N: int):
    """Truncated reproducing-kernel diagonal over the box {0..N}^n."""
    rs = _check_moduli(pm, r)
    total = to_scalar(1)
    for f, x in zip(pm.factors, rs):
        x2 = x * x
        total *= sum((x2 ** k / f.moment(2 * k) for k in range(N + 1)), to_scalar(0))
    return total


def kernel_diag_bruteforce(pm: ProductMeasure, r: Sequence, N: int):
    """Same sum as :func:`kernel_diag` but enumerating the box directly."""
    rs = _check_moduli(pm, r)
    total = to_scalar(0)
    for m in iproduct(range(N + 1), repeat=pm.n):
        total += prod((x ** (2 * mj) for x, mj in zip(rs, m)), start=to_scalar(1)) / c_index(pm, m)
    return total


def kernel_diag_closed_form(pm: ProductMeasure, r: Sequence):
    """Untruncated kernel diagonal; PowerWeight factors only.

    For ``beta = 1`` each factor is ``(1 - r**2)**-2``.
    """
    rs = _check_moduli(pm, r)
    out = to_scalar(1)
    for f, x in zip(pm.factors, rs):
        if not isinstance(f, PowerWeight):
            raise ValueError("closed-form kernel only available for PowerWeight factors")
        out *= f.kernel_closed_form(x * x)
    return out
