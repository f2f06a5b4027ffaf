"""Moment-ratio limits.

For measures with mass near 1 the ratio

    int phi(r) r^(m + delta) dmu(r) / int r^(m + beta) dmu(r)

tends to ``phi(1, ..., 1)`` as every ``m_j`` tends to infinity. ``phi`` is a
polynomial here, so each ratio is a finite moment sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from numbers import Integral
from typing import NamedTuple, Sequence

from .numeric import is_exact, to_scalar

WINDOW = 5


class InsufficientPath(ValueError):
    pass


@dataclass(frozen=True)
class RatioExperiment:
    """One ratio sequence.

    ``phi`` maps exponent tuples ``p`` to coefficients of ``r^p``. In exact
    mode ``delta`` and ``beta`` must be nonnegative integers; float mode
    accepts real shifts for measures whose moments extend to real powers.
    """

    factors: tuple
    phi: tuple
    delta: tuple
    beta: tuple
    path: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        phi = self.phi.items() if isinstance(self.phi, dict) else self.phi
        object.__setattr__(self, "phi", tuple((tuple(p), c) for p, c in phi))
        for name in ("delta", "beta"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        object.__setattr__(self, "path", tuple(tuple(m) for m in self.path))
        N = len(self.factors)
        if len(self.delta) != N or len(self.beta) != N or any(len(p) != N for p, _ in self.phi):
            raise ValueError(f"shift or exponent length differs from {N} factors")

    @property
    def alpha(self):
        """``phi(1, ..., 1)``, the coefficient sum."""
        return sum((to_scalar(c) for _, c in self.phi), to_scalar(0))

    @classmethod
    def from_symbol(cls, factors, phi_symbol, delta, beta, path) -> "RatioExperiment":
        """Build ``phi`` from a holomorphic :class:`~polyhankel.symbols.Symbol` in ``r1..rN``."""
        if not phi_symbol.is_holomorphic():
            raise ValueError("phi must be a polynomial in r only")
        phi = []
        for (u, _), a in phi_symbol:
            if not a.is_real():
                raise ValueError("phi needs real coefficients")
            phi.append((u, a.re))
        return cls(tuple(factors), tuple(phi), delta, beta, path)


def _check_path(path):
    for prev, cur in zip(path, path[1:]):
        if not all(b > a for a, b in zip(prev, cur)):
            raise ValueError(f"path must increase in every coordinate: {prev} -> {cur}")


def ratio_sequence(exp: RatioExperiment) -> list:
    _check_path(exp.path)
    if is_exact():
        shifts = list(exp.delta) + list(exp.beta)
        if any(not isinstance(x, Integral) or x < 0 for x in shifts):
            raise ValueError("exact mode needs nonnegative integer shifts")
    out = []
    for m in exp.path:
        num = to_scalar(0)
        for powers, c in exp.phi:
            num += to_scalar(c) * math.prod(
                (f.moment(mj + dj + pj) for f, mj, dj, pj in zip(exp.factors, m, exp.delta, powers)),
                start=to_scalar(1),
            )
        den = math.prod((f.moment(mj + bj) for f, mj, bj in zip(exp.factors, m, exp.beta)), start=to_scalar(1))
        out.append(num / den)
    return out


class Convergence(NamedTuple):
    converged: bool
    first_index: int | None


def check_convergence(seq: Sequence, alpha, tol: float, window: int = WINDOW) -> Convergence:
    """Whether the last ``window`` terms are within ``tol`` of ``alpha``.

    ``first_index`` is the earliest position from which every later term is
    within ``tol`` (None when not converged).
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    if len(seq) < window:
        raise InsufficientPath(f"need at least {window} points, got {len(seq)}")
    close = [abs(x - alpha) <= tol for x in seq]
    if not all(close[-window:]):
        return Convergence(False, None)
    i = len(seq)
    while i > 0 and close[i - 1]:
        i -= 1
    return Convergence(True, i)


def window_stable(seq: Sequence, tol, window: int = WINDOW) -> bool:
    """The last ``window`` values are pairwise within ``tol`` (``tol=0``: all equal)."""
    if len(seq) < window:
        raise InsufficientPath(f"need at least {window} points, got {len(seq)}")
    tail = list(seq[-window:])
    return max(tail) - min(tail) <= tol
