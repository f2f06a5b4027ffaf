"""Gauss-Legendre rules on intervals and their tensor products."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np


@lru_cache(maxsize=None)
def _leggauss(q: int):
    x, w = np.polynomial.legendre.leggauss(q)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(q: int, a: float, b: float):
    """``q``-point rule on ``[a, b]``; exact for polynomials of degree ``2q - 1``."""
    if q < 1:
        raise ValueError("quadrature order must be positive")
    x, w = _leggauss(q)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def composite_gauss(q: int, breakpoints: Sequence[float]):
    """Gauss rule of order ``q`` on each piece between consecutive breakpoints."""
    xs, ws = [], []
    for a, b in zip(breakpoints, breakpoints[1:]):
        if b > a:
            x, w = gauss_legendre(q, a, b)
            xs.append(x)
            ws.append(w)
    if not xs:
        return np.empty(0), np.empty(0)
    return np.concatenate(xs), np.concatenate(ws)


def tensor_rule(rules: Sequence[tuple]):
    """Nodes of shape ``(P, d)`` and weights ``(P,)`` of a product rule."""
    grids = np.meshgrid(*[r[0] for r in rules], indexing="ij")
    wgrids = np.meshgrid(*[r[1] for r in rules], indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=-1)
    weights = np.prod(np.stack([g.ravel() for g in wgrids], axis=-1), axis=-1)
    return nodes, weights


@dataclass(frozen=True)
class QuadratureRule:
    """Orders for the counterexample integrals.

    ``radial_order`` Gauss points on each smooth piece of a ring profile and
    ``angular_order`` Gauss points on each linear piece of an arc profile.
    The angular profile is piecewise linear, so any order >= 2 integrates
    its square exactly; ``e^(-i s theta)`` weights are resolved to double
    precision at the default order.
    """

    radial_order: int = 32
    angular_order: int = 16
    tol: float = 1e-10

    def describe(self) -> dict:
        return {
            "radial": f"Gauss-Legendre, {self.radial_order} points per smooth piece",
            "angular": f"Gauss-Legendre, {self.angular_order} points per linear piece of the arc profile",
            "radial_order": self.radial_order,
            "angular_order": self.angular_order,
            "declared_tol": self.tol,
        }
