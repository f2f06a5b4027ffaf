"""A bounded symbol, continuous on the open polydisc, whose Hankel operator
is Hilbert-Schmidt although the symbol has no holomorphic-plus-vanishing
decomposition.

Layer ``k`` lives on ``E_k = {r * zeta : r in R_k, zeta in V_k}`` with
``R_k = (r_k, r_{k+1})^n``, ``r_j = 1 - 2^-j`` and ``V_k`` a product of equal
arcs. Each layer is a product of 1-D trapezoids (0 on the boundary of its
ring or arc, 1 on the inner half). Only the unweighted Bergman measure
(``PowerWeight(1)`` factors) is supported, where ``K_z(z) = prod (1 - |z_j|^2)^-2``.

Angles are measured in turns (fractions of a full circle) so arc widths,
``sigma(V_k)`` and plateau measures stay exact rationals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct
from typing import Callable, Sequence

import numpy as np

from .moments import PowerWeight, ProductMeasure
from .numeric import format_real
from .quadrature import QuadratureRule, composite_gauss, tensor_rule

ARC_HALVINGS = 60
TWO_PI = 2.0 * math.pi


class BudgetUnreachable(RuntimeError):
    def __init__(self, k: int, achieved: float, sigma: Fraction):
        super().__init__(
            f"layer {k}: arc width underflowed before the kernel budget was met "
            f"(achieved {achieved:.3e}, sigma {float(sigma):.3e})"
        )
        self.k = k
        self.achieved = achieved
        self.sigma = sigma


@dataclass(frozen=True)
class RingSpec:
    inner: Fraction
    outer: Fraction

    def __post_init__(self):
        if not 0 < self.inner < self.outer < 1:
            raise ValueError(f"bad ring ({self.inner}, {self.outer})")

    @property
    def plateau(self) -> tuple:
        q = (self.outer - self.inner) / 4
        return self.inner + q, self.outer - q

    def breakpoints(self) -> list:
        a, b = self.plateau
        return [float(self.inner), float(a), float(b), float(self.outer)]

    def profile(self, r):
        a, b = float(self.inner), float(self.outer)
        return np.clip(np.minimum(r - a, b - r) / ((b - a) / 4), 0.0, 1.0)

    def contains(self, r) -> np.ndarray:
        return (r > float(self.inner)) & (r < float(self.outer))


@dataclass(frozen=True)
class AngularSet:
    """``n`` equal arcs of half-width ``half_width`` turns about ``center``."""

    n: int
    half_width: Fraction
    center: Fraction = Fraction(0)

    @property
    def sigma(self) -> Fraction:
        return (2 * self.half_width) ** self.n

    def breakpoints(self, shift: float = 0.0) -> list:
        c, h = float(self.center) - shift, float(self.half_width)
        return [c - h, c - h / 2, c + h / 2, c + h]

    def profile(self, theta):
        c, h = float(self.center), float(self.half_width)
        d = np.abs(np.mod(theta - c + 0.5, 1.0) - 0.5)
        return np.clip((h - d) / (h / 2), 0.0, 1.0)


@dataclass(frozen=True)
class Layer:
    k: int
    ring: RingSpec
    arcs: AngularSet
    kernel_integral: float
    kernel_integral_exact: Fraction
    budget: float
    iterations: int


def _kernel_1d(r):
    return 1.0 / (1.0 - r * r) ** 2


def _dmu(r):
    return 2.0 * r


def radial_integral(ring: RingSpec, g: Callable, order: int) -> float:
    """``int_ring g(r) 2r dr`` piecewise over the smooth pieces of the ring profile."""
    x, w = composite_gauss(order, ring.breakpoints())
    return float(math.fsum(w * g(x) * _dmu(x)))


def angular_integral(arcs: AngularSet, g: Callable, order: int, shift: float = 0.0) -> complex:
    x, w = composite_gauss(order, arcs.breakpoints(shift))
    return complex(np.sum(w * g(x)))


def kernel_factor_exact(ring: RingSpec) -> Fraction:
    """``int_ring (1 - r^2)^-2 2r dr = 1/(1 - b^2) - 1/(1 - a^2)``."""
    a, b = ring.inner, ring.outer
    return 1 / (1 - b * b) - 1 / (1 - a * a)


@dataclass(frozen=True)
class CounterexampleSymbol:
    pm: ProductMeasure
    radii: tuple
    layers: tuple
    rule: QuadratureRule

    @property
    def n(self) -> int:
        return self.pm.n

    @property
    def K(self) -> int:
        return len(self.layers)

    def layer_values(self, z) -> np.ndarray:
        """Per-layer values, shape ``(K, ...)`` for points ``z`` of shape ``(..., n)``."""
        z = np.asarray(z, dtype=complex)
        r = np.abs(z)
        theta = np.angle(z) / TWO_PI
        out = []
        for L in self.layers:
            v = np.ones(z.shape[:-1])
            for j in range(self.n):
                v = v * L.ring.profile(r[..., j]) * L.arcs.profile(theta[..., j])
            out.append(v)
        return np.array(out)

    def evaluate(self, z) -> np.ndarray:
        return self.layer_values(z).sum(axis=0)

    def layer_of(self, moduli: Sequence[float]) -> int | None:
        """1-based layer whose ring box contains ``moduli``, or None."""
        r = np.asarray(moduli, dtype=float)
        for L in self.layers:
            if np.all(L.ring.contains(r)):
                return L.k
        return None

    def manifest(self) -> dict:
        return {
            "n": self.n,
            "K": self.K,
            "measure": "power_weight(1)^n",
            "radii": [format_real(r) for r in self.radii],
            "angle_unit": "turns",
            "quadrature": self.rule.describe(),
            "layers": [
                {
                    "k": L.k,
                    "ring": [format_real(L.ring.inner), format_real(L.ring.outer)],
                    "arc_center": format_real(L.arcs.center),
                    "arc_half_width": format_real(L.arcs.half_width),
                    "sigma": format_real(L.arcs.sigma),
                    "sigma_bound": format_real(Fraction(1, L.k)),
                    "kernel_integral": L.kernel_integral,
                    "kernel_integral_exact": format_real(L.kernel_integral_exact),
                    "kernel_budget": L.budget,
                    "shrink_iterations": L.iterations,
                }
                for L in self.layers
            ],
        }


def _default_budget(k: int) -> float:
    return 1.0 / (k * k)


def build_counterexample(
    pm: ProductMeasure,
    K: int,
    kernel_budget: Callable[[int], float] | None = None,
    rule: QuadratureRule | None = None,
    max_halvings: int = ARC_HALVINGS,
) -> CounterexampleSymbol:
    """Choose rings ``r_j = 1 - 2^-j`` and halve arc widths until every budget holds.

    Layer ``k`` needs ``sigma(V_k) < 1/k`` and a quadrature value of
    ``int_{E_k} K_z(z) dtheta(z)`` below ``kernel_budget(k)`` (default ``1/k^2``).
    """
    n = pm.n
    if n < 2:
        raise ValueError("the construction needs n >= 2")
    if K < 2:
        raise ValueError("the construction needs K >= 2")
    if any(f != PowerWeight(1) for f in pm.factors):
        raise ValueError("counterexample supports PowerWeight(1) factors only")
    budget = kernel_budget or _default_budget
    rule = rule or QuadratureRule()
    radii = tuple(1 - Fraction(1, 2 ** j) for j in range(1, K + 2))
    layers = []
    for k in range(1, K + 1):
        ring = RingSpec(radii[k - 1], radii[k])
        radial = radial_integral(ring, _kernel_1d, rule.radial_order) ** n
        target = budget(k)
        h = Fraction(1, 4)
        for it in range(max_halvings + 1):
            arcs = AngularSet(n, h)
            # the angular integral of the indicator of V_k is sigma(V_k) exactly
            est = float(arcs.sigma) * radial
            if arcs.sigma < Fraction(1, k) and est < target:
                break
            h /= 2
        else:
            raise BudgetUnreachable(k, est, arcs.sigma)
        exact = arcs.sigma * kernel_factor_exact(ring) ** n
        layers.append(Layer(k, ring, arcs, est, exact, target, it))
    return CounterexampleSymbol(pm, radii, tuple(layers), rule)


# ---------------------------------------------------------------------------
# Hilbert-Schmidt bound


@dataclass(frozen=True)
class HSCheck:
    estimate: float
    bound: float
    tol: float
    per_layer: tuple

    @property
    def passed(self) -> bool:
        return self.estimate <= self.bound + self.tol


def _layer_hs(L: Layer, n: int, rule: QuadratureRule) -> float:
    # the tensor rule applied to a separable integrand is the product of 1-D rules
    rad = radial_integral(L.ring, lambda r: L.ring.profile(r) ** 2 * _kernel_1d(r), rule.radial_order)
    ang = angular_integral(L.arcs, lambda t: L.arcs.profile(t) ** 2, rule.angular_order).real
    return (rad * ang) ** n


def hs_sum_check(ce: CounterexampleSymbol, rule: QuadratureRule | None = None, tol: float = 1e-2) -> HSCheck:
    """Quadrature value of ``sum_k int_{E_k} |f|^2 K_z(z) dtheta`` against ``sum 1/k^2``."""
    rule = rule or ce.rule
    per = tuple(_layer_hs(L, ce.n, rule) for L in ce.layers)
    bound = math.fsum(1.0 / (L.k * L.k) for L in ce.layers)
    return HSCheck(math.fsum(per), bound, tol, per)


@dataclass(frozen=True)
class HSChain:
    hankel_upper: float
    fe_sum: float
    kernel_integral: float


def hs_chain(ce: CounterexampleSymbol, N: int, N_proj: int | None = None, rule: QuadratureRule | None = None) -> HSChain:
    """Box sums ``sum ||H_f e_m||^2 <= sum ||f e_m||^2`` next to ``int |f|^2 K``.

    The projection of ``f e_m`` is truncated to ``{0..N_proj}^n``, which only
    makes ``hankel_upper`` larger than the true box sum.
    """
    rule = rule or ce.rule
    n = ce.n
    N_proj = 2 * N if N_proj is None else N_proj
    top = 2 * max(N, N_proj)
    fe_r, pr_r, ang_sq, ang_ft = [], [], [], []
    for L in ce.layers:
        fe_r.append([radial_integral(L.ring, lambda r, p=p: L.ring.profile(r) ** 2 * r ** p, rule.radial_order) for p in range(top + 1)])
        pr_r.append([radial_integral(L.ring, lambda r, p=p: L.ring.profile(r) * r ** p, rule.radial_order) for p in range(top + 1)])
        ang_sq.append(angular_integral(L.arcs, lambda t: L.arcs.profile(t) ** 2, rule.angular_order).real)
        ang_ft.append({d: angular_integral(L.arcs, lambda t, d=d: L.arcs.profile(t) * np.exp(2j * math.pi * d * t), rule.angular_order)
                       for d in range(-max(N, N_proj), max(N, N_proj) + 1)})

    def c1(p):  # moment(2p) of PowerWeight(1)
        return 1.0 / (p + 1)

    box = list(iproduct(range(N + 1), repeat=n))
    pbox = list(iproduct(range(N_proj + 1), repeat=n))
    fe_sum = hk_sum = 0.0
    for m in box:
        cm = math.prod(c1(x) for x in m)
        fm = sum(math.prod(fe_r[i][2 * x] * ang_sq[i] for x in m) for i in range(ce.K))
        proj = 0.0
        for l in pbox:
            val = sum(math.prod(pr_r[i][mj + lj] * ang_ft[i][mj - lj] for mj, lj in zip(m, l)) for i in range(ce.K))
            proj += abs(val) ** 2 / math.prod(c1(x) for x in l)
        fe_sum += fm / cm
        hk_sum += (fm - proj) / cm
    return HSChain(hk_sum, fe_sum, hs_sum_check(ce, rule).estimate)


# ---------------------------------------------------------------------------
# quasi-homogeneous parts of f


def q_matrix(ce: CounterexampleSymbol, s_list: Sequence[Sequence[int]], points, rule: QuadratureRule | None = None) -> np.ndarray:
    """``Q_s(f)(z) = int_{T^n} f(z zeta) conj(zeta)^s dsigma`` for every ``s`` and point.

    The torus integral is a tensor Gauss rule over the arcs that the active
    layer occupies after rotating by ``arg z``; points in no ring give 0.
    Returns shape ``(len(s_list), len(points))``.
    """
    rule = rule or ce.rule
    S = np.asarray(s_list, dtype=float).reshape(-1, ce.n)
    pts = np.atleast_2d(np.asarray(points, dtype=complex))
    out = np.zeros((len(S), len(pts)), dtype=complex)
    for idx, z in enumerate(pts):
        k = ce.layer_of(np.abs(z))
        if k is None:
            continue
        arcs = ce.layers[k - 1].arcs
        phase = np.angle(z) / TWO_PI
        rules = [composite_gauss(rule.angular_order, arcs.breakpoints(phase[j])) for j in range(ce.n)]
        theta, w = tensor_rule(rules)
        vals = w * ce.evaluate(z[None, :] * np.exp(2j * math.pi * theta))
        out[:, idx] = np.exp(-2j * math.pi * (S @ theta.T)) @ vals
    return out


def q_values(ce: CounterexampleSymbol, s: Sequence[int], points, rule: QuadratureRule | None = None) -> np.ndarray:
    return q_matrix(ce, [s], points, rule)[0]


def profile_grid(ce: CounterexampleSymbol, per_ring: int = 4, angles: int = 2, seed: int = 0) -> np.ndarray:
    """Points whose moduli sit inside each ring box, plus points straddling two rings."""
    rng = np.random.default_rng(seed)
    rows = []
    for L in ce.layers:
        a, b = float(L.ring.inner), float(L.ring.outer)
        ts = a + (b - a) * (np.arange(1, per_ring + 1) / (per_ring + 1))
        for moduli in iproduct(ts, repeat=ce.n):
            for _ in range(angles):
                rows.append(np.array(moduli) * np.exp(TWO_PI * 1j * rng.random(ce.n)))
    for L1, L2 in zip(ce.layers, ce.layers[1:]):
        m1 = float(sum(L1.ring.plateau)) / 2
        m2 = float(sum(L2.ring.plateau)) / 2
        moduli = np.full(ce.n, m1)
        moduli[-1] = m2
        rows.append(moduli * np.exp(TWO_PI * 1j * rng.random(ce.n)))
    return np.array(rows)


def _profile_rows(ce, pts, qs, q0, k0_values):
    moduli_max = np.abs(pts).max(axis=1)
    rows = []
    for k0 in k0_values:
        mask = moduli_max > float(ce.radii[k0 - 1])
        rows.append({
            "k0": k0,
            "threshold": float(ce.radii[k0 - 1]),
            "points": int(mask.sum()),
            "max_abs_Qs": float(np.abs(qs[mask]).max(initial=0.0)),
            "max_Q0": float(q0[mask].real.max(initial=0.0)),
            "bound": 1.0 / k0,
        })
    return rows


def q_profile(ce: CounterexampleSymbol, s: Sequence[int], points, rule: QuadratureRule | None = None,
              k0_values: Sequence[int] | None = None, tol: float = 1e-3) -> dict:
    """Pointwise ``|Q_s| <= Q_0`` and, beyond ring ``k0``, ``Q_0 <= 1/k0``."""
    pts = np.atleast_2d(np.asarray(points, dtype=complex))
    qs, q0 = q_matrix(ce, [s, [0] * ce.n], pts, rule)
    k0_values = list(k0_values or range(2, ce.K + 1))
    rows = _profile_rows(ce, pts, qs, q0, k0_values)
    return {
        "s": list(map(int, s)),
        "values": qs,
        "q0": q0,
        "rows": rows,
        "dominated": bool(np.all(np.abs(qs) <= q0.real + tol)),
        "q0_bounded": all(r["max_Q0"] <= r["bound"] + tol for r in rows),
    }


def plateau_measure(L: Layer, n: int) -> Fraction:
    """Exact measure of the cell where layer ``L`` equals 1."""
    a, b = L.ring.plateau
    radial = b * b - a * a  # PowerWeight(1) has cdf t^2
    return (radial * L.arcs.half_width) ** n


def no_decomposition_witness(ce: CounterexampleSymbol, rule: QuadratureRule | None = None,
                             points=None, max_degree: int = 2, tol: float = 1e-3) -> dict:
    """Checked facts behind non-decomposability.

    (i) every layer has a plateau of positive measure where ``f = 1``, so
    ``f`` does not tend to 0 at the boundary; (ii) the quasi-homogeneous
    parts with ``|s_j| <= max_degree`` decay beyond ring ``k0``.
    """
    rule = rule or ce.rule
    pts = profile_grid(ce) if points is None else points
    plateaus = []
    for L in ce.layers:
        a, b = L.ring.plateau
        meas = plateau_measure(L, ce.n)
        c, h = float(L.arcs.center), float(L.arcs.half_width)
        rng = np.random.default_rng(L.k)
        r = float(a) + (float(b) - float(a)) * rng.random((64, ce.n))
        th = c + h * (rng.random((64, ce.n)) - 0.5)
        on = ce.evaluate(r * np.exp(TWO_PI * 1j * th))
        plateaus.append({
            "k": L.k,
            "radial": [format_real(a), format_real(b)],
            "angular_half_width": format_real(L.arcs.half_width / 2),
            "measure": format_real(meas),
            "measure_float": float(meas),
            "f_equals_one": bool(np.all(on == 1.0)),
        })
    pts = np.atleast_2d(np.asarray(pts, dtype=complex))
    s_list = list(iproduct(range(-max_degree, max_degree + 1), repeat=ce.n))
    Q = q_matrix(ce, s_list + [(0,) * ce.n], pts, rule)
    q0 = Q[-1]
    k0_values = list(range(2, ce.K + 1))
    rows0 = _profile_rows(ce, pts, q0, q0, k0_values)
    table = []
    dominated = True
    for s, qs in zip(s_list, Q[:-1]):
        dominated &= bool(np.all(np.abs(qs) <= q0.real + tol))
        for row in _profile_rows(ce, pts, qs, q0, k0_values):
            table.append({"s": list(s), **row})
    bounded = all(r["max_Q0"] <= r["bound"] + tol for r in rows0)
    return {
        "plateaus": plateaus,
        "plateaus_positive": all(p["measure_float"] > 0 and p["f_equals_one"] for p in plateaus),
        "decay_table": table,
        "dominated_by_q0": bool(dominated),
        "q0_bounded": bounded,
    }
