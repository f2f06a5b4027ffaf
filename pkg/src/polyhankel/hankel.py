"""Hankel operators with polynomial symbols, computed in the monomial basis.

Everything here is a finite sum of monomial pairings

    <z^a zbar^b, z^c zbar^d> = [a + d == b + c] * prod_j moment_j(a_j + b_j + c_j + d_j),

so in exact mode all results are exact. Normalised quantities carry a
factor ``1/sqrt(c_m c_k)`` and are returned as :class:`RootScalar`.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product as iproduct
from typing import NamedTuple, Sequence

import numpy as np

from . import numeric
from .moments import ProductMeasure, c_index
from .numeric import Gaussian, RootScalar, is_exact, to_scalar
from .symbols import (
    BoundaryPart,
    QuasiPart,
    Symbol,
    boundary_parts,
    boundary_vanishes,
    madd,
    model_monomial,
    msub,
    quasi_decompose,
    quasi_part,
    succeq,
)


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True)
class IndexBox:
    """The multi-indices ``{0..N}^n`` in lexicographic order (last coordinate fastest)."""

    n: int
    N: int
    indices: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1 or self.N < 0:
            raise ValueError("IndexBox needs n >= 1 and N >= 0")
        object.__setattr__(self, "indices", tuple(iproduct(range(self.N + 1), repeat=self.n)))

    def __len__(self):
        return (self.N + 1) ** self.n

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, m):
        return len(m) == self.n and all(0 <= x <= self.N for x in m)

    def position(self, m: Sequence[int]) -> int:
        pos = 0
        for x in m:
            pos = pos * (self.N + 1) + x
        return pos


def monomial_pairing(pm: ProductMeasure, a, b, c, d):
    """``<z^a zbar^b, z^c zbar^d>`` in L^2 of the polydisc measure."""
    if not len(a) == len(b) == len(c) == len(d) == pm.n:
        raise DimensionMismatch(f"indices {a}, {b}, {c}, {d} for dimension {pm.n}")
    if madd(a, d) != madd(b, c):
        return to_scalar(0)
    return math.prod((f.moment(a[j] + b[j] + c[j] + d[j]) for j, f in enumerate(pm.factors)), start=to_scalar(1))


def _moment_product(pm: ProductMeasure, exps):
    return math.prod((f.moment(p) for f, p in zip(pm.factors, exps)), start=to_scalar(1))


def inner(pm: ProductMeasure, f: Symbol, g: Symbol) -> Gaussian:
    """``<f, g> = integral of f * conj(g)``."""
    if f.n != pm.n or g.n != pm.n:
        raise DimensionMismatch("symbol and measure dimensions differ")
    total = Gaussian(to_scalar(0))
    for (u, v), a in f:
        for (u2, v2), b in g:
            p = monomial_pairing(pm, u, v, u2, v2)
            if p:
                total = total + a * b.conjugate() * p
    return total


def norm2(pm: ProductMeasure, f: Symbol):
    return inner(pm, f, f).re


def _shifted(f: Symbol, m):
    """Terms of ``f z^m`` as ``(u + m, v, a, s)`` with ``s = u - v``."""
    return [(madd(u, m), v, a, msub(u, v)) for (u, v), a in f]


def _project_raw(pm: ProductMeasure, f: Symbol, m) -> dict:
    """``{k: <f z^m, z^k>}`` for the finitely many ``k >= 0`` that occur."""
    out: dict = {}
    for um, v, a, s in _shifted(f, m):
        k = madd(m, s)
        if succeq(k):
            out[k] = out.get(k, Gaussian(to_scalar(0))) + a * _moment_product(pm, madd(madd(um, v), k))
    return out


def project_fe(pm: ProductMeasure, f: Symbol, m: Sequence[int]) -> dict:
    """Coefficients ``{k: <f e_m, e_k>}`` of the Bergman projection of ``f e_m``.

    Values are :class:`RootScalar` so their squared magnitudes stay rational.
    """
    m = tuple(m)
    cm = c_index(pm, m)
    return {k: RootScalar(a, 1 / (cm * c_index(pm, k))) for k, a in _project_raw(pm, f, m).items() if a}


def fe_norm2(pm: ProductMeasure, f: Symbol, m: Sequence[int]):
    """``||f e_m||^2``."""
    m = tuple(m)
    total = to_scalar(0)
    terms = _shifted(f, m)
    for u1, v1, a1, s1 in terms:
        for u2, v2, a2, s2 in terms:
            if s1 == s2:
                total += (a1 * a2.conjugate()).re * _moment_product(pm, madd(madd(u1, v1), madd(u2, v2)))
    return total / c_index(pm, m)


def hankel_norm2(pm: ProductMeasure, f: Symbol, m: Sequence[int]):
    """``||H_f e_m||^2``, the Gram diagonal at ``m``, without building the matrix."""
    m = tuple(m)
    proj = sum((a.abs2() / c_index(pm, k) for k, a in _project_raw(pm, f, m).items()), to_scalar(0))
    return fe_norm2(pm, f, m) - proj / c_index(pm, m)


@dataclass(frozen=True)
class HankelGram:
    """``G[m, k] = <H_f e_m, H_f e_k>`` over an index box.

    ``raw`` holds the unnormalised entries ``<H_f z^m, H_f z^k>`` that are
    nonzero; every other cell is exactly zero. ``norms`` maps ``m`` to ``c_m``.
    """

    pm: ProductMeasure
    symbol: Symbol
    box: IndexBox
    raw: dict
    norms: dict
    mode: str

    def entry(self, m, k):
        m, k = tuple(m), tuple(k)
        a = self.raw.get((m, k), Gaussian(to_scalar(0)))
        if self.mode == numeric.FLOAT:
            return complex(a) / math.sqrt(self.norms[m] * self.norms[k])
        return RootScalar(a, 1 / (self.norms[m] * self.norms[k]))

    def diagonal(self) -> list:
        zero = Gaussian(to_scalar(0)) if self.mode == numeric.EXACT else Gaussian(0.0)
        return [self.raw.get((m, m), zero).re / self.norms[m] for m in self.box]

    def offdiagonal(self) -> dict:
        """Stored off-diagonal raw entries (exactly zero cells are never stored)."""
        return {key: a for key, a in self.raw.items() if key[0] != key[1]}

    def is_diagonal(self, tol: float = 0.0) -> bool:
        return all(a.is_zero(tol) for a in self.offdiagonal().values())

    def is_hermitian(self, tol: float = 0.0) -> bool:
        zero = Gaussian(0)
        for (m, k), a in self.raw.items():
            b = self.raw.get((k, m), zero)
            if not (a - b.conjugate()).is_zero(tol):
                return False
        return True

    def is_zero(self) -> bool:
        return all(not a for a in self.raw.values())

    def trace(self):
        return sum(self.diagonal(), to_scalar(0) if self.mode == numeric.EXACT else 0.0)

    def to_numpy(self) -> np.ndarray:
        idx = self.box.indices
        out = np.zeros((len(idx), len(idx)), dtype=complex)
        for (m, k), a in self.raw.items():
            i, j = self.box.position(m), self.box.position(k)
            out[i, j] = complex(a) / math.sqrt(float(self.norms[m]) * float(self.norms[k]))
        return out

    def cells(self):
        """All ``(m, k, value)`` in box order, zeros included."""
        for m in self.box:
            for k in self.box:
                yield m, k, self.entry(m, k)


def _gram_fast(pm: ProductMeasure, f: Symbol, box: IndexBox) -> dict:
    # f z^m lives in the quasi-degrees m + s_t, so <f z^m, f z^m'> needs
    # m + s_t == m' + s_t'; and P(f z^m) only has components z^(m + s_t).
    zero = Gaussian(to_scalar(0))
    raw: dict = {}
    terms = [(u, v, a, msub(u, v)) for (u, v), a in f]
    for m in box:
        for u1, v1, a1, s1 in terms:
            for u2, v2, a2, s2 in terms:
                m2 = madd(m, msub(s1, s2))
                if m2 not in box:
                    continue
                val = a1 * a2.conjugate() * _moment_product(pm, madd(madd(madd(u1, m), v1), madd(madd(u2, m2), v2)))
                raw[(m, m2)] = raw.get((m, m2), zero) + val
    proj = {m: _project_raw(pm, f, m) for m in box}
    sources: dict = {}
    for m, comp in proj.items():
        for k in comp:
            sources.setdefault(k, []).append(m)
    for k, ms in sources.items():
        ck = c_index(pm, k)
        for m in ms:
            for m2 in ms:
                val = proj[m][k] * proj[m2][k].conjugate() / ck
                raw[(m, m2)] = raw.get((m, m2), zero) - val
    return raw


def _gram_row(args):
    pm, f, box, m, mode = args
    with numeric.numeric_mode(mode):
        row = {}
        pm_ = _project_raw(pm, f, m)
        for k in box:
            val = Gaussian(to_scalar(0))
            for (u1, v1), a1 in f:
                for (u2, v2), a2 in f:
                    p = monomial_pairing(pm, madd(u1, m), v1, madd(u2, k), v2)
                    if p:
                        val = val + a1 * a2.conjugate() * p
            pk = _project_raw(pm, f, k)
            for j, aj in pm_.items():
                if j in pk:
                    val = val - aj * pk[j].conjugate() / c_index(pm, j)
            row[k] = val
        return m, row


def _gram_dense(pm: ProductMeasure, f: Symbol, box: IndexBox, workers: int | None) -> dict:
    mode = numeric.get_mode()
    jobs = [(pm, f, box, m, mode) for m in box]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(_gram_row, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        rows = [_gram_row(j) for j in jobs]
    return {(m, k): val for m, row in rows for k, val in row.items()}


def hankel_gram(pm: ProductMeasure, f: Symbol, box: IndexBox, method: str = "fast", workers: int | None = None) -> HankelGram:
    """Gram matrix of ``H_f`` on the truncated basis ``{e_m : m in box}``.

    Projections are taken in the full space, so entries carry no truncation
    error. ``method="dense"`` evaluates the pairing formula on every cell and
    serves as an independent check of the default sparse assembly;
    ``workers`` parallelises the dense fill over rows.
    """
    if f.n != pm.n or box.n != pm.n:
        raise DimensionMismatch("symbol, measure and box dimensions differ")
    if method == "fast":
        raw = _gram_fast(pm, f, box)
    elif method == "dense":
        raw = _gram_dense(pm, f, box, workers)
    else:
        raise ValueError(f"unknown method {method!r}")
    if is_exact():
        raw = {key: a for key, a in raw.items() if a}
    norms = {m: c_index(pm, m) for m in box}
    return HankelGram(pm, f, box, raw, norms, numeric.get_mode())


def lambda_closed_form(pm: ProductMeasure, fs: QuasiPart, m: Sequence[int]):
    """Eigenvalue of ``H_f* H_f`` at ``e_m`` for a quasi-homogeneous polynomial.

    The radial profile is ``sum a t^(u+v)``. When ``m + s >= 0`` the rank-one
    term ``|int f t^(2m+s)|^2 / (c_m c_(m+s))`` is subtracted.
    """
    m = tuple(m)
    s = tuple(fs.s)
    profile = [(madd(u, v), a) for (u, v), a in fs.symbol]
    two_m = madd(m, m)
    full = Gaussian(to_scalar(0))
    for w1, a1 in profile:
        for w2, a2 in profile:
            full = full + a1 * a2.conjugate() * _moment_product(pm, madd(madd(w1, w2), two_m))
    cm = c_index(pm, m)
    lam = full.re / cm
    ms = madd(m, s)
    if succeq(ms):
        cross = Gaussian(to_scalar(0))
        for w, a in profile:
            cross = cross + a * _moment_product(pm, madd(madd(w, two_m), s))
        lam -= cross.abs2() / (cm * c_index(pm, ms))
    return lam


def decay_sweep(pm: ProductMeasure, fs: QuasiPart, path: Sequence) -> list:
    return [lambda_closed_form(pm, fs, m) for m in path]


def diagonal_sweep(pm: ProductMeasure, f: Symbol, path: Sequence) -> list:
    """``||H_f e_m||^2`` along a path, for any polynomial symbol."""
    return [hankel_norm2(pm, f, m) for m in path]


def decay_limit(pm: ProductMeasure, fs: QuasiPart, frozen: dict):
    """Exact limit of :func:`decay_sweep` when all non-frozen coordinates tend to infinity.

    Driving a coordinate to infinity evaluates the radial profile at ``t_j = 1``
    in that coordinate, so the limit is the closed-form eigenvalue of the
    symbol reduced to the frozen coordinates.
    """
    J = sorted(frozen)
    n = pm.n
    if not J:
        return to_scalar(0)
    s = fs.s
    sub = ProductMeasure(tuple(pm.factors[j] for j in J))
    reduced = Symbol(len(J), [((tuple(u[j] for j in J), tuple(v[j] for j in J)), a) for (u, v), a in fs.symbol])
    return lambda_closed_form(sub, QuasiPart(tuple(s[j] for j in J), reduced), tuple(frozen[j] for j in J))


class HSBound(NamedTuple):
    fe_sum: object
    hankel_sum: object


def hs_norm_upper_bound(pm: ProductMeasure, f: Symbol, box: IndexBox) -> HSBound:
    """Box partial sums of ``||f e_m||^2`` and of ``||H_f e_m||^2``; the second never exceeds the first."""
    fe = sum((fe_norm2(pm, f, m) for m in box), to_scalar(0))
    hk = sum((hankel_norm2(pm, f, m) for m in box), to_scalar(0))
    tol = 0 if is_exact() else numeric.DEFAULT_FLOAT_TOL * max(1.0, abs(float(fe)))
    assert hk <= fe + tol, f"Hankel sum {hk} exceeds multiplication sum {fe}"
    return HSBound(fe, hk)


def _power_iteration(A: np.ndarray, iters: int, tol: float) -> float:
    """Largest eigenvalue of a Hermitian matrix, estimated from below."""
    rng = np.random.default_rng(0)
    x = rng.standard_normal(A.shape[0]) + 0j
    x /= np.linalg.norm(x)
    lam = 0.0
    for _ in range(iters):
        y = A @ x
        ny = np.linalg.norm(y)
        if ny == 0:
            return 0.0
        new = float(np.real(np.vdot(x, y)))
        x = y / ny
        if abs(new - lam) <= tol * max(1.0, abs(new)):
            return new
        lam = new
    return lam


def min_eigenvalue(G: np.ndarray, iters: int = 5000, tol: float = 1e-13, block: int = 8) -> float:
    """Smallest eigenvalue of a Hermitian matrix by shifted block power iteration.

    Iterates ``X <- (shift I - H) X`` on a block of ``block`` vectors with a
    Rayleigh-Ritz step each time; the shift is a power-iteration estimate of
    the top of the spectrum. Stops once the smallest Ritz value has moved by
    less than ``tol`` (relative to ``shift``) over 25 consecutive steps.
    """
    H = (G + G.conj().T) / 2
    dim = H.shape[0]
    if dim == 0 or not np.any(H):
        return 0.0
    top = abs(_power_iteration(H, 2000, 1e-12))
    shift = 1.01 * top + float(np.abs(H).max())
    A = shift * np.eye(dim) - H
    k = min(dim, block)
    rng = np.random.default_rng(0)
    X, _ = np.linalg.qr(rng.standard_normal((dim, k)) + 0j)
    history = []
    for _ in range(iters):
        X, _ = np.linalg.qr(A @ X)
        ritz = np.linalg.eigvalsh(X.conj().T @ H @ X)
        history.append(float(ritz[0]))
        if len(history) > 25 and abs(history[-1] - history[-26]) <= tol * shift:
            break
    return history[-1]


# ---------------------------------------------------------------------------
# compactness certificate

ALWAYS_COMPACT_DIM1 = "always_compact_dim1"
COMPACT = "compact"
NOT_COMPACT = "not_compact"


@dataclass(frozen=True)
class CompactnessVerdict:
    kind: str
    h: Symbol | None = None
    g: Symbol | None = None
    witness_s: tuple | None = None
    witness_part: BoundaryPart | None = None

    @property
    def compact(self) -> bool:
        return self.kind != NOT_COMPACT

    def to_json(self) -> dict:
        part = self.witness_part.label if self.witness_part else None
        s = list(self.witness_s) if self.witness_s is not None else None
        return {
            "verdict": self.kind,
            "witness_s": s,
            "witness_part": part,
            "s": s,
            "part": part,
            "h": self.h.to_literal() if self.h is not None else None,
            "g": self.g.to_literal() if self.g is not None else None,
        }


def compactness_certificate(pm: ProductMeasure, f: Symbol) -> CompactnessVerdict:
    """Decide compactness of ``H_f`` for a polynomial symbol.

    For ``n >= 2`` each quasi-part ``f_s`` must agree on every boundary part
    with its model monomial; then ``f = h + g`` with ``h`` holomorphic and
    ``g`` vanishing on the whole boundary. The first failing ``(s, W)`` is
    reported otherwise, in increasing ``s`` and :func:`boundary_parts` order.
    """
    if f.n != pm.n:
        raise DimensionMismatch("symbol and measure dimensions differ")
    pm.validate()
    if pm.n == 1:
        return CompactnessVerdict(ALWAYS_COMPACT_DIM1)
    parts = boundary_parts(pm.n)
    h = Symbol.zero(pm.n)
    for s, fs in quasi_decompose(f).items():
        hs = model_monomial(fs)
        diff = fs.symbol - hs
        for W in parts:
            if not boundary_vanishes(diff, W):
                return CompactnessVerdict(NOT_COMPACT, witness_s=s, witness_part=W)
        h = h + hs
    return CompactnessVerdict(COMPACT, h=h, g=f - h)


class ObstructionPath(NamedTuple):
    frozen: dict
    driven: tuple
    start: int


def obstruction_path(f: Symbol, verdict: CompactnessVerdict) -> ObstructionPath:
    """Path family along which the witness quasi-part's eigenvalues stay away from 0.

    If ``s`` has a negative entry ``s_p`` and ``f_s(1,...,1) != 0``, freeze
    ``m_p = 0`` and drive the rest. Otherwise freeze the disc coordinates of
    the witness part at ``max(0, -s_j)`` and drive the pinned ones.
    """
    if verdict.kind != NOT_COMPACT:
        raise ValueError("obstruction paths exist only for non-compact verdicts")
    s = verdict.witness_s
    fs = quasi_part(f, s)
    negative = [j for j, x in enumerate(s) if x < 0]
    if negative and fs.symbol.corner_value():
        frozen = {negative[0]: 0}
    else:
        frozen = {j: max(0, -s[j]) for j in verdict.witness_part.disc_coords}
    driven = tuple(j for j in range(f.n) if j not in frozen)
    start = max([1] + [-s[j] for j in driven])
    return ObstructionPath(frozen, driven, start)


def path_points(n: int, frozen: dict, driven: Sequence[int], start: int, stop: int, step: int = 1) -> list:
    out = []
    for t in range(start, stop + 1, step):
        out.append(tuple(frozen.get(j, t if j in driven else 0) for j in range(n)))
    return out


class PathSpecError(ValueError):
    pass


def parse_path(spec: str, n: int) -> list:
    """Parse ``"freeze:1=0;drive:2..50"`` style path specs (1-based coordinates).

    ``drive:[J,K=]LO..HI[:STEP]`` moves the named coordinates (default: all
    coordinates not frozen) together from LO to HI; coordinates neither
    frozen nor driven stay at 0.
    """
    frozen: dict = {}
    driven = None
    rng = None
    for seg in filter(None, (x.strip() for x in spec.replace(" ", "").split(";"))):
        kind, _, body = seg.partition(":")
        try:
            if kind == "freeze":
                for item in body.split(","):
                    j, _, val = item.partition("=")
                    frozen[int(j) - 1] = int(val)
            elif kind == "drive":
                coords, eq, span = body.rpartition("=")
                if eq:
                    driven = tuple(int(j) - 1 for j in coords.split(","))
                span, _, step = span.partition(":")
                lo, _, hi = span.partition("..")
                rng = (int(lo), int(hi), int(step) if step else 1)
            else:
                raise PathSpecError(f"unknown path segment {seg!r}")
        except ValueError as exc:
            if isinstance(exc, PathSpecError):
                raise
            raise PathSpecError(f"bad path segment {seg!r}") from exc
    if rng is None:
        raise PathSpecError("path needs a drive segment")
    if driven is None:
        driven = tuple(j for j in range(n) if j not in frozen)
    if any(not 0 <= j < n for j in list(frozen) + list(driven)):
        raise PathSpecError(f"coordinate out of range for dimension {n}")
    if any(v < 0 for v in frozen.values()) or rng[0] < 0 or rng[2] < 1:
        raise PathSpecError("path indices must be nonnegative with positive step")
    if rng[1] < rng[0]:
        raise PathSpecError(f"empty drive range {rng[0]}..{rng[1]}")
    return path_points(n, frozen, driven, rng[0], rng[1], rng[2])
