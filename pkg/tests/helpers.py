"""Hypothesis strategies and an independent quadrature oracle.

The oracle integrates polynomial symbols over the polydisc numerically
(Gauss-Legendre in each radius, uniform grid in each angle) and shares no
code with the moment algebra in ``polyhankel``.
"""

from fractions import Fraction
from itertools import product

import numpy as np
from hypothesis import strategies as st

from polyhankel.numeric import Gaussian
from polyhankel.symbols import Symbol

small_rational = st.fractions(min_value=-3, max_value=3, max_denominator=6)


@st.composite
def gaussian_coeff(draw, complex_ok=True):
    re = draw(small_rational)
    im = draw(small_rational) if complex_ok and draw(st.booleans()) else Fraction(0)
    if re == 0 and im == 0:
        re = Fraction(1)
    return Gaussian(re, im)


@st.composite
def symbols(draw, n=None, max_terms=6, max_exp=2, complex_ok=True):
    n = draw(st.integers(1, 3)) if n is None else n
    k = draw(st.integers(1, max_terms))
    exps = st.tuples(*[st.integers(0, max_exp)] * n)
    terms = []
    for _ in range(k):
        terms.append(((draw(exps), draw(exps)), draw(gaussian_coeff(complex_ok))))
    f = Symbol(n, terms)
    return f if not f.is_zero() else Symbol.constant(n)


@st.composite
def quasi_homogeneous(draw, n=None, max_terms=4, max_exp=2, complex_ok=True):
    """A nonzero symbol all of whose terms share one quasi-degree."""
    n = draw(st.integers(1, 3)) if n is None else n
    s = draw(st.tuples(*[st.integers(-max_exp, max_exp)] * n))
    k = draw(st.integers(1, max_terms))
    terms = []
    for _ in range(k):
        v = tuple(draw(st.integers(max(0, -sj), max_exp + max(0, -sj))) for sj in s)
        u = tuple(vj + sj for vj, sj in zip(v, s))
        terms.append(((u, v), draw(gaussian_coeff(complex_ok))))
    f = Symbol(n, terms)
    if f.is_zero():
        v = tuple(max(0, -sj) for sj in s)
        f = Symbol(n, [((tuple(vj + sj for vj, sj in zip(v, s)), v), 1)])
    return s, f


# ---------------------------------------------------------------------------
# quadrature oracle


def _radial_rule(beta, q):
    x, w = np.polynomial.legendre.leggauss(q)
    r = 0.5 * (x + 1.0)
    return r, 0.5 * w * (beta + 1) * r ** beta


def grid(betas, q=24, a=24):
    """Nodes ``z`` of shape (P, n) and weights for the product measure."""
    per = []
    for beta in betas:
        r, w = _radial_rule(beta, q)
        th = 2 * np.pi * np.arange(a) / a
        z = (r[:, None] * np.exp(1j * th[None, :])).ravel()
        per.append((z, (w[:, None] * np.full(a, 1.0 / a)[None, :]).ravel()))
    nodes = np.array(list(product(*[p[0] for p in per])))
    weights = np.prod(np.array(list(product(*[p[1] for p in per]))), axis=1)
    return nodes, weights


def values(f: Symbol, z: np.ndarray) -> np.ndarray:
    out = np.zeros(len(z), dtype=complex)
    for (u, v), a in f:
        term = np.full(len(z), complex(a))
        for j in range(f.n):
            term *= z[:, j] ** u[j] * np.conj(z[:, j]) ** v[j]
        out += term
    return out


def quad_inner(betas, f: Symbol, g: Symbol, **kw) -> complex:
    z, w = grid(betas, **kw)
    return complex(np.sum(w * values(f, z) * np.conj(values(g, z))))


def quad_gram_entry(betas, f: Symbol, m, k, **kw) -> complex:
    """``<H_f e_m, H_f e_k>`` from quadrature, projecting onto enough monomials."""
    n = f.n
    z, w = grid(betas, **kw)
    zm = np.prod(z ** np.array(m), axis=1)
    zk = np.prod(z ** np.array(k), axis=1)
    fv = values(f, z)
    fem, fek = fv * zm, fv * zk
    cm = np.sum(w * np.abs(zm) ** 2).real
    ck = np.sum(w * np.abs(zk) ** 2).real
    total = np.sum(w * fem * np.conj(fek))
    top = max(max(m), max(k)) + 2 * max(sum(u) + sum(v) for (u, v), _ in f) + 1
    for j in product(range(top + 1), repeat=n):
        zj = np.prod(z ** np.array(j), axis=1)
        cj = np.sum(w * np.abs(zj) ** 2).real
        total -= np.sum(w * fem * np.conj(zj)) * np.conj(np.sum(w * fek * np.conj(zj))) / cj
    return complex(total / np.sqrt(cm * ck))
