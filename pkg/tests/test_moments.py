import threading
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polyhankel import numeric
from polyhankel.moments import (
    Atomic,
    InvalidParameter,
    NotProbability,
    PowerWeight,
    ProductMeasure,
    SupportGap,
    TailIncomplete,
    c_index,
    kernel_diag,
    kernel_diag_bruteforce,
    kernel_diag_closed_form,
    validate,
)


def _gauss_moment(beta, p, q=40):
    x, w = np.polynomial.legendre.leggauss(q)
    t = 0.5 * (x + 1)
    return float(np.sum(0.5 * w * (beta + 1) * t ** beta * t ** p))


# --- examples ---------------------------------------------------------------


def test_power_weight_moments():
    mu = PowerWeight(1)
    assert mu.moment(0) == 1
    assert mu.moment(2) == Fraction(1, 2)
    assert float(mu.moment(2)) == pytest.approx(_gauss_moment(1, 2), abs=1e-14)


def test_atomic_moment_is_weighted_sum():
    mu = Atomic(((Fraction(1, 2), Fraction(1, 2)), (Fraction(3, 4), Fraction(1, 2))))
    assert mu.moment(2) == Fraction(13, 32)


def test_validate_power_weight():
    assert validate(PowerWeight(1)) == PowerWeight(1)
    with pytest.raises(InvalidParameter):
        validate(PowerWeight(-1))
    with pytest.raises(InvalidParameter):
        validate(PowerWeight(Fraction(1, 2)))


def test_single_atom_has_support_gap():
    with pytest.raises(SupportGap):
        validate(Atomic(((Fraction(1, 2), Fraction(1)),)))


def test_weights_must_sum_to_one():
    with pytest.raises(NotProbability):
        validate(Atomic(((Fraction(1, 2), Fraction(1, 3)), (Fraction(3, 4), Fraction(1, 3)))))


def test_invalid_atoms():
    with pytest.raises(InvalidParameter):
        validate(Atomic(()))
    with pytest.raises(InvalidParameter):
        validate(Atomic(((Fraction(1), Fraction(1)),)))
    with pytest.raises(InvalidParameter):
        validate(Atomic(((Fraction(1, 2), Fraction(-1)), (Fraction(3, 4), Fraction(2)))))


def _geometric_truncation(K, renormalize):
    pts = [1 - 2.0 ** -k for k in range(1, K + 1)]
    ws = [2.0 ** -k for k in range(1, K + 1)]
    return Atomic.truncated_sequence(pts, ws, renormalize=renormalize)


def test_truncated_atomic_policy():
    mu = _geometric_truncation(20, renormalize=True)
    with pytest.raises(TailIncomplete):
        validate(mu)
    with numeric.numeric_mode(numeric.FLOAT):
        assert validate(mu) is mu
        with pytest.raises(NotProbability):
            validate(_geometric_truncation(20, renormalize=False))


def test_c_index_examples():
    assert c_index(ProductMeasure.power_weight(1), (3,)) == Fraction(1, 4)
    pm = ProductMeasure.power_weight(2)
    assert c_index(pm, (0, 0)) == 1
    assert c_index(pm, (1, 2)) == Fraction(1, 6)
    with pytest.raises(ValueError):
        c_index(pm, (1,))


def test_kernel_at_origin():
    for pm in (ProductMeasure.power_weight(1), ProductMeasure.power_weight(3, 2)):
        for N in (0, 3, 10):
            assert kernel_diag(pm, [0] * pm.n, N) == 1


def test_kernel_one_dim_limit():
    pm = ProductMeasure.power_weight(1)
    # oracle: partial sums of sum (m+1) x^m at x = 1/4, run until stable
    x, total, m = 0.25, 0.0, 0
    while True:
        nxt = total + (m + 1) * x ** m
        if nxt == total:
            break
        total, m = nxt, m + 1
    assert total == pytest.approx(16 / 9, rel=1e-15)
    assert kernel_diag_closed_form(pm, [Fraction(1, 2)]) == Fraction(16, 9)
    assert float(kernel_diag(pm, [Fraction(1, 2)], 60)) == pytest.approx(16 / 9, rel=1e-14)


def test_kernel_product_structure():
    pm = ProductMeasure.power_weight(2)
    r = [Fraction(1, 2), Fraction(1, 2)]
    assert kernel_diag_closed_form(pm, r) == Fraction(16, 9) ** 2
    assert kernel_diag(pm, r, 12) == kernel_diag(ProductMeasure.power_weight(1), r[:1], 12) ** 2


def test_kernel_domain():
    pm = ProductMeasure.power_weight(1)
    with pytest.raises(ValueError):
        kernel_diag(pm, [1], 3)
    with pytest.raises(ValueError):
        kernel_diag_closed_form(pm, [Fraction(3, 2)])


def test_closed_form_needs_power_weight():
    pm = ProductMeasure((Atomic(((Fraction(1, 2), Fraction(1)),)),))
    with pytest.raises(ValueError):
        kernel_diag_closed_form(pm, [Fraction(1, 3)])


def test_float_mode_moments():
    with numeric.numeric_mode(numeric.FLOAT):
        assert PowerWeight(2).moment(3) == pytest.approx(_gauss_moment(2, 3), rel=1e-14)
        assert PowerWeight(1).moment(0.5) == pytest.approx(2 / 2.5)


def test_memo_is_thread_safe():
    mu = PowerWeight(3)
    results = [None] * 8

    def work(i):
        results[i] = [mu.moment(p) for p in range(200)]

    threads = [threading.Thread(target=work, args=(i,)) for i in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    expected = [Fraction(4, p + 4) for p in range(200)]
    assert all(r == expected for r in results)


# --- properties -------------------------------------------------------------

atomic_measures = st.lists(
    st.tuples(st.fractions(0, 1, max_denominator=16).filter(lambda t: t < 1),
              st.fractions(Fraction(1, 16), 1, max_denominator=16)),
    min_size=1, max_size=5,
).map(lambda atoms: Atomic(tuple(atoms)))

radial_measures = st.one_of(st.integers(0, 6).map(PowerWeight), atomic_measures)


@given(radial_measures)
def test_moments_monotone_and_log_convex(mu):
    m = [mu.moment(p) for p in range(67)]
    assert all(x > 0 or isinstance(mu, Atomic) for x in m)
    for p in range(65):
        assert m[p + 1] <= m[p]
        assert m[p] * m[p + 2] >= m[p + 1] ** 2


@given(st.lists(st.integers(0, 4), min_size=1, max_size=3), st.data())
def test_c_index_factorizes(betas, data):
    pm = ProductMeasure(tuple(PowerWeight(b) for b in betas))
    m = data.draw(st.tuples(*[st.integers(0, 8)] * len(betas)))
    one_dim = [c_index(ProductMeasure((f,)), (mj,)) for f, mj in zip(pm.factors, m)]
    assert c_index(pm, m) == np.prod(one_dim)


@given(st.lists(st.fractions(0, Fraction(9, 10), max_denominator=10), min_size=1, max_size=2), st.integers(0, 6))
def test_kernel_factorized_matches_bruteforce(r, N):
    pm = ProductMeasure.power_weight(len(r), 2)
    assert kernel_diag(pm, r, N) == kernel_diag_bruteforce(pm, r, N)


def test_kernel_monotone_on_grid():
    pm = ProductMeasure.power_weight(2)
    grid = [Fraction(k, 10) for k in range(10)]
    for N in (0, 2, 5):
        for a in grid:
            for b in grid[:-1]:
                here = kernel_diag(pm, [a, b], N)
                assert kernel_diag(pm, [a, b], N + 1) >= here
                b2 = grid[grid.index(b) + 1]
                assert kernel_diag(pm, [a, b2], N) >= here


@pytest.mark.parametrize("beta", [0, 1, 2, 5])
def test_closed_form_matches_long_truncation(beta):
    pm = ProductMeasure.power_weight(1, beta)
    with numeric.numeric_mode(numeric.FLOAT):
        for r in (0.1, 0.5, 0.8):
            assert kernel_diag(pm, [r], 400) == pytest.approx(kernel_diag_closed_form(pm, [r]), rel=1e-12)
