import numpy as np
import pytest

from polyhankel.quadrature import QuadratureRule, composite_gauss, gauss_legendre, tensor_rule


@pytest.mark.parametrize("q", [1, 4, 16])
def test_gauss_exactness_degree(q):
    x, w = gauss_legendre(q, 0.25, 1.5)
    for d in range(2 * q):
        exact = (1.5 ** (d + 1) - 0.25 ** (d + 1)) / (d + 1)
        assert np.sum(w * x ** d) == pytest.approx(exact, rel=1e-13)


def test_gauss_order_must_be_positive():
    with pytest.raises(ValueError):
        gauss_legendre(0, 0, 1)


def test_composite_handles_kinks():
    x, w = composite_gauss(4, [0.0, 0.3, 1.0])
    assert np.sum(w * np.abs(x - 0.3)) == pytest.approx(0.3 ** 2 / 2 + 0.7 ** 2 / 2, rel=1e-14)
    x, w = composite_gauss(4, [0.5, 0.5])
    assert x.size == 0


def test_tensor_rule():
    r1 = gauss_legendre(3, 0, 1)
    r2 = gauss_legendre(2, 0, 2)
    nodes, w = tensor_rule([r1, r2])
    assert nodes.shape == (6, 2)
    assert w.min() > 0
    assert np.sum(w * nodes[:, 0] ** 2 * nodes[:, 1]) == pytest.approx((1 / 3) * 2, rel=1e-14)


def test_rule_description():
    d = QuadratureRule().describe()
    assert d["radial_order"] == 32 and d["angular_order"] == 16
