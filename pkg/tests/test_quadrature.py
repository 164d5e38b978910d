
import mpmath
import numpy as np
import pytest
from gmpy2 import mpfr

from mpexpand.precision import workprec
from mpexpand.quadrature import gauss_laguerre, gauss_legendre
from oracles import mp


@pytest.mark.parametrize("m", [1, 5, 40])
def test_legendre_matches_numpy(m):
    x, w = gauss_legendre(m, 128)
    xr, wr = np.polynomial.legendre.leggauss(m)
    assert np.allclose([float(v) for v in x], xr, atol=1e-14)
    assert np.allclose([float(v) for v in w], wr, atol=1e-14)


def test_legendre_integrates_polynomials_exactly():
    m = 30
    x, w = gauss_legendre(m, 256)
    with workprec(256):
        for k in range(0, 2 * m, 7):
            got = sum(wi * xi ** k for xi, wi in zip(x, w))
            exact = mpfr(0) if k % 2 else mpfr(2) / (k + 1)
            assert abs(got - exact) < mpfr(2) ** -240


@pytest.mark.parametrize("alpha", [0, 0.5, -0.5])
def test_laguerre_matches_numpy_family(alpha):
    x, w = gauss_laguerre(12, alpha, 128)
    if alpha == 0:
        xr, wr = np.polynomial.laguerre.laggauss(12)
        assert np.allclose([float(v) for v in x], xr, rtol=1e-13)
        assert np.allclose([float(v) for v in w], wr, rtol=1e-10)
    # moments int x^k x^alpha e^-x = Gamma(k + alpha + 1)
    with mpmath.workprec(256), workprec(128):
        for k in range(0, 24, 5):
            got = mp(sum(wi * xi ** k for xi, wi in zip(x, w)))
            assert abs(got / mpmath.gamma(k + alpha + 1) - 1) < 1e-33


def test_laguerre_high_order_weights_sum():
    x, w = gauss_laguerre(200, 0.5, 192)
    with mpmath.workprec(256), workprec(192):
        total = mp(sum(w))
        assert abs(total - mpmath.gamma(1.5)) < 1e-50
    xs = [float(v) for v in x]
    assert all(a < b for a, b in zip(xs, xs[1:]))


@pytest.mark.parametrize("fn", [gauss_legendre, lambda m, b: gauss_laguerre(m, 0, b)])
def test_rejects_empty_rule(fn):
    with pytest.raises(ValueError):
        fn(0, 64)
