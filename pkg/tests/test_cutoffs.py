import numpy as np
import pytest
from scipy.integrate import quad

from kp5.cutoffs import f_kernel, mu, mu_hat, mu_l2, rho, smooth_step, time_taper


def test_mu_plateau_and_support():
    t = np.linspace(-3, 3, 601)
    m = mu(t)
    assert np.all(m[np.abs(t) <= 1] == 1) and np.all(m[np.abs(t) >= 2] == 0)
    np.testing.assert_array_equal(m, mu(-t))
    assert np.all((m >= 0) & (m <= 1))


def test_rho_and_kernel():
    y = np.linspace(-3, 3, 601)
    assert np.all(rho(y[y >= 0]) == 1) and np.all(rho(y[y <= -2]) == 0)
    np.testing.assert_allclose(f_kernel(y[y >= 0]), np.exp(-y[y >= 0]))
    assert f_kernel(np.array(0.0)) == 1.0
    assert np.all(f_kernel(y[y <= -2]) == 0)


def test_smooth_derivatives_are_bounded():
    t = np.linspace(-2.5, 2.5, 5001)
    d = mu(t)
    for _ in range(4):
        d = np.gradient(d, t)
        assert np.abs(d).max() < 1e4


def test_smooth_step_and_taper():
    assert smooth_step(0, 1, -0.5) == 0 and smooth_step(0, 1, 1.5) == 1
    assert smooth_step(0, 1, 0.5) == pytest.approx(0.5)
    assert time_taper(1.0) == 1.0 and time_taper(1.5) == 0.0


def test_mu_hat_against_quadrature():
    for sigma in (0.0, 0.7, 3.0, 11.0):
        ref = quad(lambda t: float(mu(t)) * np.cos(sigma * t), -2, 2, points=[-1, 1], limit=200)[0]
        assert mu_hat(sigma) == pytest.approx(ref, abs=1e-9)
    assert mu_l2() == pytest.approx(np.sqrt(quad(lambda t: float(mu(t)) ** 2, -2, 2, points=[-1, 1])[0]), rel=1e-9)
