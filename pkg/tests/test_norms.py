import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from kp5.cutoffs import mu
from kp5.grid import DomainError, Grid2D, SpaceTimeField, SpectralField2D, forward_transform, l2_norm, time_window
from kp5.norms import (BoundarySpectrum, NormParams, a_max, beta_weights, boundary_norm_beta, boundary_norm_eta,
                       bracket, sobolev_norm, weighted_spatial_weight, weighted_xsb_norm, xsb_norm)

seeds = st.integers(0, 2**31 - 1)
scales = st.one_of(st.just(0.0), st.floats(1e-3, 4.0), st.floats(-4.0, -1e-3))
MU_L2 = np.sqrt(quad(lambda t: float(mu(t)) ** 2, -2, 2, points=[-1, 1])[0])


def random_field(grid, seed):
    return forward_transform(grid, np.random.default_rng(seed).standard_normal(grid.shape))


# ---------------------------------------------------------------- a_max and parameters

@pytest.mark.parametrize("s, expected", [(1.0, 1 / 3), (0.3, 0.2), (2.4, 0.06)])
def test_a_max(s, expected):
    assert a_max(s) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("s", [0.0, 2.5, -1.0])
def test_a_max_domain(s):
    with pytest.raises(DomainError):
        a_max(s)


def test_norm_params_b1_and_validation():
    assert NormParams(s=1.0, a=0.3).b1 == pytest.approx(0.1)
    NormParams(s=1.0, a=0.25, b=0.45).validate_for_solver()
    for bad in (NormParams(s=0.5), NormParams(s=0.3, a=0.4), NormParams(b=0.5)):
        with pytest.raises(DomainError):
            bad.validate_for_solver()


# ---------------------------------------------------------------- H^s

def test_sobolev_zero():
    g = Grid2D(16, 16, 4.0, 4.0)
    assert sobolev_norm(SpectralField2D(g, np.zeros(g.shape, complex)), 1.3) == 0.0


@given(seeds)
def test_sobolev_s0_is_l2(seed):
    g = Grid2D(16, 32, 4.0, 7.0)
    u = np.random.default_rng(seed).standard_normal(g.shape)
    assert sobolev_norm(forward_transform(g, u), 0.0) == pytest.approx(l2_norm(g, u), rel=1e-10)


def test_sobolev_gaussian():
    g = Grid2D(64, 64, 20.0, 20.0)
    x, y = g.mesh()
    assert sobolev_norm(forward_transform(g, np.exp(-(x**2 + y**2) / 2)), 0.0) == pytest.approx(np.sqrt(np.pi), rel=1e-12)


def test_sobolev_single_mode_weight():
    g = Grid2D(16, 16, 2 * np.pi, 2 * np.pi)
    x, y = g.mesh()
    f = forward_transform(g, np.cos(2 * x + y))
    # two modes of size 1/2 at |zeta|^2 = 5
    expected = np.sqrt(g.Lx * g.Ly * 0.5 * np.sqrt(1 + 25.0) ** 1.5)
    assert sobolev_norm(f, 1.5) == pytest.approx(expected, rel=1e-12)


@given(seeds, scales, st.floats(0, 2.4))
def test_sobolev_homogeneous_and_triangle(seed, c, s):
    g = Grid2D(16, 16, 4.0, 4.0)
    u, v = random_field(g, seed), random_field(g, seed + 1)
    assert sobolev_norm(c * u, s) == pytest.approx(abs(c) * sobolev_norm(u, s), rel=1e-12)
    assert sobolev_norm(u + v, s) <= sobolev_norm(u, s) + sobolev_norm(v, s) + 1e-10


@given(seeds, st.floats(0, 2), st.floats(0.01, 1))
def test_sobolev_monotone_in_s(seed, s, ds):
    u = random_field(Grid2D(16, 16, 4.0, 4.0), seed)
    assert sobolev_norm(u, s + ds) >= sobolev_norm(u, s)


# ---------------------------------------------------------------- X^{s,b}

def modal_field(grid, times, j, k, amp=0.3):
    x, y = grid.mesh()
    xi, eta = 2 * np.pi * j / grid.Lx, 2 * np.pi * k / grid.Ly
    om = xi**5 - eta**2 / xi
    vals = np.array([mu(t) * 2 * amp * np.cos(xi * x + eta * y + om * t) for t in times])
    return SpaceTimeField(grid, times, vals), xi, eta


def test_xsb_zero():
    g = Grid2D(16, 16, 8.0, 8.0)
    t = time_window(2.0, 64)
    assert xsb_norm(SpaceTimeField(g, t, np.zeros((64,) + g.shape)), 1.0, 0.45) == 0.0


@pytest.mark.parametrize("s", [0.0, 1.0, 2.0])
def test_xsb_single_mode_b0(s):
    g = Grid2D(16, 16, 8.0, 8.0)
    t = time_window(2.0, 512)
    u, xi, eta = modal_field(g, t, 1, 2)
    expected = bracket(xi**2 + eta**2) ** (s / 2) * np.sqrt(g.Lx * g.Ly * 2 * 0.3**2) * MU_L2
    assert xsb_norm(u, s, 0.0) == pytest.approx(expected, rel=1e-6)


def test_xsb_single_mode_b1_measures_time_derivative():
    # b = 1 in the interaction picture: ||<sigma> mu_hat||^2 / 2 pi = ||mu||^2 + ||mu'||^2
    g = Grid2D(16, 16, 8.0, 8.0)
    t = time_window(2.0, 1024)
    u, xi, eta = modal_field(g, t, 2, -1)
    tt = np.linspace(-2, 2, 400001)
    dmu2 = np.trapezoid(np.gradient(mu(tt), tt) ** 2, tt)
    expected = np.sqrt(g.Lx * g.Ly * 2 * 0.3**2 * (MU_L2**2 + dmu2))
    assert xsb_norm(u, 0.0, 1.0) == pytest.approx(expected, rel=1e-4)


@given(seeds)
def test_xsb_s0_b0_is_space_time_l2(seed):
    g = Grid2D(16, 16, 4.0, 4.0)
    t = time_window(2.0, 64)
    r = np.random.default_rng(seed)
    v = r.standard_normal((64,) + g.shape)
    v -= v.mean(axis=1, keepdims=True)  # the xi = 0 modes carry no weight
    v *= mu(t)[:, None, None]
    l2 = np.sqrt(g.dx * g.dy * (t[1] - t[0]) * np.sum(v**2))
    assert xsb_norm(SpaceTimeField(g, t, v), 0.0, 0.0) == pytest.approx(l2, rel=1e-10)


@given(seeds, scales)
def test_xsb_homogeneous_and_triangle(seed, c):
    g = Grid2D(16, 16, 4.0, 4.0)
    t = time_window(2.0, 32)
    r = np.random.default_rng(seed)
    a, b = (SpaceTimeField(g, t, mu(t)[:, None, None] * r.standard_normal((32,) + g.shape)) for _ in range(2))
    na, nb, nab = xsb_norm(a, 1.0, 0.45), xsb_norm(b, 1.0, 0.45), xsb_norm(a + b, 1.0, 0.45)
    assert nab <= na + nb + 1e-10
    assert xsb_norm(c * a, 1.0, 0.45) == pytest.approx(abs(c) * na, rel=1e-12)


def test_weighted_zero_and_homogeneity():
    g = Grid2D(16, 16, 8.0, 8.0)
    t = time_window(2.0, 256)
    assert weighted_xsb_norm(SpaceTimeField(g, t, np.zeros((256,) + g.shape)), 1.0, 0.3) == 0.0
    u, _, _ = modal_field(g, t, 1, 1)
    assert weighted_xsb_norm(-2.5 * u, 1.0, 0.3) == pytest.approx(2.5 * weighted_xsb_norm(u, 1.0, 0.3), rel=1e-12)


def test_weighted_single_mode_closed_form():
    # s + a = 3/2 makes the modulation exponent vanish: the norm is the spatial weight times the mode mass
    g = Grid2D(16, 16, 8.0, 8.0)
    t = time_window(2.0, 512)
    u, xi, eta = modal_field(g, t, 3, 2)
    w = np.sqrt(1 + xi**2 + eta**2) ** (0.5 + 0.05) * abs(xi) ** (1.5 / 2 - 0.25)
    expected = w * np.sqrt(g.Lx * g.Ly * 2 * 0.3**2) * MU_L2
    assert weighted_xsb_norm(u, 1.0, 0.5) == pytest.approx(expected, rel=1e-8)
    assert weighted_spatial_weight(0.0, 1.0, 1.0, 0.3) == 0.0


# ---------------------------------------------------------------- boundary norms

def gaussian_spectrum(width=1.0, rate=4.0, centre=0.7, shift=0.0, nxi=96, lx=24.0, nb=2**14, bmax=60.0):
    """Exact transform of ``exp(-(x/width)^2) exp(-rate (t - centre)^2) cos(shift t)``."""
    xi = 2 * np.pi / lx * np.arange(-nxi // 2, nxi // 2)
    beta = np.linspace(-bmax, bmax, nb, endpoint=False)
    gx = np.sqrt(np.pi) * width * np.exp(-(xi * width) ** 2 / 4)

    def gt(b):
        return np.sqrt(np.pi / rate) * np.exp(-b**2 / (4 * rate)) * np.exp(-1j * b * centre)

    gtb = 0.5 * (gt(beta - shift) + gt(beta + shift))
    return BoundarySpectrum(xi, beta, gx[:, None] * gtb[None, :], 2 * np.pi / lx)


def test_boundary_norms_zero():
    spec = gaussian_spectrum().scaled(0.0)
    assert boundary_norm_beta(spec, 1.0) == 0.0
    assert boundary_norm_eta(spec, 1.0) == 0.0


def test_beta_weight_at_unit_point():
    # away from beta = xi^5 no correction applies; squared weight <xi^2 + |xi beta - xi^6|>^s |.|^(1/2) / |xi|
    beta = np.array([2.0, 2.5, 3.0, 3.5])
    for s in (0.3, 1.0, 2.0):
        w = beta_weights(1.0, beta, s)
        assert np.sqrt(w[0] / 0.5) == pytest.approx(5.0 ** (s / 4), rel=1e-14)


CASES = [dict(width=w, rate=r, centre=c, shift=k) for w, r, c, k in
         [(1.0, 4.0, 0.7, 0.0), (0.7, 4.0, 0.5, 0.0), (1.5, 3.0, 0.8, 0.0), (1.0, 6.0, 0.6, 3.0),
          (0.8, 5.0, 0.4, 5.0), (1.2, 4.0, 1.0, 1.5), (0.9, 8.0, 0.5, 0.0), (1.0, 2.5, 0.7, 2.0),
          (1.3, 5.0, 0.3, 4.0), (0.6, 4.0, 0.9, 1.0)]]


@pytest.mark.parametrize("case", CASES)
@pytest.mark.parametrize("s", [0.3, 1.0])
def test_boundary_forms_agree(case, s):
    spec = gaussian_spectrum(**case)
    a, b = boundary_norm_beta(spec, s), boundary_norm_eta(spec, s)
    assert a == pytest.approx(b, rel=1e-4)


def test_boundary_norm_homogeneous():
    spec = gaussian_spectrum()
    for f in (boundary_norm_beta, boundary_norm_eta):
        assert f(spec.scaled(2.0), 1.0) == pytest.approx(2 * f(spec, 1.0), rel=1e-12)


def test_boundary_norm_triangle():
    a, b = gaussian_spectrum(), gaussian_spectrum(width=0.7, shift=3.0)
    ab = BoundarySpectrum(a.xi, a.beta, a.values + b.values, a.dxi)
    assert boundary_norm_beta(ab, 1.0) <= boundary_norm_beta(a, 1.0) + boundary_norm_beta(b, 1.0) + 1e-10


def test_boundary_norm_dominates_sup_in_time():
    # for s > 1/2 the boundary norm controls sup_t ||phi(., t)||_{L^2_x}; x-rescalings keep the ratio bounded
    ratios = []
    for level in range(4):
        wdt = 2.0**-level
        spec = gaussian_spectrum(width=wdt, nxi=96 * 2**level)
        sup = (np.pi / 2) ** 0.25 * np.sqrt(wdt)
        ratios.append(sup / boundary_norm_beta(spec, 1.0))
    assert max(ratios) <= 4 * ratios[0]
