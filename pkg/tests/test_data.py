import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kp5.cutoffs import mu
from kp5.data import (HESTENES, CompatibilityError, InitialData, compatibility_check, extend_boundary,
                      extend_initial, extend_initial_values, extended_samples, make_sobolev_sample, zero_boundary)
from kp5.grid import Grid2D, GridError, forward_transform, project_zero_mode
from kp5.norms import TruncationWarning, sobolev_norm

seeds = st.integers(0, 2**31 - 1)


def gauss(x, y):
    return np.exp(-x**2 - y**2)


# ---------------------------------------------------------------- initial data

def test_hestenes_coefficients_match_derivatives():
    # g_e(-y) = sum a_j g(j y) matches g, g', g'' at y = 0 iff sum a_j (-j)^k = 1 for k = 0, 1, 2
    j = np.array([1.0, 2.0, 3.0])
    a = np.linalg.solve(np.vstack([(-j) ** k for k in range(3)]), np.ones(3))
    np.testing.assert_allclose(a, HESTENES, atol=1e-12)


def test_hestenes_value_below_the_boundary():
    g = Grid2D(32, 64, 8.0, 16.0)
    ge = extend_initial_values(InitialData.from_function(g, gauss))
    row = g.iy0 - 4  # y = -1
    assert g.y[row] == -1.0
    expected = 6 * np.exp(-g.x**2 - 1) - 8 * np.exp(-g.x**2 - 4) + 3 * np.exp(-g.x**2 - 9)
    np.testing.assert_allclose(ge[:, row], expected, atol=1e-15)


def test_extension_of_zero():
    g = Grid2D(16, 16, 4.0, 4.0)
    assert not np.any(extend_initial(InitialData(g, np.zeros((16, 8)))).coeffs)


@given(seeds, st.floats(-2, 2))
def test_extension_linear_and_restricts_to_data(seed, c):
    g = Grid2D(16, 16, 4.0, 4.0)
    r = np.random.default_rng(seed)
    a, b = r.standard_normal((2, 16, 8))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        ea = extend_initial_values(InitialData(g, a))
        eb = extend_initial_values(InitialData(g, b))
        np.testing.assert_allclose(extend_initial_values(InitialData(g, a + c * b)), ea + c * eb, atol=1e-12)
    np.testing.assert_array_equal(ea[:, g.iy0:], a)


def test_extension_warns_on_truncation():
    g = Grid2D(16, 16, 4.0, 4.0)
    with pytest.warns(TruncationWarning):
        extend_initial(InitialData(g, np.ones((16, 8))))


def test_half_plane_shape_checked():
    with pytest.raises(GridError):
        InitialData(Grid2D(16, 16, 4.0, 4.0), np.zeros((16, 9)))


@pytest.mark.parametrize("s", [0.3, 1.0, 2.0])
def test_extension_bound_stable_under_rescaling(s):
    g = Grid2D(64, 512, 32.0, 32.0)
    x, y = g.mesh()
    ratios = []
    for width in (0.5, 1.0, 2.0, 4.0):
        fn = lambda x, y: np.exp(-(x**2 + y**2) / width**2)  # noqa: E731
        full = project_zero_mode(forward_transform(g, fn(x, y)))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncationWarning)
            ge = extend_initial(InitialData.from_function(g, fn))
        ratios.append(sobolev_norm(ge, s) / sobolev_norm(full, s))
    assert max(ratios) / min(ratios) < 4


# ---------------------------------------------------------------- boundary data

def test_zero_boundary():
    g = Grid2D(16, 16, 4.0, 4.0)
    bd = zero_boundary(g, np.linspace(0, 1, 33))
    assert bd.is_zero() and bd.band_tail == 0.0


def test_extension_equals_data_on_sample_interval():
    t = np.linspace(0, 1, 65)
    x = np.linspace(-3, 3, 8, endpoint=False)
    h = t[:, None] * np.exp(-x**2)[None, :] * mu(4 * (t - 0.5))[:, None]
    te, ext, t_end = extended_samples(t, h)
    np.testing.assert_array_equal(ext[:65], h)
    assert t_end == pytest.approx(4 / 3) and np.all(ext[te >= t_end] == 0)


def test_extension_is_smooth_continuation_of_polynomials():
    # the three-term reflection reproduces quadratics exactly where the taper is 1
    t = np.linspace(0, 1, 41)
    h = (1 + t - 2 * t**2)[:, None]
    te, ext, _ = extended_samples(t, h)
    near = (te > 1) & (te < 1.01)
    np.testing.assert_allclose(ext[near, 0], (1 + te - 2 * te**2)[near], atol=1e-12)


def _sin_data():
    g = Grid2D(64, 16, 8 * np.pi, 8.0)  # xi = 1 is the mode j = 4
    t = np.linspace(0, 1, 257)
    h = np.exp(-g.x**2)[None, :] * (mu(t) * np.sin(5 * t))[:, None]
    return g, t, h


@pytest.mark.parametrize("beta", [0.0, 0.75])
def test_curve_sample_matches_dense_transform(beta):
    g, t, h = _sin_data()
    bd = extend_boundary(g, t, h, 1.0)
    row = g.ix0 + 4
    value = bd.curve(np.array([row]), np.array([[beta]]))[0, 0]
    # oracle: exact x-transform of the Gaussian times a direct trapezoid sum over the extended samples
    te, ext, _ = extended_samples(t, h)
    w = np.full(te.size, t[1])
    w[0] /= 2
    xt = np.sqrt(np.pi) * np.exp(-0.25)
    oracle = xt * np.sum(w * ext[:, g.ix0] * np.exp(-1j * beta * te))
    assert abs(value - oracle) < 1e-6 * abs(oracle)


def test_nonzero_trace_rejected_for_large_s():
    g, t, h = _sin_data()
    h = h + np.exp(-g.x**2)[None, :]
    with pytest.raises(CompatibilityError, match="compatibility"):
        extend_boundary(g, t, h, 1.0)
    extend_boundary(g, t, h, 0.3)
    extend_boundary(g, t, h, 1.0, subtract_trace=np.exp(-g.x**2)[None, :] * np.ones((t.size, 1)))
    extend_boundary(g, t, h, 1.0, require_zero_trace=False)


def test_boundary_shape_and_time_checks():
    g = Grid2D(16, 16, 4.0, 4.0)
    with pytest.raises(GridError):
        extend_boundary(g, np.linspace(0, 1, 9), np.zeros((9, 8)), 0.3)
    with pytest.raises(GridError):
        extend_boundary(g, np.linspace(0.1, 1, 9), np.zeros((9, 16)), 0.3)


# ---------------------------------------------------------------- compatibility

def test_compatibility_values():
    g = Grid2D(64, 16, 16.0, 8.0)
    t = np.linspace(0, 1, 17)
    gi = InitialData.from_function(g, gauss)
    zero = zero_boundary(g, t)
    assert compatibility_check(gi, zero, 1.0) == pytest.approx((np.pi / 2) ** 0.25, rel=1e-12)
    assert compatibility_check(gi, zero, 0.3) == 0.0
    same = extend_boundary(g, t, np.tile(gi.trace, (17, 1)), 1.0, require_zero_trace=False)
    assert compatibility_check(gi, same, 1.0) == 0.0


# ---------------------------------------------------------------- random samples

def test_sobolev_sample_deterministic_and_projected():
    g = Grid2D(32, 32, 8.0, 8.0)
    a, b = make_sobolev_sample(1.0, 7, g), make_sobolev_sample(1.0, 7, g)
    np.testing.assert_array_equal(a.coeffs, b.coeffs)
    assert not np.any(a.coeffs[g.ix0])
    assert a.hermitian_defect() < 1e-16
    assert not np.array_equal(a.coeffs, make_sobolev_sample(1.0, 8, g).coeffs)


def test_sobolev_sample_magnitude():
    g = Grid2D(32, 32, 8.0, 8.0)
    f = make_sobolev_sample(0.7, 1, g)
    xi, eta = g.freq_mesh()
    z = xi[g.ix0 + 3, g.iy0 - 2] ** 2 + eta[g.ix0 + 3, g.iy0 - 2] ** 2
    expected = (1 + z**2) ** (-(0.7 + 1.1) / 4) / (g.Lx * g.Ly)
    assert abs(f.coeffs[g.ix0 + 3, g.iy0 - 2]) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("s", [0.3, 1.0])
def test_sobolev_sample_sits_at_the_index(s):
    norms = [(sobolev_norm(f, s), sobolev_norm(f, s + 0.5)) for f in
             (make_sobolev_sample(s, 3, Grid2D(n, n, 16.0, 16.0)) for n in (64, 128, 256))]
    lo, hi = np.array(norms).T
    assert hi[-1] / hi[0] > 1.5 and np.all(np.diff(hi) > 0)
    assert lo[-1] / lo[0] < 1.2
