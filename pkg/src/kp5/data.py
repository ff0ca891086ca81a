"""Data preparation: extension of initial data to the plane, time extension and
transforms of boundary data, compatibility at the corner, random test data."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._interp import lagrange4
from .cutoffs import smooth_step
from .grid import DomainError, Grid2D, GridError, SpectralField2D, forward_transform, project_zero_mode, zero_nyquist
from .norms import BoundarySpectrum, TruncationWarning, bracket

HESTENES = (6.0, -8.0, 3.0)


class CompatibilityError(DomainError):
    """Corner compatibility ``g(x, 0) = h(x, 0)`` violated where it is required."""


@dataclass(frozen=True)
class InitialData:
    """Samples of ``g`` on the rows ``y >= 0`` of ``grid``: shape ``(nx, ny//2)``."""

    grid: Grid2D
    g: np.ndarray = field(repr=False)
    s: float = 1.0

    def __post_init__(self):
        if self.g.shape != (self.grid.nx, self.grid.ny // 2):
            raise GridError(f"half-plane samples must have shape {(self.grid.nx, self.grid.ny // 2)}")

    @classmethod
    def from_function(cls, grid: Grid2D, fn, s: float = 1.0) -> "InitialData":
        x = grid.x[:, None]
        y = grid.y[None, grid.iy0:]
        return cls(grid, np.broadcast_to(fn(x, y), (grid.nx, grid.ny // 2)).astype(float), s)

    @classmethod
    def from_field(cls, field: SpectralField2D, s: float = 1.0) -> "InitialData":
        g = field.grid
        return cls(g, field.values()[:, g.iy0:].copy(), s)

    @property
    def trace(self) -> np.ndarray:
        return self.g[:, 0]


def hestenes_reflect(grid: Grid2D, g_half: np.ndarray) -> np.ndarray:
    """Full-grid values with ``g_e(x,-y) = 6 g(x,y) - 8 g(x,2y) + 3 g(x,3y)``; samples past the grid count as 0."""
    ny2 = grid.ny // 2
    out = np.zeros(grid.shape)
    out[:, ny2:] = g_half
    padded = np.zeros((grid.nx, 3 * ny2 + 1))
    padded[:, :ny2] = g_half
    for k in range(1, ny2 + 1):
        out[:, ny2 - k] = sum(a * padded[:, j * k] for a, j in zip(HESTENES, (1, 2, 3)))
    return out


def extend_initial_values(g: InitialData, method: Callable = hestenes_reflect) -> np.ndarray:
    """Grid values of the extension; equal to ``g`` on ``y >= 0``."""
    top = np.max(np.abs(g.g[:, -2:]), initial=0.0)
    peak = np.max(np.abs(g.g), initial=0.0)
    if peak > 0 and top > 1e-8 * peak:
        warnings.warn(f"initial data not small near y = Ly/2 (ratio {top / peak:.2e})", TruncationWarning, stacklevel=2)
    return method(g.grid, g.g)


def extend_initial(g: InitialData, method: Callable = hestenes_reflect) -> SpectralField2D:
    """Extension to the plane as Fourier coefficients, Nyquist modes and ``xi = 0`` removed."""
    return project_zero_mode(zero_nyquist(forward_transform(g.grid, extend_initial_values(g, method))))


# ---------------------------------------------------------------- boundary data

def _x_coeffs(grid: Grid2D, rows: np.ndarray) -> np.ndarray:
    """Symmetric-order x-Fourier coefficients of rows ``(..., nx)``."""
    j = np.arange(-grid.nx // 2, grid.nx // 2)
    c = np.fft.fftshift(np.fft.fft(rows, axis=-1), axes=-1) / grid.nx
    return c * np.where(j % 2 == 0, 1.0, -1.0)


def _x_values(grid: Grid2D, coeffs: np.ndarray) -> np.ndarray:
    j = np.arange(-grid.nx // 2, grid.nx // 2)
    c = coeffs * np.where(j % 2 == 0, 1.0, -1.0)
    return np.fft.ifft(np.fft.ifftshift(c, axes=-1), axis=-1).real * grid.nx


@dataclass(frozen=True)
class BoundaryData:
    """Boundary samples ``h(x, t)`` on ``t in [0, t_last]`` and the transform of
    their smooth time extension cut by ``chi_{t>0}``.

    ``hat[j, m]`` approximates ``int int (h chi)(x,t) e^{-i(xi_j x + beta_m t)} dx dt``
    (symmetric ``xi`` order, ascending ``beta``).
    """

    grid: Grid2D
    times: np.ndarray
    h: np.ndarray = field(repr=False)
    s: float
    trace: np.ndarray = field(repr=False)
    beta: np.ndarray = field(repr=False)
    hat: np.ndarray = field(repr=False)
    t_centre: float
    band_tail: float

    @property
    def dbeta(self) -> float:
        return float(self.beta[1] - self.beta[0])

    @property
    def beta_nyquist(self) -> float:
        return float(-self.beta[0])

    def is_zero(self) -> bool:
        return not np.any(self.hat)

    def curve(self, j: np.ndarray, beta: np.ndarray) -> np.ndarray:
        """Transform at ``(xi_j, beta)`` by cubic interpolation of the demodulated spectrum.

        ``j`` indexes rows of :attr:`hat`; ``beta`` has a leading axis matching ``j``.
        """
        j = np.asarray(j)
        beta = np.asarray(beta, dtype=float)
        demod = self.hat[j] * np.exp(1j * self.beta * self.t_centre)
        val, _ = lagrange4(demod, self.beta[0], self.dbeta, beta)
        return val * np.exp(-1j * beta * self.t_centre)

    def spectrum(self) -> BoundarySpectrum:
        return BoundarySpectrum(self.grid.xi, self.beta, self.hat, 2 * np.pi / self.grid.Lx)


def extended_samples(times: np.ndarray, h: np.ndarray):
    """Smooth extension past the last sample, tapered to zero.

    Reflection ``h(T + r) = 6 h(T - r) - 8 h(T - 2r) + 3 h(T - 3r)`` about the last
    time ``T``, then a cutoff equal to 1 on ``[0, T]`` and 0 beyond ``4T/3``.
    """
    nt = len(times)
    dt = float(times[1] - times[0])
    t_last = float(times[-1])
    t_end = 4.0 * t_last / 3.0
    n_ext = int(np.ceil((t_end - t_last) / dt)) + 1
    out = np.zeros((nt + n_ext,) + h.shape[1:])
    out[:nt] = h
    for r in range(1, n_ext + 1):
        acc = 0.0
        for a, m in zip(HESTENES, (1, 2, 3)):
            idx = nt - 1 - m * r
            if idx >= 0:
                acc = acc + a * h[idx]
        out[nt - 1 + r] = acc
    t = dt * np.arange(nt + n_ext)
    taper = 1.0 - smooth_step(t_last, t_end, t)
    return t, out * taper.reshape((-1,) + (1,) * (h.ndim - 1)), t_end


def extend_boundary(grid: Grid2D, times: np.ndarray, h: np.ndarray, s: float,
                    subtract_trace: np.ndarray | None = None, oversample: int = 16,
                    trace_tol: float = 1e-6, require_zero_trace: bool = True) -> BoundaryData:
    """Build :class:`BoundaryData` from samples ``h[n, m] = h(x_m, t_n)``.

    ``times`` must start at 0 and be uniform.  ``subtract_trace`` is an array of
    the same shape (for instance the trace of the free flow of the initial
    data) subtracted before extension.  For ``s > 1/2`` the remaining trace at
    ``t = 0`` must vanish unless ``require_zero_trace`` is false, which is meant
    for raw data that a solver reduces by ``p`` itself.
    """
    times = np.asarray(times, dtype=float)
    h = np.asarray(h, dtype=float)
    if h.shape != (len(times), grid.nx):
        raise GridError(f"boundary samples must have shape {(len(times), grid.nx)}, got {h.shape}")
    if abs(times[0]) > 1e-12 or len(times) < 8:
        raise GridError("boundary samples must start at t = 0 with at least 8 times")
    raw_trace = h[0].copy()
    phi = h if subtract_trace is None else h - subtract_trace
    tr = float(np.sqrt(grid.dx * np.sum(phi[0] ** 2)))
    if require_zero_trace and s > 0.5 and tr > trace_tol * max(1.0, float(np.sqrt(grid.dx * np.max(np.sum(phi**2, axis=1))))):
        raise CompatibilityError(
            f"for s > 1/2 the boundary data need zero trace at t = 0 (compatibility g|t=0 = h|t=0); "
            f"trace L2 = {tr:.3e}; supply the free-flow trace p via subtract_trace")
    dt = float(times[1] - times[0])
    t, ext, t_end = extended_samples(times, phi)
    w = np.full(len(t), dt)
    w[0] = dt / 2
    cx = _x_coeffs(grid, ext) * grid.Lx * w[:, None]
    cx[:, 0] = 0.0
    n_pad = 1 << int(np.ceil(np.log2(oversample * 4.0 / dt)))
    n_pad = max(n_pad, 2 * len(t))
    spec = np.fft.fft(cx, n=n_pad, axis=0)
    hat = np.fft.fftshift(spec, axes=0).T.copy()
    beta = 2 * np.pi / (n_pad * dt) * np.arange(-n_pad // 2, n_pad // 2)
    e = np.abs(hat) ** 2
    tot = e.sum()
    band_tail = float(e[:, np.abs(beta) > 0.8 * beta[-1]].sum() / tot) if tot > 0 else 0.0
    return BoundaryData(grid, times, h, s, raw_trace, beta, hat, t_end / 2, band_tail)


def zero_boundary(grid: Grid2D, times: np.ndarray, s: float = 1.0) -> BoundaryData:
    return extend_boundary(grid, times, np.zeros((len(times), grid.nx)), s)


def compatibility_check(g: InitialData, h: BoundaryData, s: float) -> float:
    """Grid L2 norm of ``g(., 0) - h(., 0)``; 0 by convention for ``s < 1/2``."""
    if s < 0.5:
        return 0.0
    return float(np.sqrt(g.grid.dx * np.sum((g.trace - h.trace) ** 2)))


def make_sobolev_sample(s: float, seed: int, grid: Grid2D, delta: float = 0.1,
                        max_index: int | None = None, amplitude: float = 1.0,
                        knee: float = 1.0) -> SpectralField2D:
    """Random real field with ``|u_hat| = amplitude * <(xi^2+eta^2)/knee^2>^{-(s+1+delta)/2}`` and random phases.

    ``u_hat = Lx Ly c``.  ``max_index`` restricts the support to ``|j|, |k| < max_index``.
    A ``knee`` below 1 starts the power-law tail at lower frequency; the norms
    it produces are equivalent for any fixed ``knee``.
    """
    if s < 0:
        raise DomainError("make_sobolev_sample requires s >= 0")
    rng = np.random.default_rng(seed)
    noise = forward_transform(grid, rng.standard_normal(grid.shape)).coeffs
    mag = np.abs(noise)
    phase = np.divide(noise, mag, out=np.zeros_like(noise), where=mag > 0)
    xi, eta = grid.freq_mesh()
    c = amplitude * phase * bracket((xi**2 + eta**2) / knee**2) ** (-(s + 1 + delta) / 2) / (grid.Lx * grid.Ly)
    if max_index is not None:
        j, k = grid.mode_index_mesh()
        c[(np.abs(j) >= max_index) | (np.abs(k) >= max_index)] = 0
    return project_zero_mode(zero_nyquist(SpectralField2D(grid, c)))
