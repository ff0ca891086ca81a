"""Half-spectrum (real FFT along y) layout for stacks of real fields.

Heavy space-time work uses standard FFT order with ``rfft`` along the last
axis; this halves memory relative to :class:`~kp5.grid.SpectralField2D`.
Coefficients follow the same convention as :func:`kp5.grid.forward_transform`.
"""
from __future__ import annotations

import numpy as np

from .grid import Grid2D, omega_grid


def freqs(grid: Grid2D):
    xi = 2 * np.pi * np.fft.fftfreq(grid.nx, d=grid.dx)
    eta = 2 * np.pi * np.fft.rfftfreq(grid.ny, d=grid.dy)
    return xi, eta


def _phase(grid: Grid2D):
    j = np.rint(np.fft.fftfreq(grid.nx) * grid.nx).astype(int)
    k = np.arange(grid.ny // 2 + 1)
    return np.where(j % 2 == 0, 1.0, -1.0)[:, None] * np.where(k % 2 == 0, 1.0, -1.0)[None, :]


def forward(grid: Grid2D, values: np.ndarray) -> np.ndarray:
    return np.fft.rfft2(values, axes=(-2, -1)) * (_phase(grid) / (grid.nx * grid.ny))


def inverse(grid: Grid2D, coeffs: np.ndarray) -> np.ndarray:
    return np.fft.irfft2(coeffs * (_phase(grid) * (grid.nx * grid.ny)), s=grid.shape, axes=(-2, -1))


def multiplicity(grid: Grid2D) -> np.ndarray:
    """Weights that turn a half-spectrum sum into a full-spectrum sum."""
    m = np.full(grid.ny // 2 + 1, 2.0)
    m[0] = 1.0
    m[-1] = 1.0
    return np.broadcast_to(m[None, :], (grid.nx, grid.ny // 2 + 1))


def omega(grid: Grid2D) -> np.ndarray:
    xi, eta = freqs(grid)
    return omega_grid(xi[:, None], eta[None, :])


def mesh(grid: Grid2D):
    xi, eta = freqs(grid)
    return np.broadcast_arrays(xi[:, None], eta[None, :])


def mode_index(grid: Grid2D):
    j = np.rint(np.fft.fftfreq(grid.nx) * grid.nx).astype(int)
    k = np.arange(grid.ny // 2 + 1)
    return np.broadcast_arrays(j[:, None], k[None, :])


def dealias(grid: Grid2D, fraction: float = 2.0 / 3.0) -> np.ndarray:
    j, k = mode_index(grid)
    return (np.abs(j) <= fraction * grid.nx / 2) & (np.abs(k) <= fraction * grid.ny / 2)


def trace_y0(coeffs: np.ndarray, grid: Grid2D) -> np.ndarray:
    """x-Fourier coefficients (standard order) of the row y = 0: sum over all eta."""
    # the negative-eta partner of c[j, k] is conj(c[-j, k])
    pos = coeffs[..., :, 1:-1].sum(axis=-1)
    neg = np.roll(np.conj(pos)[..., ::-1], 1, axis=-1)
    return coeffs[..., :, 0] + coeffs[..., :, -1] + pos + neg
