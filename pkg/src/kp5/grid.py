"""Periodic grid geometry and the discrete Fourier conventions used throughout.

A field on the grid is written as a Fourier series

    u(x, y) = sum_{j,k} c[j, k] exp(i (xi_j x + eta_k y)),

with grid points ``x_m = -Lx/2 + m dx`` (so ``y = 0`` is a grid row) and
frequencies stored in symmetric order ``xi_j = 2 pi j / Lx``,
``j = -nx/2, ..., nx/2 - 1``.  The continuous Fourier transform is
approximated by ``u_hat(xi, eta) = Lx * Ly * c``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class GridError(ValueError):
    """Raised for malformed grids or arrays that do not match a grid."""


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of a formula."""


@dataclass(frozen=True)
class Grid2D:
    """Uniform periodic grid on ``[-Lx/2, Lx/2) x [-Ly/2, Ly/2)``."""

    nx: int = 128
    ny: int = 128
    Lx: float = 64.0
    Ly: float = 64.0

    def __post_init__(self):
        for name in ("nx", "ny"):
            n = getattr(self, name)
            if int(n) != n or n < 8 or n % 2:
                raise GridError(f"{name} must be an even integer >= 8, got {n}")
        if not (self.Lx > 0 and self.Ly > 0):
            raise GridError("Lx and Ly must be positive")

    @property
    def dx(self) -> float:
        return self.Lx / self.nx

    @property
    def dy(self) -> float:
        return self.Ly / self.ny

    @property
    def x(self) -> np.ndarray:
        return -self.Lx / 2 + self.dx * np.arange(self.nx)

    @property
    def y(self) -> np.ndarray:
        return -self.Ly / 2 + self.dy * np.arange(self.ny)

    @property
    def xi(self) -> np.ndarray:
        return 2 * np.pi / self.Lx * np.arange(-self.nx // 2, self.nx // 2)

    @property
    def eta(self) -> np.ndarray:
        return 2 * np.pi / self.Ly * np.arange(-self.ny // 2, self.ny // 2)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    @property
    def iy0(self) -> int:
        """Row index of ``y = 0``."""
        return self.ny // 2

    @property
    def ix0(self) -> int:
        """Column index of ``xi = 0`` (also of ``x = 0``)."""
        return self.nx // 2

    def mesh(self):
        return np.meshgrid(self.x, self.y, indexing="ij")

    def freq_mesh(self):
        return np.meshgrid(self.xi, self.eta, indexing="ij")

    def mode_index_mesh(self):
        """Integer mode numbers ``(j, k)`` matching :meth:`freq_mesh`."""
        j = np.arange(-self.nx // 2, self.nx // 2)
        k = np.arange(-self.ny // 2, self.ny // 2)
        return np.meshgrid(j, k, indexing="ij")


def _alternating(n: int) -> np.ndarray:
    j = np.arange(-n // 2, n // 2)
    return np.where(j % 2 == 0, 1.0, -1.0)


@dataclass(frozen=True)
class SpectralField2D:
    """Fourier coefficients ``c[j, k]`` of a field on ``grid`` (symmetric order)."""

    grid: Grid2D
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.coeffs.shape != self.grid.shape:
            raise GridError(f"coefficient array {self.coeffs.shape} does not match grid {self.grid.shape}")

    def __add__(self, other: "SpectralField2D") -> "SpectralField2D":
        return SpectralField2D(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField2D") -> "SpectralField2D":
        return SpectralField2D(self.grid, self.coeffs - other.coeffs)

    def __mul__(self, a) -> "SpectralField2D":
        return SpectralField2D(self.grid, a * self.coeffs)

    __rmul__ = __mul__

    def values(self) -> np.ndarray:
        return inverse_transform(self)

    def hermitian_defect(self) -> float:
        """Max of ``|c(-xi,-eta) - conj c(xi,eta)|`` over non-Nyquist modes."""
        c = self.coeffs[1:, 1:]
        return float(np.max(np.abs(c[::-1, ::-1] - np.conj(c)), initial=0.0))


@dataclass(frozen=True)
class SpaceTimeField:
    """Real field sampled on ``grid`` at uniformly spaced ``times``.

    ``values`` has shape ``(nt, nx, ny)``.  Fields produced by the solver live on
    a window containing ``[-2, 2]``, the support of the time cutoff.
    """

    grid: Grid2D
    times: np.ndarray
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        nt = len(self.times)
        if self.values.shape != (nt,) + self.grid.shape:
            raise GridError(f"values shape {self.values.shape} != {(nt,) + self.grid.shape}")
        if nt > 1:
            d = np.diff(self.times)
            if not np.allclose(d, d[0], rtol=1e-9, atol=1e-12):
                raise GridError("times must be uniformly spaced")

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    @property
    def nt(self) -> int:
        return len(self.times)

    def slice_at(self, n: int) -> SpectralField2D:
        return forward_transform(self.grid, self.values[n])

    def index_of(self, t: float) -> int:
        n = int(round((t - self.times[0]) / self.dt))
        if not (0 <= n < self.nt) or abs(self.times[n] - t) > 1e-9 * max(1.0, abs(t)):
            raise GridError(f"t = {t} is not a sample time")
        return n

    def __sub__(self, other: "SpaceTimeField") -> "SpaceTimeField":
        return SpaceTimeField(self.grid, self.times, self.values - other.values)

    def __add__(self, other: "SpaceTimeField") -> "SpaceTimeField":
        return SpaceTimeField(self.grid, self.times, self.values + other.values)

    def __mul__(self, a) -> "SpaceTimeField":
        return SpaceTimeField(self.grid, self.times, a * self.values)

    __rmul__ = __mul__


def time_window(T_w: float = 2.0, nt: int = 512) -> np.ndarray:
    """Periodic sample times ``-T_w + n dt`` on ``[-T_w, T_w)``; ``t = 0`` is sample ``nt/2``."""
    if nt % 2:
        raise GridError("nt must be even")
    return -T_w + (2 * T_w / nt) * np.arange(nt)


def forward_transform(grid: Grid2D, values: np.ndarray) -> SpectralField2D:
    """Exact DFT coefficients of grid samples (any dtype)."""
    values = np.asarray(values)
    if values.shape != grid.shape:
        raise GridError(f"array shape {values.shape} does not match grid {grid.shape}")
    c = np.fft.fftshift(np.fft.fft2(values)) / (grid.nx * grid.ny)
    c *= _alternating(grid.nx)[:, None] * _alternating(grid.ny)[None, :]
    return SpectralField2D(grid, c)


def inverse_transform(field: SpectralField2D, real: bool = True) -> np.ndarray:
    g = field.grid
    c = field.coeffs * (_alternating(g.nx)[:, None] * _alternating(g.ny)[None, :])
    u = np.fft.ifft2(np.fft.ifftshift(c)) * (g.nx * g.ny)
    return u.real if real else u


def dispersion_symbol(xi, eta):
    """Phase rate ``omega = xi^5 - eta^2 / xi`` of the free evolution."""
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    if np.any(xi == 0):
        raise DomainError("dispersion symbol undefined at xi = 0; project the zero mode first")
    out = xi**5 - eta**2 / xi
    return out if out.ndim else float(out)


def omega_grid(xi, eta) -> np.ndarray:
    """Broadcast dispersion symbol with the ``xi = 0`` entries set to 0."""
    xi, eta = np.broadcast_arrays(np.asarray(xi, float), np.asarray(eta, float))
    out = np.zeros(xi.shape)
    nz = xi != 0
    out[nz] = xi[nz] ** 5 - eta[nz] ** 2 / xi[nz]
    return out


def project_zero_mode(field: SpectralField2D) -> SpectralField2D:
    """Remove the ``xi = 0`` column (mean-zero in x for every y)."""
    c = field.coeffs.copy()
    c[field.grid.ix0, :] = 0
    return SpectralField2D(field.grid, c)


def zero_nyquist(field: SpectralField2D) -> SpectralField2D:
    c = field.coeffs.copy()
    c[0, :] = 0
    c[:, 0] = 0
    return SpectralField2D(field.grid, c)


def dealias_mask(grid: Grid2D, fraction: float = 2.0 / 3.0) -> np.ndarray:
    """Boolean mask of modes kept by the truncation rule (|j| <= fraction * nx/2, same in k)."""
    j, k = grid.mode_index_mesh()
    return (np.abs(j) <= fraction * grid.nx / 2) & (np.abs(k) <= fraction * grid.ny / 2)


def l2_norm(grid: Grid2D, values: np.ndarray) -> float:
    """Grid L2 norm ``sqrt(dx dy sum |u|^2)``."""
    return float(np.sqrt(grid.dx * grid.dy * np.sum(np.abs(values) ** 2)))
