"""Linear half-plane problem: free group, trace at ``y = 0``, the free-flow trace
correction, the square-root branch table and the two boundary operators."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_legendre

from .cutoffs import f_kernel, mu
from .data import (BoundaryData, CompatibilityError, InitialData, _x_coeffs, extend_boundary,
                   extend_initial)
from .grid import (DomainError, Grid2D, SpaceTimeField, SpectralField2D, inverse_transform,
                   omega_grid)


class ResolutionError(RuntimeError):
    """Boundary data are not resolved by the chosen grids."""


def free_evolve(g: SpectralField2D, t: float) -> SpectralField2D:
    """Apply the free group: multiply by ``exp(i omega t)`` (``xi = 0`` modes left unchanged)."""
    xi, eta = g.grid.freq_mesh()
    return SpectralField2D(g.grid, g.coeffs * np.exp(1j * omega_grid(xi, eta) * t))


def trace_y0(u):
    """Values at ``y = 0``: shape ``(nx,)`` for a :class:`SpectralField2D`, ``(nt, nx)`` for a :class:`SpaceTimeField`."""
    if isinstance(u, SpaceTimeField):
        return u.values[:, :, u.grid.iy0].copy()
    g = u.grid
    cx = u.coeffs.sum(axis=1)
    j = np.arange(-g.nx // 2, g.nx // 2)
    return (np.fft.ifft(np.fft.ifftshift(cx * np.where(j % 2 == 0, 1.0, -1.0))) * g.nx).real


def _trace_series(g: SpectralField2D, times: np.ndarray, chunk: int = 64) -> np.ndarray:
    """``D0 W(t) g`` for every time in ``times``; shape ``(nt, nx)``."""
    grid = g.grid
    xi, eta = grid.freq_mesh()
    om = omega_grid(xi, eta)
    j = np.arange(-grid.nx // 2, grid.nx // 2)
    sgn = np.where(j % 2 == 0, 1.0, -1.0)
    out = np.empty((len(times), grid.nx))
    for i in range(0, len(times), chunk):
        t = times[i:i + chunk]
        cx = np.einsum("jk,njk->nj", g.coeffs, np.exp(1j * np.multiply.outer(t, om)))
        out[i:i + chunk] = (np.fft.ifft(np.fft.ifftshift(cx * sgn, axes=-1), axis=-1) * grid.nx).real
    return out


def compute_p(g_e: SpectralField2D, times: np.ndarray) -> np.ndarray:
    """``p(x, t) = mu(t) D0 W(t) g_e`` sampled at ``times``; shape ``(nt, nx)``."""
    times = np.asarray(times, dtype=float)
    return mu(times)[:, None] * _trace_series(g_e, times)


def branch_r(xi, beta):
    """Boundary limit of the decaying square root ``(-i lambda xi - xi^6)^{1/2}`` at ``lambda = i beta``."""
    xi = np.asarray(xi, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if np.any(xi == 0):
        raise DomainError("branch_r is undefined at xi = 0")
    d = beta * xi - xi**6
    root = np.sqrt(np.abs(d))
    out = np.where(d > 0, -root + 0j, np.where(xi > 0, 1j * root, -1j * root))
    return out if out.ndim else complex(out)


# ---------------------------------------------------------------- W1

def _edge_live(bd: BoundaryData, tol: float = 1e-8) -> np.ndarray:
    """Rows of the boundary spectrum whose values at the beta-grid edges are not negligible."""
    a = np.abs(bd.hat)
    peak = a.max(initial=0.0)
    if peak == 0:
        return np.zeros(a.shape[0], dtype=bool)
    return np.maximum(a[:, :4].max(axis=1), a[:, -4:].max(axis=1)) > tol * peak


def boundary_w1_coeffs(bd: BoundaryData, tail_tol: float = 1e-8) -> SpectralField2D:
    """Grid coefficients of the first boundary operator at ``t = 0``.

    ``c = dxi deta (2 pi)^-2 (2 eta / xi) hchi_hat(xi, xi^5 - eta^2/xi)`` on ``xi eta > 0``.
    Curve points beyond the resolved beta band are taken as 0, which is only
    accepted when the spectrum has decayed there (band tail below ``tail_tol``).
    """
    g = bd.grid
    xi, eta = g.freq_mesh()
    c = np.zeros(g.shape, dtype=complex)
    if bd.is_zero():
        return SpectralField2D(g, c)
    quad = (xi * eta > 0)
    quad[0, :] = False
    quad[:, 0] = False
    xs = np.where(xi != 0, xi, 1.0)
    beta = xi**5 - eta**2 / xs
    rows = np.arange(g.nx)
    val = bd.curve(rows, beta)
    outside = np.abs(beta) > bd.beta_nyquist - 2 * bd.dbeta
    flagged = outside & quad & _edge_live(bd)[:, None]
    if flagged.any() and bd.band_tail > tail_tol:
        raise ResolutionError(f"{flagged.sum()} W1 curve samples fall outside the beta band and the spectrum tail "
                              f"mass {bd.band_tail:.2e} exceeds {tail_tol:.0e}; sample the boundary data more finely in time")
    dxi, deta = 2 * np.pi / g.Lx, 2 * np.pi / g.Ly
    c[quad] = (dxi * deta / (2 * np.pi) ** 2) * (2 * eta[quad] / xi[quad]) * val[quad]
    return SpectralField2D(g, c)


def boundary_w1(bd: BoundaryData, t: float) -> SpectralField2D:
    return free_evolve(boundary_w1_coeffs(bd), t)


# ---------------------------------------------------------------- W2

_GL_X, _GL_W = roots_legendre(8)


@dataclass
class W2Quadrature:
    """Eta-quadrature of the second boundary operator, one column per positive ``xi``.

    ``nodes[j]`` are the quadrature nodes in ``eta`` and ``dens[j]`` the weights
    times ``dxi (2 pi)^-2 (2 eta / |xi|) hchi_hat(xi, xi^5 + eta^2/xi)``.
    """

    grid: Grid2D
    cols: list = field(default_factory=list)
    nodes: list = field(default_factory=list)
    dens: list = field(default_factory=list)
    beta: list = field(default_factory=list)

    @classmethod
    def build(cls, bd: BoundaryData, panel_beta: float = 1.0, support_tol: float = 1e-13,
              tail_tol: float = 1e-8) -> "W2Quadrature":
        g = bd.grid
        q = cls(g)
        if bd.is_zero():
            return q
        if bd.band_tail > tail_tol:
            raise ResolutionError(f"boundary spectrum tail mass {bd.band_tail:.2e} exceeds {tail_tol:.0e}: "
                                  "increase the quadrature cutoff by sampling h more finely in time")
        a = np.abs(bd.hat)
        live = a > support_tol * a.max()
        b_edge = bd.beta_nyquist - 2 * bd.dbeta
        dxi = 2 * np.pi / g.Lx
        xis = g.xi
        for j in range(g.ix0 + 1, g.nx):
            xi = xis[j]
            if not live[j].any():
                continue
            b_hi = min(bd.beta[live[j]].max() + 2 * bd.dbeta, b_edge)
            bc = xi**5
            if b_hi <= bc:
                continue
            eta_top = np.sqrt(xi * (b_hi - bc))
            n_lin = max(1, int(np.ceil((b_hi - bc) / panel_beta)))
            edges = np.sqrt(xi * np.linspace(0.0, b_hi - bc, n_lin + 1))
            dyadic = eta_top * 2.0 ** -np.arange(1, 40)
            dyadic = dyadic[dyadic > 1e-6 * eta_top]
            edges = np.unique(np.concatenate((edges, dyadic, [0.0])))
            lo, hi = edges[:-1], edges[1:]
            eta = (0.5 * (hi + lo)[:, None] + 0.5 * (hi - lo)[:, None] * _GL_X).ravel()
            w = (0.5 * (hi - lo)[:, None] * _GL_W).ravel()
            beta = bc + eta**2 / xi
            val = bd.curve(np.full(1, j), beta[None, :])[0]
            q.cols.append(j)
            q.nodes.append(eta)
            q.beta.append(beta)
            q.dens.append(w * dxi / (2 * np.pi) ** 2 * (2 * eta / xi) * val)
        return q

    def x_coeffs(self, times: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Half-spectrum x-coefficients ``(nt, ny, nx//2 + 1)`` for ``xi >= 0``."""
        times = np.asarray(times, dtype=float)
        g = self.grid
        out = np.zeros((len(times), len(y), g.nx // 2 + 1), dtype=complex)
        for j, eta, dens, beta in zip(self.cols, self.nodes, self.dens, self.beta):
            K = f_kernel(np.multiply.outer(y, eta)) * dens[None, :]
            E = np.exp(1j * np.multiply.outer(beta, times))
            out[:, :, j - g.ix0] = (K @ E).T
        return out

    def values(self, times: np.ndarray, y: np.ndarray | None = None) -> np.ndarray:
        """Real values ``(nt, nx, len(y))``; ``y`` defaults to the grid rows."""
        g = self.grid
        y = g.y if y is None else np.asarray(y, dtype=float)
        c = self.x_coeffs(times, y)
        j = np.arange(g.nx // 2 + 1)
        c = c * np.where(j % 2 == 0, 1.0, -1.0)
        vals = np.fft.irfft(c, n=g.nx, axis=-1) * g.nx
        return np.ascontiguousarray(vals.transpose(0, 2, 1))

    def trace(self, times: np.ndarray) -> np.ndarray:
        return self.values(times, np.zeros(1))[:, :, 0]


def boundary_w2(bd: BoundaryData, times, y: np.ndarray | None = None) -> np.ndarray:
    """Second boundary operator sampled at ``times`` on the grid rows (or at ``y``); shape ``(nt, nx, ny)``."""
    return W2Quadrature.build(bd).values(np.atleast_1d(np.asarray(times, dtype=float)), y)


# ---------------------------------------------------------------- W0

@dataclass
class LinearSolution:
    """``W(t) g_e + W1 phi + W2 phi`` with ``phi = (h - p) chi_{t>0}``.

    The first two terms are a single free evolution of ``psi = g_e + W1 phi|_{t=0}``.
    """

    grid: Grid2D
    g_e: SpectralField2D
    boundary: BoundaryData
    psi: SpectralField2D
    w2: W2Quadrature

    def spectral_part(self, t: float) -> SpectralField2D:
        return free_evolve(self.psi, t)

    def sample(self, times) -> SpaceTimeField:
        times = np.atleast_1d(np.asarray(times, dtype=float))
        vals = self.w2.values(times) if self.w2.cols else np.zeros((len(times),) + self.grid.shape)
        for n, t in enumerate(times):
            vals[n] += inverse_transform(self.spectral_part(t))
        return SpaceTimeField(self.grid, times, vals)

    def trace(self, times) -> np.ndarray:
        times = np.atleast_1d(np.asarray(times, dtype=float))
        out = _trace_series(self.psi, times)
        if self.w2.cols:
            out += self.w2.trace(times)
        return out


def boundary_solution(bd: BoundaryData, tail_tol: float = 1e-8) -> LinearSolution:
    """``W1 phi + W2 phi`` for boundary data already reduced to ``phi`` (no initial data)."""
    g = bd.grid
    zero = SpectralField2D(g, np.zeros(g.shape, dtype=complex))
    return LinearSolution(g, zero, bd, boundary_w1_coeffs(bd, tail_tol),
                          W2Quadrature.build(bd, tail_tol=tail_tol))


def reduce_boundary(g_e: SpectralField2D, h: BoundaryData, s: float | None = None,
                    tol: float = 1e-6) -> BoundaryData:
    """Boundary data ``h - p`` with ``p`` the free-flow trace of ``g_e`` on the times of ``h``."""
    s = h.s if s is None else s
    p = compute_p(g_e, h.times)
    if s > 0.5:
        res = float(np.sqrt(h.grid.dx * np.sum((h.h[0] - p[0]) ** 2)))
        if res > tol * max(1.0, float(np.sqrt(h.grid.dx * np.sum(h.h[0] ** 2)))):
            raise CompatibilityError(f"compatibility g|t=0 = h|t=0 fails: residual {res:.3e}")
    return extend_boundary(h.grid, h.times, h.h, s, subtract_trace=p)


def linear_solution(g: InitialData | SpectralField2D, h: BoundaryData | None = None,
                    times: np.ndarray | None = None) -> LinearSolution:
    """Solution of the linear half-plane problem with initial data ``g`` and boundary data ``h``.

    ``g`` is either half-plane data (extended here) or an already extended field.
    When ``h`` is ``None`` the boundary data are taken to be ``p`` itself, so the
    result is the free flow.
    """
    g_e = extend_initial(g) if isinstance(g, InitialData) else g
    grid = g_e.grid
    if h is None:
        zero = SpectralField2D(grid, np.zeros(grid.shape, dtype=complex))
        t = np.linspace(0, 1, 9) if times is None else times
        return LinearSolution(grid, g_e, extend_boundary(grid, t, np.zeros((len(t), grid.nx)), 0.0), g_e + zero,
                              W2Quadrature(grid))
    phi = reduce_boundary(g_e, h)
    return LinearSolution(grid, g_e, phi, g_e + boundary_w1_coeffs(phi), W2Quadrature.build(phi))


def boundary_x_transform(grid: Grid2D, rows: np.ndarray) -> np.ndarray:
    """Symmetric-order x-coefficients of ``rows (..., nx)`` (re-exported helper)."""
    return _x_coeffs(grid, rows)
