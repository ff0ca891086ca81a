"""Norms on the plane, on boundary data and on space-time fields.

Every norm includes the ``(2 pi)^-d`` factors of the continuous Fourier
transform, so the ``s = 0`` cases reduce to physical L2 norms.  Brackets are
``<z> = sqrt(1 + z^2)`` and ``<x, y> = sqrt(1 + x^2 + y^2)``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
import numpy as np
from scipy.special import roots_legendre

from . import _rspec
from ._interp import lagrange4, lagrange4_stencil
from .grid import DomainError, Grid2D, SpaceTimeField, SpectralField2D

EPS_PLUS = 0.05


class TruncationWarning(UserWarning):
    """Data do not decay at the edge of a truncated domain."""


def bracket(z):
    return np.sqrt(1.0 + np.asarray(z, dtype=float) ** 2)


def a_max(s: float) -> float:
    """Largest admissible smoothing gain ``min(1/3, 2s/3, 3/2 - 3s/5)`` for ``0 < s < 5/2``."""
    if not 0 < s < 2.5:
        raise DomainError(f"a_max requires 0 < s < 5/2, got s = {s}")
    return min(1.0 / 3.0, 2.0 * s / 3.0, 1.5 - 0.6 * s)


@dataclass(frozen=True)
class NormParams:
    s: float = 1.0
    b: float = 0.45
    a: float = 0.25
    epsilon_plus: float = EPS_PLUS

    @property
    def b1(self) -> float:
        return 0.75 - (self.s + self.a) / 2

    def validate_for_solver(self):
        """Raise :class:`DomainError` unless the parameters lie in the admissible ranges."""
        s, a, b = self.s, self.a, self.b
        if not (0 < s < 2.5) or s == 0.5:
            raise DomainError(f"require 0 < s < 5/2 and s != 1/2, got s = {s}")
        if not 0 < a < a_max(s):
            raise DomainError(f"require 0 < a < a_max(s) = {a_max(s):.6g}, got a = {a}")
        if not 0 < b < 0.5:
            raise DomainError(f"require 0 < b < 1/2, got b = {b}")
        return self


# ---------------------------------------------------------------- plane

def sobolev_norm(field: SpectralField2D, s: float) -> float:
    """``H^s`` norm with weight ``<xi^2 + eta^2>^s``; the ``xi = 0`` column is included."""
    g = field.grid
    xi, eta = g.freq_mesh()
    w = bracket(xi**2 + eta**2) ** s
    return float(np.sqrt(g.Lx * g.Ly * np.sum(w * np.abs(field.coeffs) ** 2)))


# ---------------------------------------------------------------- space-time

def _edge_check(values: np.ndarray, tol: float = 1e-8):
    # the periodic extension is continuous when the first and last samples vanish
    edge = max(np.max(np.abs(values[0])), np.max(np.abs(values[-1])))
    peak = np.max(np.abs(values))
    if peak > 0 and edge > tol * peak:
        warnings.warn(f"field is not small at the time-window edges (ratio {edge / peak:.2e})",
                      TruncationWarning, stacklevel=3)


def modulation_norm_sq(grid: Grid2D, times: np.ndarray, rc: np.ndarray, spatial_w2: np.ndarray,
                       b: float, chunk: int = 16) -> float:
    """``sum_modes spatial_w2 * int <sigma>^{2b} |v~(sigma)|^2`` in the interaction picture.

    ``rc`` is a stack of half-spectrum coefficients with time on axis 0 and
    ``spatial_w2`` a ``(nx, ny//2+1)`` weight (zero where a mode is excluded).
    """
    nt = len(times)
    dt = float(times[1] - times[0])
    om = _rspec.omega(grid)
    sig = 2 * np.pi * np.fft.fftfreq(nt, d=dt)
    tw = bracket(sig) ** (2 * b)
    w = spatial_w2 * _rspec.multiplicity(grid)
    total = 0.0
    for i in range(0, grid.nx, chunk):
        sl = slice(i, i + chunk)
        if not np.any(w[sl]):
            continue
        v = rc[:, sl, :] * np.exp(-1j * np.multiply.outer(times, om[sl]))
        V = np.fft.fft(v, axis=0)
        e = np.einsum("n,nij->ij", tw, np.abs(V) ** 2)
        total += float(np.sum(w[sl] * e))
    return grid.Lx * grid.Ly * dt / nt * total


def xsb_spatial_weight(xi, eta, s: float) -> np.ndarray:
    """Squared spatial weight ``<xi^2+eta^2>^s`` of the ``X^{s,b}`` norm, zero at ``xi = 0``."""
    xi, eta = np.broadcast_arrays(np.asarray(xi, dtype=float), np.asarray(eta, dtype=float))
    return np.where(xi != 0, bracket(xi**2 + eta**2) ** s, 0.0)


def _xsb_weight(grid: Grid2D, s: float) -> np.ndarray:
    return xsb_spatial_weight(*_rspec.mesh(grid), s)


def xsb_norm_coeffs(grid: Grid2D, times: np.ndarray, rc: np.ndarray, s: float, b: float) -> float:
    return float(np.sqrt(modulation_norm_sq(grid, times, rc, _xsb_weight(grid, s), b)))


def xsb_norm(u: SpaceTimeField, s: float, b: float) -> float:
    """``X^{s,b}`` norm with weight ``<tau - omega>^b <xi^2+eta^2>^{s/2}``; ``xi = 0`` excluded."""
    _edge_check(u.values)
    rc = _rspec.forward(u.grid, u.values)
    return xsb_norm_coeffs(u.grid, u.times, rc, s, b)


def weighted_spatial_weight(xi, eta, s: float, a: float, eps: float = EPS_PLUS) -> np.ndarray:
    """Squared spatial weight ``<xi,eta>^{1+2 eps} |xi|^{s+a-1/2}`` of the anisotropic norm, zero at ``xi = 0``."""
    xi, eta = np.broadcast_arrays(np.asarray(xi, dtype=float), np.asarray(eta, dtype=float))
    w = np.zeros(xi.shape)
    nz = xi != 0
    w[nz] = bracket(np.hypot(xi[nz], eta[nz])) ** (1 + 2 * eps) * np.abs(xi[nz]) ** (s + a - 0.5)
    return w


def _weighted_spatial(grid: Grid2D, s: float, a: float, eps: float) -> np.ndarray:
    return weighted_spatial_weight(*_rspec.mesh(grid), s, a, eps)


def weighted_xsb_norm_coeffs(grid, times, rc, s: float, a: float, eps: float = EPS_PLUS) -> float:
    b1 = 0.75 - (s + a) / 2
    return float(np.sqrt(modulation_norm_sq(grid, times, rc, _weighted_spatial(grid, s, a, eps), -b1)))


def weighted_xsb_norm(F: SpaceTimeField, s: float, a: float = 0.0, eps: float = EPS_PLUS) -> float:
    """Anisotropic norm with weight ``<xi,eta>^{1/2+eps} |xi|^{(s+a)/2-1/4} <lambda-omega>^{-b1}``.

    ``b1 = 3/4 - (s+a)/2``.
    """
    _edge_check(F.values)
    return weighted_xsb_norm_coeffs(F.grid, F.times, _rspec.forward(F.grid, F.values), s, a, eps)


# ---------------------------------------------------------------- boundary data

@dataclass(frozen=True)
class BoundarySpectrum:
    """Samples of ``phi_hat(xi, beta) = int int phi e^{-i(xi x + beta t)} dx dt``.

    ``xi`` is a lattice with spacing ``dxi`` (``2 pi / Lx`` for periodic x) and
    ``beta`` a uniform grid; ``values`` has shape ``(len(xi), len(beta))``.
    """

    xi: np.ndarray
    beta: np.ndarray
    values: np.ndarray = field(repr=False)
    dxi: float = 1.0

    @property
    def dbeta(self) -> float:
        return float(self.beta[1] - self.beta[0])

    def scaled(self, c) -> "BoundarySpectrum":
        return BoundarySpectrum(self.xi, self.beta, c * self.values, self.dxi)


@lru_cache(maxsize=4096)
def _hurwitz_pair(theta: float) -> float:
    q1 = theta if theta > 0 else 1.0
    q2 = 1.0 - theta if theta < 1 else 1.0
    return float(mpmath.zeta(-0.5, q1) + mpmath.zeta(-0.5, q2))


def _edge_warn(spec: BoundarySpectrum, tol: float = 1e-10):
    v = np.abs(spec.values)
    peak = v.max(initial=0.0)
    edge = max(v[:, :2].max(initial=0.0), v[:, -2:].max(initial=0.0))
    if peak > 0 and edge > tol * peak:
        warnings.warn(f"boundary spectrum not negligible at the beta-grid edge (ratio {edge / peak:.2e})",
                      TruncationWarning, stacklevel=3)


def beta_weights(xi: float, beta: np.ndarray, s: float) -> np.ndarray:
    """Quadrature weights ``w`` with ``sum w |phi_hat(xi, beta)|^2`` the ``xi``-row of the squared beta-form norm.

    The integrand is ``|beta - xi^5|^{1/2} G(beta)`` with ``G`` smooth; the
    trapezoid rule is corrected for the square-root point by its leading
    Hurwitz-zeta term, with ``G`` there taken from four-point interpolation.
    """
    h = float(beta[1] - beta[0])
    ax = abs(xi)
    bc = xi**5
    d = np.abs(beta - bc)
    w = h * np.sqrt(d) * bracket(xi**2 + ax * d) ** s / np.sqrt(ax)
    st = lagrange4_stencil(float(beta[0]), h, len(beta), bc)
    if st is not None and 0 <= (bc - beta[0]) / h < len(beta) - 1:
        idx, lw = st
        theta = float((bc - beta[0]) / h - np.floor((bc - beta[0]) / h))
        w[idx] -= h**1.5 * bracket(xi**2) ** s / np.sqrt(ax) * _hurwitz_pair(round(theta, 12)) * lw
    return w


def boundary_norm_beta(spec: BoundarySpectrum, s: float) -> float:
    """Boundary norm in the ``beta`` form.

    Weight ``<xi^2 + |xi beta - xi^6|>^{s/2} |xi beta - xi^6|^{1/4} / |xi|^{1/2}``,
    integrated with :func:`beta_weights`.
    """
    _edge_warn(spec)
    total = 0.0
    for i, xi in enumerate(spec.xi):
        if xi == 0:
            continue
        p2 = np.abs(spec.values[i]) ** 2
        if np.any(p2):
            total += float(beta_weights(xi, spec.beta, s) @ p2)
    return float(np.sqrt(max(total, 0.0) * spec.dxi / (2 * np.pi) ** 2))


_GL_NODES, _GL_WEIGHTS = roots_legendre(6)


def boundary_norm_eta(spec: BoundarySpectrum, s: float) -> float:
    """Boundary norm in the curve form.

    ``sum_{+-} int int <xi^2+eta^2>^s (eta/xi)^2 |phi_hat(xi, xi^5 +- eta^2/xi)|^2 deta dxi``,
    with ``phi_hat`` interpolated onto the curves by four-point Lagrange
    interpolation in ``beta``.  Panels in ``eta`` end where the curve crosses a
    ``beta`` grid node, so the interpolant is smooth on every panel.
    """
    _edge_warn(spec)
    h = spec.dbeta
    b0 = spec.beta[0]
    total = 0.0
    for i, xi in enumerate(spec.xi):
        if xi == 0:
            continue
        ax = abs(xi)
        col = spec.values[i]
        if not np.any(col):
            continue
        bc = xi**5
        for sign in (1.0, -1.0):
            direction = sign * np.sign(xi)
            dist = direction * (spec.beta - bc)
            dist = np.sort(dist[dist > 0])
            if dist.size < 2:
                continue
            edges = np.sqrt(ax * np.concatenate(([0.0], dist)))
            lo, hi = edges[:-1], edges[1:]
            eta = 0.5 * (hi + lo)[:, None] + 0.5 * (hi - lo)[:, None] * _GL_NODES[None, :]
            wq = 0.5 * (hi - lo)[:, None] * _GL_WEIGHTS[None, :]
            beta = bc + direction * eta**2 / ax
            val, _ = lagrange4(col, b0, h, beta.ravel())
            integrand = bracket(xi**2 + eta**2) ** s * (eta / xi) ** 2 * np.abs(val.reshape(eta.shape)) ** 2
            # eta and -eta give the same curve point
            total += 2.0 * np.sum(wq * integrand)
    return float(np.sqrt(total * spec.dxi / (2 * np.pi) ** 2))


def boundary_norm(spec: BoundarySpectrum, s: float) -> float:
    return boundary_norm_beta(spec, s)
