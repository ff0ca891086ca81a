"""Nonlinear problem: the quadratic term, the Duhamel integral, its boundary trace
and the Picard iteration for the fixed-point equation on a time window."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_simpson

from . import _rspec
from .cutoffs import mu
from .data import BoundaryData, InitialData, extend_boundary, extend_initial
from .grid import DomainError, Grid2D, SpaceTimeField, SpectralField2D, time_window
from .linear import LinearSolution, boundary_solution, linear_solution
from .norms import a_max, xsb_norm_coeffs


class NonContractionError(RuntimeError):
    """Picard differences stopped shrinking."""


@dataclass(frozen=True)
class SolverParams:
    s: float = 1.0
    a: float = 0.25
    b: float = 0.45
    T: float = 0.5
    tol_fixed_point: float = 1e-8
    max_iter: int = 30
    dealias_fraction: float = 2.0 / 3.0
    window: float = 2.0
    nt: int = 512
    q_tail_tol: float = 1e-6

    def __post_init__(self):
        if not 0 < self.T < 1:
            raise DomainError(f"require 0 < T < 1, got T = {self.T}")
        if not 0 < self.b < 0.5:
            raise DomainError(f"require 0 < b < 1/2, got b = {self.b}")
        if self.tol_fixed_point <= 0 or self.max_iter < 1:
            raise DomainError("tolerance must be positive and max_iter >= 1")
        if self.window < 2:
            raise DomainError("the time window must contain [-2, 2]")

    @property
    def b1(self) -> float:
        return 0.75 - (self.s + self.a) / 2

    def check_gain(self):
        if not 0 < self.a < a_max(self.s):
            raise DomainError(f"require 0 < a < a_max(s) = {a_max(self.s):.6g}")
        return self

    def times(self) -> np.ndarray:
        return time_window(self.window, self.nt)


@dataclass
class PicardDiagnostics:
    norms: list = field(default_factory=list)
    differences: list = field(default_factory=list)
    factors: list = field(default_factory=list)
    fixed_point_residual: float = float("nan")
    converged: bool = False
    linear_part: SpaceTimeField | None = field(default=None, repr=False)

    @property
    def iterations(self) -> int:
        return len(self.differences)

    @property
    def max_factor(self) -> float:
        return max(self.factors) if self.factors else 0.0

    @property
    def contraction_factor(self) -> float:
        """First difference ratio; later ratios approach round-off and are noisy."""
        return self.factors[0] if self.factors else 0.0


# ---------------------------------------------------------------- building blocks

def _dealias_product(grid: Grid2D, rc: np.ndarray, fraction: float) -> np.ndarray:
    """Half-spectrum of ``-(1/2) d/dx (u^2)`` with truncation before and after the product."""
    mask = _rspec.dealias(grid, fraction)
    xi, _ = _rspec.mesh(grid)
    ut = _rspec.inverse(grid, rc * mask)
    sq = _rspec.forward(grid, ut * ut)
    return -0.5j * xi * sq * mask


def nonlinearity_coeffs(grid, times, rc, T, fraction=2.0 / 3.0, chunk: int = 64) -> np.ndarray:
    out = np.empty_like(rc)
    cut = mu(np.asarray(times) / T)
    for i in range(0, len(times), chunk):
        sl = slice(i, i + chunk)
        live = cut[sl] != 0
        out[sl] = 0
        if live.any():
            idx = np.arange(len(times))[sl][live]
            out[idx] = cut[idx, None, None] * _dealias_product(grid, rc[idx], fraction)
    return out


def nonlinearity(u: SpaceTimeField, T: float, fraction: float = 2.0 / 3.0) -> SpaceTimeField:
    """``F = -mu(t/T) u u_x`` computed as ``-(1/2) mu(t/T) d/dx (u^2)`` with the truncation rule."""
    rc = nonlinearity_coeffs(u.grid, u.times, _rspec.forward(u.grid, u.values), T, fraction)
    return SpaceTimeField(u.grid, u.times, _rspec.inverse(u.grid, rc))


def _zero_index(times: np.ndarray) -> int:
    n0 = int(np.argmin(np.abs(times)))
    if abs(times[n0]) > 1e-9:
        raise DomainError("the time grid must contain t = 0")
    return n0


def _cumsimpson(v: np.ndarray, dt: float) -> np.ndarray:
    # scipy's routine is real-only: integrate the two parts separately
    return (cumulative_simpson(v.real, dx=dt, axis=0, initial=0)
            + 1j * cumulative_simpson(v.imag, dx=dt, axis=0, initial=0))


def duhamel_coeffs(grid, times, rc, chunk: int = 16) -> np.ndarray:
    """``int_0^t e^{i omega (t - t')} F(t') dt'`` per mode by Simpson quadrature in the interaction picture."""
    times = np.asarray(times, dtype=float)
    n0 = _zero_index(times)
    dt = float(times[1] - times[0])
    om = _rspec.omega(grid)
    out = np.empty_like(rc)
    for i in range(0, grid.nx, chunk):
        sl = slice(i, i + chunk)
        ph = np.exp(-1j * np.multiply.outer(times, om[sl]))
        v = rc[:, sl] * ph
        J = np.zeros_like(v)
        if n0 < len(times) - 1:
            J[n0:] = _cumsimpson(v[n0:], dt)
        if n0 > 0:
            J[:n0 + 1] = -_cumsimpson(v[n0::-1], dt)[::-1]
        out[:, sl] = J * np.conj(ph)
    return out


def duhamel_integral(F: SpaceTimeField) -> SpaceTimeField:
    rc = duhamel_coeffs(F.grid, F.times, _rspec.forward(F.grid, F.values))
    return SpaceTimeField(F.grid, F.times, _rspec.inverse(F.grid, rc))


def _trace_from_coeffs(grid: Grid2D, rc: np.ndarray) -> np.ndarray:
    cx = _rspec.trace_y0(rc, grid)
    j = np.rint(np.fft.fftfreq(grid.nx) * grid.nx).astype(int)
    return (np.fft.ifft(cx * np.where(j % 2 == 0, 1.0, -1.0), axis=-1) * grid.nx).real


def q_trace_coeffs(grid, times, duhamel_rc) -> np.ndarray:
    return mu(np.asarray(times))[:, None] * _trace_from_coeffs(grid, duhamel_rc)


def q_trace(F: SpaceTimeField) -> np.ndarray:
    """``q(x, t) = mu(t) D0 int_0^t W(t - t') F dt'`` on the times of ``F``; shape ``(nt, nx)``."""
    rc = duhamel_coeffs(F.grid, F.times, _rspec.forward(F.grid, F.values))
    return q_trace_coeffs(F.grid, F.times, rc)


def q_boundary(grid: Grid2D, times: np.ndarray, q: np.ndarray, s: float, t_last: float = 1.0) -> BoundaryData:
    """Boundary data built from ``q`` on ``[0, t_last]`` (its trace at ``t = 0`` vanishes)."""
    n0 = _zero_index(times)
    dt = float(times[1] - times[0])
    n1 = n0 + int(round(t_last / dt))
    tq = times[n0:n1 + 1] - times[n0]
    return extend_boundary(grid, tq, q[n0:n1 + 1], s, trace_tol=1e-6)


# ---------------------------------------------------------------- Picard

class _Map:
    """The fixed-point map ``u -> mu L + mu I[F(u)] - mu B[q(u)]`` on half-spectrum stacks."""

    def __init__(self, grid: Grid2D, times: np.ndarray, linear: LinearSolution, params: SolverParams):
        self.grid, self.times, self.params = grid, times, params
        self.cut = mu(times)[:, None, None]
        self.lin_values = self.cut * linear.sample(times).values
        self.lin_rc = _rspec.forward(grid, self.lin_values)

    def boundary_term(self, q: np.ndarray) -> np.ndarray:
        if not np.any(q):
            return np.zeros((len(self.times),) + self.grid.shape)
        bd = q_boundary(self.grid, self.times, q, self.params.s)
        # q has a corner at t = 0 (q ~ t), so its spectrum decays slowly; the
        # band tail is O(amplitude^2) of an already quadratic term
        return boundary_solution(bd, tail_tol=self.params.q_tail_tol).sample(self.times).values

    def __call__(self, rc: np.ndarray) -> np.ndarray:
        p = self.params
        F = nonlinearity_coeffs(self.grid, self.times, rc, p.T, p.dealias_fraction)
        I = duhamel_coeffs(self.grid, self.times, F)
        q = q_trace_coeffs(self.grid, self.times, I)
        vals = self.lin_values + self.cut * _rspec.inverse(self.grid, I) - self.cut * self.boundary_term(q)
        return _rspec.forward(self.grid, vals)


def picard_solve(g: InitialData, h: BoundaryData | None, params: SolverParams,
                 stall_limit: int = 3) -> tuple[SpaceTimeField, PicardDiagnostics]:
    """Solve the fixed-point equation by successive substitution.

    Iteration stops when the relative ``X^{s,b}`` difference of successive
    iterates drops below ``params.tol_fixed_point``.  A difference ratio ``>= 1``
    for ``stall_limit`` consecutive steps raises :class:`NonContractionError`.
    """
    grid = g.grid
    times = params.times()
    lin = linear_solution(g, h)
    phi = _Map(grid, times, lin, params)
    diag = PicardDiagnostics(linear_part=SpaceTimeField(grid, times, phi.lin_values))

    def norm(rc):
        return xsb_norm_coeffs(grid, times, rc, params.s, params.b)

    u = phi.lin_rc
    diag.norms.append(norm(u))
    stalls = 0
    for _ in range(params.max_iter):
        new = phi(u)
        d = norm(new - u)
        nrm = norm(new)
        diag.norms.append(nrm)
        diag.differences.append(d)
        if len(diag.differences) > 1 and diag.differences[-2] > 0:
            f = d / diag.differences[-2]
            diag.factors.append(f)
            stalls = stalls + 1 if f >= 1 else 0
            if stalls >= stall_limit:
                raise NonContractionError(
                    f"Picard differences grew for {stall_limit} consecutive iterations "
                    f"(factors {diag.factors[-stall_limit:]}); shrink T or the data")
        u = new
        if nrm == 0 or d <= params.tol_fixed_point * nrm:
            diag.converged = True
            break
    again = phi(u)
    nrm = norm(u)
    diag.fixed_point_residual = norm(again - u) / nrm if nrm > 0 else 0.0
    return SpaceTimeField(grid, times, _rspec.inverse(grid, u)), diag


# ---------------------------------------------------------------- residual

def _d1_t(u: np.ndarray, dt: float) -> np.ndarray:
    return (-u[4:] + 8 * u[3:-1] - 8 * u[1:-3] + u[:-4]) / (12 * dt)


def pde_residual(u: SpaceTimeField, t_range: tuple[float, float] = (0.0, 1.0),
                 y_max: float | None = None, nonlinear: bool = True) -> float:
    """Relative L2 size of ``d_x(u_t - d_x^5 u + u u_x) + u_yy`` on ``{0 < y < y_max, t in t_range}``.

    Derivatives: spectral in ``x`` and ``y``, fourth-order central differences in ``t``.
    The result is normalised by the sum of the norms of the individual terms.
    """
    g = u.grid
    t = u.times
    tsel = np.nonzero((t > t_range[0]) & (t < t_range[1]))[0]
    tsel = tsel[(tsel >= 2) & (tsel <= len(t) - 3)]
    y_max = g.Ly / 2 if y_max is None else y_max
    ysel = np.nonzero((g.y > 0) & (g.y < y_max))[0]
    if tsel.size == 0 or ysel.size == 0:
        raise DomainError("residual region contains no interior samples")
    t0, t1 = tsel[0], tsel[-1]
    block = u.values[t0 - 2:t1 + 3]
    ut = _d1_t(block, u.dt)[:, :, ysel]
    eta = 2 * np.pi * np.fft.fftfreq(g.ny, d=g.dy)
    uyy = np.fft.ifft(-(eta**2) * np.fft.fft(block[2:-2], axis=-1), axis=-1).real[:, :, ysel]
    core = block[2:-2][:, :, ysel]
    xi = 2 * np.pi * np.fft.fftfreq(g.nx, d=g.dx)[None, :, None]

    def dx(f, k):
        return np.fft.ifft((1j * xi) ** k * np.fft.fft(f, axis=1), axis=1).real

    terms = [dx(ut, 1), -dx(core, 6), uyy]
    if nonlinear:
        terms.append(dx(0.5 * core**2, 2))
    R = sum(terms)
    scale = sum(np.linalg.norm(a) for a in terms)
    return float(np.linalg.norm(R) / scale) if scale > 0 else 0.0
