"""Numerical checks of the estimates behind the solver.

Each check returns plain numbers or a :class:`RatioReport`.  The estimates
hold with unspecified constants, so boundedness is tested as a trend: ratios
stay within a fixed factor under dyadic rescaling or grid enlargement.
"""
from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import integrate

from . import _rspec
from .cutoffs import mu, mu_hat, smooth_step
from .data import InitialData, extend_boundary, extend_initial, make_sobolev_sample
from .duhamel import (SolverParams, duhamel_coeffs, picard_solve, q_trace_coeffs)
from .grid import (DomainError, Grid2D, SpectralField2D, dispersion_symbol, forward_transform,
                   inverse_transform, time_window)
from .linear import W2Quadrature, compute_p, linear_solution
from .norms import (TruncationWarning, a_max, beta_weights, boundary_norm_beta, bracket,
                    modulation_norm_sq, sobolev_norm, weighted_spatial_weight, xsb_norm_coeffs,
                    xsb_spatial_weight)


@dataclass
class RatioReport:
    """Summary of an ensemble of estimate ratios."""

    statement: str
    params: dict
    samples: int
    max: float
    median: float
    min: float
    growth: float | None = None
    passed: bool | None = None
    detail: dict = field(default_factory=dict)

    @classmethod
    def from_ratios(cls, statement: str, params: dict, ratios, **kw) -> "RatioReport":
        r = np.asarray(ratios, dtype=float).ravel()
        r = r[np.isfinite(r)]
        if r.size == 0:
            return cls(statement, params, 0, float("nan"), float("nan"), float("nan"), **kw)
        return cls(statement, params, int(r.size), float(r.max()), float(np.median(r)), float(r.min()), **kw)

    def to_dict(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------- resonance

def resonance_lhs(xi, xi1, th, th1, lam, lam1):
    """``tau - tau1 - tau2`` from the modulations ``tau = lam - xi^5 + th^2/xi`` of the three waves."""
    xi2, th2, lam2 = xi - xi1, th - th1, lam - lam1

    def tau(l, x, t):
        return l - x**5 + t**2 / x

    return tau(lam, xi, th) - tau(lam1, xi1, th1) - tau(lam2, xi2, th2)


def resonance_rhs(xi, xi1, th, th1):
    """Factored form ``-5 xi xi1 xi2 (xi^2 - xi xi1 + xi1^2) - (th xi1 - th1 xi)^2 / (xi xi1 xi2)``."""
    xi2 = xi - xi1
    p = xi * xi1 * xi2
    return -5 * p * (xi**2 - xi * xi1 + xi1**2) - (th * xi1 - th1 * xi) ** 2 / p


def resonance_size(xi, xi1, th, th1):
    """``M = |xi xi1 xi2| (xi^2 + xi1^2) + (th xi1 - th1 xi)^2 / |xi xi1 xi2|``."""
    p = np.abs(xi * xi1 * (xi - xi1))
    return p * (xi**2 + xi1**2) + (th * xi1 - th1 * xi) ** 2 / p


@dataclass
class ResonanceReport:
    samples: int
    max_rel_error: float
    same_sign: bool
    bound_violations: int
    min_bound_ratio: float

    @property
    def passed(self) -> bool:
        return self.max_rel_error < 1e-9 and self.same_sign and self.bound_violations == 0

    def to_dict(self) -> dict:
        return {**asdict(self), "passed": self.passed}


def check_resonance_identity(samples: int = 100_000, seed: int = 0) -> ResonanceReport:
    """Compare the factored resonance function with its definition at random frequencies.

    Frequencies are log-uniform in magnitude on ``[0.1, 10]`` with random sign;
    draws with ``|xi - xi1| < 1e-3`` are redrawn.
    """
    rng = np.random.default_rng(seed)

    def draw(n):
        return rng.choice([-1.0, 1.0], n) * 10.0 ** rng.uniform(-1, 1, n)

    xi, xi1 = draw(samples), draw(samples)
    bad = np.abs(xi - xi1) < 1e-3
    while bad.any():
        xi1[bad] = draw(int(bad.sum()))
        bad = np.abs(xi - xi1) < 1e-3
    th, th1 = rng.normal(0, 3, samples), rng.normal(0, 3, samples)
    lam, lam1 = rng.normal(0, 10, samples), rng.normal(0, 10, samples)
    lhs = resonance_lhs(xi, xi1, th, th1, lam, lam1)
    rhs = resonance_rhs(xi, xi1, th, th1)
    err = np.abs(lhs - rhs) / np.abs(rhs)
    # both summands carry the sign of -xi xi1 xi2 since xi^2 - xi xi1 + xi1^2 > 0
    p = xi * xi1 * (xi - xi1)
    first = -5 * p * (xi**2 - xi * xi1 + xi1**2)
    second = -(th * xi1 - th1 * xi) ** 2 / p
    same = bool(np.all((first * second >= 0)))
    ratio = np.abs(lhs) / resonance_size(xi, xi1, th, th1)
    return ResonanceReport(samples, float(err.max()), same, int(np.sum(ratio < 0.2)), float(ratio.min()))


# ---------------------------------------------------------------- appendix lemmas

def phi_beta(k: float, beta: float) -> float:
    """``sum_{|n| <= |k|} <n>^-beta``."""
    m = int(np.floor(abs(k)))
    n = np.arange(-m, m + 1)
    return float(np.sum(bracket(n) ** -beta))


def lemma_integral(beta: float, gamma: float, k1: float, k2: float, abs_second: bool = False) -> float:
    """``int <tau-k1>^-beta <tau-k2>^-gamma dtau`` (``|tau-k2|`` in place of the second bracket if asked)."""
    def f(t):
        second = abs(t - k2) if abs_second else np.sqrt(1 + (t - k2) ** 2)
        return (1 + (t - k1) ** 2) ** (-beta / 2) * second ** -gamma

    lo, hi = sorted((k1, k2))
    pts = [lo - 1.0, lo, 0.5 * (lo + hi), hi, hi + 1.0] if hi > lo else [lo - 1.0, lo, lo + 1.0]
    total = integrate.quad(f, -np.inf, pts[0], limit=500)[0] + integrate.quad(f, pts[-1], np.inf, limit=500)[0]
    for a, b in zip(pts[:-1], pts[1:]):
        total += integrate.quad(f, a, b, limit=500, epsabs=0, epsrel=1e-11)[0]
    return total


def calculus_lemma_check(beta: float, gamma: float, k1: float, k2: float, abs_second: bool = False) -> float:
    """Ratio of the integral to ``<k1-k2>^-gamma phi_beta(k1-k2)``."""
    if not (beta >= gamma >= 0 and beta + gamma > 1):
        raise DomainError(f"require beta >= gamma >= 0 and beta + gamma > 1, got ({beta}, {gamma})")
    if abs_second and not gamma < 1:
        raise DomainError("the |tau - k2| form requires gamma < 1")
    k = k1 - k2
    return lemma_integral(beta, gamma, k1, k2, abs_second) / (float(bracket(k)) ** -gamma * phi_beta(k, beta))


LEMMA_CASES = ((2.0, 0.0), (0.75, 0.75), (1.0, 0.5), (1.0, 1.0), (1.5, 0.5), (3.0, 0.2))
LEMMA_SHIFTS = (0.0, 1.0, 10.0, 100.0, 1000.0)


def calculus_lemma_sweep(cases=LEMMA_CASES, shifts=LEMMA_SHIFTS, bound: float = 10.0,
                         abs_second: bool = False) -> RatioReport:
    """Ratios over ``(beta, gamma)`` cases and shifts ``k1 - k2``; passes when all are at most ``bound``.

    The implied constant grows like ``1 / (beta + gamma - 1)``, so cases close
    to the threshold need a larger ``bound``.
    """
    ratios = {}
    for b, g in cases:
        for k in shifts:
            ratios[f"{b},{g},{k}"] = calculus_lemma_check(b, g, 0.3 + k, 0.3, abs_second)
    vals = list(ratios.values())
    rep = RatioReport.from_ratios("calculus_lemma", {"bound": bound}, vals, detail=ratios)
    rep.passed = rep.max <= bound
    return rep


def schur_bound_check(K: np.ndarray, p: np.ndarray, q: np.ndarray, w_theta=None, w_eta=None,
                      iters: int = 5000, seed: int = 0) -> tuple[float, float]:
    """Operator norm of ``(T f)(theta) = int K(theta, eta) f(eta) deta`` against ``sqrt(A B)``.

    ``A`` and ``B`` are the smallest constants in the two weighted row and
    column conditions on the grid; ``w_theta`` and ``w_eta`` are quadrature
    weights (default 1).  The norm comes from power iteration.
    """
    K = np.abs(np.asarray(K, dtype=float))
    m, n = K.shape
    wt = np.ones(m) if w_theta is None else np.asarray(w_theta, dtype=float)
    we = np.ones(n) if w_eta is None else np.asarray(w_eta, dtype=float)
    if not np.any(K):
        return 0.0, 0.0
    A = float(np.max((K * (p * wt)[:, None]).sum(axis=0) / q))
    B = float(np.max((K * (q * we)[None, :]).sum(axis=1) / p))
    M = np.sqrt(wt)[:, None] * K * np.sqrt(we)[None, :]
    v = np.random.default_rng(seed).uniform(0.5, 1.0, n)
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(iters):
        w = M.T @ (M @ v)
        new = float(np.sqrt(np.linalg.norm(w)))
        v = w / np.linalg.norm(w)
        if abs(new - est) <= 1e-15 * new:
            est = new
            break
        est = new
    return float(np.linalg.norm(M @ v)), float(np.sqrt(A * B))


def schur_trials(trials: int = 20, seed: int = 0, size: int = 60) -> RatioReport:
    """Random nonnegative kernels with random positive weights; ratio ``opnorm / sqrt(A B)``."""
    rng = np.random.default_rng(seed)
    ratios, ok = [], True
    for _ in range(trials):
        m, n = rng.integers(size // 2, size, 2)
        K = rng.uniform(0, 1, (m, n)) ** rng.uniform(1, 4)
        p, q = rng.uniform(0.2, 2.0, m), rng.uniform(0.2, 2.0, n)
        wt, we = rng.uniform(0.5, 1.5, m), rng.uniform(0.5, 1.5, n)
        op, bd = schur_bound_check(K, p, q, wt, we, seed=int(rng.integers(1 << 30)))
        ok &= op <= bd + 1e-9
        ratios.append(op / bd)
    rep = RatioReport.from_ratios("schur", {"trials": trials}, ratios)
    rep.passed = bool(ok)
    return rep


# ---------------------------------------------------------------- Kato smoothing

def _beta_axis(lo: float, hi: float, dbeta: float) -> np.ndarray:
    return dbeta * np.arange(np.floor(lo / dbeta), np.ceil(hi / dbeta) + 1)


def trace_gram(grid: Grid2D, s: float, modes, dbeta: float = 0.05, window: float = 200.0) -> dict:
    """Per ``xi`` column, the Gram matrix of ``mu_hat(beta - omega_k)`` in the beta-form boundary norm.

    For ``phi = mu(t) (W g)(x, y, t)`` with coefficients ``c[j, k]`` the
    transform on the ``xi_j`` row is ``Lx sum_k c e^{i eta_k y} mu_hat(beta - omega_jk)``,
    so its squared boundary norm is a quadratic form in ``c e^{i eta y}``.
    ``modes`` maps a column index ``j`` to the row indices ``k`` in use.
    """
    out = {}
    for j, ks in modes.items():
        xi = grid.xi[j]
        om = dispersion_symbol(xi, grid.eta[ks])
        beta = _beta_axis(min(om.min(), xi**5) - window, max(om.max(), xi**5) + window, dbeta)
        M = mu_hat(beta[:, None] - om[None, :])
        w = beta_weights(xi, beta, s)
        out[j] = (np.asarray(ks), M.T @ (w[:, None] * M))
    return out


def kato_slice_norms(field: SpectralField2D, s: float, gram: dict, y=None) -> np.ndarray:
    """Boundary norms of ``mu(t) W(t) g`` restricted to the horizontal lines ``y``."""
    g = field.grid
    y = g.y if y is None else np.atleast_1d(np.asarray(y, dtype=float))
    total = np.zeros(len(y))
    for j, (ks, G) in gram.items():
        a = g.Lx * field.coeffs[j, ks][None, :] * np.exp(1j * np.outer(y, g.eta[ks]))
        total += np.einsum("yk,kl,yl->y", a.conj(), G, a).real
    return np.sqrt(np.maximum(total, 0.0) * (2 * np.pi / g.Lx) / (2 * np.pi) ** 2)


def dilate(field: SpectralField2D, level: int) -> SpectralField2D:
    """Coefficients of ``g(2^level x, 2^level y)``: ``c'[2^l j, 2^l k] = c[j, k]``."""
    g = field.grid
    f = 1 << level
    jj, kk = g.mode_index_mesh()
    live = np.abs(field.coeffs) > 0
    c = np.zeros(g.shape, dtype=complex)
    tj, tk = f * jj[live], f * kk[live]
    if np.any(np.abs(tj) >= g.nx // 2) or np.any(np.abs(tk) >= g.ny // 2):
        raise DomainError("dilated support reaches the Nyquist modes; lower max_index")
    c[tj + g.nx // 2, tk + g.ny // 2] = field.coeffs[live]
    return SpectralField2D(g, c)


def _modes(field: SpectralField2D) -> dict:
    live = np.abs(field.coeffs) > 0
    live[field.grid.ix0, :] = False
    return {int(j): np.nonzero(live[j])[0] for j in np.nonzero(live.any(axis=1))[0]}


def kato_ratio(s: float = 1.0, ensemble: int = 50, seed: int = 0, grid: Grid2D | None = None,
               levels: int = 3, max_index: int | None = None, spread: float = 4.0) -> RatioReport:
    """Ratios ``sup_y ||mu W g||_{boundary, s} / ||g||_{H^s}`` over random ``g`` and dyadic dilations.

    ``growth`` is the largest over smallest ratio across all samples and
    dilation levels; the report passes when it is below ``spread``.
    """
    if s < 0:
        raise DomainError("kato_ratio requires s >= 0")
    grid = Grid2D(64, 64, 64.0, 64.0) if grid is None else grid
    max_index = grid.nx >> levels if max_index is None else max_index
    base = [make_sobolev_sample(s, seed + i, grid, max_index=max_index) for i in range(ensemble)]
    ratios = np.zeros((levels, ensemble))
    for lev in range(levels):
        fields = [dilate(f, lev) for f in base]
        gram = trace_gram(grid, s, _modes(fields[0]))
        for i, f in enumerate(fields):
            ratios[lev, i] = kato_slice_norms(f, s, gram).max() / sobolev_norm(f, s)
    rep = RatioReport.from_ratios("kato_free", {"s": s, "grid": [grid.nx, grid.ny, grid.Lx, grid.Ly],
                                                "levels": levels, "max_index": max_index}, ratios)
    rep.growth = rep.max / rep.min
    rep.passed = rep.growth < spread
    rep.detail = {"level_max": ratios.max(axis=1).tolist(), "level_min": ratios.min(axis=1).tolist()}
    return rep


def _upward_growth(rep: RatioReport, ratios: np.ndarray, limit: float):
    # one-sided estimate: only growth of the largest ratio under refinement counts
    lev = ratios.max(axis=1)
    rep.growth = float(lev.max() / lev[0])
    rep.passed = rep.growth < limit
    rep.detail = {"level_max": lev.tolist(), "level_min": ratios.min(axis=1).tolist()}


def _window_times(grid: Grid2D, nt: int = 512) -> np.ndarray:
    return time_window(2.0, nt)


def _boundary_profile(grid: Grid2D, scale: float, seed: int) -> np.ndarray:
    """Zero-trace boundary data ``a(x / scale) sin^4(pi t)`` on ``t in [0, 1]`` with a random smooth profile."""
    rng = np.random.default_rng(seed)
    x = grid.x / scale
    coef = rng.normal(size=4)
    prof = sum(c * x**n for n, c in enumerate(coef)) * np.exp(-x**2 / 2)
    return prof


def w2_xsb_ratio(s: float = 1.0, b: float = 0.45, ensemble: int = 6, seed: int = 0,
                 grid: Grid2D | None = None, scales=(4.0, 2.0, 1.0), spread: float = 4.0) -> RatioReport:
    """Ratios ``||mu W2 h||_{X^{s,b}} / ||chi h||_{boundary, s}`` over random zero-trace ``h``.

    Profiles are compressed in ``x`` by the factors in ``scales``; ``growth``
    is the largest ratio over the largest ratio at the first scale.
    """
    grid = Grid2D(64, 64, 64.0, 64.0) if grid is None else grid
    th = np.arange(129) / 128.0
    times = _window_times(grid)
    cut = mu(times)[:, None, None]
    ratios = np.zeros((len(scales), ensemble))
    for li, sc in enumerate(scales):
        for i in range(ensemble):
            h = _boundary_profile(grid, sc, seed + i)[None, :] * np.sin(np.pi * th)[:, None] ** 4
            bd = extend_boundary(grid, th, h, s)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", TruncationWarning)
                num = xsb_norm_coeffs(grid, times, _rspec.forward(grid, cut * W2Quadrature.build(bd).values(times)), s, b)
                den = boundary_norm_beta(bd.spectrum(), s)
            ratios[li, i] = num / den
    rep = RatioReport.from_ratios("kato_w2_xsb", {"s": s, "b": b, "scales": list(scales)}, ratios)
    _upward_growth(rep, ratios, spread)
    return rep


def q_trace_ratio(s: float = 1.0, b: float = 0.45, ensemble: int = 6, seed: int = 0,
                  grid: Grid2D | None = None, levels: int = 3, spread: float = 4.0) -> RatioReport:
    """Ratios ``||q||_{boundary, s} / (||F||_{X^{s,-b}} + ||F||_{weighted})`` for the Duhamel trace ``q``.

    ``F`` is a random field with time profile ``exp(-4 t^2)`` and a spectrum
    dilated dyadically.  The weighted term uses ``a = 0`` and is added only
    for ``s > 1/2``.  ``growth`` is measured as in :func:`w2_xsb_ratio`.
    """
    grid = Grid2D(64, 64, 64.0, 64.0) if grid is None else grid
    times = _window_times(grid)
    env = np.exp(-4 * times**2)[:, None, None]
    sel = times >= 0
    max_index = grid.nx >> levels
    ratios = np.zeros((levels, ensemble))
    for lev in range(levels):
        for i in range(ensemble):
            base = make_sobolev_sample(s, seed + i, grid, max_index=max_index)
            f = dilate(base, lev)
            rc = env * _rspec.forward(grid, inverse_transform(f))[None]
            I = duhamel_coeffs(grid, times, rc)
            q = q_trace_coeffs(grid, times, I)
            bd = extend_boundary(grid, times[sel], q[sel], s)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", TruncationWarning)
                den = xsb_norm_coeffs(grid, times, rc, s, -b)
                if s > 0.5:
                    den += float(np.sqrt(modulation_norm_sq(grid, times, rc, _rspec_weight(grid, s), -(0.75 - s / 2))))
                ratios[lev, i] = boundary_norm_beta(bd.spectrum(), s) / den
    rep = RatioReport.from_ratios("kato_duhamel_trace", {"s": s, "b": b, "levels": levels}, ratios)
    _upward_growth(rep, ratios, spread)
    return rep


def _rspec_weight(grid: Grid2D, s: float) -> np.ndarray:
    return weighted_spatial_weight(*_rspec.mesh(grid), s, 0.0)


# ---------------------------------------------------------------- bilinear estimates

LATTICE = 0.125


@dataclass(frozen=True)
class LatticeWave:
    """Finite sum ``sum A e^{i(xi x + eta y + tau t)}`` with frequencies on a lattice.

    ``j, k, n`` are integer lattice indices: ``xi = spacing j``,
    ``eta = spacing k`` and ``tau = tau_spacing n``.
    """

    j: np.ndarray
    k: np.ndarray
    n: np.ndarray
    amp: np.ndarray
    spacing: float = LATTICE
    tau_spacing: float = LATTICE

    @property
    def xi(self):
        return self.spacing * self.j

    @property
    def eta(self):
        return self.spacing * self.k

    @property
    def modulation(self):
        return self.tau_spacing * self.n - dispersion_symbol(self.xi, self.eta)


def random_wave(gridN: int, s: float, b: float, rng: np.random.Generator, spacing: float = LATTICE,
                tau_spacing: float = LATTICE, sigma_step: float = 1.0, phases: bool = True) -> LatticeWave:
    """One plane wave per spatial mode ``|j|, |k| <= gridN/2`` (``j != 0``) with a random modulation.

    Modulations are ``sigma_step`` times a random integer in ``[-gridN/2, gridN/2)``,
    then moved to the time lattice.  Moduli are ``r <zeta>^-s <sigma>^-b`` with
    ``r`` uniform on ``(0, 1)``; phases are uniform, or all zero when
    ``phases`` is false (the coherent worst case of the duality argument).
    """
    half = gridN // 2
    j, k = np.meshgrid(np.arange(-half, half + 1), np.arange(-half, half + 1), indexing="ij")
    keep = j != 0
    j, k = j[keep], k[keep]
    om = dispersion_symbol(spacing * j, spacing * k)
    target = om + sigma_step * rng.integers(-half, half, j.size)
    n = np.rint(target / tau_spacing).astype(np.int64)
    sig = tau_spacing * n - om
    zeta2 = (spacing * j) ** 2 + (spacing * k) ** 2
    amp = rng.uniform(0, 1, j.size) * bracket(np.sqrt(zeta2)) ** -s * bracket(sig) ** -b
    amp = amp * (np.exp(2j * np.pi * rng.uniform(0, 1, j.size)) if phases else 1.0)
    return LatticeWave(j, k, n, amp, spacing, tau_spacing)


def single_wave(j: int, k: int, sigma: float, spacing: float = LATTICE, tau_spacing: float = LATTICE) -> LatticeWave:
    om = dispersion_symbol(spacing * j, spacing * k)
    n = int(np.rint((om + sigma) / tau_spacing))
    return LatticeWave(np.array([j]), np.array([k]), np.array([n]), np.array([1.0 + 0j]), spacing, tau_spacing)


def dx_product(u: LatticeWave, v: LatticeWave) -> LatticeWave:
    """``d_x (u v)`` as an exact discrete convolution; the ``xi = 0`` output is dropped."""
    J = np.add.outer(u.j, v.j).ravel()
    K = np.add.outer(u.k, v.k).ravel()
    N = np.add.outer(u.n, v.n).ravel()
    A = (np.multiply.outer(u.amp, v.amp).ravel()) * (1j * u.spacing * J)
    live = J != 0
    J, K, N, A = J[live], K[live], N[live], A[live]
    lo = [int(a.min()) for a in (J, K, N)]
    span = [int(a.max()) - m + 1 for a, m in zip((J, K, N), lo)]
    key = ((J - lo[0]) * span[1] + (K - lo[1])) * span[2] + (N - lo[2])
    uniq, inv = np.unique(key, return_inverse=True)
    amp = np.bincount(inv, A.real, len(uniq)) + 1j * np.bincount(inv, A.imag, len(uniq))
    uj, rest = np.divmod(uniq, span[1] * span[2])
    uk, un = np.divmod(rest, span[2])
    return LatticeWave(uj + lo[0], uk + lo[1], un + lo[2], amp, u.spacing, u.tau_spacing)


def lattice_norm(w: LatticeWave, spatial_w2: np.ndarray, b: float) -> float:
    """``(sum spatial_w2 <tau - omega>^{2b} |A|^2)^{1/2}``; ``spatial_w2`` is per wave."""
    return float(np.sqrt(np.sum(spatial_w2 * bracket(w.modulation) ** (2 * b) * np.abs(w.amp) ** 2)))


def lattice_xsb(w: LatticeWave, s: float, b: float) -> float:
    return lattice_norm(w, xsb_spatial_weight(w.xi, w.eta, s), b)


def lattice_weighted(w: LatticeWave, s: float, a: float, eps: float = 0.05) -> float:
    b1 = 0.75 - (s + a) / 2
    return lattice_norm(w, weighted_spatial_weight(w.xi, w.eta, s, a, eps), -b1)


def _bilinear_ratios(target, s: float, b: float, gridN: int, trials: int, seed: int,
                     phases: bool = True) -> np.ndarray:
    rng = np.random.default_rng([seed, gridN])
    out = np.empty(trials)
    for i in range(trials):
        u, v = random_wave(gridN, s, b, rng, phases=phases), random_wave(gridN, s, b, rng, phases=phases)
        out[i] = target(dx_product(u, v)) / (lattice_xsb(u, s, b) * lattice_xsb(v, s, b))
    return out


def _bilinear_report(name: str, target, s: float, a: float, b: float, grids, trials: int, seed: int,
                     limit: float, phases: bool) -> RatioReport:
    per = {N: _bilinear_ratios(target, s, b, N, trials, seed, phases) for N in grids}
    allr = np.concatenate(list(per.values()))
    rep = RatioReport.from_ratios(name, {"s": s, "a": a, "b": b, "grids": list(grids), "trials": trials,
                                         "random_phases": phases}, allr)
    mx = {N: float(r.max()) for N, r in per.items()}
    rep.growth = mx[grids[-1]] / mx[grids[-2]]
    rep.passed = rep.growth < limit
    rep.detail = {"max_per_grid": {str(N): m for N, m in mx.items()}}
    return rep


def bilinear_ratio(s: float = 1.0, a: float = 0.3, b: float = 0.45, grids=(16, 32), trials: int = 100,
                   seed: int = 0, limit: float = 2.0, phases: bool = True) -> RatioReport:
    """``||d_x(uv)||_{X^{s+a,-b}} / (||u||_{X^{s,b}} ||v||_{X^{s,b}})`` for random lattice waves.

    ``growth`` compares the largest ratio on the last two ``grids`` (sizes of
    the frequency lattice per axis).
    """
    return _bilinear_report("bilinear", lambda w: lattice_xsb(w, s + a, -b), s, a, b, grids, trials, seed, limit,
                            phases)


def weighted_bilinear_ratio(s: float = 1.0, a: float = 0.3, b: float = 0.45, grids=(16, 32), trials: int = 100,
                            seed: int = 0, limit: float = 2.0, eps: float = 0.05, phases: bool = True) -> RatioReport:
    """As :func:`bilinear_ratio` with the anisotropic target norm (``b1 = 3/4 - (s+a)/2``)."""
    if not (0.3 < s < 2.5 and 0.5 - s < a < a_max(s)):
        raise DomainError(f"require 3/10 < s < 5/2 and 1/2 - s < a < a_max(s), got s = {s}, a = {a}")
    return _bilinear_report("weighted_bilinear", lambda w: lattice_weighted(w, s, a, eps), s, a, b, grids,
                            trials, seed, limit, phases)


# ---------------------------------------------------------------- smoothing gain

# half-octave shells in index radius; on the default smoothing grid they span
# |zeta| from 1 to 4, inside the dealiased disc and past the bracket's knee
SHELL_EDGES = (5, 7, 10, 14, 20)


def shell_energies(field: SpectralField2D, edges=SHELL_EDGES) -> np.ndarray:
    """``sum |c|^2`` over index shells ``edges[i] <= |(j, k)| < edges[i+1]``."""
    j, k = field.grid.mode_index_mesh()
    r = np.hypot(j, k)
    e = np.abs(field.coeffs) ** 2
    return np.array([e[(r >= lo) & (r < hi)].sum() for lo, hi in zip(edges[:-1], edges[1:])])


def shell_slope(energies: np.ndarray, edges=SHELL_EDGES) -> float:
    """Decay rate ``r`` with shell energies ``~ R^{-2 r}`` for shells starting at radius ``R``.

    For ``|c| ~ |zeta|^{-(s+1)}`` in two dimensions ``r = s``.
    """
    x = np.log2(np.asarray(edges[:-1], dtype=float))
    return float(-np.polyfit(x, np.log2(energies), 1)[0] / 2)


@dataclass
class SmoothingReport:
    gain: float
    control_gain: float
    target: float
    slope_nonlinear: float
    slope_linear: float
    energies_nonlinear: list
    energies_linear: list
    passed: bool | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def smoothing_data(grid: Grid2D, s: float, seed: int, amplitude: float, knee: float = 0.25) -> InitialData:
    """Rough initial data: a random field with an ``H^s`` tail under a plateau window.

    The window is 1 for ``|x|, |y| < 3 Lx/16`` and vanishes beyond ``13 Lx/32``;
    a Gaussian window narrow enough to vanish at the edges would, in the
    reflected copies compressed three times in ``y``, smear the spectrum over
    the measured shells.  The tail starts at ``|zeta| = knee``.
    """
    f = make_sobolev_sample(s, seed, grid, knee=knee)
    x, y = grid.x[:, None], grid.y[None, :]
    r0, r1 = 3 * grid.Lx / 16, 13 * grid.Lx / 32
    win = (1 - smooth_step(r0, r1, np.abs(x))) * (1 - smooth_step(r0, r1, np.abs(y)))
    vals = inverse_transform(f) * win
    vals *= amplitude / np.abs(vals).max()  # amplitude 0 gives zero data
    return InitialData(grid, vals[:, grid.iy0:].copy(), s)


def smoothing_fit(g_seed: int = 0, s: float = 1.0, params: SolverParams | None = None, grid: Grid2D | None = None,
                  amplitude: float = 0.05, edges=SHELL_EDGES, tolerance: float = 0.1,
                  control_tol: float = 0.05) -> SmoothingReport:
    """Empirical smoothing gain of the nonlinear part ``u - W0(g, h)`` at ``t = T/2``.

    ``passed`` is ``None`` when a shell carries no energy (zero data).

    ``h`` is the free-flow trace ``p`` of the data, so the compatibility holds
    for every ``s``.  The gain is the difference of the shell decay rates of
    the nonlinear and the linear part; the control compares the linear part
    with the extended data and should vanish.
    """
    # dx = 1/2 reaches |zeta| = 4 in the dealiased disc; 2048 time samples
    # resolve the time frequencies xi^5 of the Duhamel trace there
    grid = Grid2D(64, 64, 32.0, 32.0) if grid is None else grid
    if params is None:
        params = SolverParams(s=s, nt=2048)
    target = min(0.25, a_max(s) - 0.05)
    g = smoothing_data(grid, s, g_seed, amplitude)
    g_e = extend_initial(g)
    th = np.arange(129) / 128.0
    h = extend_boundary(grid, th, compute_p(g_e, th), s, require_zero_trace=False)
    u, diag = picard_solve(g, h, params)
    n = int(np.argmin(np.abs(u.times - params.T / 2)))
    lin = forward_transform(grid, diag.linear_part.values[n])
    nonlin = forward_transform(grid, u.values[n] - diag.linear_part.values[n])
    e_lin, e_non = shell_energies(lin, edges), shell_energies(nonlin, edges)
    e_ref = shell_energies(g_e, edges)
    if not (np.all(e_non > 0) and np.all(e_lin > 0)):
        # zero data: no slopes to compare, the gain is not applicable
        nan = float("nan")
        return SmoothingReport(nan, nan, target, nan, nan, e_non.tolist(), e_lin.tolist(), None)
    sl, sn = shell_slope(e_lin, edges), shell_slope(e_non, edges)
    rep = SmoothingReport(sn - sl, sl - shell_slope(e_ref, edges), target, sn, sl, e_non.tolist(), e_lin.tolist())
    rep.passed = bool(rep.gain >= target - tolerance and abs(rep.control_gain) < control_tol)
    return rep
