"""Smooth cutoffs: the time cutoff ``mu``, the half-line cutoff ``rho`` and ``f = rho e^{-y}``."""
from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicSpline


def _sigma(r):
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    pos = r > 0
    out[pos] = np.exp(-1.0 / r[pos])
    return out


def smooth_step(a, b, t):
    """C-infinity step: 0 for t <= a, 1 for t >= b."""
    r = (np.asarray(t, dtype=float) - a) / (b - a)
    up = _sigma(r)
    return up / (up + _sigma(1.0 - r))


def mu(t):
    """Even cutoff, 1 on [-1, 1] and 0 outside (-2, 2)."""
    at = np.abs(np.asarray(t, dtype=float))
    lo = _sigma(2.0 - at)
    return lo / (lo + _sigma(at - 1.0))


def rho(y):
    """1 on [0, inf), 0 on (-inf, -2]."""
    y = np.asarray(y, dtype=float)
    lo = _sigma(y + 2.0)
    return lo / (lo + _sigma(-y))


def f_kernel(y):
    """``f(y) = rho(y) exp(-y)``: exponential decay for y > 0, smoothly cut below -2."""
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    live = y > -2.0
    out[live] = rho(y[live]) * np.exp(-y[live])
    return out


def time_taper(t, t_flat: float = 1.0, t_end: float = 1.5):
    """Cutoff equal to 1 on [-inf, t_flat] that vanishes beyond ``t_end``."""
    return 1.0 - smooth_step(t_flat, t_end, t)


@lru_cache(maxsize=4)
def _mu_hat_table(sigma_max: float = 400.0, n: int = 2**16):
    # mu is supported in [-2, 2]; a fine trapezoid sum is spectrally accurate.
    t = np.linspace(-2.0, 2.0, 4097)
    w = np.full(t.size, t[1] - t[0])
    s = np.linspace(-sigma_max, sigma_max, n)
    m = mu(t)
    vals = np.empty(n)
    for i in range(0, n, 4096):
        vals[i:i + 4096] = (np.cos(np.outer(s[i:i + 4096], t)) * m) @ w
    return s, vals


@lru_cache(maxsize=1)
def _mu_hat_spline():
    s_tab, v_tab = _mu_hat_table()
    return s_tab, CubicSpline(s_tab, v_tab)


def mu_hat(sigma):
    """Fourier transform ``int mu(t) e^{-i sigma t} dt`` (real, even)."""
    s_tab, spline = _mu_hat_spline()
    sigma = np.abs(np.asarray(sigma, dtype=float))
    return np.where(sigma <= s_tab[-1], spline(np.minimum(sigma, s_tab[-1])), 0.0)


def mu_l2() -> float:
    t = np.linspace(-2.0, 2.0, 20001)
    return float(np.sqrt(np.trapezoid(mu(t) ** 2, t)))
