"""Four-point Lagrange interpolation on a uniform grid."""
from __future__ import annotations

import numpy as np


def lagrange4(values: np.ndarray, x0: float, dx: float, xq: np.ndarray):
    """Interpolate ``values[..., n]`` sampled at ``x0 + dx*arange(n)`` at ``xq[..., m]``.

    Returns ``(out, outside)`` where ``outside`` flags query points without a
    full four-point stencil; those entries are set to 0.
    """
    n = values.shape[-1]
    u = (np.asarray(xq, dtype=float) - x0) / dx
    i = np.floor(u).astype(np.int64) - 1
    r = u - (i + 1)
    outside = (i < 0) | (i + 3 > n - 1)
    ic = np.clip(i, 0, n - 4)
    w0 = -r * (r - 1) * (r - 2) / 6
    w1 = (r + 1) * (r - 1) * (r - 2) / 2
    w2 = -(r + 1) * r * (r - 2) / 2
    w3 = (r + 1) * r * (r - 1) / 6
    lead = np.broadcast_shapes(values.shape[:-1], u.shape[:-1])
    vals = np.broadcast_to(values, lead + (n,))
    ic = np.broadcast_to(ic, lead + ic.shape[-1:])
    out = (w0 * np.take_along_axis(vals, ic, -1) + w1 * np.take_along_axis(vals, ic + 1, -1)
           + w2 * np.take_along_axis(vals, ic + 2, -1) + w3 * np.take_along_axis(vals, ic + 3, -1))
    out = np.where(outside, 0.0, out)
    return out, np.broadcast_to(outside, out.shape)


def lagrange4_stencil(x0: float, dx: float, n: int, xq: float):
    """Indices and weights of the four-point stencil at a single point, or ``None`` if outside."""
    u = (xq - x0) / dx
    i = int(np.floor(u)) - 1
    if i < 0 or i + 3 > n - 1:
        return None
    r = u - (i + 1)
    w = np.array([-r * (r - 1) * (r - 2) / 6, (r + 1) * (r - 1) * (r - 2) / 2,
                  -(r + 1) * r * (r - 2) / 2, (r + 1) * r * (r - 1) / 6])
    return np.arange(i, i + 4), w
