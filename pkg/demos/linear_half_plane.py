"""Boundary data driving the linear half-plane problem.

A smooth boundary packet is switched on and off in time (zero trace at
t = 0, so no initial data are needed).  The solution is assembled from the
two boundary forcing operators; we then check that it reproduces the
boundary data at y = 0 and satisfies the linear equation in the interior.
"""
import warnings

import numpy as np

from kp5.data import InitialData, extend_boundary
from kp5.duhamel import pde_residual
from kp5.grid import Grid2D
from kp5.linear import linear_solution
from kp5.norms import TruncationWarning, boundary_norm_beta

grid = Grid2D()  # 128 x 128 on [-32, 32)^2
t = np.linspace(0.0, 1.0, 64)

# x e^{-x^2/8} has its spectrum at |xi| <~ 1, where the oscillatory
# operator's frequency curve stays inside the resolved time band
h = (grid.x * np.exp(-grid.x**2 / 8))[None, :] * np.sin(np.pi * t)[:, None] ** 4
bd = extend_boundary(grid, t, h, s=1.0)
# 64 time samples leave a little spectrum at the band edge; the norm warns
# about it (ratio ~1e-5) but the value is good to that level
with warnings.catch_warnings():
    warnings.simplefilter("ignore", TruncationWarning)
    print(f"boundary norm (s = 1): {boundary_norm_beta(bd.spectrum(), 1.0):.4f}")

sol = linear_solution(InitialData(grid, np.zeros((grid.nx, grid.ny // 2))), bd)

inner = (t > 0.1) & (t < 0.9)
err = np.linalg.norm(sol.trace(t[inner]) - h[inner]) / np.linalg.norm(h[inner])
print(f"trace recovery error on 0.1 < t < 0.9: {err:.2%}")

u = sol.sample(t)
print(f"relative residual of the linear equation in y > 0: {pde_residual(u, (0.1, 0.9), nonlinear=False):.2%}")

# the solution leaks into the half-plane with a decaying profile in y
iy = grid.iy0
amp = np.abs(u.values[32]).max(axis=0)
for y in (0.0, 2.0, 8.0, 16.0):
    print(f"  max |u(x, {y:4.1f}, t=0.5)| = {amp[iy + int(round(y / grid.dy))]:.3e}")
