"""Plain-text snapshots and JSON reports.

Field snapshot: a header line ``nx ny Lx Ly`` followed by ``nx`` comma
separated rows of ``ny`` values (``u[m, n] = u(x_m, y_n)``).  Boundary
snapshot: a header ``nx nt Lx t_last`` followed by ``nt`` rows of ``nx``
values at uniform times from 0 to ``t_last``.  Spectral dump: CSV rows
``j, k, re, im`` in symmetric mode order.
"""
from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .grid import Grid2D, GridError, SpectralField2D


def _atomic_write(path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _rows(values: np.ndarray) -> str:
    return "\n".join(",".join(repr(float(v)) for v in row) for row in values) + "\n"


def _read(path, header_len: int = 4):
    lines = Path(path).read_text().strip().splitlines()
    if not lines:
        raise GridError(f"{path}: empty snapshot")
    head = lines[0].replace(",", " ").split()
    if len(head) != header_len:
        raise GridError(f"{path}: header must have {header_len} fields, got {lines[0]!r}")
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]]) if lines[1:] else np.zeros((0, 0))
    return head, data


def write_field(path, grid: Grid2D, values: np.ndarray):
    values = np.asarray(values, dtype=float)
    if values.shape != grid.shape:
        raise GridError(f"values must have shape {grid.shape}")
    _atomic_write(path, f"{grid.nx} {grid.ny} {grid.Lx!r} {grid.Ly!r}\n" + _rows(values))


def read_field(path) -> tuple[Grid2D, np.ndarray]:
    head, data = _read(path)
    grid = Grid2D(int(head[0]), int(head[1]), float(head[2]), float(head[3]))
    if data.shape != grid.shape:
        raise GridError(f"{path}: expected {grid.shape} values, got {data.shape}")
    return grid, data


def write_boundary(path, grid: Grid2D, times: np.ndarray, h: np.ndarray):
    h = np.asarray(h, dtype=float)
    if h.shape != (len(times), grid.nx):
        raise GridError(f"boundary samples must have shape {(len(times), grid.nx)}")
    _atomic_write(path, f"{grid.nx} {len(times)} {grid.Lx!r} {float(times[-1])!r}\n" + _rows(h))


def read_boundary(path) -> tuple[int, float, np.ndarray, np.ndarray]:
    """Return ``(nx, Lx, times, h)``."""
    head, data = _read(path)
    nx, nt, Lx, t_last = int(head[0]), int(head[1]), float(head[2]), float(head[3])
    if data.shape != (nt, nx):
        raise GridError(f"{path}: expected {(nt, nx)} values, got {data.shape}")
    return nx, Lx, np.linspace(0.0, t_last, nt), data


def write_spectrum(path, field: SpectralField2D):
    j, k = field.grid.mode_index_mesh()
    c = field.coeffs
    lines = ["j,k,re,im"] + [f"{a},{b},{float(z.real)!r},{float(z.imag)!r}" for a, b, z in zip(j.ravel(), k.ravel(), c.ravel())]
    _atomic_write(path, "\n".join(lines) + "\n")


def read_spectrum(path, grid: Grid2D) -> SpectralField2D:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    c = np.zeros(grid.shape, dtype=complex)
    j = data[:, 0].astype(int) + grid.nx // 2
    k = data[:, 1].astype(int) + grid.ny // 2
    c[j, k] = data[:, 2] + 1j * data[:, 3]
    return SpectralField2D(grid, c)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if np.isfinite(x) else str(x)
    return obj


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True)


def write_json(path, obj):
    _atomic_write(path, dumps(obj) + "\n")
