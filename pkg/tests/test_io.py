import json

import numpy as np
import pytest

from kp5 import io as kio
from kp5.grid import Grid2D, GridError, forward_transform


def test_field_round_trip(tmp_path, rng):
    grid = Grid2D(8, 16, 4.0, 6.5)
    u = rng.standard_normal(grid.shape)
    kio.write_field(tmp_path / "u.csv", grid, u)
    g2, v = kio.read_field(tmp_path / "u.csv")
    assert (g2.nx, g2.ny, g2.Lx, g2.Ly) == (8, 16, 4.0, 6.5)
    np.testing.assert_array_equal(u, v)


def test_field_shape_checked(tmp_path):
    grid = Grid2D(8, 8, 1.0, 1.0)
    with pytest.raises(GridError):
        kio.write_field(tmp_path / "u.csv", grid, np.zeros((8, 4)))


def test_bad_header_rejected(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("8 8 1.0\n0,0\n")
    with pytest.raises(GridError, match="header"):
        kio.read_field(p)


def test_row_count_checked(tmp_path):
    p = tmp_path / "short.csv"
    p.write_text("8 8 1.0 1.0\n" + "0,0,0,0,0,0,0,0\n" * 3)
    with pytest.raises(GridError, match="expected"):
        kio.read_field(p)


def test_empty_file_rejected(tmp_path):
    p = tmp_path / "empty.csv"
    p.write_text("")
    with pytest.raises(GridError, match="empty"):
        kio.read_field(p)


def test_boundary_round_trip(tmp_path, rng):
    grid = Grid2D(8, 8, 3.0, 3.0)
    t = np.linspace(0.0, 0.5, 5)
    h = rng.standard_normal((5, 8))
    kio.write_boundary(tmp_path / "h.csv", grid, t, h)
    nx, Lx, t2, h2 = kio.read_boundary(tmp_path / "h.csv")
    assert (nx, Lx) == (8, 3.0)
    np.testing.assert_allclose(t2, t)
    np.testing.assert_array_equal(h2, h)


def test_spectrum_round_trip(tmp_path, rng):
    grid = Grid2D(8, 8, 2 * np.pi, 2 * np.pi)
    f = forward_transform(grid, rng.standard_normal(grid.shape))
    kio.write_spectrum(tmp_path / "c.csv", f)
    back = kio.read_spectrum(tmp_path / "c.csv", grid)
    np.testing.assert_allclose(back.coeffs, f.coeffs, rtol=0, atol=1e-15)


def test_json_non_finite_and_numpy(tmp_path):
    obj = {"a": np.float64(np.nan), "b": np.arange(3), "c": np.bool_(True), "d": (1.5, np.inf), 4: np.int64(2)}
    kio.write_json(tmp_path / "r.json", obj)
    back = json.loads((tmp_path / "r.json").read_text())
    assert back == {"a": "nan", "b": [0, 1, 2], "c": True, "d": [1.5, "inf"], "4": 2}
