import math

import numpy as np
import pytest

from willmore_tori.fields import (
    GridMismatchError,
    ScalarField,
    TorusGrid,
    dft,
    field_from_function,
    gradient,
    idft,
    integrate,
    laplacian,
    read_field,
    resample,
    write_field,
)
from willmore_tori.moduli import ModuliPoint


def skew_grid(n=32):
    return TorusGrid(ModuliPoint(0.3, 1.4, 2.0), n, n)


def plane_wave(grid, p, q, phase=0.0):
    m = grid.moduli
    k1 = q / m.scale
    k2 = (p - m.x * q) / (m.y * m.scale)
    return field_from_function(grid, lambda w1, w2: np.cos(2 * math.pi * (k1 * w1 + k2 * w2) + phase))


def test_plane_waves_are_periodic_lattice_modes():
    grid = skew_grid()
    f = plane_wave(grid, 2, 1, 0.4)
    A, B = dft(f).cos_sin(2, 1)
    assert A == pytest.approx(math.cos(0.4), abs=1e-12)
    assert B == pytest.approx(-math.sin(0.4), abs=1e-12)  # cos(a + b) = cos b cos a - sin b sin a
    # all power in the single mode
    assert dft(f).power() == pytest.approx(0.5)


def test_laplacian_eigenvalue_sign():
    grid = skew_grid()
    f = plane_wave(grid, 1, 2)
    m = grid.moduli
    xi2 = (1 / m.scale) ** 2 * (2**2 + ((1 - m.x * 2) / m.y) ** 2)
    lap = laplacian(f)
    np.testing.assert_allclose(lap.values, 4 * math.pi**2 * xi2 * f.values, atol=1e-9)


def test_laplacian_integrates_to_zero_and_is_nonnegative():
    rng = np.random.default_rng(0)
    grid = skew_grid()
    f = grid.field(rng.normal(size=grid.shape))
    assert integrate(laplacian(f)) == pytest.approx(0.0, abs=1e-10)
    assert integrate(f, laplacian(f)) >= 0


def test_gradient_of_plane_wave():
    grid = TorusGrid(ModuliPoint(0.0, 1.0), 32, 32)
    f = field_from_function(grid, lambda w1, w2: np.sin(2 * math.pi * w1))
    d1, d2 = gradient(f)
    w1, _ = grid.positions()
    np.testing.assert_allclose(d1.values, 2 * math.pi * np.cos(2 * math.pi * w1), atol=1e-10)
    np.testing.assert_allclose(d2.values, 0, atol=1e-10)


def test_dft_round_trip():
    grid = skew_grid(16)
    f = grid.field(np.arange(256.0))
    np.testing.assert_allclose(idft(dft(f)).values, f.values, atol=1e-9)


def test_integrate_mismatched_grids():
    a = TorusGrid(ModuliPoint(0, 1), 16, 16).constant(1.0)
    b = TorusGrid(ModuliPoint(0, 1), 32, 32).constant(1.0)
    with pytest.raises(GridMismatchError):
        integrate(a, b)


def test_field_rejects_bad_input():
    grid = TorusGrid(ModuliPoint(0, 1), 8, 8)
    with pytest.raises(ValueError):
        ScalarField(grid, np.zeros(10))
    with pytest.raises(ValueError):
        ScalarField(grid, np.full(64, np.nan))
    with pytest.raises(ValueError):
        TorusGrid(ModuliPoint(0, 1), 4, 8)


def test_resample_preserves_trig_polynomial():
    grid = skew_grid(16)
    f = plane_wave(grid, 1, 1, 0.3)
    g = resample(f, 32, 32)
    np.testing.assert_allclose(g.values, plane_wave(g.grid, 1, 1, 0.3).values, atol=1e-12)


def test_file_round_trip(tmp_path):
    f = plane_wave(skew_grid(8), 1, 0)
    path = tmp_path / "u.json"
    write_field(f, path)
    g = read_field(path)
    assert g.grid == f.grid
    np.testing.assert_array_equal(g.values, f.values)


def test_file_rejects_nan(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"lattice": {"x": 0, "y": 1}, "grid": [8, 8], "u": [NaN' + ", 0" * 63 + "]}")
    with pytest.raises(ValueError):
        read_field(path)
    path.write_text('{"grid": [8, 8]}')
    with pytest.raises(ValueError, match="malformed"):
        read_field(path)
