"""Grid construction, Field arithmetic, quadrature, norms and field I/O."""

import numpy as np
import pytest

from mcsvortex import (
    Field,
    constant_field,
    h2_norm,
    integrate,
    laplacian,
    make_grid,
    mean,
    norms,
    read_field,
    spectral_inner,
    write_field,
)
from helpers import smooth_field

L = 2.0 * np.pi


def test_grid_attributes():
    g = make_grid(64, L)
    assert g.n == 64
    assert g.shape == (64, 64)
    assert g.spacing == pytest.approx(L / 64)
    assert g.area == pytest.approx(L * L)
    assert g.mesh_x.shape == g.shape
    assert g.k2.shape == (64, 33)
    np.testing.assert_allclose(g.k4, g.k2**2)
    # rfft weighting: doubled for the complex-conjugate columns only
    assert g.mode_weight[0, 0] == 1.0 and g.mode_weight[0, 1] == 2.0


@pytest.mark.parametrize(
    "n, length, msg",
    [
        (15, L, "even"),
        (8, L, "at least"),
        (64, 0.0, "positive"),
        (64, -1.0, "positive"),
        (64.5, L, "integer"),
    ],
)
def test_grid_validation(n, length, msg):
    with pytest.raises(ValueError, match=msg):
        make_grid(n, length)


def test_field_shape_and_finite_validation():
    g = make_grid(16, L)
    with pytest.raises(ValueError, match="does not match"):
        Field(g, np.zeros((16, 8)))
    with pytest.raises(ValueError, match="non-finite"):
        Field(g, np.full(g.shape, np.nan))


def test_field_immutable():
    f = smooth_field(make_grid(16, L), seed=0)
    with pytest.raises(ValueError):
        f.values[0, 0] = 1.0
    with pytest.raises(AttributeError):
        f.values = np.zeros(f.grid.shape)


def test_field_arithmetic_and_grid_mismatch():
    g = make_grid(16, L)
    f = smooth_field(g, seed=1)
    h = smooth_field(g, seed=2)
    np.testing.assert_allclose((f + h).values, f.values + h.values)
    np.testing.assert_allclose((f - h).values, f.values - h.values)
    np.testing.assert_allclose((2.0 * f).values, 2.0 * f.values)
    np.testing.assert_allclose((f - 1.5).values, f.values - 1.5)
    other = smooth_field(make_grid(32, L), seed=1)
    with pytest.raises(ValueError, match="different grids"):
        _ = f + other


def test_fft_round_trip():
    g = make_grid(64, L)
    f = smooth_field(g, seed=3)
    back = np.fft.irfft2(f.spectrum, s=g.shape)
    assert np.abs(back - f.values).max() <= 1e-12


def test_integrate_and_mean_constants():
    g = make_grid(32, 3.0)
    c = constant_field(g, 2.5)
    assert integrate(c) == pytest.approx(2.5 * 9.0, rel=1e-14)
    assert mean(c) == pytest.approx(2.5, rel=1e-14)


def test_integrate_plane_wave_is_zero():
    g = make_grid(64, L)
    f = Field(g, np.sin(3.0 * g.mesh_x) * np.cos(2.0 * g.mesh_y))
    assert abs(integrate(f)) <= 1e-12


def test_parseval_inner_product():
    g = make_grid(64, L)
    f = smooth_field(g, seed=4, offset=0.3)
    h = smooth_field(g, seed=5, offset=-0.2)
    direct = float(np.sum(f.values * h.values)) * g.spacing**2
    assert spectral_inner(f, h) == pytest.approx(direct, abs=1e-10 * (1 + abs(direct)))


def test_norms_of_plane_wave():
    # f = sin(kx): ||f||_2^2 = L^2/2, |f|_H1 = k ||f||_2, ||lap f||_2 = k^2 ||f||_2
    g = make_grid(64, L)
    k = 3.0
    f = Field(g, np.sin(k * g.mesh_x))
    nm = norms(f)
    assert nm.l2 == pytest.approx(np.sqrt(g.area / 2.0), rel=1e-12)
    assert nm.h1 == pytest.approx(k * nm.l2, rel=1e-12)
    assert nm.lap == pytest.approx(k * k * nm.l2, rel=1e-12)
    assert nm.linf == pytest.approx(np.abs(f.values).max())
    assert h2_norm(f) == pytest.approx(np.sqrt(nm.l2**2 + nm.h1**2 + nm.lap**2), rel=1e-12)


def test_dirichlet_energy_matches_laplacian_pairing():
    # int |grad f|^2 = -int f lap f for periodic fields
    g = make_grid(64, L)
    f = smooth_field(g, seed=6)
    lhs = norms(f).h1 ** 2
    rhs = -spectral_inner(f, laplacian(f))
    assert lhs == pytest.approx(rhs, abs=1e-10 * (1 + abs(rhs)))


def test_write_read_round_trip(tmp_path):
    g = make_grid(32, L)
    f = smooth_field(g, seed=7, amplitude=3.0, offset=1.0)
    path = tmp_path / "f.vfd"
    write_field(path, f)
    back = read_field(path, g)
    assert np.array_equal(back.values, f.values)
    # and without a grid hint the dump reconstructs its own grid
    auto = read_field(path)
    assert auto.grid.n == 32 and auto.grid.length == pytest.approx(L)


def test_read_field_errors(tmp_path):
    g = make_grid(16, L)
    path = tmp_path / "f.vfd"
    write_field(path, smooth_field(g, seed=8))
    with pytest.raises(ValueError, match="expected"):
        read_field(path, make_grid(32, L))
    bad = tmp_path / "bad.vfd"
    bad.write_text("not a field dump\n")
    with pytest.raises(ValueError, match="header"):
        read_field(bad)
