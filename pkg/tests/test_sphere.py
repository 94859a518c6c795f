import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import sphere_extension_closed_form, sphere_extension_dense

from kglab.grid import Grid
from kglab.potentials import InverseSquare, fp_norm, make_potential
from kglab.sphere import (
    BandWarning,
    node_count,
    resolvable_phase,
    sphere_density,
    sphere_extension,
    sphere_extension_grid,
    trace_ratio,
    weighted_restriction_check,
)

pytestmark = pytest.mark.filterwarnings("ignore::kglab.potentials.FpBoundaryWarning")


@given(st.floats(0.1, 10), st.integers(64, 5000))
def test_weights_positive_and_sum_to_area(r, n):
    d = sphere_density(r, n)
    assert np.all(d.weights > 0)
    assert abs(d.area - 4 * math.pi * r * r) <= 1e-10 * 4 * math.pi * r * r
    assert np.allclose(np.linalg.norm(d.nodes, axis=1), r)


def test_zero_phase_gives_area():
    d = sphere_density(2.0, 512)
    assert abs(sphere_extension(d, [[0.0, 0.0, 0.0]])[0] - 16 * math.pi) < 1e-10


def test_constant_density_matches_closed_form(rng):
    r = 2.0
    d = sphere_density(r, n_theta=48)
    band = resolvable_phase(d.n_theta, d.n_phi) / r
    dirs = rng.standard_normal((200, 3))
    x = dirs / np.linalg.norm(dirs, axis=1)[:, None] * rng.uniform(0, band, (200, 1))
    err = np.abs(sphere_extension(d, x) - sphere_extension_closed_form(r, x))
    assert err.max() < 1e-6


def test_grid_extension_agrees_with_direct_sum():
    g = Grid(3, 4.0, 8)
    d = sphere_density(1.0, n_theta=24, func=lambda w: 1 + w[:, 0] * w[:, 2] + 0.5j * w[:, 1])
    full = sphere_extension_grid(d, g)
    X, Y, Z = np.meshgrid(g.x1d, g.x1d, g.x1d, indexing="ij")
    pts = np.stack([X.ravel(), Y.ravel(), Z.ravel()], axis=1)
    np.testing.assert_allclose(full.ravel(), sphere_extension(d, pts), atol=1e-10)


def test_grid_extension_closed_form_to_1e6():
    g = Grid(3, 8.0, 32)
    for r in (1.0, 2.0, 4.0):
        d = sphere_density(r, node_count(r, g.L * math.sqrt(3), g.dx))
        with warnings.catch_warnings():
            warnings.simplefilter("error", BandWarning)
            vals = sphere_extension_grid(d, g)
        X, Y, Z = g.open_coords()
        rho = np.sqrt(X * X + Y * Y + Z * Z)
        exact = sphere_extension_closed_form(r, np.stack(np.broadcast_arrays(X, Y, Z), -1).reshape(-1, 3)).reshape(g.shape)
        assert np.max(np.abs(vals - exact)) < 1e-6, r
        assert rho.max() * r <= resolvable_phase(d.n_theta, d.n_phi)


def test_varying_density_against_dense_midpoint_rule():
    d = sphere_density(1.5, n_theta=32, func=lambda w: np.exp(1j * w[:, 0]) * (1 + w[:, 2] ** 2))
    x = np.array([0.7, -1.1, 2.0])
    th = (np.arange(600) + 0.5) * math.pi / 600
    ph = (np.arange(1200) + 0.5) * 2 * math.pi / 1200
    T, P = np.meshgrid(th, ph, indexing="ij")
    w = 1.5 * np.stack([np.sin(T) * np.cos(P), np.sin(T) * np.sin(P), np.cos(T)], axis=-1)
    dens = np.exp(1j * w[..., 0]) * (1 + w[..., 2] ** 2)
    jac = 1.5**2 * np.sin(T) * (math.pi / 600) * (2 * math.pi / 1200)
    oracle = np.sum(dens * np.exp(1j * w @ x) * jac)
    assert abs(sphere_extension(d, [x])[0] - oracle) < 1e-4 * abs(oracle)
    assert abs(sphere_extension_dense(1.5, x) - sphere_extension_closed_form(1.5, x)[0]) < 1e-4


def test_band_warning():
    d = sphere_density(4.0, 128)
    with pytest.warns(BandWarning):
        sphere_extension(d, [[20.0, 0.0, 0.0]])


def test_node_count_rule():
    assert node_count(1.0, 1.0, 1.0) == 64
    assert node_count(1.0, 10.0, 0.5) == 800
    assert node_count(4.0, 30.0, 0.5) == 10_000


def test_trace_ratio_bounded_and_converging():
    g = Grid(3, 8.0, 32)
    d = sphere_density(1.0, node_count(1.0, g.L * math.sqrt(3), g.dx))
    vals = sphere_extension_grid(d, g)
    ratios = [trace_ratio(d, g, R, vals) for R in (0.5, 1.0, 2.0, 4.0, 8.0)]
    assert all(0 < q < 200 for q in ratios)
    # large-R limit for d = 1 is 8 pi^2
    assert abs(ratios[-1] / (8 * math.pi**2) - 1) < 0.2


def test_restriction_check_properties():
    g = Grid(3, 8.0, 16)
    V = make_potential(InverseSquare(1.0, g.dx), g)
    fp = fp_norm(V).value
    d = sphere_density(2.0, node_count(2.0, g.L * math.sqrt(3), g.dx))
    vals = sphere_extension_grid(d, g)
    assert weighted_restriction_check(d.with_values(0.0), V, fp, 0 * vals) == 0.0
    base = weighted_restriction_check(d, V, fp, vals)
    doubled = weighted_restriction_check(d, 2 * V, fp_norm(2 * V).value, vals)
    assert abs(doubled / base - 1) < 1e-10
    raw = weighted_restriction_check(d, V, fp, vals, rescale=False)
    assert math.isclose(raw / math.sqrt(2.0), base, rel_tol=1e-14)
