import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import helmholtz_fd

from kglab.errors import SymbolError
from kglab.grid import ComplexField, Grid, SpaceTimeField
from kglab.multipliers import (
    apply_multiplier,
    apply_multiplier_spacetime,
    bessel_derivative,
    evaluate_symbol,
    riesz_derivative,
    riesz_symbol,
)


def _gauss(grid, w=1.0):
    return ComplexField.from_function(grid, lambda *x: np.exp(-sum(c * c for c in x) / (2 * w * w)))


def test_bessel_two_matches_finite_difference_stencil():
    # N = 64, Gaussian resolved well enough that the stencil's own O(dx^2)
    # error stays under the 1e-3 tolerance
    g = Grid(1, 12.5, 64)
    f = _gauss(g, 2.5)
    spec = bessel_derivative(f, 2.0).values
    fd = helmholtz_fd(f.values, g.dx)
    assert np.linalg.norm(spec - fd) / np.linalg.norm(spec) < 1e-3


def test_stencil_discrepancy_is_second_order():
    # the remaining gap is the stencil's: it shrinks 4x per halving of dx
    errs = []
    for N in (64, 128, 256):
        g = Grid(1, 8.0, N)
        f = _gauss(g)
        spec = bessel_derivative(f, 2.0).values
        errs.append(np.linalg.norm(spec - helmholtz_fd(f.values, g.dx)) / np.linalg.norm(spec))
    assert 3.8 < errs[0] / errs[1] < 4.2 and 3.8 < errs[1] / errs[2] < 4.2


def test_bessel_two_against_exact_second_derivative():
    g = Grid(1, 8.0, 64)
    x = g.x1d
    f = _gauss(g)
    exact = np.exp(-x * x / 2) * (1 - (x * x - 1))
    assert np.max(np.abs(bessel_derivative(f, 2.0).values - exact)) < 1e-3


def test_refinement_changes_less_than_tolerance():
    # doubling N leaves a resolved half-derivative unchanged on common sites
    coarse, fine = Grid(3, 8.0, 32), Grid(3, 8.0, 64)
    a = bessel_derivative(_gauss(coarse), 0.5).values
    b = bessel_derivative(_gauss(fine), 0.5).values[::2, ::2, ::2]
    assert np.linalg.norm(a - b) / np.linalg.norm(a) < 1e-6


@given(st.floats(-2, 2))
def test_bessel_inverse_pair_is_identity(s):
    g = Grid(2, 4.0, 16)
    f = _gauss(g)
    back = bessel_derivative(bessel_derivative(f, s), -s).values
    assert np.linalg.norm(back - f.values) <= 1e-11 * np.linalg.norm(f.values)


def test_plane_wave_eigenfunctions():
    g = Grid(3, np.pi, 8)
    e = ComplexField.from_function(g, lambda x, y, z: np.exp(1j * (2 * x - y + 3 * z)))
    np.testing.assert_allclose(bessel_derivative(e, 0.5).values, 15**0.25 * e.values, atol=1e-12)
    np.testing.assert_allclose(apply_multiplier(e, lambda a, b, c: a * a + b * b + c * c).values, 14 * e.values, atol=1e-11)
    assert bessel_derivative(e, 0.0) is e


@given(st.integers(0, 2**31 - 1))
def test_multiplier_composition(seed):
    g = Grid(2, 3.0, 8)
    r = np.random.default_rng(seed)
    f = ComplexField(g, r.standard_normal(g.shape) + 1j * r.standard_normal(g.shape))
    m1 = lambda x, y: np.cos(x) + 2.0  # noqa: E731
    m2 = lambda x, y: 1.0 / (1.0 + x * x + y * y)  # noqa: E731
    two = apply_multiplier(apply_multiplier(f, m1), m2).values
    swapped = apply_multiplier(apply_multiplier(f, m2), m1).values
    one = apply_multiplier(f, lambda x, y: m1(x, y) * m2(x, y)).values
    assert np.linalg.norm(two - one) <= 1e-12 * np.linalg.norm(one)
    assert np.linalg.norm(two - swapped) <= 1e-12 * np.linalg.norm(one)


@given(st.floats(-2, 2), st.floats(-2, 2))
def test_bessel_group_law(s, t):
    g = Grid(2, 4.0, 16)
    f = _gauss(g)
    lhs = bessel_derivative(bessel_derivative(f, s), t).values
    rhs = bessel_derivative(f, s + t).values
    assert np.allclose(lhs, rhs, atol=1e-10 * max(1.0, np.max(np.abs(rhs))))


@given(st.floats(0.1, 2.0))
def test_riesz_annihilates_constants(s):
    g = Grid(1, 2.0, 16)
    np.testing.assert_allclose(riesz_derivative(ComplexField(g, np.ones(16)), s).values, 0, atol=1e-12)


def test_riesz_rejects_negative_exponent():
    g = Grid(1, 2.0, 16)
    with pytest.raises(ValueError):
        riesz_symbol(g, -0.5)


def test_riesz_on_plane_wave():
    g = Grid(1, np.pi, 16)
    f = ComplexField.from_function(g, lambda x: np.exp(3j * x))
    np.testing.assert_allclose(riesz_derivative(f, 1.5).values, 3**1.5 * f.values, atol=1e-10)


def test_nonfinite_symbol_names_the_frequency():
    g = Grid(1, np.pi, 8)
    with pytest.raises(SymbolError) as ei:
        evaluate_symbol(lambda xi: 1 / xi, g)
    assert ei.value.xi == (0.0,)


def test_callable_and_array_symbols_agree():
    g = Grid(2, 3.0, 8)
    f = _gauss(g)
    a = apply_multiplier(f, lambda x, y: np.cos(x) * (1 + y * y))
    xi, eta = g.open_xi()
    b = apply_multiplier(f, np.cos(xi) * (1 + eta * eta))
    np.testing.assert_allclose(a.values, b.values)


def test_spacetime_multiplier_acts_slicewise():
    g = Grid(1, 4.0, 16)
    f = _gauss(g)
    u = SpaceTimeField(g, 0.0, 0.1, np.stack([f.values, 2 * f.values]))
    out = apply_multiplier_spacetime(u, lambda xi: 1 + xi * xi)
    np.testing.assert_allclose(out.slices[1], 2 * bessel_derivative(f, 2.0).values, atol=1e-12)
