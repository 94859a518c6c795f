"""The frozen constants in oracles.py agree with the oracles that produced them."""

import math

import numpy as np
from oracles import (
    FP_INVERSE_SQUARE_P12,
    KERNEL_T1_RHO0,
    TRACE_LIMIT_CONSTANT,
    contour_kernel_exact,
    fp_inverse_square_radial,
    gaussian_ball_integral,
    sphere_extension_closed_form,
    sphere_extension_dense,
)


def test_inverse_square_constant():
    assert math.isclose(fp_inverse_square_radial(3, 1.2, 1.0), FP_INVERSE_SQUARE_P12, rel_tol=1e-9)
    assert math.isclose(fp_inverse_square_radial(3, 1.2, 3.7), FP_INVERSE_SQUARE_P12, rel_tol=1e-9)


def test_kernel_constant():
    assert math.isclose(contour_kernel_exact(1.0, 0.0, 0.0), KERNEL_T1_RHO0, rel_tol=1e-15)


def test_trace_limit_constant():
    # R^{-1} int_{|x|<R} |4 pi sin|x|/|x||^2 dx -> 16 pi^2 * (1/2) as R grows
    R = 2000.0
    from scipy import integrate

    val, _ = integrate.quad(lambda s: 4 * math.pi * (4 * math.pi * math.sin(s)) ** 2, 0, R, limit=5000)
    assert math.isclose(val / R / (4 * math.pi), TRACE_LIMIT_CONSTANT, rel_tol=1e-3)


def test_gaussian_ball_integral_full_space():
    # large ball swallows the whole bump: (2 pi w^2 / p)^{3/2}
    w, p = 1.3, 1.2
    assert math.isclose(gaussian_ball_integral(1.0, w, p, 0.7, 40.0), (2 * math.pi * w * w / p) ** 1.5, rel_tol=1e-8)


def test_sphere_closed_form_against_dense_rule():
    x = np.array([0.3, -0.4, 1.1])
    assert abs(sphere_extension_dense(1.5, x) - sphere_extension_closed_form(1.5, x)[0]) < 1e-4
