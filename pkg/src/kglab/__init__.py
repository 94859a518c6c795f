"""Pseudospectral laboratory for the Klein-Gordon equation with singular potentials."""

from kglab.duhamel import duhamel_apply, inhomogeneous_solve, picard_solve, reference_solve
from kglab.freeflow import CauchyData, cos_flow, free_solution, half_wave, sinc_flow
from kglab.grid import ComplexField, Grid, SpaceTimeField, SpectralField, fourier_forward, fourier_inverse
from kglab.multipliers import apply_multiplier, bessel_derivative, riesz_derivative
from kglab.norms import (
    AdmissibleTriple,
    check_admissible,
    local_smoothing_functional,
    sobolev_norm,
    strichartz_norm,
    weighted_l2_spacetime,
)
from kglab.potentials import DAnconaLog, GaussianBump, InverseSquare, Potential, fp_norm, make_potential, scale_potential

__version__ = "0.1.0"

__all__ = [
    "Grid",
    "ComplexField",
    "SpectralField",
    "SpaceTimeField",
    "fourier_forward",
    "fourier_inverse",
    "apply_multiplier",
    "bessel_derivative",
    "riesz_derivative",
    "CauchyData",
    "half_wave",
    "cos_flow",
    "sinc_flow",
    "free_solution",
    "InverseSquare",
    "DAnconaLog",
    "GaussianBump",
    "Potential",
    "make_potential",
    "fp_norm",
    "scale_potential",
    "AdmissibleTriple",
    "check_admissible",
    "weighted_l2_spacetime",
    "sobolev_norm",
    "local_smoothing_functional",
    "strichartz_norm",
    "duhamel_apply",
    "inhomogeneous_solve",
    "picard_solve",
    "reference_solve",
]
