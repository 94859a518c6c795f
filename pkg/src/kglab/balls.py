"""
Ball integrals on the periodic lattice.

A ball of radius r is represented by a kernel on lattice offsets whose
weights are the fraction of the 2^n sub-cell points (offsets +-dx/4 per
axis, eight in three dimensions) lying inside the ball.  Convolving that
kernel with a density gives the ball integral around every lattice centre
at once.
"""

from __future__ import annotations

import itertools

import numpy as np
import scipy.fft as sfft

from kglab.grid import Grid

__all__ = ["ball_kernel", "ball_integrals", "dyadic_radii", "check_radii"]


def ball_kernel(grid: Grid, r: float) -> np.ndarray:
    """Cell weights of the ball of radius r around the lattice origin, FFT-ordered."""
    d = grid.k1d * grid.dx
    offs = (-0.25 * grid.dx, 0.25 * grid.dx)
    w = np.zeros(grid.shape)
    mesh = np.meshgrid(*([d] * grid.n), indexing="ij", sparse=True)
    for shift in itertools.product(offs, repeat=grid.n):
        r2 = sum((m + s) ** 2 for m, s in zip(mesh, shift))
        w += r2 < r * r
    return w / 2**grid.n


def ball_integrals(density: np.ndarray, grid: Grid, r: float) -> np.ndarray:
    """Integral of ``density`` over the ball of radius r centred at each site."""
    k = ball_kernel(grid, r)
    out = sfft.irfftn(sfft.rfftn(density, axes=grid.axes) * sfft.rfftn(k), s=grid.shape, axes=grid.axes)
    # kernel is symmetric so correlation and convolution coincide
    return np.maximum(out, 0.0) * grid.cell_volume


def dyadic_radii(grid: Grid) -> list[float]:
    """{2dx, 4dx, ..., L}."""
    out = []
    r = 2 * grid.dx
    while r <= grid.L * (1 + 1e-12):
        out.append(r)
        r *= 2
    return out


def check_radii(grid: Grid, radii) -> list[float]:
    radii = [float(r) for r in radii]
    if not radii:
        raise ValueError("radius list is empty")
    lo, hi = 2 * grid.dx, grid.L
    for r in radii:
        if r < lo * (1 - 1e-12) or r > hi * (1 + 1e-12):
            raise ValueError(f"radius {r} outside [{lo}, {hi}]")
    return radii
