"""Fourier multipliers: generic symbols, Bessel and Riesz derivatives."""

from __future__ import annotations

import numpy as np

from kglab.errors import SymbolError
from kglab.grid import ComplexField, Grid, SpaceTimeField, fft, ifft

__all__ = [
    "evaluate_symbol",
    "apply_multiplier",
    "apply_multiplier_spacetime",
    "multiply",
    "bessel_derivative",
    "riesz_derivative",
    "bessel_symbol",
    "riesz_symbol",
]


def evaluate_symbol(m, grid: Grid) -> np.ndarray:
    """
    Sample a symbol on the frequency lattice.

    ``m`` is either an array broadcastable to the grid shape (FFT order) or a
    callable receiving the wavevector components as broadcastable arrays.
    Raises SymbolError naming the first lattice point where the symbol is
    not finite.
    """
    if callable(m):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            sym = m(*grid.open_xi())
    else:
        sym = m
    sym = np.broadcast_to(np.asarray(sym), grid.shape)
    bad = ~np.isfinite(sym)
    if bad.any():
        idx = tuple(int(i[0]) for i in np.nonzero(bad))
        xi = tuple(float(grid.xi1d[i]) for i in idx)
        raise SymbolError(f"symbol is not finite at xi = {xi} (value {sym[idx]})", xi=xi)
    return sym


def multiply(values: np.ndarray, symbol: np.ndarray, grid: Grid) -> np.ndarray:
    """Apply a sampled symbol to raw arrays; leading axes are batched."""
    return ifft(fft(values, grid) * symbol, grid)


def apply_multiplier(f: ComplexField, m) -> ComplexField:
    """Inverse transform of m(xi) * f^(xi)."""
    sym = evaluate_symbol(m, f.grid)
    return ComplexField(f.grid, multiply(f.values, sym, f.grid))


def apply_multiplier_spacetime(u: SpaceTimeField, m) -> SpaceTimeField:
    """Apply a time-independent symbol slice by slice."""
    sym = evaluate_symbol(m, u.grid)
    out = np.empty_like(u.slices)
    for i, s in enumerate(u.slices):
        out[i] = multiply(s, sym, u.grid)
    return SpaceTimeField(u.grid, u.t0, u.dt, out)


def bessel_symbol(grid: Grid, s: float) -> np.ndarray:
    """(1 + |xi|^2)^(s/2)."""
    return (1.0 + grid.xi_sq) ** (0.5 * s)


def riesz_symbol(grid: Grid, s: float) -> np.ndarray:
    """|xi|^s with the zero mode sent to 0 for s > 0."""
    if s < 0:
        raise ValueError(f"Riesz exponent must be >= 0, got {s}")
    if s == 0:
        return np.ones(grid.shape)
    return grid.xi_abs**s


def bessel_derivative(f: ComplexField, s: float) -> ComplexField:
    """<nabla>^s f."""
    if s == 0:
        return f
    return apply_multiplier(f, bessel_symbol(f.grid, s))


def riesz_derivative(f: ComplexField, s: float) -> ComplexField:
    """|nabla|^s f; negative s is rejected because the zero mode is on the lattice."""
    sym = riesz_symbol(f.grid, s)
    if s == 0:
        return f
    return apply_multiplier(f, sym)
