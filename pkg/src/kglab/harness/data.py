"""Cauchy data families used by scenarios: Gaussian packets and random band-limited fields."""

from __future__ import annotations

import numpy as np

from kglab.freeflow import CauchyData
from kglab.grid import ComplexField, Grid, fft, ifft
from kglab.norms import sobolev_norm

__all__ = ["gaussian_packet", "random_field", "make_data", "data_norm"]


def gaussian_packet(grid: Grid, center, width: float, carrier) -> ComplexField:
    """exp(-|x-c|^2 / (2 w^2)) e^{i k.x}, normalised to unit H^{1/2} norm."""
    X = grid.open_coords()
    r2 = sum((x - c) ** 2 for x, c in zip(X, center))
    phase = sum(k * x for k, x in zip(carrier, X))
    f = ComplexField(grid, np.broadcast_to(np.exp(-r2 / (2 * width**2)) * np.exp(1j * phase), grid.shape))
    return f * (1.0 / sobolev_norm(f, 0.5))


def random_field(grid: Grid, rng: np.random.Generator, band: float, envelope: float) -> ComplexField:
    """
    Complex Gaussian coefficients on |xi| <= band, times a Gaussian envelope
    of width ``envelope`` about the origin; unit H^{1/2} norm.
    """
    coef = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    coef[grid.xi_abs > band] = 0.0
    env = np.exp(-grid.radius**2 / (2 * envelope**2))
    f = ComplexField(grid, env * ifft(coef, grid))
    return f * (1.0 / sobolev_norm(f, 0.5))


def _velocity(f: ComplexField, kind: str) -> ComplexField:
    if kind == "half_wave":
        # u = e^{it<nabla>} f has u_t(0) = i <nabla> f
        g = f.grid
        return ComplexField(g, ifft(1j * g.japanese * fft(f.values, g), g))
    return ComplexField.zeros(f.grid)


def make_data(spec: dict, grid: Grid, seed=None) -> list[tuple[str, CauchyData]]:
    """Labelled Cauchy data for a ``data`` config section."""
    kind = spec["kind"]
    vel = spec.get("velocity", "zero")
    out = []
    if kind == "packets":
        scale = float(spec.get("carrier_scale", 1.0))
        for i, (c, w, k) in enumerate(zip(spec["centers"], spec["widths"], spec["carriers"])):
            f = gaussian_packet(grid, c, float(w), [scale * float(ki) for ki in k])
            out.append((f"packet{i}", CauchyData(f, _velocity(f, vel))))
    else:
        rng = np.random.default_rng(seed)
        for i in range(int(spec["count"])):
            f = random_field(grid, rng, float(spec["band"]), float(spec["envelope"]))
            out.append((f"random{i}", CauchyData(f, _velocity(f, vel))))
    return out


def data_norm(data: CauchyData) -> float:
    """||f||_{H^{1/2}} + ||g||_{H^{-1/2}}."""
    return sobolev_norm(data.f, 0.5) + sobolev_norm(data.g, -0.5)
