"""
Evaluators for the functionals that appear in the estimates: weighted
space-time L^2 norms, Sobolev norms, the local smoothing functional and
mixed Strichartz norms, plus the admissibility checker for (q, r, theta).

Time integrals run over the simulation window only and use trapezoid
weights; spatial integrals are plain Riemann sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from kglab.balls import ball_integrals, check_radii, dyadic_radii
from kglab.errors import AdmissibilityError, SupportError
from kglab.grid import ComplexField, Grid, SpaceTimeField, fft, ifft
from kglab.multipliers import bessel_symbol, riesz_symbol
from kglab.potentials import Potential, _center_slices, pick_argmax

__all__ = [
    "AdmissibleTriple",
    "BallWindow",
    "weighted_l2_spacetime",
    "sobolev_norm",
    "hs_lr_norm",
    "local_smoothing_functional",
    "smoothing_density",
    "strichartz_norm",
    "check_admissible",
    "spacetime_l2",
]

SUPPORT_THRESHOLD = 1e-14


@dataclass(frozen=True)
class AdmissibleTriple:
    q: float
    r: float
    theta: float
    sigma: float
    n: int

    def to_dict(self) -> dict:
        return {"q": self.q, "r": self.r, "theta": self.theta, "sigma": self.sigma, "n": self.n}


@dataclass(frozen=True)
class BallWindow:
    x0: tuple[float, ...]
    R: float

    def to_dict(self) -> dict:
        return {"x0": list(self.x0), "R": self.R}


def _weight_array(w, grid: Grid) -> np.ndarray:
    if isinstance(w, Potential):
        return w.abs
    if isinstance(w, ComplexField):
        return np.abs(w.values)
    return np.abs(np.broadcast_to(np.asarray(w), grid.shape))


def weighted_l2_spacetime(u: SpaceTimeField, w, sign: int = 1) -> float:
    """
    (int_0^T sum_x |u|^2 |w|^sign dx^n dt)^{1/2}.

    With sign = -1, sites where w vanishes contribute nothing provided u
    vanishes there too; otherwise SupportError names the offending site.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    g = u.grid
    wa = _weight_array(w, g)
    if sign == 1:
        weight = wa
    else:
        zero = wa == 0
        if zero.any():
            hit = np.abs(u.slices[:, zero]) > SUPPORT_THRESHOLD
            if hit.any():
                m, j = (int(i[0]) for i in np.nonzero(hit))
                flat = np.flatnonzero(zero.ravel())[j]
                site = tuple(int(i) for i in np.unravel_index(flat, g.shape))
                raise SupportError(
                    f"u is nonzero at site {site} (x = {g.point_of(site)}, t = {u.times[m]}) where the weight vanishes",
                    site=site,
                )
        with np.errstate(divide="ignore"):
            weight = np.where(zero, 0.0, 1.0 / np.where(zero, 1.0, wa))
    tw = u.trapezoid_weights()
    total = 0.0
    for m in range(u.M + 1):
        total += tw[m] * np.sum(np.abs(u.slices[m]) ** 2 * weight)
    return float(math.sqrt(total * g.cell_volume))


def spacetime_l2(u: SpaceTimeField) -> float:
    """Unweighted L^2_{x,t} norm over the window."""
    tw = u.trapezoid_weights()
    total = sum(tw[m] * np.vdot(u.slices[m], u.slices[m]).real for m in range(u.M + 1))
    return float(math.sqrt(total * u.grid.cell_volume))


def sobolev_norm(f: ComplexField, s: float) -> float:
    """||<nabla>^s f||_{L^2}."""
    g = f.grid
    c = fft(f.values, g)
    return float(math.sqrt(g.cell_volume * np.sum((1.0 + g.xi_sq) ** s * np.abs(c) ** 2)))


def _lr(values: np.ndarray, grid: Grid, r: float) -> float:
    a = np.abs(values)
    if math.isinf(r):
        return float(a.max())
    return float((grid.cell_volume * np.sum(a**r)) ** (1.0 / r))


def hs_lr_norm(f: ComplexField, sigma: float, r: float) -> float:
    """||<nabla>^sigma f||_{L^r}; r = 2 reduces to :func:`sobolev_norm`."""
    if r < 1:
        raise ValueError(f"Lebesgue exponent r must be >= 1, got {r}")
    if r == 2:
        return sobolev_norm(f, sigma)
    g = f.grid
    vals = f.values if sigma == 0 else ifft(fft(f.values, g) * bessel_symbol(g, sigma), g)
    return _lr(vals, g, r)


def smoothing_density(u: SpaceTimeField, s: float = 0.5) -> np.ndarray:
    """int_0^T | |nabla|^s u |^2 dt at every site (trapezoid in t)."""
    g = u.grid
    sym = riesz_symbol(g, s)
    tw = u.trapezoid_weights()
    dens = np.zeros(g.shape)
    for m in range(u.M + 1):
        v = u.slices[m] if s == 0 else ifft(fft(u.slices[m], g) * sym, g)
        dens += tw[m] * np.abs(v) ** 2
    return dens


def local_smoothing_functional(
    u: SpaceTimeField, s: float = 0.5, center_stride: int = 4, radii=None, density: np.ndarray | None = None
) -> tuple[float, BallWindow]:
    """
    max over scanned windows of (1/R) int_{|x-x0|<R} int_0^T | |nabla|^s u |^2 dt dx.

    Centres are every ``center_stride``-th lattice point (the origin is
    always among them); radii default to {2dx, 4dx, ..., L}.
    """
    g = u.grid
    radii = dyadic_radii(g) if radii is None else check_radii(g, radii)
    dens = smoothing_density(u, s) if density is None else density
    sl = _center_slices(g, center_stride)
    per_r = []
    for R in radii:
        vals = ball_integrals(dens, g, R)[sl] / R
        idx = pick_argmax(vals)
        per_r.append((vals[idx], R, idx))
    top = max(v for v, _, _ in per_r)
    for v, R, idx in per_r:
        if v >= top - 1e-9 * abs(top):
            full = tuple(s_.start + i * s_.step for s_, i in zip(sl, idx))
            return float(v), BallWindow(g.point_of(full), R)
    raise AssertionError("unreachable")


def strichartz_norm(u: SpaceTimeField, triple: AdmissibleTriple) -> float:
    """(int_0^T ||<nabla>^sigma u(t)||_{L^r}^q dt)^{1/q}; q = inf takes the max over slices."""
    norms = np.array([hs_lr_norm(u.slice(m), triple.sigma, triple.r) for m in range(u.M + 1)])
    if math.isinf(triple.q):
        return float(norms.max())
    return float(np.sum(u.trapezoid_weights() * norms**triple.q) ** (1.0 / triple.q))


def check_admissible(q: float, r: float, theta: float, n: int) -> AdmissibleTriple:
    """
    Validate q > 2, r >= 2, 0 <= theta <= 1, the admissible condition
    2/q + (n-1+theta)/r <= (n-1+theta)/2 and the gap exponent
    sigma = 1/q + (n+theta)/r - (n-1+theta)/2 >= 0.
    """
    q, r, theta = float(q), float(r), float(theta)
    bad = []
    if not q > 2:
        bad.append(f"q = {q} violates q > 2")
    if not r >= 2:
        bad.append(f"r = {r} violates r >= 2")
    if not 0 <= theta <= 1:
        bad.append(f"theta = {theta} outside [0, 1]")
    inv_q = 0.0 if math.isinf(q) else 1.0 / q
    inv_r = 0.0 if math.isinf(r) else 1.0 / r
    lhs = 2 * inv_q + (n - 1 + theta) * inv_r
    rhs = (n - 1 + theta) / 2
    if lhs > rhs + 1e-12:
        bad.append(f"admissible condition fails: 2/q + (n-1+theta)/r = {lhs:.6g} > (n-1+theta)/2 = {rhs:.6g}")
    sigma = inv_q + (n + theta) * inv_r - (n - 1 + theta) / 2
    if abs(sigma) < 1e-12:
        sigma = 0.0
    if sigma < 0:
        bad.append(f"gap condition fails: sigma = 1/q + (n+theta)/r - (n-1+theta)/2 = {sigma:.6g} < 0")
    if bad:
        raise AdmissibilityError(bad)
    return AdmissibleTriple(q, r, theta, sigma, n)
