"""
Potential families and a lattice estimate of the Fefferman-Phong norm

    ||V||_{F^p} = sup_{x, r} r^{2 - n/p} ( int_{|y-x|<r} |V(y)|^p dy )^{1/p}.

The supremum is taken over a strided set of lattice centres and a list of
radii, so every estimate is a lower bound of the true norm.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import Union

import numpy as np

from kglab.balls import ball_integrals, check_radii, dyadic_radii
from kglab.grid import ComplexField, Grid

__all__ = [
    "InverseSquare",
    "DAnconaLog",
    "GaussianBump",
    "Custom",
    "Scaled",
    "Potential",
    "FpNormEstimate",
    "FpBoundaryWarning",
    "AliasingWarning",
    "make_potential",
    "fp_norm",
    "scale_potential",
    "default_p",
    "family_from_dict",
    "sphere_area",
]


class FpBoundaryWarning(RuntimeWarning):
    """The maximising radius sits at the end of the scanned list."""


class AliasingWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class InverseSquare:
    """a / max(|x|, eps_reg)^2; eps_reg defaults to 2 dx."""

    a: float
    eps_reg: float | None = None
    name = "InverseSquare"


@dataclass(frozen=True)
class DAnconaLog:
    """
    Log-corrected inverse square: a |x|^-2 |log|x||^-(1+delta) inside the
    unit ball and a |x|^-(2+eps) |log|x||^-(1+delta) outside.  The log factor
    is floored at 1 so the profile stays finite across |x| = 1, and |x| is
    floored at eps_reg (default 2 dx).
    """

    a: float
    eps: float
    delta: float
    eps_reg: float | None = None
    name = "DAnconaLog"


@dataclass(frozen=True)
class GaussianBump:
    """a exp(-|x - center|^2 / (2 width^2))."""

    a: float
    width: float
    center: tuple[float, ...] | None = None
    name = "GaussianBump"


@dataclass(frozen=True)
class Custom:
    label: str = "custom"
    name = "Custom"


@dataclass(frozen=True)
class Scaled:
    """lam^2 V(lam x) of a base family, produced by :func:`scale_potential`."""

    base: object
    lam: float
    name = "Scaled"


Family = Union[InverseSquare, DAnconaLog, GaussianBump, Custom, Scaled]

_FAMILIES = {c.name: c for c in (InverseSquare, DAnconaLog, GaussianBump, Custom)}


def family_from_dict(spec: dict) -> Family:
    """Build a family from ``{"family": name, **params}`` (harness config form)."""
    spec = dict(spec)
    name = spec.pop("family")
    spec.pop("p", None)
    cls = _FAMILIES.get(name)
    if cls is None:
        raise ValueError(f"unknown potential family {name!r}; expected one of {sorted(_FAMILIES)}")
    if "center" in spec and spec["center"] is not None:
        spec["center"] = tuple(spec["center"])
    return cls(**spec)


def family_to_dict(fam: Family) -> dict:
    if isinstance(fam, Scaled):
        return {"family": "Scaled", "base": family_to_dict(fam.base), "lam": fam.lam}
    d = asdict(fam)
    d = {"family": fam.name, **d}
    if d.get("center") is not None:
        d["center"] = list(d["center"])
    return d


def default_p(n: int) -> float:
    return {1: 1.0, 2: 1.0, 3: 1.2}[n]


def sphere_area(n: int) -> float:
    """Surface area of the unit sphere S^{n-1}."""
    return 2 * math.pi ** (n / 2) / math.gamma(n / 2)


@dataclass(frozen=True, eq=False)
class Potential:
    field: ComplexField
    family: Family
    p: float

    def __post_init__(self) -> None:
        if np.any(self.field.values.imag != 0):
            raise ValueError("potential values must be real")

    @property
    def grid(self) -> Grid:
        return self.field.grid

    @property
    def values(self) -> np.ndarray:
        return self.field.values.real

    @property
    def abs(self) -> np.ndarray:
        return np.abs(self.field.values.real)

    def is_zero(self) -> bool:
        return not np.any(self.field.values.real)

    def __mul__(self, c: float) -> "Potential":
        fam = self.family
        if isinstance(fam, (InverseSquare, DAnconaLog, GaussianBump)):
            fam = type(fam)(**{**asdict(fam), "a": fam.a * c})
        else:
            fam = Custom(f"{c} * {fam}")
        return Potential(ComplexField(self.grid, self.values * c), fam, self.p)

    __rmul__ = __mul__

    @classmethod
    def from_values(cls, grid: Grid, values, p: float | None = None, label: str = "custom") -> "Potential":
        v = np.asarray(values, dtype=float)
        return cls(ComplexField(grid, v), Custom(label), default_p(grid.n) if p is None else p)


def _eps_reg(eps: float | None, grid: Grid) -> float:
    eps = 2 * grid.dx if eps is None else float(eps)
    if eps < grid.dx / 2 * (1 - 1e-12):
        raise ValueError(f"eps_reg = {eps} is below dx/2 = {grid.dx / 2}; sub-grid regularisation is meaningless")
    return eps


def make_potential(family: Family, grid: Grid, p: float | None = None) -> Potential:
    """Sample a potential family on ``grid``."""
    p = default_p(grid.n) if p is None else float(p)
    r = grid.radius
    if isinstance(family, InverseSquare):
        eps = _eps_reg(family.eps_reg, grid)
        family = InverseSquare(family.a, eps)
        vals = family.a / np.maximum(r, eps) ** 2
    elif isinstance(family, DAnconaLog):
        if family.delta <= 0 or family.eps <= 0:
            raise ValueError("DAnconaLog needs eps > 0 and delta > 0")
        eps = _eps_reg(family.eps_reg, grid)
        family = DAnconaLog(family.a, family.eps, family.delta, eps)
        rr = np.maximum(r, eps)
        logf = np.maximum(np.abs(np.log(rr)), 1.0) ** -(1 + family.delta)
        power = np.where(rr <= 1.0, 2.0, 2.0 + family.eps)
        vals = family.a * rr**-power * logf
    elif isinstance(family, GaussianBump):
        if family.width <= 0:
            raise ValueError("GaussianBump width must be positive")
        c = family.center or (0.0,) * grid.n
        r2 = sum((x - ci) ** 2 for x, ci in zip(grid.open_coords(), c))
        vals = family.a * np.broadcast_to(np.exp(-r2 / (2 * family.width**2)), grid.shape)
    else:
        raise ValueError(f"cannot sample family {family!r}; use Potential.from_values")
    return Potential(ComplexField(grid, vals), family, p)


@dataclass(frozen=True)
class FpNormEstimate:
    p: float
    value: float
    argmax_center: tuple[float, ...]
    argmax_radius: float
    centers_scanned: int
    radii_scanned: int
    radii: list[float] = field(default_factory=list)
    profile: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def _center_slices(grid: Grid, stride: int) -> tuple[slice, ...]:
    start = (grid.N // 2) % stride
    return (slice(start, None, stride),) * grid.n


def pick_argmax(values: np.ndarray, rtol: float = 1e-9) -> tuple[int, ...]:
    """First index (C order) among entries within rtol of the maximum."""
    vmax = values.max()
    cand = np.flatnonzero(values.ravel() >= vmax - rtol * abs(vmax))
    return tuple(int(i) for i in np.unravel_index(cand[0], values.shape))


def fp_norm(V: Potential, p: float | None = None, center_stride: int = 4, radii=None) -> FpNormEstimate:
    """
    Strided lattice estimate of ||V||_{F^p}.

    Ball integrals use cell-centred Riemann sums with fractional boundary
    weights.  ``profile`` holds the best value found at each radius.
    """
    grid = V.grid
    n = grid.n
    p = V.p if p is None else float(p)
    if not 1 <= p <= n / 2:
        raise ValueError(f"F^p exponent p = {p} outside [1, n/2] = [1, {n / 2}]")
    if center_stride < 1:
        raise ValueError("center_stride must be >= 1")
    radii = dyadic_radii(grid) if radii is None else check_radii(grid, radii)
    sl = _center_slices(grid, center_stride)
    n_centers = int(np.prod([len(range(grid.N)[s]) for s in sl]))
    if V.is_zero():
        return FpNormEstimate(p, 0.0, (0.0,) * n, radii[0], n_centers, len(radii), radii, [0.0] * len(radii))

    dens = V.abs**p
    best, best_r, best_idx = -1.0, radii[0], (0,) * n
    profile = []
    for r in radii:
        vals = ball_integrals(dens, grid, r)[sl]
        idx = pick_argmax(vals)
        val = r ** (2 - n / p) * vals[idx] ** (1 / p)
        profile.append(float(val))
        if val > best * (1 + 1e-9):
            best, best_r = val, r
            best_idx = tuple(s.start + i * s.step for s, i in zip(sl, idx))
    if len(radii) > 1 and best_r in (min(radii), max(radii)):
        warnings.warn(
            f"F^p argmax at boundary radius {best_r}; the supremum may lie outside the scanned range",
            FpBoundaryWarning,
            stacklevel=2,
        )
    return FpNormEstimate(p, float(best), grid.point_of(best_idx), best_r, n_centers, len(radii), radii, profile)


def _interp_matrix(grid: Grid, targets: np.ndarray) -> np.ndarray:
    """Rows evaluate the trigonometric interpolant at ``targets`` from samples."""
    N, L = grid.N, grid.L
    k = grid.k1d
    xi = grid.xi1d
    # symmetric Nyquist: the k = -N/2 coefficient contributes a cosine
    y = targets[:, None] - grid.x1d[None, :]
    E = np.exp(1j * xi[None, None, :] * y[:, :, None])
    E[:, :, k == -N // 2] = np.cos(np.pi * N / (2 * L) * y)[:, :, None]
    return E.sum(axis=2).real / N


def scale_potential(V: Potential, lam: float, safety: float = 2.0) -> Potential:
    """
    lam^2 V(lam x), resampled from the trigonometric interpolant of V.

    Targets lam*x that leave the box [-L, L)^n read zero: V is only known
    inside the box, and reading its periodic extension would plant copies
    of the profile at the box faces.  Warns when lam exceeds ``safety``
    times the lattice resolution ratio N dx / (2L).
    """
    if not lam > 0:
        raise ValueError(f"scale factor must be positive, got {lam}")
    grid = V.grid
    if lam == 1:
        return V
    if lam > safety * grid.N * grid.dx / (2 * grid.L):
        warnings.warn(f"scale factor {lam} compresses V beyond the lattice resolution", AliasingWarning, stacklevel=2)
    targets = lam * grid.x1d
    A = _interp_matrix(grid, targets)
    A[(targets < -grid.L) | (targets >= grid.L)] = 0.0
    out = V.values
    for ax in range(grid.n):
        out = np.moveaxis(np.tensordot(A, out, axes=([1], [ax])), 0, ax)
    return Potential(ComplexField(grid, lam**2 * out), Scaled(V.family, lam), V.p)
