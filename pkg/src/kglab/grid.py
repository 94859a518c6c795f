"""
Periodic lattices, sampled fields and the unitary discrete Fourier transform.

All fields live on the box [-L, L)^n sampled at N points per axis.  The
frequency lattice is xi_k = (pi / L) k with k in [-N/2, N/2), stored in the
usual FFT ordering.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft as sfft

from kglab.errors import FieldError

__all__ = [
    "Grid",
    "ComplexField",
    "SpectralField",
    "SpaceTimeField",
    "fourier_forward",
    "fourier_inverse",
    "fft",
    "ifft",
]


def _readonly(a: np.ndarray) -> np.ndarray:
    v = a.view()
    v.flags.writeable = False
    return v


@dataclass(frozen=True)
class Grid:
    """
    Periodic lattice on [-L, L)^n.

    Parameters
    ----------
    n : int
        Spatial dimension, 1 to 3.
    L : float
        Box half-length.
    N : int
        Points per axis, a power of two.
    """

    n: int = 3
    L: float = 16.0
    N: int = 32

    def __post_init__(self) -> None:
        if self.n not in (1, 2, 3):
            raise ValueError(f"dimension n must be 1, 2 or 3, got {self.n}")
        if not self.L > 0 or not np.isfinite(self.L):
            raise ValueError(f"half-length L must be positive, got {self.L}")
        N = int(self.N)
        if N != self.N or N < 2 or N & (N - 1):
            raise ValueError(f"N must be a power of two >= 2, got {self.N}")
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "L", float(self.L))

    @property
    def dx(self) -> float:
        return 2.0 * self.L / self.N

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.n

    @property
    def size(self) -> int:
        return self.N**self.n

    @property
    def cell_volume(self) -> float:
        return self.dx**self.n

    @property
    def axes(self) -> tuple[int, ...]:
        """Trailing array axes that carry the lattice."""
        return tuple(range(-self.n, 0))

    @cached_property
    def x1d(self) -> np.ndarray:
        return _readonly(-self.L + self.dx * np.arange(self.N))

    @cached_property
    def k1d(self) -> np.ndarray:
        """Integer frequency indices in FFT order."""
        return _readonly(np.fft.fftfreq(self.N, d=1.0 / self.N))

    @cached_property
    def xi1d(self) -> np.ndarray:
        return _readonly(np.pi / self.L * self.k1d)

    def open_coords(self) -> tuple[np.ndarray, ...]:
        """Broadcastable physical coordinates, one array per axis."""
        return _open_mesh(self.x1d, self.n)

    def open_xi(self) -> tuple[np.ndarray, ...]:
        """Broadcastable wavevector components, one array per axis."""
        return _open_mesh(self.xi1d, self.n)

    @cached_property
    def radius(self) -> np.ndarray:
        """|x| at every site (coordinates already lie in the fundamental cell)."""
        r2 = sum(c**2 for c in self.open_coords())
        return _readonly(np.sqrt(np.broadcast_to(r2, self.shape)))

    @cached_property
    def xi_sq(self) -> np.ndarray:
        """|xi|^2 on the frequency lattice."""
        k2 = sum(c**2 for c in self.open_xi())
        return _readonly(np.broadcast_to(k2, self.shape).copy())

    @cached_property
    def xi_abs(self) -> np.ndarray:
        return _readonly(np.sqrt(self.xi_sq))

    @cached_property
    def japanese(self) -> np.ndarray:
        """<xi> = sqrt(1 + |xi|^2), the Klein-Gordon dispersion relation."""
        return _readonly(np.sqrt(1.0 + self.xi_sq))

    @cached_property
    def _phase(self) -> np.ndarray:
        # e^{i xi . L} turns the index-origin DFT into the x-origin one.
        sign = np.where(self.k1d % 2 == 0, 1.0, -1.0)
        out = np.ones(self.shape)
        for s in _open_mesh(sign, self.n):
            out = out * s
        return _readonly(out)

    def index_of(self, point) -> tuple[int, ...]:
        """Nearest lattice index to a physical point (periodically wrapped)."""
        p = np.broadcast_to(np.asarray(point, dtype=float), (self.n,))
        idx = np.rint((p + self.L) / self.dx).astype(int) % self.N
        return tuple(int(i) for i in idx)

    def point_of(self, index) -> tuple[float, ...]:
        return tuple(float(self.x1d[int(i) % self.N]) for i in index)

    def to_dict(self) -> dict:
        return {"n": self.n, "L": self.L, "N": self.N}


def _open_mesh(v: np.ndarray, n: int) -> tuple[np.ndarray, ...]:
    out = []
    for ax in range(n):
        shp = [1] * n
        shp[ax] = v.size
        out.append(v.reshape(shp))
    return tuple(out)


def fft(values: np.ndarray, grid: Grid) -> np.ndarray:
    """Unitary FFT over the lattice axes (index-origin phase convention)."""
    return sfft.fftn(values, axes=grid.axes, norm="ortho")


def ifft(coeffs: np.ndarray, grid: Grid) -> np.ndarray:
    return sfft.ifftn(coeffs, axes=grid.axes, norm="ortho")


@dataclass(frozen=True, eq=False)
class ComplexField:
    """Complex samples on every lattice site of ``grid``."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=np.complex128)
        if v.shape != self.grid.shape:
            raise FieldError(f"field shape {v.shape} does not match grid shape {self.grid.shape}")
        if not np.all(np.isfinite(v)):
            raise FieldError("field contains non-finite values")
        object.__setattr__(self, "values", _readonly(v))

    @classmethod
    def from_function(cls, grid: Grid, func) -> "ComplexField":
        """Sample ``func(*coords)`` where coords are broadcastable axis arrays."""
        vals = np.broadcast_to(func(*grid.open_coords()), grid.shape)
        return cls(grid, np.array(vals, dtype=np.complex128))

    @classmethod
    def zeros(cls, grid: Grid) -> "ComplexField":
        return cls(grid, np.zeros(grid.shape, dtype=np.complex128))

    def norm(self) -> float:
        """Continuum L^2 norm, (sum |f|^2 dx^n)^(1/2)."""
        return float(np.sqrt(self.grid.cell_volume * np.vdot(self.values, self.values).real))

    def __add__(self, other: "ComplexField") -> "ComplexField":
        _same_grid(self.grid, other.grid)
        return ComplexField(self.grid, self.values + other.values)

    def __sub__(self, other: "ComplexField") -> "ComplexField":
        _same_grid(self.grid, other.grid)
        return ComplexField(self.grid, self.values - other.values)

    def __mul__(self, c) -> "ComplexField":
        return ComplexField(self.grid, self.values * c)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Fourier coefficients of a field, in FFT order on ``grid``'s frequency lattice."""

    grid: Grid
    coefficients: np.ndarray

    def __post_init__(self) -> None:
        c = np.asarray(self.coefficients, dtype=np.complex128)
        if c.shape != self.grid.shape:
            raise FieldError(f"coefficient shape {c.shape} does not match grid shape {self.grid.shape}")
        object.__setattr__(self, "coefficients", _readonly(c))


@dataclass(frozen=True, eq=False)
class SpaceTimeField:
    """
    Uniformly time-sampled fields, slice m at time ``t0 + m*dt``.

    ``slices`` has shape ``(M+1,) + grid.shape`` with M >= 1.
    """

    grid: Grid
    t0: float
    dt: float
    slices: np.ndarray

    def __post_init__(self) -> None:
        s = np.asarray(self.slices, dtype=np.complex128)
        if s.ndim != self.grid.n + 1 or s.shape[1:] != self.grid.shape:
            raise FieldError(f"slice array shape {s.shape} incompatible with grid shape {self.grid.shape}")
        if s.shape[0] < 2:
            raise FieldError("a space-time field needs at least two time slices")
        if not self.dt > 0:
            raise FieldError(f"time step must be positive, got {self.dt}")
        object.__setattr__(self, "slices", _readonly(s))
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "dt", float(self.dt))

    @property
    def M(self) -> int:
        return self.slices.shape[0] - 1

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.M + 1)

    @property
    def T(self) -> float:
        return self.M * self.dt

    def slice(self, m: int) -> ComplexField:
        return ComplexField(self.grid, self.slices[m])

    def trapezoid_weights(self) -> np.ndarray:
        w = np.full(self.M + 1, self.dt)
        w[0] = w[-1] = 0.5 * self.dt
        return w

    def truncate(self, M: int) -> "SpaceTimeField":
        """The first M+1 slices."""
        return SpaceTimeField(self.grid, self.t0, self.dt, self.slices[: M + 1])

    def __add__(self, other: "SpaceTimeField") -> "SpaceTimeField":
        _same_time(self, other)
        return SpaceTimeField(self.grid, self.t0, self.dt, self.slices + other.slices)

    def __sub__(self, other: "SpaceTimeField") -> "SpaceTimeField":
        _same_time(self, other)
        return SpaceTimeField(self.grid, self.t0, self.dt, self.slices - other.slices)

    def __mul__(self, c) -> "SpaceTimeField":
        return SpaceTimeField(self.grid, self.t0, self.dt, self.slices * c)

    __rmul__ = __mul__


def _same_grid(a: Grid, b: Grid) -> None:
    if a != b:
        raise FieldError(f"grid mismatch: {a} vs {b}")


def _same_time(a: SpaceTimeField, b: SpaceTimeField) -> None:
    _same_grid(a.grid, b.grid)
    if a.slices.shape[0] != b.slices.shape[0] or a.t0 != b.t0 or a.dt != b.dt:
        raise FieldError("time lattices differ")


def fourier_forward(f: ComplexField) -> SpectralField:
    """
    Unitary DFT with the continuum phase convention.

    Coefficient k is N^{-n/2} sum_x e^{-i x.xi_k} f(x), so the lattice sites
    are measured from the box centre rather than from the first sample.
    """
    g = f.grid
    return SpectralField(g, fft(f.values, g) * g._phase)


def fourier_inverse(fh: SpectralField) -> ComplexField:
    g = fh.grid
    return ComplexField(g, ifft(fh.coefficients * g._phase, g))
