"""
Laplacian resolvent R(z) = (-Delta - z)^{-1} as a multiplier, weighted
resolvent norms, the limiting-absorption time kernel, and the splitting of
the inhomogeneous solution into a space-time multiplier part plus a free
remainder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft
from scipy.sparse.linalg import LinearOperator, svds
from scipy.special import sici

from kglab.balls import ball_kernel, check_radii, dyadic_radii
from kglab.errors import QuadratureError
from kglab.grid import ComplexField, Grid, SpaceTimeField, fft, ifft
from kglab.potentials import Potential

__all__ = [
    "resolvent_symbol",
    "resolvent_apply",
    "weighted_resolvent_ratio",
    "weighted_resolvent_norm",
    "smoothing_resolvent_norm",
    "contour_kernel",
    "tilde_u",
    "remainder_R",
    "remainder_limit",
    "Decomposition",
    "decompose",
]


def resolvent_symbol(grid: Grid, z: complex) -> np.ndarray:
    z = complex(z)
    if z.imag == 0:
        raise ValueError(f"resolvent needs Im z != 0, got z = {z}")
    return 1.0 / (grid.xi_sq - z)


def resolvent_apply(F: ComplexField, z: complex) -> ComplexField:
    """(-Delta - z)^{-1} F."""
    g = F.grid
    return ComplexField(g, ifft(fft(F.values, g) * resolvent_symbol(g, z), g))


def weighted_resolvent_ratio(f: ComplexField, V: Potential, z: complex, fp_value: float) -> float:
    """||R(z) f||_{L^2(|V|)} / (||V||_{F^p} ||f||_{L^2(|V|^{-1})}) for one f (supported where V != 0)."""
    g = f.grid
    w = V.abs
    u = resolvent_apply(f, z).values
    num = math.sqrt(g.cell_volume * np.sum(np.abs(u) ** 2 * w))
    with np.errstate(divide="ignore", invalid="ignore"):
        den2 = np.where(w > 0, np.abs(f.values) ** 2 / w, 0.0)
    den = math.sqrt(g.cell_volume * np.sum(den2))
    return num / (fp_value * den)


def _top_singular(apply, apply_adj, size: int, seed: int = 0, tol: float = 1e-6) -> float:
    op = LinearOperator((size, size), matvec=apply, rmatvec=apply_adj, dtype=np.complex128)
    v0 = np.random.default_rng(seed).standard_normal(size) + 0j
    s = svds(op, k=1, tol=tol, v0=v0, return_singular_vectors=False)
    return float(s[0])


def weighted_resolvent_norm(V: Potential, z: complex, seed: int = 0) -> float:
    """
    sup_f ||R(z) f||_{L^2(|V|)} / ||f||_{L^2(|V|^{-1})}, the operator norm of
    |V|^{1/2} R(z) |V|^{1/2} on L^2, by a Lanczos singular-value solve.
    """
    g = V.grid
    W = np.sqrt(V.abs)
    sym = resolvent_symbol(g, z)
    symc = np.conj(sym)

    def K(x, s=sym):
        return (W * ifft(fft(W * x.reshape(g.shape), g) * s, g)).ravel()

    return _top_singular(K, lambda x: K(x, symc), g.size, seed)


def smoothing_resolvent_norm(
    V: Potential, z: complex, radii=None, center=None, s: float = 0.5, seed: int = 0
) -> tuple[float, float]:
    """
    sup over windows B(x0, R) of the operator norm squared of
    f -> 1_B |nabla|^s R(z) f from L^2(|V|^{-1}), divided by R.

    The window centre defaults to the origin; returns (value, argmax R).
    """
    g = V.grid
    W = np.sqrt(V.abs)
    sym = resolvent_symbol(g, z) * (g.xi_abs**s if s else 1.0)
    symc = np.conj(sym)
    radii = dyadic_radii(g) if radii is None else check_radii(g, radii)
    shift = g.index_of(center if center is not None else (0.0,) * g.n)
    best = (-1.0, radii[0])
    for R in radii:
        # ball kernel is centred at index 0; move it to the window centre
        chi = np.roll(ball_kernel(g, R), shift, axis=tuple(range(g.n)))
        mask = np.sqrt(chi)

        def B(x):
            return (mask * ifft(fft(W * x.reshape(g.shape), g) * sym, g)).ravel()

        def Bh(y):
            return (W * ifft(fft(mask * y.reshape(g.shape), g) * symc, g)).ravel()

        val = _top_singular(B, Bh, g.size, seed) ** 2 / R
        if val > best[0]:
            best = (val, R)
    return best


def contour_kernel(t: float, rho: float, eps: float = 1e-3, cutoff: float = 400.0, tol: float = 1e-6) -> complex:
    """
    (1/2pi) int e^{-it tau} / (1 + rho^2 - (tau + i eps)^2) d tau.

    The integral over [-cutoff, cutoff] uses composite Gauss-Legendre panels
    graded geometrically toward the near-poles at tau = +-sqrt(1+rho^2); the
    two tails use the leading -1/tau^2 behaviour in closed form.  For eps
    -> 0 the value tends to sin(t w)/w for t > 0 and to 0 for t < 0, with
    w = sqrt(1 + rho^2); at finite eps the exact value carries a factor
    exp(-eps t) for t > 0.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    w2 = 1.0 + rho * rho
    w = math.sqrt(w2)
    if cutoff <= 4 * w:
        raise ValueError("cutoff must exceed the pole location by a wide margin")
    tail_err = 2 * (w2 + eps * eps + 4 * eps * eps) / (3 * cutoff**3) + 2 * eps / cutoff**2
    if tail_err / (2 * math.pi) > tol:
        raise QuadratureError(f"tail estimate {tail_err:.2e} exceeds tolerance {tol:.1e}; raise the cutoff")

    # panel breakpoints: geometric around each pole, uniform elsewhere
    h = min(0.5, math.pi / (4 * max(abs(t), 1e-9)))
    pts = set(np.arange(-cutoff, cutoff + h / 2, h).tolist())
    d = eps
    while d < 1.0:
        for c in (-w, w):
            pts.update((c - d, c + d))
        d *= 2
    pts.update((-w, w, -cutoff, cutoff))
    edges = np.array(sorted(p for p in pts if -cutoff <= p <= cutoff))
    xg, wg = np.polynomial.legendre.leggauss(16)
    a, b = edges[:-1], edges[1:]
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    tau = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    wts = (half[:, None] * wg[None, :]).ravel()
    integrand = np.exp(-1j * t * tau) / (w2 - (tau + 1j * eps) ** 2)
    main = np.sum(wts * integrand)

    # tails: -int_{|tau|>cutoff} e^{-it tau} / tau^2 = -2 int_cutoff^inf cos(t tau)/tau^2
    at = abs(t)
    if at == 0:
        tail = -2.0 / cutoff
    else:
        si, _ = sici(at * cutoff)
        tail = -2.0 * (math.cos(at * cutoff) / cutoff - at * (math.pi / 2 - si))
    return complex((main + tail) / (2 * math.pi))


def _time_lattice(F: SpaceTimeField, pad: int) -> tuple[int, np.ndarray]:
    if F.t0 != 0:
        raise ValueError("source must start at t = 0")
    # window [0, 2 T_ext) with T_ext = pad * T; tau_j = pi j / T_ext
    K = 2 * pad * F.M
    tau = 2 * np.pi * np.fft.fftfreq(K, d=F.dt)
    return K, tau


@dataclass(frozen=True, eq=False)
class Decomposition:
    u_tilde: SpaceTimeField
    remainder: SpaceTimeField
    wrap_fraction: float

    @property
    def total(self) -> SpaceTimeField:
        return self.u_tilde + self.remainder


def _tilde_spectral(F: SpaceTimeField, eps: float, pad: int, want_dt0: bool = False):
    """
    Space-time multiplier 1/(1 + |xi|^2 - (tau + i eps)^2) applied to the
    zero-padded source.  Works one spatial frequency plane at a time to
    bound memory.
    """
    g = F.grid
    K, tau = _time_lattice(F, pad)
    Fh = fft(F.slices, g)
    w2 = (1.0 + g.xi_sq)
    out = np.empty_like(Fh)
    tail_max = 0.0
    head_max = 0.0
    u0 = np.empty(g.shape, dtype=np.complex128)
    v0 = np.empty(g.shape, dtype=np.complex128)
    tail_slice = slice(int(0.9 * K), K)
    for i in range(g.N):
        block = np.zeros((K,) + Fh.shape[2:], dtype=np.complex128)
        block[: F.M + 1] = Fh[:, i]
        spec = sfft.fft(block, axis=0)
        sym = 1.0 / (w2[i][None] - (tau.reshape((K,) + (1,) * (g.n - 1)) + 1j * eps) ** 2)
        spec *= sym
        ut = sfft.ifft(spec, axis=0)
        out[:, i] = ut[: F.M + 1]
        head_max = max(head_max, float(np.abs(ut[: F.M + 1]).max()))
        tail_max = max(tail_max, float(np.abs(ut[tail_slice]).max()))
        u0[i] = ut[0]
        if want_dt0:
            tshape = (K,) + (1,) * (g.n - 1)
            v0[i] = sfft.ifft(1j * tau.reshape(tshape) * spec, axis=0)[0]
    wrap = tail_max / head_max if head_max > 0 else 0.0
    return out, u0, v0, wrap


def tilde_u(F: SpaceTimeField, eps: float = 1e-3, pad: int = 4) -> SpaceTimeField:
    """
    The multiplier part of the inhomogeneous solution on the discrete
    tau lattice tau_j = pi j / T_ext, T_ext = pad * T, returned on [0, T].
    """
    out, _, _, _ = _tilde_spectral(F, eps, pad)
    g = F.grid
    return SpaceTimeField(g, 0.0, F.dt, ifft(out, g))


def _free_from_traces(g: Grid, u0h: np.ndarray, v0h: np.ndarray, times: np.ndarray) -> np.ndarray:
    w = g.japanese
    out = np.empty((len(times),) + g.shape, dtype=np.complex128)
    for m, t in enumerate(times):
        out[m] = ifft(np.cos(t * w) * u0h + np.sin(t * w) / w * v0h, g)
    return out


def remainder_R(F: SpaceTimeField, eps: float = 1e-3, pad: int = 4) -> SpaceTimeField:
    """
    Free solution with data (-u~(0), -d_t u~(0)), so that u~ + R has zero
    Cauchy data and solves the inhomogeneous equation.
    """
    return decompose(F, eps, pad).remainder


def decompose(F: SpaceTimeField, eps: float = 1e-3, pad: int = 4) -> Decomposition:
    """
    u = u~ + R with u~ from the space-time multiplier and R the free
    correction built from u~'s own trace at t = 0.  ``wrap_fraction`` is the
    largest |u~| over the last tenth of the padded window relative to its
    largest value on [0, T]; it measures how much of the response wraps
    around the periodic time lattice.
    """
    g = F.grid
    out, u0, v0, wrap = _tilde_spectral(F, eps, pad, want_dt0=True)
    ut = SpaceTimeField(g, 0.0, F.dt, ifft(out, g))
    R = SpaceTimeField(g, 0.0, F.dt, _free_from_traces(g, -u0, -v0, F.times))
    return Decomposition(ut, R, wrap)


def remainder_limit(F: SpaceTimeField) -> SpaceTimeField:
    """
    eps -> 0, infinite-window form of the remainder:

        R(t) = -cos(t<nabla>) int_0^inf sin(s<nabla>)/<nabla> F(s) ds
               + sin(t<nabla>)/<nabla> int_0^inf cos(s<nabla>) F(s) ds,

    which is the retarded solution minus the advanced one.  Integrals use
    the trapezoid rule over the slices of F.
    """
    g = F.grid
    w = g.japanese
    tw = F.trapezoid_weights()
    A = np.zeros(g.shape, dtype=np.complex128)
    B = np.zeros(g.shape, dtype=np.complex128)
    for m, t in enumerate(F.times):
        Fh = fft(F.slices[m], g)
        A += tw[m] * np.sin(t * w) / w * Fh
        B += tw[m] * np.cos(t * w) * Fh
    return SpaceTimeField(g, F.t0, F.dt, _free_from_traces(g, -A, B, F.times))
