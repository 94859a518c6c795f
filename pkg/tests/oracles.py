"""
Independent reference computations used by the tests.

Nothing here calls the FFT-based machinery of the package: every oracle is
a closed form, a 1-d adaptive quadrature, a direct sum or a finite
difference stencil.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate

# Frozen oracle values; test_oracles.py recomputes each from its oracle.
FP_INVERSE_SQUARE_P12 = 12.614852533863115  # (4 pi / (3 - 2.4))^(1/1.2)
KERNEL_T1_RHO0 = 0.8414709848078965  # sin(1)
TRACE_LIMIT_CONSTANT = 78.95683520871486  # 8 pi^2, large-R limit for d = 1


def fp_inverse_square_radial(n: int, p: float, r: float = 1.0) -> float:
    """
    r^{2 - n/p} (int_{B_r} |x|^{-2p} dx)^{1/p} by adaptive quadrature of the
    radial integral; independent of r for the untruncated profile.
    """
    area = 2 * math.pi ** (n / 2) / math.gamma(n / 2)
    radial, _ = integrate.quad(lambda rho: rho ** (n - 1 - 2 * p), 0.0, r)
    return r ** (2 - n / p) * (area * radial) ** (1 / p)


def gaussian_ball_integral(a: float, width: float, p: float, center_dist: float, r: float) -> float:
    """
    int_{B(c, r)} (a e^{-|x|^2/(2 w^2)})^p dx in R^3 with |c| = center_dist,
    reduced to one radial quadrature around the ball centre.
    """
    alpha = p / (2 * width**2)
    d = center_dist

    def shell(rho):
        if rho == 0:
            return 0.0
        base = math.exp(-alpha * (rho - d) ** 2) if d > 0 else math.exp(-alpha * rho * rho)
        if d == 0:
            return 4 * math.pi * rho * rho * base
        # int_{-1}^{1} e^{-alpha(rho^2 + d^2 + 2 rho d u)} du, written stably
        ang = (1 - math.exp(-4 * alpha * rho * d)) / (2 * alpha * rho * d)
        return 2 * math.pi * rho * rho * base * ang

    val, _ = integrate.quad(shell, 0.0, r, limit=200)
    return a**p * val


def gaussian_fp_oracle(a: float, width: float, p: float, centers, radii) -> float:
    """sup over the given centre distances and radii of the F^p functional of a Gaussian bump (n = 3)."""
    best = 0.0
    for d in centers:
        for r in radii:
            v = r ** (2 - 3 / p) * gaussian_ball_integral(a, width, p, d, r) ** (1 / p)
            best = max(best, v)
    return best


def sphere_extension_closed_form(r: float, x: np.ndarray) -> np.ndarray:
    """int_{|w|=r} e^{i x.w} dsigma = 4 pi r sin(r|x|)/|x| (4 pi r^2 at x = 0)."""
    rho = np.linalg.norm(np.atleast_2d(x), axis=1)
    out = np.full(rho.shape, 4 * math.pi * r * r)
    nz = rho > 0
    out[nz] = 4 * math.pi * r * np.sin(r * rho[nz]) / rho[nz]
    return out


def sphere_extension_dense(r: float, x, n_theta: int = 400, n_phi: int = 800) -> complex:
    """Midpoint rule in (theta, phi) on a fine mesh, for smooth densities d = 1."""
    th = (np.arange(n_theta) + 0.5) * math.pi / n_theta
    ph = (np.arange(n_phi) + 0.5) * 2 * math.pi / n_phi
    T, P = np.meshgrid(th, ph, indexing="ij")
    w = np.stack([np.sin(T) * np.cos(P), np.sin(T) * np.sin(P), np.cos(T)], axis=-1) * r
    jac = r * r * np.sin(T) * (math.pi / n_theta) * (2 * math.pi / n_phi)
    return complex(np.sum(np.exp(1j * w @ np.asarray(x, float)) * jac))


def contour_kernel_exact(t: float, rho: float, eps: float) -> float:
    """
    Residue evaluation of (1/2pi) int e^{-it tau}/(w^2 - (tau + i eps)^2) d tau:
    both poles sit at tau = +-w - i eps, so the value is
    e^{-eps t} sin(w t)/w for t > 0 and 0 for t < 0.
    """
    w = math.sqrt(1 + rho * rho)
    if t <= 0:
        return 0.0
    return math.exp(-eps * t) * math.sin(w * t) / w


def helmholtz_fd(values: np.ndarray, dx: float) -> np.ndarray:
    """(1 - Delta) f with the second-order centred stencil on a periodic lattice."""
    lap = np.zeros_like(values)
    for ax in range(values.ndim):
        lap += (np.roll(values, 1, ax) - 2 * values + np.roll(values, -1, ax)) / dx**2
    return values - lap


def duhamel_direct(F_slices: np.ndarray, V: np.ndarray, dt: float, xi_sq: np.ndarray, fft, ifft) -> np.ndarray:
    """
    O(M^2) trapezoid evaluation of int_0^t sin((t-s)w)/w V F(s) ds, one
    kernel per (t, s) pair; no angle-addition shortcut.
    """
    w = np.sqrt(1 + xi_sq)
    M = F_slices.shape[0] - 1
    G = np.stack([fft(V * F_slices[m]) for m in range(M + 1)])
    out = np.zeros_like(F_slices)
    for m in range(1, M + 1):
        acc = np.zeros_like(G[0])
        for j in range(m + 1):
            wt = 0.5 if j in (0, m) else 1.0
            acc += wt * np.sin((m - j) * dt * w) / w * G[j]
        out[m] = ifft(dt * acc)
    return out


def fit_order(errors, hs) -> float:
    """Least-squares slope of log(error) against log(h)."""
    return float(np.polyfit(np.log(hs), np.log(errors), 1)[0])
