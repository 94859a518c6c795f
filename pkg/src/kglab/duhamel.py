"""
Duhamel operator, Picard iteration for the perturbed Klein-Gordon equation

    u_tt - Delta u + u + V u = 0,   u(0) = f,   u_t(0) = g,

and an independent Strang-splitting integrator used to cross-check it.

The source-driven Duhamel integral

    int_0^t sin((t-s)<nabla>)/<nabla> G(s) ds

is evaluated by the trapezoid rule using the angle-addition identity, so
two running spectral accumulators give every time slice for O(M)
transforms.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from kglab.errors import EnergyDriftError, FieldError, PicardDivergenceError, PicardNotConvergedError
from kglab.freeflow import CauchyData, free_solution, free_velocity
from kglab.grid import ComplexField, SpaceTimeField, fft, ifft
from kglab.norms import spacetime_l2, weighted_l2_spacetime
from kglab.potentials import Potential

__all__ = [
    "PicardTrace",
    "duhamel_apply",
    "duhamel_velocity",
    "inhomogeneous_solve",
    "picard_solve",
    "reference_solve",
    "perturbed_energy",
    "solution_velocity",
    "time_steps",
]


def time_steps(T: float, dt: float) -> int:
    """Number of steps M with M dt = T; T must be a multiple of dt."""
    if not dt > 0 or not T > 0:
        raise ValueError(f"need T > 0 and dt > 0, got T={T}, dt={dt}")
    M = int(round(T / dt))
    if M < 1 or abs(M * dt - T) > 1e-9 * max(T, 1.0):
        raise ValueError(f"T = {T} is not a whole number of steps dt = {dt}")
    return M


def _accumulate(source: SpaceTimeField, kernel: str = "sin", weight=None) -> SpaceTimeField:
    """
    int_0^{t_m} K((t_m - s)<nabla>) G(s) ds for K = sin/<nabla> or cos,
    with G = weight * source (weight None means 1).
    """
    if source.t0 != 0:
        raise FieldError("Duhamel integrals need a time lattice starting at t = 0")
    g = source.grid
    w = g.japanese
    dt = source.dt
    out = np.empty_like(source.slices)
    S_cos = np.zeros(g.shape, dtype=np.complex128)
    S_sin = np.zeros(g.shape, dtype=np.complex128)
    first_cos = first_sin = None
    for m in range(source.M + 1):
        t = m * dt
        c, s = np.cos(t * w), np.sin(t * w)
        G = source.slices[m] if weight is None else weight * source.slices[m]
        Gh = fft(G, g)
        cG, sG = c * Gh, s * Gh
        S_cos += dt * cG
        S_sin += dt * sG
        if m == 0:
            first_cos, first_sin = cG, sG
            out[0] = 0.0
            continue
        # trapezoid: half weight at both ends of [0, t_m]
        A = S_cos - 0.5 * dt * (first_cos + cG)
        B = S_sin - 0.5 * dt * (first_sin + sG)
        if kernel == "sin":
            out[m] = ifft((s * A - c * B) / w, g)
        else:
            out[m] = ifft(c * A + s * B, g)
    return SpaceTimeField(g, 0.0, dt, out)


def duhamel_apply(F: SpaceTimeField, V: Potential) -> SpaceTimeField:
    """int_0^t sin((t-s)<nabla>)/<nabla> (V F(s)) ds on F's time lattice."""
    if F.grid != V.grid:
        raise FieldError("F and V live on different grids")
    if V.is_zero():
        return SpaceTimeField(F.grid, F.t0, F.dt, np.zeros_like(F.slices))
    return _accumulate(F, "sin", V.values)


def duhamel_velocity(F: SpaceTimeField, V: Potential | None = None) -> SpaceTimeField:
    """Time derivative of the Duhamel term: int_0^t cos((t-s)<nabla>) (V F(s)) ds."""
    return _accumulate(F, "cos", None if V is None else V.values)


def inhomogeneous_solve(F: SpaceTimeField) -> SpaceTimeField:
    """Solution of u_tt - Delta u + u = F with zero Cauchy data."""
    return _accumulate(F, "sin", None)


@dataclass
class PicardTrace:
    iterates: int = 0
    residuals: list[float] = field(default_factory=list)
    residuals_l2: list[float] = field(default_factory=list)
    contraction_ratios: list[float] = field(default_factory=list)
    converged: bool = False
    solution_norm: float = 0.0

    def asymptotic_ratio(self, k: int | None = None, window: int = 3) -> float:
        """
        Geometric mean of the last ``window`` contraction ratios, or of the
        ``window`` ratios ending at index k.
        """
        r = self.contraction_ratios if k is None else self.contraction_ratios[: k + 1]
        r = [x for x in r[-window:] if x > 0]
        if not r:
            return 0.0
        return float(math.exp(np.mean(np.log(r))))

    def to_dict(self) -> dict:
        return asdict(self)


def picard_solve(
    data: CauchyData,
    V: Potential,
    T: float,
    dt: float,
    tol: float = 1e-10,
    max_iter: int = 60,
) -> tuple[SpaceTimeField, PicardTrace]:
    """
    Fixed point of u -> u_free - S u, starting from u_0 = u_free.

    The minus sign comes from moving +V u to the right-hand side.
    Convergence is judged in L^2_{x,t}(|V|): stop once
    ||u_{k+1} - u_k|| < tol ||u_{k+1}||.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if data.grid != V.grid:
        raise FieldError("Cauchy data and potential live on different grids")
    M = time_steps(T, dt)
    free = free_solution(data, 0.0, dt, M)
    trace = PicardTrace()
    if V.is_zero():
        trace.iterates = 1
        trace.residuals = [0.0]
        trace.residuals_l2 = [0.0]
        trace.converged = True
        return free, trace

    u = free
    above = 0
    for k in range(max_iter):
        new = free - duhamel_apply(u, V)
        diff = new - u
        res = weighted_l2_spacetime(diff, V)
        trace.iterates = k + 1
        trace.residuals.append(res)
        trace.residuals_l2.append(spacetime_l2(diff))
        if len(trace.residuals) > 1:
            prev = trace.residuals[-2]
            ratio = res / prev if prev > 0 else 0.0
            trace.contraction_ratios.append(ratio)
            above = above + 1 if ratio > 1 else 0
        u = new
        unorm = weighted_l2_spacetime(u, V)
        trace.solution_norm = unorm
        if res <= tol * unorm:
            trace.converged = True
            return u, trace
        if above >= 3:
            raise PicardDivergenceError(
                f"Picard iteration diverging: ratio > 1 for 3 consecutive iterations (last {trace.contraction_ratios[-1]:.3g})",
                trace=trace,
                solution=u,
            )
    raise PicardNotConvergedError(
        f"Picard iteration did not reach tol {tol} in {max_iter} iterations (last residual {trace.residuals[-1]:.3g})",
        trace=trace,
        solution=u,
    )


def solution_velocity(data: CauchyData, V: Potential, u: SpaceTimeField) -> SpaceTimeField:
    """u_t of the Duhamel representation, via the cosine-kernel accumulation."""
    free_v = free_velocity(data, 0.0, u.dt, u.M)
    if V.is_zero():
        return free_v
    return free_v - duhamel_velocity(u, V)


def perturbed_energy(u: ComplexField, v: ComplexField, V: Potential) -> float:
    """||v||^2 + ||grad u||^2 + ||u||^2 + <V u, u>, gradient spectral."""
    g = u.grid
    uh = fft(u.values, g)
    vh = fft(v.values, g)
    e = np.sum(np.abs(vh) ** 2) + np.sum(g.japanese**2 * np.abs(uh) ** 2)
    e += np.sum(V.values * np.abs(u.values) ** 2)
    return float(e * g.cell_volume)


def reference_solve(
    data: CauchyData,
    V: Potential,
    T: float,
    dt: float,
    source: SpaceTimeField | None = None,
    energy_tol: float = 0.1,
    return_velocity: bool = False,
):
    """
    Strang splitting on (u, u_t): exact free half steps, a potential kick
    u_t <- u_t - dt V u (plus dt times the midpoint source) in between.

    Aborts with EnergyDriftError when the perturbed energy drifts by more
    than ``energy_tol`` (relative) in the unforced case.
    """
    g = data.grid
    if V.grid != g:
        raise FieldError("Cauchy data and potential live on different grids")
    M = time_steps(T, dt)
    if source is not None and (source.M != M or abs(source.dt - dt) > 1e-12 or source.grid != g):
        raise FieldError("source time lattice does not match (T, dt)")
    w = g.japanese
    h = 0.5 * dt
    ch, sh = np.cos(h * w), np.sin(h * w)
    Vv = V.values
    uh = fft(data.f.values, g)
    vh = fft(data.g.values, g)
    us = np.empty((M + 1,) + g.shape, dtype=np.complex128)
    vs = np.empty_like(us) if return_velocity else None
    us[0] = data.f.values
    if return_velocity:
        vs[0] = data.g.values
    check_energy = source is None and not V.is_zero()
    if check_energy:
        e0 = perturbed_energy(data.f, data.g, V)
    for m in range(M):
        uh, vh = ch * uh + (sh / w) * vh, -w * sh * uh + ch * vh
        kick = -Vv * ifft(uh, g) if not V.is_zero() else 0.0
        if source is not None:
            kick = kick + 0.5 * (source.slices[m] + source.slices[m + 1])
        if not isinstance(kick, float):
            vh = vh + dt * fft(kick, g)
        uh, vh = ch * uh + (sh / w) * vh, -w * sh * uh + ch * vh
        us[m + 1] = ifft(uh, g)
        if return_velocity or check_energy:
            v_phys = ifft(vh, g)
            if return_velocity:
                vs[m + 1] = v_phys
        if check_energy:
            e = perturbed_energy(ComplexField(g, us[m + 1]), ComplexField(g, v_phys), V)
            if abs(e - e0) > energy_tol * abs(e0):
                raise EnergyDriftError(
                    f"energy drift {abs(e - e0) / abs(e0):.3g} exceeds {energy_tol} at t = {(m + 1) * dt}; reduce dt"
                )
    u = SpaceTimeField(g, 0.0, dt, us)
    if return_velocity:
        return u, SpaceTimeField(g, 0.0, dt, vs)
    return u
