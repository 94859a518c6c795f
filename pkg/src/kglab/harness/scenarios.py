"""
Scenario execution.  One scenario evaluates one estimate over a data or
parameter family and reports, per sample, the left side, the right-side
factor and their ratio.
"""

from __future__ import annotations

import copy
import math
import time
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from kglab.balls import ball_kernel
from kglab.duhamel import inhomogeneous_solve, picard_solve
from kglab.errors import BudgetExceededError, ConfigError
from kglab.freeflow import CauchyData
from kglab.grid import SpaceTimeField, fft, ifft
from kglab.harness.config import ScenarioConfig, parse_config
from kglab.harness.data import data_norm, make_data
from kglab.norms import (
    check_admissible,
    local_smoothing_functional,
    sobolev_norm,
    spacetime_l2,
    strichartz_norm,
    weighted_l2_spacetime,
)
from kglab.potentials import family_from_dict, fp_norm, make_potential
from kglab.resolvent import decompose, smoothing_resolvent_norm, weighted_resolvent_norm
from kglab.sphere import node_count, sphere_density, sphere_extension_grid

__all__ = ["EstimateReport", "Budget", "run_scenario", "run_sweep", "set_path", "TIMING_KEYS"]

TIMING_KEYS = ("timing",)


class Budget:
    """Cooperative wall-clock budget, checked between samples."""

    def __init__(self, seconds: float):
        self.seconds = float(seconds)
        self.start = time.perf_counter()

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self.start

    def check(self, where: str = "") -> None:
        if self.elapsed > self.seconds:
            raise BudgetExceededError(f"wall-clock budget of {self.seconds:g} s exceeded {where}".strip())


@dataclass
class EstimateReport:
    estimate: str
    title: str
    inequality: str
    scenario: dict
    samples: list[dict]
    max_ratio: float
    median_ratio: float
    argmax: dict
    ratio_cap: float
    passed: bool
    series: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "EstimateReport":
        return cls(**d)


def _ratio(lhs: float, rhs: float) -> float:
    if lhs == 0:
        return 0.0
    return lhs / rhs if rhs > 0 else math.inf


def _sample(label: str, lhs: float, rhs: float, **extra) -> dict:
    return {"label": label, "lhs": float(lhs), "rhs": float(rhs), "ratio": float(_ratio(lhs, rhs)), **extra}


def _potential(cfg: ScenarioConfig, a=None):
    spec = dict(cfg.section("potential"))
    if a is not None:
        spec["a"] = a
    p = spec.get("p")
    V = make_potential(family_from_dict(spec), cfg.grid, p)
    scan = cfg.section("scan")
    est = fp_norm(V, center_stride=int(scan["center_stride"]), radii=scan.get("radii"))
    return V, est


def _half_wave_flow(f, T: float, dt: float) -> SpaceTimeField:
    g = f.grid
    M = int(round(T / dt))
    fh = fft(f.values, g)
    slices = np.stack([ifft(np.exp(1j * m * dt * g.japanese) * fh, g) for m in range(M + 1)])
    return SpaceTimeField(g, 0.0, dt, slices)


def _solve(cfg: ScenarioConfig, data: CauchyData, V):
    sol = cfg.section("solver")
    return picard_solve(data, V, cfg.T, cfg.dt, tol=float(sol["tol"]), max_iter=int(sol["max_iter"]))


def _trace_summary(trace) -> dict:
    return {
        "iterates": trace.iterates,
        "converged": trace.converged,
        "last_residual": trace.residuals[-1] if trace.residuals else 0.0,
        "contraction_ratios": list(trace.contraction_ratios),
    }


def _run_data_family(cfg: ScenarioConfig, budget: Budget) -> tuple[list[dict], dict]:
    est = cfg.estimate
    V, fp = _potential(cfg)
    scan = cfg.section("scan")
    samples, details = [], {"fp_norm": fp.to_dict()}
    traces = {}
    for label, data in make_data(cfg.section("data"), cfg.grid, cfg.seed):
        budget.check(f"at sample {label}")
        hf = sobolev_norm(data.f, 0.5)
        if est == "WL2_HOMO":
            u = _half_wave_flow(data.f, cfg.T, cfg.dt)
            lhs = weighted_l2_spacetime(u, V) ** 2
            samples.append(_sample(label, lhs, fp.value * hf**2))
        elif est == "LS_FREE":
            u = _half_wave_flow(data.f, cfg.T, cfg.dt)
            val, win = local_smoothing_functional(u, 0.5, int(scan["center_stride"]), scan.get("radii"))
            samples.append(_sample(label, val, hf**2, window=win.to_dict()))
        else:
            u, trace = _solve(cfg, data, V)
            traces[label] = _trace_summary(trace)
            if est == "WL2_THM":
                lhs = weighted_l2_spacetime(u, V)
                samples.append(_sample(label, lhs, math.sqrt(fp.value) * data_norm(data)))
            elif est == "LS_THM":
                val, win = local_smoothing_functional(u, 0.5, int(scan["center_stride"]), scan.get("radii"))
                rhs = hf**2 + sobolev_norm(data.g, -0.5) ** 2
                samples.append(_sample(label, val, rhs, window=win.to_dict()))
            elif est == "STRICHARTZ":
                tr = cfg.section("triple")
                triple = check_admissible(tr["q"], tr["r"], tr["theta"], cfg.grid.n)
                lhs = strichartz_norm(u, triple)
                samples.append(_sample(label, lhs, (1 + fp.value) * data_norm(data), sigma=triple.sigma))
    if traces:
        details["picard"] = traces
    return samples, details


def _run_resolvent(cfg: ScenarioConfig, budget: Budget) -> tuple[list[dict], dict, dict]:
    V, fp = _potential(cfg)
    spec = cfg.section("resolvent")
    radii = cfg.section("scan").get("radii")
    seed = cfg.seed or 0
    samples = []
    series = {"re_z": [], "im_z": [], "ratio_WL2": [], "ratio_LS": []}
    for im in spec["im"]:
        for re in spec["re"]:
            budget.check(f"at z = {re}+{im}i")
            z = complex(float(re), float(im))
            if fp.value == 0:
                wl2 = ls = 0.0
                R = None
            else:
                wl2 = weighted_resolvent_norm(V, z, seed)
                ls, R = smoothing_resolvent_norm(V, z, radii, seed=seed)
            lab = f"z={re:g}{im:+g}i"
            samples.append(_sample(lab + ":WL2", wl2, fp.value, form="WL2", re_z=re, im_z=im))
            samples.append(_sample(lab + ":LS", ls, fp.value, form="LS", re_z=re, im_z=im, window_R=R))
            series["re_z"].append(float(re))
            series["im_z"].append(float(im))
            series["ratio_WL2"].append(samples[-2]["ratio"])
            series["ratio_LS"].append(samples[-1]["ratio"])

    def spread(vals):
        vals = [v for v in vals if v > 0]
        return max(vals) / min(vals) if vals else 1.0

    ls_rows = {}
    for im in spec["im"]:
        row = [s["ratio"] for s in samples if s["form"] == "LS" and s["im_z"] == im]
        ls_rows[f"{im:g}"] = max(row)
    details = {
        "fp_norm": fp.to_dict(),
        "wl2_spread": spread(series["ratio_WL2"]),
        "ls_spread": spread(series["ratio_LS"]),
        "ls_constant_by_im": ls_rows,
    }
    return samples, details, series


def _sphere_densities(cfg: ScenarioConfig, R_max: float):
    spec = cfg.section("sphere")
    g = cfg.grid
    out = []
    for r in spec["radii"]:
        r = float(r)
        d = sphere_density(r, node_count(r, R_max, g.dx))
        if spec.get("density", "one") == "random":
            rng = np.random.default_rng([cfg.seed or 0, int(round(r * 1000))])
            c = rng.standard_normal(4) + 1j * rng.standard_normal(4)
            w = d.nodes / r
            d = d.with_values(c[0] + w @ c[1:])
        out.append(d)
    return out


def _run_sphere(cfg: ScenarioConfig, budget: Budget) -> tuple[list[dict], dict]:
    g = cfg.grid
    spec = cfg.section("sphere")
    samples, details = [], {}
    if cfg.estimate == "TRACE":
        Rs = [float(R) for R in spec["R"]]
        center = g.index_of((0.0,) * g.n)
        for d in _sphere_densities(cfg, max(Rs)):
            budget.check(f"at r = {d.radius}")
            gv = np.abs(sphere_extension_grid(d, g)) ** 2
            for R in Rs:
                chi = np.roll(ball_kernel(g, R), center, axis=(0, 1, 2))
                lhs = g.cell_volume * float(np.sum(chi * gv))
                samples.append(_sample(f"r={d.radius:g},R={R:g}", lhs, R * d.l2_norm() ** 2, r=d.radius, R=R))
    else:
        V, fp = _potential(cfg)
        details["fp_norm"] = fp.to_dict()
        for d in _sphere_densities(cfg, g.L * math.sqrt(3)):
            budget.check(f"at r = {d.radius}")
            gv = sphere_extension_grid(d, g)
            lhs = math.sqrt(g.cell_volume * float(np.sum(V.abs * np.abs(gv) ** 2)))
            rhs = math.sqrt(d.radius * fp.value) * d.l2_norm()
            samples.append(_sample(f"r={d.radius:g}", lhs, rhs, r=d.radius))
    return samples, details


def _run_decomp(cfg: ScenarioConfig, budget: Budget) -> tuple[list[dict], dict]:
    spec = cfg.section("decomp")
    _, data = make_data(cfg.section("data"), cfg.grid, cfg.seed)[0]
    M = int(round(cfg.T / cfg.dt))
    env = np.sin(np.pi * np.arange(M + 1) / M) ** 2
    F = SpaceTimeField(cfg.grid, 0.0, cfg.dt, env.reshape((M + 1,) + (1,) * cfg.grid.n) * data.f.values)
    ref = inhomogeneous_solve(F)
    ref_norm = spacetime_l2(ref)
    samples = []
    for pad in spec["pads"]:
        budget.check(f"at pad {pad}")
        D = decompose(F, float(spec["eps"]), int(pad))
        err = spacetime_l2(D.total - ref)
        samples.append(_sample(f"pad={pad}", err, ref_norm, pad=int(pad), wrap_fraction=D.wrap_fraction))
    return samples, {"eps": float(spec["eps"])}


def _run_contraction(cfg: ScenarioConfig, budget: Budget) -> tuple[list[dict], dict]:
    spec = cfg.section("contraction")
    couplings = [float(a) for a in spec["couplings"]]
    _, data = make_data(cfg.section("data"), cfg.grid, cfg.seed)[0]
    traces = []
    for a in couplings:
        budget.check(f"at coupling {a}")
        V, _ = _potential(cfg, a)
        _, trace = _solve(cfg, data, V)
        traces.append(trace)
    k = spec.get("index")
    if k is None:
        k = min(len(t.contraction_ratios) for t in traces) - 1
    k = int(k)
    if k < 0:
        raise ConfigError(["contraction: some coupling converged before a contraction ratio was recorded; tighten solver.tol"])
    a_ref = max(abs(a) for a in couplings)
    samples = []
    for a, t in zip(couplings, traces):
        rho = t.asymptotic_ratio(k)
        samples.append(_sample(f"a={a:g}", rho, abs(a) / a_ref, coupling=a, iterates=t.iterates))
    factors = []
    for s0, s1 in zip(samples, samples[1:]):
        expected = s1["coupling"] / s0["coupling"]
        factors.append((s1["lhs"] / s0["lhs"]) / expected if s0["lhs"] > 0 else math.nan)
    details = {"matched_index": k, "scaling_factors": factors, "picard": [_trace_summary(t) for t in traces]}
    return samples, details


def run_scenario(cfg: ScenarioConfig, budget_sec: float | None = None) -> EstimateReport:
    """Evaluate one scenario; deterministic apart from the ``timing`` block."""
    budget = Budget(cfg.raw["budget_sec"] if budget_sec is None else budget_sec)
    t0 = time.perf_counter()
    est = cfg.estimate
    series = {}
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        if est in ("WL2_HOMO", "WL2_THM", "LS_FREE", "LS_THM", "STRICHARTZ"):
            samples, details = _run_data_family(cfg, budget)
        elif est == "RESOLVENT":
            samples, details, series = _run_resolvent(cfg, budget)
        elif est in ("TRACE", "RESTRICTION"):
            samples, details = _run_sphere(cfg, budget)
        elif est == "DECOMP":
            samples, details = _run_decomp(cfg, budget)
        else:
            samples, details = _run_contraction(cfg, budget)
    budget.check("after the last sample")
    # warnings become part of the report instead of stderr noise
    details["warnings"] = sorted({f"{w.category.__name__}: {w.message}" for w in caught})
    ratios = np.array([s["ratio"] for s in samples])
    i = int(np.argmax(ratios))
    if not series:
        series = {"sample": list(range(len(samples))), "ratio": ratios.tolist()}
    cap = float(cfg.raw["ratio_cap"])
    info = cfg.info
    return EstimateReport(
        estimate=est,
        title=info.title,
        inequality=info.inequality,
        scenario=copy.deepcopy(cfg.raw),
        samples=samples,
        max_ratio=float(ratios.max()),
        median_ratio=float(np.median(ratios)),
        argmax=copy.deepcopy(samples[i]),
        ratio_cap=cap,
        passed=bool(ratios.max() <= cap),
        series=series,
        details=details,
        timing={"wall_sec": time.perf_counter() - t0},
    )


def set_path(doc: dict, path: str, value) -> dict:
    """Copy of ``doc`` with the dotted ``path`` set to ``value``."""
    out = copy.deepcopy(doc)
    node = out
    keys = path.split(".")
    for k in keys[:-1]:
        node = node.setdefault(k, {})
    node[keys[-1]] = value
    return out


def run_sweep(cfg: ScenarioConfig, path: str, values, budget_sec: float | None = None) -> dict:
    """Run ``cfg`` once per value of the dotted parameter ``path``."""
    runs = []
    for v in values:
        sub = parse_config({"scenario": set_path(cfg.raw, path, v)})
        runs.append(run_scenario(sub, budget_sec))
    series = {
        "value": [float(v) for v in values],
        "max_ratio": [r.max_ratio for r in runs],
        "median_ratio": [r.median_ratio for r in runs],
    }
    pos = [r for r in series["max_ratio"] if r > 0]
    return {
        "estimate": cfg.estimate,
        "parameter": path,
        "series": series,
        "spread": max(pos) / min(pos) if pos else 1.0,
        "reports": runs,
    }
