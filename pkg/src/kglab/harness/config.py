"""
Scenario configuration: a JSON document with one top-level ``scenario``
object.  Validation collects every problem before raising, so a broken
file is reported in one pass.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass
from pathlib import Path

from kglab.errors import AdmissibilityError, ConfigError
from kglab.grid import Grid
from kglab.norms import check_admissible
from kglab.potentials import family_from_dict

__all__ = ["ESTIMATES", "ScenarioConfig", "load_config", "parse_config", "DEFAULTS"]


@dataclass(frozen=True)
class EstimateInfo:
    title: str
    inequality: str
    evolves: bool
    needs_triple: bool = False
    needs_3d: bool = False


ESTIMATES = {
    "WL2_HOMO": EstimateInfo(
        "homogeneous weighted L2 estimate for the free flow",
        "||e^{it<nabla>} f||^2_{L^2_{x,t}(|V|)} <= C ||V||_{F^p} ||<nabla>^{1/2} f||^2_{L^2}",
        True,
    ),
    "WL2_THM": EstimateInfo(
        "weighted L2 bound for the perturbed solution",
        "||u||_{L^2_{x,t}(|V|)} <= C ||V||_{F^p}^{1/2} (||f||_{H^{1/2}} + ||g||_{H^{-1/2}})",
        True,
    ),
    "LS_FREE": EstimateInfo(
        "local smoothing for the free flow",
        "sup_{x0,R} R^{-1} int_{B(x0,R)} int | |nabla|^{1/2} e^{it<nabla>} f |^2 <= C ||f||^2_{H^{1/2}}",
        True,
    ),
    "LS_THM": EstimateInfo(
        "local smoothing for the perturbed solution",
        "sup_{x0,R} R^{-1} int_{B(x0,R)} int | |nabla|^{1/2} u |^2 <= C (||f||^2_{H^{1/2}} + ||g||^2_{H^{-1/2}})",
        True,
    ),
    "STRICHARTZ": EstimateInfo(
        "Strichartz estimate for the perturbed solution",
        "||u||_{L^q_t H^sigma_r} <= C (1 + ||V||_{F^p}) (||f||_{H^{1/2}} + ||g||_{H^{-1/2}})",
        True,
        needs_triple=True,
    ),
    "RESOLVENT": EstimateInfo(
        "uniform weighted resolvent bounds",
        "||R(z) f||_{L^2(|V|)} <= C ||V||_{F^p} ||f||_{L^2(|V|^{-1})} and its local smoothing form, C independent of z",
        False,
    ),
    "TRACE": EstimateInfo(
        "trace inequality for sphere densities",
        "int_{|x|<R} |(d dsigma_r)^|^2 dx <= C R int |d|^2 dsigma_r",
        False,
        needs_3d=True,
    ),
    "RESTRICTION": EstimateInfo(
        "weighted L2 restriction estimate",
        "||(d dsigma_r)^||_{L^2(|V|)} <= C r^{1/2} ||V||_{F^p}^{1/2} ||d||_{L^2(dsigma_r)}",
        False,
        needs_3d=True,
    ),
    "DECOMP": EstimateInfo(
        "multiplier plus free-remainder decomposition of the inhomogeneous solution",
        "u = u~ + R with u~ = (1 + |xi|^2 - (tau + i eps)^2)^{-1} F^ and R free",
        True,
    ),
    "CONTRACTION": EstimateInfo(
        "contraction of the potential Duhamel operator",
        "||S F||_{L^2_{x,t}(|V|)} <= c(a) ||F||_{L^2_{x,t}(|V|)} with c linear in the coupling a",
        True,
    ),
}

DEFAULTS = {
    "grid": {"n": 3, "L": 16.0, "N": 32},
    "time": {"T": 4.0, "dt": 0.0625},
    "potential": {"family": "InverseSquare", "a": 0.01},
    "data": {"kind": "packets", "centers": [[0.0, 0.0, 0.0]], "widths": [1.0], "carriers": [[0.0, 0.0, 0.0]]},
    "scan": {"center_stride": 4, "radii": None},
    "solver": {"tol": 1e-10, "max_iter": 60},
    "resolvent": {"re": [-5.0, 2.5, 10.0, 17.5, 25.0], "im": [0.1, 0.31622776601683794, 1.0, 3.1622776601683795, 10.0]},
    "sphere": {"radii": [1.0, 2.0, 4.0], "R": [0.5, 1.0, 2.0, 4.0, 8.0]},
    "decomp": {"eps": 1e-3, "pads": [4, 8]},
    "contraction": {"couplings": [0.04, 0.02, 0.01], "index": None},
    "ratio_cap": 1e3,
    "budget_sec": 120.0,
    "seed": None,
}

_SECTIONS = set(DEFAULTS) | {"estimate", "triple", "label"}


@dataclass(frozen=True, eq=False)
class ScenarioConfig:
    """Validated scenario; ``raw`` is the normalised document echoed into reports."""

    estimate: str
    grid: Grid
    T: float
    dt: float
    raw: dict

    def section(self, name: str) -> dict:
        return self.raw[name]

    @property
    def info(self) -> EstimateInfo:
        return ESTIMATES[self.estimate]

    @property
    def seed(self):
        return self.raw.get("seed")

    def with_updates(self, **changes) -> "ScenarioConfig":
        doc = copy.deepcopy(self.raw)
        doc.update(changes)
        return parse_config({"scenario": doc})

    def to_document(self) -> dict:
        return {"scenario": copy.deepcopy(self.raw)}


def _merge(defaults: dict, given: dict) -> dict:
    out = copy.deepcopy(defaults)
    for k, v in given.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict) and k != "potential" and k != "data":
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def _support_radius(data: dict, n: int) -> float:
    if data.get("kind") == "random":
        return 4.0 * float(data.get("envelope", 1.0))
    centers = data.get("centers") or [[0.0] * n]
    widths = data.get("widths") or [1.0]
    return max(math.sqrt(sum(c * c for c in cen)) + 4.0 * w for cen, w in zip(centers, widths))


def _check_data(data: dict, n: int, errors: list[str], seed) -> None:
    kind = data.get("kind")
    if kind == "packets":
        centers, widths, carriers = data.get("centers"), data.get("widths"), data.get("carriers")
        if not centers or not widths or not carriers:
            errors.append("data.packets needs non-empty centers, widths and carriers")
            return
        if not len(centers) == len(widths) == len(carriers):
            errors.append("data.centers, data.widths and data.carriers must have equal length")
        for c in list(centers) + list(carriers):
            if len(c) != n:
                errors.append(f"data point {c} does not have n = {n} components")
                break
        if any(not w > 0 for w in widths):
            errors.append("data.widths must be positive")
        if "carrier_scale" in data and not data["carrier_scale"] >= 0:
            errors.append("data.carrier_scale must be >= 0")
    elif kind == "random":
        if int(data.get("count", 0)) < 1:
            errors.append("data.random needs count >= 1")
        if not float(data.get("band", 0)) > 0:
            errors.append("data.random needs band > 0")
        if not float(data.get("envelope", 0)) > 0:
            errors.append("data.random needs envelope > 0")
        if seed is None:
            errors.append("random data family needs a seed (scenario.seed or --seed)")
    else:
        errors.append(f"data.kind must be 'packets' or 'random', got {kind!r}")
    if data.get("velocity", "zero") not in ("zero", "half_wave"):
        errors.append("data.velocity must be 'zero' or 'half_wave'")


def parse_config(doc: dict) -> ScenarioConfig:
    """Validate a config document and fill defaults."""
    if not isinstance(doc, dict) or "scenario" not in doc or not isinstance(doc["scenario"], dict):
        raise ConfigError(["document must contain a top-level 'scenario' object"])
    if set(doc) - {"scenario"}:
        raise ConfigError([f"unexpected top-level keys {sorted(set(doc) - {'scenario'})}"])
    given = doc["scenario"]
    errors: list[str] = []
    unknown = set(given) - _SECTIONS
    if unknown:
        errors.append(f"unknown scenario keys {sorted(unknown)}")
    raw = _merge(DEFAULTS, {k: v for k, v in given.items() if k in _SECTIONS})

    est = raw.get("estimate")
    if est not in ESTIMATES:
        errors.append(f"estimate must be one of {sorted(ESTIMATES)}, got {est!r}")
        info = None
    else:
        info = ESTIMATES[est]

    grid = None
    gs = raw["grid"]
    try:
        grid = Grid(int(gs["n"]), float(gs["L"]), int(gs["N"]))
    except (KeyError, TypeError, ValueError) as exc:
        errors.append(f"grid: {exc}")
    n = grid.n if grid is not None else int(gs.get("n", 3))

    T, dt = float(raw["time"].get("T", 0)), float(raw["time"].get("dt", 0))
    if not T > 0 or not dt > 0:
        errors.append("time.T and time.dt must be positive")
    elif abs(round(T / dt) * dt - T) > 1e-9 * T:
        errors.append(f"time.T = {T} is not a whole number of steps dt = {dt}")

    pot = dict(raw["potential"])
    try:
        family_from_dict(pot)
    except (KeyError, TypeError, ValueError) as exc:
        errors.append(f"potential: {exc}")
    p = pot.get("p")
    if p is not None and not 1 <= float(p) <= n / 2:
        errors.append(f"potential.p = {p} outside [1, n/2] = [1, {n / 2}]")

    _check_data(raw["data"], n, errors, raw.get("seed"))

    if info is not None:
        if info.needs_triple:
            tr = raw.get("triple")
            if not isinstance(tr, dict) or not {"q", "r", "theta"} <= set(tr):
                errors.append(f"{est} needs triple {{q, r, theta}}")
            else:
                try:
                    check_admissible(tr["q"], tr["r"], tr["theta"], n)
                except AdmissibilityError as exc:
                    errors.extend(f"triple: {v}" for v in exc.violations)
        if info.needs_3d and n != 3:
            errors.append(f"{est} is implemented for n = 3 only")
        if info.evolves and grid is not None and T > 0:
            need = _support_radius(raw["data"], n) + T + 1
            if grid.L < need:
                errors.append(f"box too small: L = {grid.L} < R_support + T + 1 = {need:.4g}")
        if est == "CONTRACTION" and len(raw["contraction"].get("couplings") or []) < 2:
            errors.append("contraction.couplings needs at least two values")
        if est == "DECOMP":
            if not float(raw["decomp"].get("eps", 0)) > 0:
                errors.append("decomp.eps must be positive")
            if any(int(q) < 1 for q in raw["decomp"].get("pads", [])) or not raw["decomp"].get("pads"):
                errors.append("decomp.pads must be a non-empty list of integers >= 1")
        if est == "RESOLVENT":
            if any(float(v) == 0 for v in raw["resolvent"].get("im", [])) or not raw["resolvent"].get("im"):
                errors.append("resolvent.im must be a non-empty list of nonzero values")
        if est in ("TRACE", "RESTRICTION"):
            sph = raw["sphere"]
            if any(not float(r) > 0 for r in sph.get("radii", [])) or not sph.get("radii"):
                errors.append("sphere.radii must be a non-empty list of positive values")
            if est == "TRACE" and grid is not None and any(not 0 < float(R) <= grid.L for R in sph.get("R", [])):
                errors.append(f"sphere.R values must lie in (0, L = {grid.L}]")
            if sph.get("density", "one") not in ("one", "random"):
                errors.append("sphere.density must be 'one' or 'random'")
            elif sph.get("density") == "random" and raw.get("seed") is None:
                errors.append("random sphere densities need a seed (scenario.seed or --seed)")
    if not float(raw.get("ratio_cap", 0)) > 0:
        errors.append("ratio_cap must be positive")
    if not float(raw.get("budget_sec", 0)) > 0:
        errors.append("budget_sec must be positive")
    if errors:
        raise ConfigError(errors)
    return ScenarioConfig(est, grid, T, dt, raw)


def load_config(path, seed=None, estimate=None) -> ScenarioConfig:
    """
    Read and validate a config file.

    ``seed`` overrides scenario.seed and ``estimate`` overrides
    scenario.estimate, so a file may leave the estimate to the caller.
    """
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError([f"cannot read config {path}: {exc}"]) from exc
    if seed is not None and isinstance(doc, dict) and isinstance(doc.get("scenario"), dict):
        doc["scenario"]["seed"] = int(seed)
    if estimate is not None and isinstance(doc, dict) and isinstance(doc.get("scenario"), dict):
        doc["scenario"]["estimate"] = estimate
    return parse_config(doc)
