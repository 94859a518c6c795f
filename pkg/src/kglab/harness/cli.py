"""
Command line: ``kglab {solve,fpnorm,check,sweep,report}``.

Exit codes: 0 success, 1 runtime error, 2 invalid configuration,
3 an estimate ratio exceeded its cap.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import scipy.fft as sfft

from kglab.duhamel import picard_solve
from kglab.errors import AdmissibilityError, ConfigError, KGLabError, SolverError
from kglab.fieldio import write_field
from kglab.harness.config import ESTIMATES, load_config
from kglab.harness.data import make_data
from kglab.harness.report import read_report, render_report, write_report, write_series
from kglab.harness.scenarios import run_scenario, run_sweep
from kglab.potentials import family_from_dict, fp_norm, make_potential

log = logging.getLogger("kglab")

EXIT_OK, EXIT_RUNTIME, EXIT_CONFIG, EXIT_ESTIMATE = 0, 1, 2, 3


def _common(p: argparse.ArgumentParser, config_required: bool = True) -> None:
    p.add_argument("--config", required=config_required, help="scenario JSON file")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--seed", type=int, default=None, help="RNG seed (overrides scenario.seed)")
    p.add_argument("--budget-sec", type=float, default=None, help="wall-clock budget per scenario")
    p.add_argument("--threads", type=int, default=1, help="FFT worker threads")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kglab", description="Klein-Gordon estimate laboratory")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="Picard-solve the perturbed equation for the first data sample")
    _common(p)

    p = sub.add_parser("fpnorm", help="estimate the Fefferman-Phong norm of the configured potential")
    _common(p)
    p.add_argument("--p", type=float, default=None, help="exponent (default: potential.p or the grid default)")

    p = sub.add_parser("check", help="run one estimate scenario")
    p.add_argument("estimate", choices=sorted(ESTIMATES))
    _common(p)
    p.add_argument("--no-plot", action="store_true")

    p = sub.add_parser("sweep", help="run a scenario over a parameter grid")
    _common(p)
    p.add_argument("--param", required=True, help="dotted config path, e.g. potential.a or data.carrier_scale")
    p.add_argument("--values", required=True, help="comma-separated values (JSON literals)")
    p.add_argument("--no-plot", action="store_true")

    p = sub.add_parser("report", help="render a stored report as tables")
    p.add_argument("path", help="report.json, sweep.json or a directory holding one")
    p.add_argument("--no-plot", action="store_true", help="skip re-rendering the figure")
    return ap


def _out(args, default: str) -> Path:
    return Path(args.out or default)


def _cmd_solve(args) -> int:
    cfg = load_config(args.config, args.seed)
    out = _out(args, "kglab-solve")
    out.mkdir(parents=True, exist_ok=True)
    spec = cfg.section("potential")
    V = make_potential(family_from_dict(spec), cfg.grid, spec.get("p"))
    label, data = make_data(cfg.section("data"), cfg.grid, cfg.seed)[0]
    sol = cfg.section("solver")
    try:
        u, trace = picard_solve(data, V, cfg.T, cfg.dt, float(sol["tol"]), int(sol["max_iter"]))
    except SolverError as exc:
        if exc.trace is not None:
            (out / "trace.json").write_text(json.dumps(exc.trace.to_dict(), indent=2) + "\n")
        raise
    write_field(data.f, out / "f.kgf")
    write_field(data.g, out / "g.kgf")
    write_field(u, out / "u.kgf")
    (out / "trace.json").write_text(json.dumps({"sample": label, **trace.to_dict()}, indent=2) + "\n")
    print(f"{label}: {trace.iterates} iterations, converged={trace.converged}, wrote {out}")
    return EXIT_OK


def _cmd_fpnorm(args) -> int:
    cfg = load_config(args.config, args.seed)
    spec = cfg.section("potential")
    V = make_potential(family_from_dict(spec), cfg.grid, spec.get("p"))
    scan = cfg.section("scan")
    est = fp_norm(V, args.p, int(scan["center_stride"]), scan.get("radii"))
    print(f"{est.value:.10g}")
    print(json.dumps(est.to_dict(), indent=2))
    return EXIT_OK


def _cmd_check(args) -> int:
    cfg = load_config(args.config, args.seed, args.estimate)
    report = run_scenario(cfg, args.budget_sec)
    out = _out(args, f"kglab-{args.estimate.lower()}")
    write_report(report, out, plot=not args.no_plot)
    print(render_report(report.to_dict()))
    return EXIT_OK if report.passed else EXIT_ESTIMATE


def _cmd_sweep(args) -> int:
    cfg = load_config(args.config, args.seed)
    values = [json.loads(v) for v in args.values.split(",")]
    res = run_sweep(cfg, args.param, values, args.budget_sec)
    out = _out(args, "kglab-sweep")
    out.mkdir(parents=True, exist_ok=True)
    for v, rep in zip(values, res["reports"]):
        write_report(rep, out / f"{args.param}={v}", plot=False)
    doc = {k: v for k, v in res.items() if k != "reports"}
    doc["passed"] = all(r.passed for r in res["reports"])
    (out / "sweep.json").write_text(json.dumps(doc, indent=2) + "\n")
    write_series(res["series"], out / "series.csv")
    if not args.no_plot:
        from kglab.harness.plotting import plot_series

        plot_series(res["series"], out / "series.png", title=f"{cfg.estimate} sweep over {args.param}")
    print(_render_sweep(doc))
    return EXIT_OK if doc["passed"] else EXIT_ESTIMATE


def _render_sweep(doc: dict) -> str:
    s = doc["series"]
    lines = [f"{doc['estimate']} sweep over {doc['parameter']} (max/min of max ratio: {doc['spread']:.4g})"]
    lines.append(f"{'value':>12}  {'max_ratio':>12}  {'median_ratio':>12}")
    for v, mx, md in zip(s["value"], s["max_ratio"], s["median_ratio"]):
        lines.append(f"{v:>12.6g}  {mx:>12.6g}  {md:>12.6g}")
    return "\n".join(lines)


def _cmd_report(args) -> int:
    p = Path(args.path)
    base = p if p.is_dir() else p.parent
    if (p.is_dir() and (p / "sweep.json").exists()) or p.name == "sweep.json":
        doc = json.loads((base / "sweep.json").read_text())
        print(_render_sweep(doc))
    else:
        doc = read_report(p)
        print(render_report(doc))
    if not args.no_plot:
        from kglab.harness.plotting import plot_series

        plot_series(doc["series"], base / "series.png", title=doc["estimate"])
    return EXIT_OK


_COMMANDS = {"solve": _cmd_solve, "fpnorm": _cmd_fpnorm, "check": _cmd_check, "sweep": _cmd_sweep, "report": _cmd_report}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    threads = getattr(args, "threads", 1)
    try:
        with sfft.set_workers(threads):
            return _COMMANDS[args.command](args)
    except (ConfigError, AdmissibilityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (KGLabError, OSError, ValueError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
