"""Persisting reports (JSON, CSV) and rendering them as plain-text tables."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

from kglab.harness.scenarios import EstimateReport

__all__ = ["write_report", "read_report", "write_series", "render_report", "strip_timing", "SAMPLE_COLUMNS"]

SAMPLE_COLUMNS = ["label", "lhs", "rhs", "ratio"]


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def write_series(series: dict, path) -> None:
    cols = list(series)
    rows = zip(*(series[c] for c in cols))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for row in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in row])


def write_report(report: EstimateReport, out_dir, plot: bool = True) -> list[Path]:
    """Write report.json, samples.csv, series.csv and (optionally) series.png."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = [out / "report.json", out / "samples.csv", out / "series.csv"]
    paths[0].write_text(json.dumps(_jsonable(report.to_dict()), indent=2, sort_keys=True) + "\n")
    extra = sorted({k for s in report.samples for k in s} - set(SAMPLE_COLUMNS))
    with open(paths[1], "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SAMPLE_COLUMNS + extra)
        for s in report.samples:
            row = [s.get(c, "") for c in SAMPLE_COLUMNS + extra]
            w.writerow([json.dumps(v) if isinstance(v, (dict, list)) else (repr(v) if isinstance(v, float) else v) for v in row])
    write_series(report.series, paths[2])
    if plot:
        from kglab.harness.plotting import plot_series

        paths.append(plot_series(report.series, out / "series.png", title=f"{report.estimate}: {report.title}"))
    return paths


def read_report(path) -> dict:
    p = Path(path)
    if p.is_dir():
        p = p / "report.json"
    return json.loads(p.read_text())


def strip_timing(doc: dict) -> dict:
    """Report document without wall-clock fields, for reproducibility comparisons."""
    return {k: v for k, v in doc.items() if k != "timing"}


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, dict):
        return json.dumps(v, sort_keys=True)
    return str(v)


def _table(header: list[str], rows: list[list]) -> str:
    cells = [header] + [[_fmt(v) for v in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    line = "  ".join("-" * w for w in widths)
    out = ["  ".join(c.ljust(w) for c, w in zip(cells[0], widths)), line]
    out += ["  ".join(c.ljust(w) for c, w in zip(r, widths)) for r in cells[1:]]
    return "\n".join(out)


def render_report(doc: dict) -> str:
    """Human-readable summary of a stored report document."""
    verdict = "PASS" if doc["passed"] else "FAIL"
    head = [
        f"{doc['estimate']}: {doc['title']}",
        f"  inequality: {doc['inequality']}",
        f"  max ratio {_fmt(doc['max_ratio'])}  median {_fmt(doc['median_ratio'])}  cap {_fmt(doc['ratio_cap'])}  -> {verdict}",
        f"  argmax: {doc['argmax'].get('label')}",
    ]
    if doc.get("timing"):
        head.append(f"  wall time: {_fmt(doc['timing'].get('wall_sec'))} s")
    rows = [[s.get(c, "") for c in SAMPLE_COLUMNS] for s in doc["samples"]]
    body = _table(SAMPLE_COLUMNS, rows)
    det = doc.get("details") or {}
    extra = [f"  {k}: {_fmt(v)}" for k, v in det.items() if not isinstance(v, (dict, list))]
    if "scaling_factors" in det:
        extra.append(f"  scaling_factors: {', '.join(_fmt(x) for x in det['scaling_factors'])}")
    return "\n".join(head + [""] + [body] + ([""] + extra if extra else []))
