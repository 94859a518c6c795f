"""Figures for report and sweep series, written next to the CSV output."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

__all__ = ["plot_series"]

_X_KEYS = ("value", "sample")


def plot_series(series: dict, path, title: str = "") -> Path:
    """
    Ratio curves on a log y-axis.  Resolvent sweeps (re_z, im_z columns)
    get one curve per Im z against Re z; everything else plots each
    non-x column against the first x-like column.
    """
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if "re_z" in series:
        ims = sorted(set(series["im_z"]))
        for col, style in (("ratio_WL2", "-o"), ("ratio_LS", "--s")):
            for im in ims:
                pts = [(r, v) for r, i, v in zip(series["re_z"], series["im_z"], series[col]) if i == im]
                ax.plot(*zip(*pts), style, ms=3, label=f"{col[6:]} Im z={im:g}")
        ax.set_xlabel("Re z")
        ax.legend(fontsize=6, ncol=2)
    else:
        xkey = next((k for k in _X_KEYS if k in series), None)
        x = series[xkey] if xkey else list(range(len(next(iter(series.values()), []))))
        for k, v in series.items():
            if k == xkey:
                continue
            ax.plot(x, v, "-o", ms=3, label=k)
        ax.set_xlabel(xkey or "index")
        ax.legend(fontsize=7)
    ax.set_ylabel("ratio")
    if all(v > 0 for k, vals in series.items() if k.startswith(("ratio", "max", "median")) for v in vals):
        ax.set_yscale("log")
    ax.set_title(title, fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return path
