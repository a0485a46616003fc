"""Figures for task reports. Rendering is off-screen (Agg) and only happens
when a plot directory is requested."""
from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .report import Report  # noqa: E402

GOLDEN = (5**0.5 - 1) / 2
WIDTH = 4.8  # inches

STYLE = {
    "font.family": "serif",
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "lines.linewidth": 1.0,
    "lines.markersize": 3,
    "axes.prop_cycle": matplotlib.cycler(color=["#08589e", "#d95f02", "#4eb3d3", "#7570b3", "#1b9e77"]),
    "figure.figsize": (WIDTH, WIDTH * GOLDEN),
    "figure.dpi": 150,
    "savefig.bbox": "tight",
}


def _numeric(values) -> bool:
    return all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values)


def render(report: Report, directory: str) -> str | None:
    """Draw ``report.plot`` (x column against y columns) into ``directory/<task>.png``.

    Returns the path written, or ``None`` when the report carries no plot spec.
    """
    spec = report.plot
    if not spec or not report.rows:
        return None
    os.makedirs(directory, exist_ok=True)
    x_key = spec["x"]
    xs = [r[x_key] for r in report.rows]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for y_key in spec["y"]:
            ys = [r[y_key] for r in report.rows]
            pts = [(x, y) for x, y in zip(xs, ys) if _numeric([x, y])]
            if not pts:
                continue
            ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=y_key.replace("_", " "))
        for ref in spec.get("hlines", []):
            ax.axhline(ref["y"], color="0.4", linestyle="--", linewidth=0.8, label=ref.get("label"))
        if spec.get("logy"):
            ax.set_yscale("log")
        ax.set_xlabel(spec.get("xlabel", x_key))
        ax.set_ylabel(spec.get("ylabel", ""))
        ax.set_title(spec.get("title", report.task))
        ax.legend(frameon=False)
        path = os.path.join(directory, f"{report.task}.png")
        fig.savefig(path, metadata={"Software": None})
        plt.close(fig)
    return path
