"""Report rendering: delimited files plus matplotlib figures.

Every report writer emits a CSV next to a PNG with the same stem, so the
numbers that produced a figure are always available to scripts.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .eval import Trace
from .harness import ScalingReport


def _ensure(outdir) -> Path:
    path = Path(outdir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def write_scaling_report(report: ScalingReport, outdir, stem: str | None = None) -> list[Path]:
    """CSV of (input size, output size, ratio) plus a log-log growth figure."""
    outdir = _ensure(outdir)
    stem = stem or f"scaling_{report.name}"
    csv_path = outdir / f"{stem}.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["input_size", "output_size", "ratio"])
        for src, out in report.pairs:
            writer.writerow([src, out, f"{out / max(1, src):.4f}"])

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
    xs = [p[0] for p in report.pairs]
    ys = [p[1] for p in report.pairs]
    ax1.loglog(xs, ys, "o", ms=4, alpha=0.8)
    lim = [min(xs + ys), max(xs + ys)]
    ax1.loglog(lim, [v * report.bound for v in lim], "--", lw=1,
               label=f"bound x{report.bound:g}")
    ax1.loglog(lim, lim, ":", lw=1, color="gray", label="identity")
    ax1.set_xlabel("input size")
    ax1.set_ylabel("output size")
    ax1.set_title(report.name)
    ax1.legend(fontsize=8)
    ratios = [out / max(1, src) for src, out in report.pairs]
    ax2.plot(xs, ratios, "o", ms=4, alpha=0.8)
    ax2.axhline(report.bound, ls="--", lw=1, color="tab:red")
    ax2.set_xlabel("input size")
    ax2.set_ylabel("output/input ratio")
    ax2.set_title(f"max ratio {report.max_ratio:.2f}")
    fig.tight_layout()
    png_path = outdir / f"{stem}.png"
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return [csv_path, png_path]


def write_coloring_report(n: int, edges, outputs: dict[int, str],
                          color_index: dict[int, int | None], outdir,
                          stem: str = "coloring") -> list[Path]:
    """CSV of per-node outputs plus a colored drawing of the graph."""
    outdir = _ensure(outdir)
    csv_path = outdir / f"{stem}.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node_id", "output_bits", "color_index"])
        for w in sorted(outputs):
            writer.writerow([w + 1, outputs[w], color_index.get(w)])

    pos = {
        v: (math.cos(2 * math.pi * v / n), math.sin(2 * math.pi * v / n))
        for v in range(n)
    }
    cmap = plt.get_cmap("tab10")
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    for (u, v) in edges:
        xa, ya = pos[u - 1]
        xb, yb = pos[v - 1]
        ax.plot([xa, xb], [ya, yb], "-", color="lightgray", zorder=1)
    for w in range(n):
        idx = color_index.get(w)
        color = cmap(idx % 10) if idx is not None else "black"
        ax.scatter(*pos[w], s=320, color=color, zorder=2, edgecolors="k")
        ax.annotate(str(w + 1), pos[w], ha="center", va="center", zorder=3,
                    fontsize=9, color="white")
    ax.set_axis_off()
    ax.set_title(f"{n} nodes, palette indices")
    fig.tight_layout()
    png_path = outdir / f"{stem}.png"
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return [csv_path, png_path]


def write_trace_report(trace: Trace, outdir, stem: str = "trace") -> list[Path]:
    """CSV of per-round states plus a bit-raster over time."""
    outdir = _ensure(outdir)
    csv_path = outdir / f"{stem}.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["round", "node", "state", "appointed", "broadcast"])
        for r in range(trace.rounds):
            for w in range(trace.n):
                writer.writerow([
                    r, w, trace.state_string(r, w), trace.appointed_string(r, w),
                    1 if w in trace.broadcasters[r] else 0,
                ])

    k = len(trace.labels)
    grid = [
        [1.0 if trace.configs[r][w][i] else 0.0
         for w in range(trace.n) for i in range(k)]
        for r in range(trace.rounds)
    ]
    fig, ax = plt.subplots(figsize=(min(12, 1 + trace.n * k / 8),
                                    min(10, 1 + trace.rounds / 8)))
    ax.imshow(grid, aspect="auto", cmap="Greys", interpolation="nearest")
    for w in range(1, trace.n):
        ax.axvline(w * k - 0.5, color="tab:red", lw=0.6)
    ax.set_xlabel(f"{trace.n} nodes x {k} state bits")
    ax.set_ylabel("round")
    fig.tight_layout()
    png_path = outdir / f"{stem}.png"
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return [csv_path, png_path]
