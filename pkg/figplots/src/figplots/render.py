"""Success-rate versus density charts with a connectivity overlay."""

from __future__ import annotations

import dataclasses

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .schema import MODES, SchemaError, aggregate, load_rows


@dataclasses.dataclass(frozen=True)
class PlotSpec:
    """What to read, which success flag to chart, and where to write.

    The image format follows the output suffix (anything matplotlib's Agg
    backend can save; .png when the suffix names no known format).
    """

    csv_path: str
    out_path: str
    mode: str = "recovery"

    def __post_init__(self):
        if self.mode not in MODES:
            raise SchemaError(f"mode must be one of {MODES}, got {self.mode!r}")


@dataclasses.dataclass(frozen=True)
class RenderResult:
    out_path: str
    cells: list


def build_figure(spec: PlotSpec):
    """Figure plus the exact per-cell stats behind every plotted point.

    One colored curve per k (legend labels the k values), and the fraction
    of connected graphs per density as a dashed black overlay.
    """
    rows = load_rows(spec.csv_path)
    cells = aggregate(rows, spec.mode)

    by_k: dict = {}
    for cell in cells:
        by_k.setdefault(cell.k, []).append(cell)

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for k in sorted(by_k):
        points = sorted(by_k[k], key=lambda cell: cell.density)
        ax.plot(
            [cell.density for cell in points],
            [cell.success_rate for cell in points],
            marker="o",
            label=f"k = {k}",
        )

    connectivity: dict = {}
    for row in rows:
        trials, connected = connectivity.get(row.density, (0, 0))
        connectivity[row.density] = (trials + 1, connected + row.connected)
    densities = sorted(connectivity)
    ax.plot(
        densities,
        [connectivity[d][1] / connectivity[d][0] for d in densities],
        color="black",
        linestyle="--",
        marker=".",
        label="connected",
    )

    ax.set_xlabel("edge density")
    ax.set_ylabel(f"{spec.mode} success rate")
    ax.set_ylim(-0.03, 1.03)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    return fig, cells


def render(spec: PlotSpec) -> RenderResult:
    """Write the chart; nothing is created when the CSV fails validation."""
    fig, cells = build_figure(spec)
    try:
        fig.savefig(spec.out_path, dpi=150)
    finally:
        plt.close(fig)
    return RenderResult(out_path=spec.out_path, cells=cells)
