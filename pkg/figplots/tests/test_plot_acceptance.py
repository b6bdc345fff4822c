"""Acceptance gate for the plotting component.

One criterion: rendering a rank/density sweep CSV must plot per-cell means
that match an independent aggregation exactly, and schema violations must be
rejected naming the offending column.  The CSV comes from the producing CLI
(run as a subprocess) so the whole external contract is exercised.
"""

import json
import shutil
import subprocess
import sys
from fractions import Fraction

import matplotlib.pyplot as plt

from figplots import PlotSpec, SchemaError, build_figure

HEADER_COLUMNS = (
    "experiment_id,n,dg,k,density,trial,seed,connected,final_cost,grad_norm,"
    "recovery_success,cost_success,proxy_cost,runtime_ms"
).split(",")


def conclude(name: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] secondary {name}: {detail}"
    print(line, flush=True)
    assert ok, line


def independent_means(csv_text: str, flag_column: str):
    """Recount success rates from raw text with none of the package code."""
    lines = csv_text.strip().splitlines()
    columns = lines[0].split(",")
    k_at = columns.index("k")
    density_at = columns.index("density")
    flag_at = columns.index(flag_column)
    tally = {}
    for line in lines[1:]:
        fields = line.split(",")
        key = (int(fields[k_at]), float(fields[density_at]))
        trials, hits = tally.get(key, (0, 0))
        tally[key] = (trials + 1, hits + int(fields[flag_at]))
    return {key: Fraction(hits, trials) for key, (trials, hits) in tally.items()}


def test_secondary_criterion_chart_matches_independent_aggregation(tmp_path):
    exe = shutil.which("snl")
    producer = [exe] if exe else [sys.executable, "-m", "snl.cli"]
    config = tmp_path / "config.json"
    config.write_text(
        json.dumps(
            dict(
                n=10,
                dg=2,
                k_values=[2, 3],
                densities=[0.3, 0.6, 1.0],
                trials_per_cell=5,
                base_seed=1400,
            )
        )
    )
    csv_path = tmp_path / "records.csv"
    run = subprocess.run(
        [*producer, "sweep", "--config", str(config), "--out", str(csv_path)],
        capture_output=True,
        text=True,
        timeout=600,
    )
    assert run.returncode == 0, run.stderr

    spec = PlotSpec(csv_path=str(csv_path), out_path=str(tmp_path / "chart.png"))
    fig, cells = build_figure(spec)
    try:
        expected = independent_means(csv_path.read_text(), "recovery_success")
        mismatches = []
        plotted_points = 0
        for line, k in zip(fig.axes[0].lines[:-1], (2, 3)):
            for density, rate in zip(line.get_xdata(), line.get_ydata()):
                plotted_points += 1
                truth = expected[(k, float(density))]
                if Fraction(rate).limit_denominator(10**9) != truth and rate != float(truth):
                    mismatches.append((k, density, rate, truth))
    finally:
        plt.close(fig)

    schema_ok = False
    offender = None
    bad = tmp_path / "bad.csv"
    text = csv_path.read_text().replace("grad_norm", "grad_nrm")
    bad.write_text(text)
    try:
        build_figure(PlotSpec(csv_path=str(bad), out_path="x.png"))
    except SchemaError as exc:
        schema_ok = exc.column == "grad_norm"
        offender = exc.column

    ok = not mismatches and plotted_points == 6 and schema_ok
    conclude(
        "chart-aggregation",
        ok,
        f"{plotted_points} plotted means vs exact recount"
        + (f", mismatches {mismatches}" if mismatches else ", all equal")
        + f"; schema violation named column {offender!r}",
    )
