"""Charts for sensor-network localization sweep CSVs."""

from .render import PlotSpec, RenderResult, build_figure, render
from .schema import (
    CSV_COLUMNS,
    CellStats,
    SchemaError,
    TrialRow,
    aggregate,
    load_rows,
)

__all__ = [
    "PlotSpec",
    "RenderResult",
    "build_figure",
    "render",
    "CSV_COLUMNS",
    "CellStats",
    "SchemaError",
    "TrialRow",
    "aggregate",
    "load_rows",
]
