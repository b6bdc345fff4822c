"""Strict reader for the sweep CSV schema.

The harness pins a 14-column header and renders floats with 17 significant
digits, booleans as 0/1.  This module re-declares that contract on the
consumer side and refuses anything that deviates, naming the offending
column, so a silent format drift between the two packages cannot produce a
quietly wrong chart.
"""

from __future__ import annotations

import csv
import dataclasses
from typing import Iterable

CSV_COLUMNS = (
    "experiment_id",
    "n",
    "dg",
    "k",
    "density",
    "trial",
    "seed",
    "connected",
    "final_cost",
    "grad_norm",
    "recovery_success",
    "cost_success",
    "proxy_cost",
    "runtime_ms",
)

MODES = ("recovery", "cost")


class SchemaError(ValueError):
    """CSV does not match the sweep schema; .column names the offender."""

    def __init__(self, message: str, column: str | None = None):
        super().__init__(message)
        self.column = column


@dataclasses.dataclass(frozen=True)
class TrialRow:
    experiment_id: str
    n: int
    dg: int
    k: int
    density: float
    trial: int
    seed: int
    connected: bool
    final_cost: float
    grad_norm: float
    recovery_success: bool
    cost_success: bool
    proxy_cost: float
    runtime_ms: float

    def success(self, mode: str) -> bool:
        if mode == "recovery":
            return self.recovery_success
        if mode == "cost":
            return self.cost_success
        raise SchemaError(f"mode must be one of {MODES}, got {mode!r}")


def _check_header(header: list) -> None:
    for position, (got, want) in enumerate(zip(header, CSV_COLUMNS)):
        if got != want:
            raise SchemaError(
                f"header column {position} is {got!r}, expected {want!r}",
                column=want,
            )
    if len(header) < len(CSV_COLUMNS):
        missing = CSV_COLUMNS[len(header)]
        raise SchemaError(f"header is missing column {missing!r}", column=missing)
    if len(header) > len(CSV_COLUMNS):
        extra = header[len(CSV_COLUMNS)]
        raise SchemaError(f"header has unexpected column {extra!r}", column=extra)


def _parse_int(text: str, column: str, line: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise SchemaError(
            f"line {line}: column {column!r} must be an integer, got {text!r}",
            column=column,
        ) from None


def _parse_float(text: str, column: str, line: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise SchemaError(
            f"line {line}: column {column!r} must be a number, got {text!r}",
            column=column,
        ) from None


def _parse_bool(text: str, column: str, line: int) -> bool:
    if text == "1":
        return True
    if text == "0":
        return False
    raise SchemaError(
        f"line {line}: column {column!r} must be 0 or 1, got {text!r}",
        column=column,
    )


def _parse_row(fields: list, line: int) -> TrialRow:
    if len(fields) != len(CSV_COLUMNS):
        raise SchemaError(
            f"line {line}: expected {len(CSV_COLUMNS)} fields, got {len(fields)}"
        )
    return TrialRow(
        experiment_id=fields[0],
        n=_parse_int(fields[1], "n", line),
        dg=_parse_int(fields[2], "dg", line),
        k=_parse_int(fields[3], "k", line),
        density=_parse_float(fields[4], "density", line),
        trial=_parse_int(fields[5], "trial", line),
        seed=_parse_int(fields[6], "seed", line),
        connected=_parse_bool(fields[7], "connected", line),
        final_cost=_parse_float(fields[8], "final_cost", line),
        grad_norm=_parse_float(fields[9], "grad_norm", line),
        recovery_success=_parse_bool(fields[10], "recovery_success", line),
        cost_success=_parse_bool(fields[11], "cost_success", line),
        proxy_cost=_parse_float(fields[12], "proxy_cost", line),
        runtime_ms=_parse_float(fields[13], "runtime_ms", line),
    )


def load_rows(path) -> list:
    """Parse a sweep CSV; raises SchemaError on any deviation from the schema."""
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError("file is empty: missing header") from None
        _check_header(header)
        rows = [_parse_row(fields, line) for line, fields in enumerate(reader, start=2)]
    if not rows:
        raise SchemaError("CSV has a header but no data rows")
    return rows


@dataclasses.dataclass(frozen=True)
class CellStats:
    """Exact integer tallies for one (k, density) cell."""

    k: int
    density: float
    trials: int
    successes: int
    connected: int

    @property
    def success_rate(self) -> float:
        return self.successes / self.trials

    @property
    def connectivity_rate(self) -> float:
        return self.connected / self.trials


def aggregate(rows: Iterable[TrialRow], mode: str) -> list:
    """Per-cell tallies, ordered by (k, density).

    Counts stay integers until the final division, so the rate is a single
    exactly reproducible float; every trial counts, including solver
    failures (their success flags are already 0 in the CSV).
    """
    if mode not in MODES:
        raise SchemaError(f"mode must be one of {MODES}, got {mode!r}")
    tallies: dict = {}
    for row in rows:
        key = (row.k, row.density)
        trials, successes, connected = tallies.get(key, (0, 0, 0))
        tallies[key] = (
            trials + 1,
            successes + row.success(mode),
            connected + row.connected,
        )
    return [
        CellStats(k, density, trials, successes, connected)
        for (k, density), (trials, successes, connected) in sorted(tallies.items())
    ]
