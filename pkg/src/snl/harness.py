"""Randomized recovery experiments over relaxation rank and edge density.

A sweep fixes the ambient setup (n sensors in dg dimensions) and walks a grid
of relaxation ranks k and Erdos-Renyi edge densities.  Each cell runs
independent trials: draw a Gaussian ground truth, sample a measurement graph,
optionally corrupt the squared distances with Gaussian noise, then minimize
the quartic objective from a random start and score the result.

Everything is reproducible from the spec alone.  Trial streams come from
``SeedSequence([base_seed, cell_index, trial_index])`` feeding a Philox
generator, with draws in a fixed order (ground truth, graph, noise, initial
iterate), so any trial can be replayed in isolation and a rerun of the whole
sweep produces a byte-identical CSV.  To keep that guarantee, the
``runtime_ms`` column records the trial's total trust-region iteration count
(a deterministic effort measure) rather than wall-clock time; wall time on a
given machine is roughly half a millisecond per recorded unit at n = 10.

Solves run with ``grad_tol=0`` so they stall at the floating-point floor
instead of stopping at the default gradient threshold; recovery is judged
against a tolerance of 1e-10 * sqrt(n * dg) after optimal rigid alignment,
which a shallow solve would miss.  A 60 second wall-clock cap per solve keeps
pathological trials from hanging a sweep; a capped trial is recorded as a
failure, and such trials are the one documented exception to determinism.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from typing import IO, Iterable, NamedTuple

import numpy as np

from .errors import InvalidInputError, NumericalFailureError
from .landscape import _pad_columns, recovery_distance
from .objective import MaskedInstance, MeasurementGraph, squared_distance_targets
from .trust_region import SolverOptions, minimize

CSV_HEADER = (
    "experiment_id,n,dg,k,density,trial,seed,connected,final_cost,grad_norm,"
    "recovery_success,cost_success,proxy_cost,runtime_ms"
)

SUCCESS_MODES = ("recovery", "cost")

_TRIAL_TIME_LIMIT_S = 60.0


@dataclasses.dataclass(frozen=True)
class Tolerances:
    """Success thresholds; see the field comments for how each is applied."""

    cost: float = 1e-10           # absolute final-cost bound, noiseless mode
    recovery: float = 1e-10       # aligned distance <= recovery * sqrt(n * dg)
    noisy_factor: float = 1e-10   # final cost <= (1 + factor) * proxy cost

    def __post_init__(self):
        if self.cost < 0 or self.recovery < 0 or self.noisy_factor < 0:
            raise InvalidInputError("tolerances must be nonnegative")

    @staticmethod
    def from_mapping(data: dict) -> "Tolerances":
        allowed = {"cost", "recovery", "noisy_factor"}
        unknown = set(data) - allowed
        if unknown:
            raise InvalidInputError(f"unknown tolerance keys: {sorted(unknown)}")
        return Tolerances(**{key: _as_float(value, key) for key, value in data.items()})


def _as_int(value, name: str) -> int:
    # bool is an int subclass; reject it so JSON true/false cannot leak in.
    if isinstance(value, bool) or not isinstance(value, int):
        raise InvalidInputError(f"{name} must be an integer, got {value!r}")
    return value


def _as_float(value, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidInputError(f"{name} must be a number, got {value!r}")
    return float(value)


@dataclasses.dataclass(frozen=True)
class SweepSpec:
    """Complete description of one experiment grid.

    Cells are ordered k-major: cell_index = i_k * len(densities) + i_d.  The
    spec is the unit of reproducibility, so every field participates in the
    canonical JSON form that derives experiment_id.
    """

    n: int
    dg: int
    k_values: tuple
    densities: tuple
    trials_per_cell: int
    base_seed: int
    noise_variance: float = 0.0
    success_mode: str = "recovery"
    tolerances: Tolerances = Tolerances()

    def __post_init__(self):
        object.__setattr__(self, "k_values", tuple(self.k_values))
        object.__setattr__(self, "densities", tuple(float(d) for d in self.densities))
        if self.n < 2:
            raise InvalidInputError(f"need at least two sensors, got n={self.n}")
        if not 1 <= self.dg:
            raise InvalidInputError(f"ground-truth dimension must be positive, got {self.dg}")
        if self.dg >= self.n:
            raise InvalidInputError(f"need dg < n, got dg={self.dg}, n={self.n}")
        if not self.k_values:
            raise InvalidInputError("k_values must be nonempty")
        for k in self.k_values:
            if not isinstance(k, int) or isinstance(k, bool) or k < 1:
                raise InvalidInputError(f"relaxation ranks must be positive integers, got {k!r}")
        if not self.densities:
            raise InvalidInputError("densities must be nonempty")
        for d in self.densities:
            if not 0.0 <= d <= 1.0:
                raise InvalidInputError(f"densities must lie in [0, 1], got {d}")
        if self.trials_per_cell < 1:
            raise InvalidInputError("trials_per_cell must be at least 1")
        if not 0 <= self.base_seed < 2**64:
            raise InvalidInputError("base_seed must fit in 64 unsigned bits")
        if self.noise_variance < 0:
            raise InvalidInputError("noise_variance must be nonnegative")
        if self.success_mode not in SUCCESS_MODES:
            raise InvalidInputError(
                f"success_mode must be one of {SUCCESS_MODES}, got {self.success_mode!r}"
            )
        if self.noise_variance > 0 and min(self.k_values) < self.dg:
            # the proxy solve starts from the zero-padded ground truth,
            # which only embeds when k >= dg
            raise InvalidInputError("noisy sweeps require every k >= dg")

    @staticmethod
    def from_mapping(data: dict) -> "SweepSpec":
        if not isinstance(data, dict):
            raise InvalidInputError("sweep spec must be a JSON object")
        required = {"n", "dg", "k_values", "densities", "trials_per_cell", "base_seed"}
        optional = {"noise_variance", "success_mode", "tolerances"}
        unknown = set(data) - required - optional
        if unknown:
            raise InvalidInputError(f"unknown sweep spec keys: {sorted(unknown)}")
        missing = required - set(data)
        if missing:
            raise InvalidInputError(f"missing sweep spec keys: {sorted(missing)}")
        if not isinstance(data["k_values"], (list, tuple)):
            raise InvalidInputError("k_values must be a list")
        if not isinstance(data["densities"], (list, tuple)):
            raise InvalidInputError("densities must be a list")
        tolerances = data.get("tolerances", {})
        if not isinstance(tolerances, dict):
            raise InvalidInputError("tolerances must be a JSON object")
        return SweepSpec(
            n=_as_int(data["n"], "n"),
            dg=_as_int(data["dg"], "dg"),
            k_values=tuple(_as_int(k, "k_values entry") for k in data["k_values"]),
            densities=tuple(_as_float(d, "densities entry") for d in data["densities"]),
            trials_per_cell=_as_int(data["trials_per_cell"], "trials_per_cell"),
            base_seed=_as_int(data["base_seed"], "base_seed"),
            noise_variance=_as_float(data.get("noise_variance", 0.0), "noise_variance"),
            success_mode=data.get("success_mode", "recovery"),
            tolerances=Tolerances.from_mapping(tolerances),
        )

    @staticmethod
    def from_json(text: str) -> "SweepSpec":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"sweep spec is not valid JSON: {exc}") from exc
        return SweepSpec.from_mapping(data)

    @staticmethod
    def from_file(path) -> "SweepSpec":
        with open(path, "r", encoding="utf-8") as handle:
            return SweepSpec.from_json(handle.read())

    def canonical_json(self) -> str:
        payload = {
            "n": self.n,
            "dg": self.dg,
            "k_values": list(self.k_values),
            "densities": list(self.densities),
            "trials_per_cell": self.trials_per_cell,
            "base_seed": self.base_seed,
            "noise_variance": float(self.noise_variance),
            "success_mode": self.success_mode,
            "tolerances": {
                "cost": self.tolerances.cost,
                "recovery": self.tolerances.recovery,
                "noisy_factor": self.tolerances.noisy_factor,
            },
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))

    @property
    def experiment_id(self) -> str:
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()[:12]

    def cells(self) -> list:
        return [(k, d) for k in self.k_values for d in self.densities]

    @property
    def num_trials(self) -> int:
        return len(self.k_values) * len(self.densities) * self.trials_per_cell


@dataclasses.dataclass(frozen=True)
class TrialRecord:
    """One row of sweep output; field order matches the CSV schema."""

    experiment_id: str
    n: int
    dg: int
    k: int
    density: float
    trial_index: int
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
        raise InvalidInputError(f"success_mode must be one of {SUCCESS_MODES}, got {mode!r}")

    def csv_row(self) -> str:
        return ",".join(
            (
                self.experiment_id,
                str(self.n),
                str(self.dg),
                str(self.k),
                _fmt_float(self.density),
                str(self.trial_index),
                str(self.seed),
                _fmt_bool(self.connected),
                _fmt_float(self.final_cost),
                _fmt_float(self.grad_norm),
                _fmt_bool(self.recovery_success),
                _fmt_bool(self.cost_success),
                _fmt_float(self.proxy_cost),
                _fmt_float(self.runtime_ms),
            )
        )


def _fmt_float(x: float) -> str:
    # 17 significant digits round-trips any double exactly
    return f"{float(x):.17g}"


def _fmt_bool(flag: bool) -> str:
    return "1" if flag else "0"


def trial_generator(base_seed: int, cell_index: int, trial_index: int):
    """Philox stream plus a stable 64-bit identifier for one trial.

    The identifier is the first word of the seed sequence's state and goes to
    the CSV so a row can be traced back to its stream without rehashing.
    """
    sequence = np.random.SeedSequence([base_seed, cell_index, trial_index])
    seed_word = int(sequence.generate_state(1, np.uint64)[0])
    return np.random.Generator(np.random.Philox(sequence)), seed_word


def sample_ground_truth(n: int, dg: int, seed) -> np.ndarray:
    """Standard Gaussian configuration, n rows in dg dimensions.

    seed may be anything numpy's default_rng accepts, including an existing
    Generator, in which case draws come from that stream.
    """
    if n < 1 or dg < 1:
        raise InvalidInputError(f"need positive sizes, got n={n}, dg={dg}")
    rng = np.random.default_rng(seed)
    return rng.standard_normal((n, dg))


def _connected_bfs(n: int, edge_i: np.ndarray, edge_j: np.ndarray) -> bool:
    neighbors = [[] for _ in range(n)]
    for a, b in zip(edge_i.tolist(), edge_j.tolist()):
        neighbors[a].append(b)
        neighbors[b].append(a)
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    frontier = [0]
    count = 1
    while frontier:
        nxt = []
        for v in frontier:
            for w in neighbors[v]:
                if not seen[w]:
                    seen[w] = True
                    count += 1
                    nxt.append(w)
        frontier = nxt
    return count == n


def _connected_union_find(n: int, edge_i: np.ndarray, edge_j: np.ndarray) -> bool:
    parent = list(range(n))

    def find(v: int) -> int:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    components = n
    for a, b in zip(edge_i.tolist(), edge_j.tolist()):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
            components -= 1
    return components == 1


def sample_er_graph(n: int, p: float, seed):
    """Erdos-Renyi measurement graph: each pair kept with probability p.

    Returns (graph, connected).  Pairs are visited in lexicographic order with
    one uniform draw each, so the stream cost is exactly n(n-1)/2 draws.
    Connectivity is computed twice (breadth-first search and union-find) and
    the two must agree.
    """
    if n < 1:
        raise InvalidInputError(f"need at least one vertex, got n={n}")
    if not 0.0 <= p <= 1.0:
        raise InvalidInputError(f"edge probability must lie in [0, 1], got {p}")
    rng = np.random.default_rng(seed)
    row, col = np.triu_indices(n, k=1)
    keep = rng.random(row.size) < p
    edge_i = row[keep].astype(np.int64)
    edge_j = col[keep].astype(np.int64)
    graph = MeasurementGraph(n, edge_i, edge_j)
    connected = _connected_bfs(n, edge_i, edge_j)
    if connected != _connected_union_find(n, edge_i, edge_j):
        raise NumericalFailureError("connectivity checks disagree; graph state is corrupt")
    return graph, connected


def _deep_options() -> SolverOptions:
    return SolverOptions(grad_tol=0.0, time_limit_s=_TRIAL_TIME_LIMIT_S)


def run_trial(spec: SweepSpec, cell_index: int, trial_index: int) -> TrialRecord:
    """Execute one trial of the sweep grid and score it.

    Solver failures (including the per-solve wall-clock cap) produce a record
    with NaN cost fields and failed success flags; they never propagate.
    """
    cells = spec.cells()
    if not 0 <= cell_index < len(cells):
        raise InvalidInputError(f"cell_index must lie in [0, {len(cells)}), got {cell_index}")
    if not 0 <= trial_index < spec.trials_per_cell:
        raise InvalidInputError(
            f"trial_index must lie in [0, {spec.trials_per_cell}), got {trial_index}"
        )
    k, density = cells[cell_index]
    n, dg = spec.n, spec.dg
    rng, seed_word = trial_generator(spec.base_seed, cell_index, trial_index)

    # fixed draw order: ground truth, graph, noise, initial iterate
    Y = sample_ground_truth(n, dg, rng)
    graph, connected = sample_er_graph(n, density, rng)
    targets = squared_distance_targets(Y, graph)
    noisy = spec.noise_variance > 0.0
    if noisy and graph.num_edges:
        targets = targets + rng.normal(
            0.0, math.sqrt(spec.noise_variance), graph.num_edges
        )
    Z0 = rng.standard_normal((n, k))

    instance = MaskedInstance(graph.with_targets(targets), k, scale_reference=Y)
    options = _deep_options()
    iterations = 0
    proxy_cost = math.nan
    reference = Y
    proxy_ok = True
    if noisy:
        try:
            proxy = minimize(instance, _pad_columns(Y, k), options)
            iterations += proxy.iterations
            proxy_cost = proxy.cost
            reference = proxy.Z
        except NumericalFailureError:
            proxy_ok = False

    final_cost = math.nan
    grad_norm = math.nan
    recovery_success = False
    cost_success = False
    if proxy_ok:
        try:
            result = minimize(instance, Z0, options)
            iterations += result.iterations
            final_cost = result.cost
            grad_norm = result.grad_norm
            distance = recovery_distance(result.Z, reference)
            recovery_success = bool(distance <= spec.tolerances.recovery * math.sqrt(n * dg))
            if noisy:
                cost_success = bool(
                    final_cost <= (1.0 + spec.tolerances.noisy_factor) * proxy_cost
                )
            else:
                cost_success = bool(final_cost <= spec.tolerances.cost)
        except NumericalFailureError:
            pass

    return TrialRecord(
        experiment_id=spec.experiment_id,
        n=n,
        dg=dg,
        k=k,
        density=density,
        trial_index=trial_index,
        seed=seed_word,
        connected=connected,
        final_cost=final_cost,
        grad_norm=grad_norm,
        recovery_success=recovery_success,
        cost_success=cost_success,
        proxy_cost=proxy_cost,
        runtime_ms=float(iterations),
    )


class CellSummary(NamedTuple):
    """Aggregate for one (k, density) cell of a finished sweep."""

    k: int
    density: float
    trials: int
    success_rate: float
    connectivity_rate: float


class SweepResult(NamedTuple):
    records: list
    summary: list


def _thread_count() -> int:
    raw = os.environ.get("SNL_THREADS", "1")
    try:
        count = int(raw)
    except ValueError:
        raise InvalidInputError(f"SNL_THREADS must be a positive integer, got {raw!r}") from None
    if count < 1:
        raise InvalidInputError(f"SNL_THREADS must be a positive integer, got {raw!r}")
    return count


def summarize(spec: SweepSpec, records: Iterable[TrialRecord]) -> list:
    """Per-cell success and connectivity rates in cell order."""
    buckets = {cell: [] for cell in spec.cells()}
    for record in records:
        key = (record.k, record.density)
        if key not in buckets:
            raise InvalidInputError(f"record cell {key} is not part of the spec grid")
        buckets[key].append(record)
    summary = []
    for (k, density), rows in buckets.items():
        trials = len(rows)
        hits = sum(row.success(spec.success_mode) for row in rows)
        linked = sum(row.connected for row in rows)
        summary.append(
            CellSummary(
                k=k,
                density=density,
                trials=trials,
                success_rate=hits / trials if trials else math.nan,
                connectivity_rate=linked / trials if trials else math.nan,
            )
        )
    return summary


def write_csv(records: Iterable[TrialRecord], out) -> None:
    """Write the pinned CSV schema to a path or an open text handle."""
    if hasattr(out, "write"):
        _write_csv_handle(records, out)
        return
    with open(out, "w", encoding="utf-8", newline="") as handle:
        _write_csv_handle(records, handle)


def _write_csv_handle(records: Iterable[TrialRecord], handle: IO[str]) -> None:
    handle.write(CSV_HEADER + "\n")
    for record in records:
        handle.write(record.csv_row() + "\n")


def sweep(spec: SweepSpec, out=None) -> SweepResult:
    """Run the whole grid and return (records, summary).

    When out is given (path or text handle) the CSV is written there; a path
    is opened before any trial runs so an unwritable destination fails fast.
    Records are ordered by (cell_index, trial_index) regardless of how many
    worker threads SNL_THREADS allows.
    """
    handle = None
    opened = False
    if out is not None:
        if hasattr(out, "write"):
            handle = out
        else:
            handle = open(out, "w", encoding="utf-8", newline="")
            opened = True
    try:
        tasks = [
            (cell_index, trial_index)
            for cell_index in range(len(spec.cells()))
            for trial_index in range(spec.trials_per_cell)
        ]
        threads = _thread_count()
        if threads == 1:
            records = [run_trial(spec, c, t) for c, t in tasks]
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                records = list(pool.map(lambda ct: run_trial(spec, *ct), tasks))
        if handle is not None:
            _write_csv_handle(records, handle)
        return SweepResult(records, summarize(spec, records))
    finally:
        if opened:
            handle.close()


def run_noisy_protocol(spec: SweepSpec) -> SweepResult:
    """Noise-corrupted sweep; requires a strictly positive noise variance.

    Each trial solves the same corrupted instance twice: once from the padded
    ground truth to establish the proxy cost (the best the landscape offers
    near the truth) and once from the random start being scored.  A zero
    variance is rejected here because the plain sweep already covers it; the
    two pipelines coincide exactly in that limit.
    """
    if spec.noise_variance <= 0:
        raise InvalidInputError("run_noisy_protocol needs noise_variance > 0; use sweep instead")
    return sweep(spec)
