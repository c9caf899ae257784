"""
Benchmark harness: run identical start/goal scenarios across planners and
report path cost, computation time and accounted memory.

Scenarios come from JSON documents (schema in ``scenarios/README.md``).
Per-run ``MetricsRecord`` rows are aggregated into ``RunStats`` and rendered
as a metric-major comparison table, CSV or JSON.
"""

import csv
import dataclasses
import json
import logging
import math
import time
import tracemalloc
from collections.abc import Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import StrEnum
from pathlib import Path
from typing import Any

import numpy as np

from src.config import build_params
from src.exceptions import ContractError, ParameterError, PlanningError, ScenarioError
from src.grid_model import (
    CellCoord,
    Cost3DParams,
    ElevationField,
    Path as GridPath,
    Scene3D,
    WeightedGrid,
    from_raster_weights,
)
from src.planners2d import (
    NiacoParams,
    PlanOutcome,
    RrtParams,
    check_endpoints,
    plan_astar_2d,
    plan_dijkstra_2d,
    plan_niaco_2d,
    plan_rrtstar_2d,
)
from src.planners3d import (
    plan_astar_3d,
    plan_dijkstra_3d,
    plan_niaco_3d,
    plan_rrtconnect_2d,
    plan_rrtconnect_3d,
    plan_rrtstar_3d,
)
from src.raster_io import load_grayscale_raster

logger = logging.getLogger(__name__)

BYTES_PER_MB = 1024 * 1024

DISPLAY_NAMES: dict[str, str] = {
    "dijkstra": "Dijkstra",
    "astar": "A*",
    "rrtstar": "RRT*",
    "rrtconnect2d": "RRT-Connect (2D)",
    "niaco": "NIACO",
    "dijkstra3d": "3D Dijkstra",
    "astar3d": "3D A*",
    "rrtstar3d": "3D RRT*",
    "rrtconnect": "RRT-Connect",
    "niaco3d": "3D NIACO",
}
PLANNERS_3D = frozenset({"dijkstra3d", "astar3d", "rrtstar3d", "rrtconnect", "niaco3d"})
PLANNER_IDS = tuple(DISPLAY_NAMES)


class ReportFormat(StrEnum):
    CSV = "csv"
    JSON = "json"
    TEXT = "text"


class Metric(StrEnum):
    PATH_COST = "path_cost"
    WALL_TIME = "wall_time"
    MEMORY = "accounted_memory"
    ALLOCATOR_PEAK = "allocator_peak"


TABLE_LABELS: dict[Metric, str] = {
    Metric.PATH_COST: "Path Cost",
    Metric.WALL_TIME: "Computation Time (s)",
    Metric.MEMORY: "Memory Usage (MB)",
    Metric.ALLOCATOR_PEAK: "Allocator Peak (MB)",
}


# --------------------------------------------------------------------------- planners


def run_planner(
    planner_id: str,
    grid: WeightedGrid,
    start: Sequence[int],
    goal: Sequence[int],
    params: Mapping[str, Any] | None = None,
    seed: int = 0,
    elev: ElevationField | None = None,
    cost3d: Cost3DParams | None = None,
) -> PlanOutcome:
    """
    Dispatch one planning call by planner id.

    ``params`` holds the planner's own parameters. Elevation-aware planners
    also accept ``cost`` (overrides of ``Cost3DParams`` fields) and
    ``memoize_gradient``; A* variants accept ``heuristic_scale``. ``seed``
    replaces any seed in ``params``.

    Raises:
        ParameterError: Unknown planner or parameter, or a 3D planner without elevation
        PlanningInputError: If start or goal is unusable
    """
    if planner_id not in DISPLAY_NAMES:
        raise ParameterError(
            f"Unknown planner '{planner_id}'; expected one of {', '.join(PLANNER_IDS)}"
        )
    options = dict(params or {})
    cost_overrides = options.pop("cost", None)
    memoize = bool(options.pop("memoize_gradient", True))

    scene: Scene3D | None = None
    if planner_id in PLANNERS_3D:
        if elev is None:
            raise ParameterError(f"Planner '{planner_id}' requires an elevation map")
        base = cost3d or Cost3DParams()
        if cost_overrides:
            base = build_params(Cost3DParams, {**dataclasses.asdict(base), **cost_overrides})
        scene = Scene3D(grid, elev, base)
    elif cost_overrides is not None or "memoize_gradient" in (params or {}):
        raise ParameterError(f"Planner '{planner_id}' takes no elevation cost options")

    if planner_id in ("dijkstra", "dijkstra3d"):
        if options:
            raise ParameterError(f"Unknown {planner_id} parameters: {', '.join(sorted(options))}")
        if scene is None:
            return plan_dijkstra_2d(grid, start, goal)
        return plan_dijkstra_3d(scene, start, goal, memoize_gradient=memoize)

    if planner_id in ("astar", "astar3d"):
        scale = options.pop("heuristic_scale", "auto")
        if options:
            raise ParameterError(f"Unknown {planner_id} parameters: {', '.join(sorted(options))}")
        if scene is None:
            return plan_astar_2d(grid, start, goal, scale)
        return plan_astar_3d(scene, start, goal, scale, memoize_gradient=memoize)

    if planner_id in ("niaco", "niaco3d"):
        niaco = dataclasses.replace(NiacoParams.from_mapping(options), seed=seed)
        if scene is None:
            return plan_niaco_2d(grid, start, goal, niaco)
        return plan_niaco_3d(scene, start, goal, niaco, memoize_gradient=memoize)

    rrt = dataclasses.replace(RrtParams.from_mapping(options), seed=seed)
    if scene is None:
        if planner_id == "rrtstar":
            return plan_rrtstar_2d(grid, start, goal, rrt)
        return plan_rrtconnect_2d(grid, start, goal, rrt)
    if planner_id == "rrtstar3d":
        return plan_rrtstar_3d(scene, start, goal, rrt, memoize_gradient=memoize)
    return plan_rrtconnect_3d(scene, start, goal, rrt, memoize_gradient=memoize)


# --------------------------------------------------------------------------- scenarios


@dataclass(frozen=True)
class PlannerSpec:
    id: str
    params: Mapping[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class Scenario:
    """One benchmark case: maps, endpoints, planners and repeat schedule."""

    name: str
    weight_map: Path
    start: CellCoord
    goal: CellCoord
    planners: tuple[PlannerSpec, ...]
    elevation_map: Path | None = None
    repeats: int = 5
    base_seed: int = 0
    impassable_value: int = 0
    weight_scale: float = 1.0
    meters_per_level: float = 1.0
    horizontal_resolution: float = 1.0
    median_filter: bool = False
    cost3d: Cost3DParams = field(default_factory=Cost3DParams)
    track_allocations: bool = False

    def __post_init__(self) -> None:
        problems = []
        if self.repeats < 1:
            problems.append(f"repeats must be >= 1, got {self.repeats}")
        if not self.planners:
            problems.append("planners must list at least one planner")
        if self.elevation_map is None:
            problems.extend(
                f"planner '{p.id}' requires elevation_map"
                for p in self.planners
                if p.id in PLANNERS_3D
            )
        if problems:
            raise ScenarioError(self.name, problems)


_SCENARIO_KEYS = {f.name for f in dataclasses.fields(Scenario)}
_REQUIRED_KEYS = ("name", "weight_map", "start", "goal", "planners")


def _cell(value: Any) -> CellCoord | None:
    if (
        isinstance(value, list | tuple)
        and len(value) == 2
        and all(isinstance(v, int) and not isinstance(v, bool) for v in value)
    ):
        return CellCoord(value[0], value[1])
    return None


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_number(value: Any) -> bool:
    return isinstance(value, int | float) and not isinstance(value, bool)


def parse_scenario(raw: Any, base_dir: Path, label: str = "scenario") -> Scenario:
    """
    Validate one scenario object, collecting every problem before failing.

    Relative map paths are resolved against ``base_dir``.

    Raises:
        ScenarioError: Listing every invalid or missing field
    """
    if not isinstance(raw, Mapping):
        raise ScenarioError(label, ["scenario must be a JSON object"])
    name = raw.get("name") if isinstance(raw.get("name"), str) else label
    problems: list[str] = []

    problems.extend(f"missing field '{key}'" for key in _REQUIRED_KEYS if key not in raw)
    problems.extend(f"unknown field '{key}'" for key in sorted(set(raw) - _SCENARIO_KEYS))
    if "name" in raw and not isinstance(raw["name"], str):
        problems.append("name must be a string")

    maps: dict[str, Path | None] = {"weight_map": None, "elevation_map": None}
    for key in maps:
        if key in raw and raw[key] is not None:
            if isinstance(raw[key], str):
                maps[key] = base_dir / raw[key]
            else:
                problems.append(f"{key} must be a file path string")

    cells: dict[str, CellCoord | None] = {}
    for key in ("start", "goal"):
        cells[key] = _cell(raw.get(key))
        if key in raw and cells[key] is None:
            problems.append(f"{key} must be [x, y] integers, got {raw[key]!r}")

    planners: list[PlannerSpec] = []
    if "planners" in raw:
        entries = raw["planners"]
        if not isinstance(entries, list) or not entries:
            problems.append("planners must be a non-empty list")
        else:
            for i, entry in enumerate(entries):
                if isinstance(entry, str):
                    entry = {"id": entry}
                if not isinstance(entry, Mapping) or entry.get("id") not in DISPLAY_NAMES:
                    problems.append(
                        f"planners[{i}] must name one of {', '.join(PLANNER_IDS)}, got {entry!r}"
                    )
                    continue
                params = entry.get("params", {})
                if not isinstance(params, Mapping):
                    problems.append(f"planners[{i}].params must be an object")
                    continue
                planners.append(PlannerSpec(entry["id"], dict(params)))

    options: dict[str, Any] = {}
    for key, check, what in (
        ("repeats", _is_int, "an integer"),
        ("base_seed", _is_int, "an integer"),
        ("impassable_value", _is_int, "an integer"),
        ("weight_scale", _is_number, "a number"),
        ("meters_per_level", _is_number, "a number"),
        ("horizontal_resolution", _is_number, "a number"),
        ("median_filter", lambda v: isinstance(v, bool), "a boolean"),
        ("track_allocations", lambda v: isinstance(v, bool), "a boolean"),
    ):
        if key in raw:
            if check(raw[key]):
                options[key] = raw[key]
            else:
                problems.append(f"{key} must be {what}, got {raw[key]!r}")
    if options.get("base_seed", 0) < 0:
        problems.append(f"base_seed must be >= 0, got {options['base_seed']}")
    for key in ("weight_scale", "horizontal_resolution"):
        if key in options and not options[key] > 0:
            problems.append(f"{key} must be > 0, got {options[key]}")

    if "cost3d" in raw:
        try:
            options["cost3d"] = build_params(Cost3DParams, raw["cost3d"])
        except (TypeError, ValueError) as e:
            problems.append(f"cost3d: {e}")

    if problems:
        raise ScenarioError(name, problems)
    return Scenario(
        name=name,
        weight_map=maps["weight_map"],  # type: ignore[arg-type]
        elevation_map=maps["elevation_map"],
        start=cells["start"],  # type: ignore[arg-type]
        goal=cells["goal"],  # type: ignore[arg-type]
        planners=tuple(planners),
        **options,
    )


def load_scenarios(path: str | Path) -> list[Scenario]:
    """
    Read a scenario document: one scenario object, a list of them, or
    ``{"scenarios": [...]}``.

    Raises:
        OSError: If the file cannot be read
        ScenarioError: If the JSON is malformed or any scenario is invalid
    """
    path = Path(path)
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ScenarioError(path.name, [f"invalid JSON: {e}"]) from e

    if isinstance(document, Mapping) and "scenarios" in document:
        document = document["scenarios"]
    entries = document if isinstance(document, list) else [document]
    if not entries:
        raise ScenarioError(path.name, ["no scenarios defined"])

    scenarios = []
    problems: list[str] = []
    first_bad: str | None = None
    for i, entry in enumerate(entries):
        try:
            scenarios.append(parse_scenario(entry, path.parent, label=f"scenarios[{i}]"))
        except ScenarioError as e:
            first_bad = first_bad or e.scenario
            problems.extend(f"{e.scenario}: {p}" for p in e.problems)
    if problems:
        raise ScenarioError(first_bad or path.name, problems)
    return scenarios


@dataclass(frozen=True)
class LoadedScene:
    grid: WeightedGrid
    elev: ElevationField | None


def load_scene(s: Scenario) -> LoadedScene:
    """
    Load the scenario's maps and check its endpoints.

    Raises:
        ScenarioError: If a map cannot be loaded or an endpoint is unusable
    """
    try:
        grid = from_raster_weights(
            load_grayscale_raster(s.weight_map), s.impassable_value, s.weight_scale
        )
        elev = None
        if s.elevation_map is not None:
            elev = ElevationField.from_raster(
                load_grayscale_raster(s.elevation_map),
                meters_per_level=s.meters_per_level,
                horizontal_resolution=s.horizontal_resolution,
                median_filter=s.median_filter,
            )
            if (elev.width, elev.height) != (grid.width, grid.height):
                raise ContractError(
                    f"elevation map is {elev.width}x{elev.height}, "
                    f"weight map is {grid.width}x{grid.height}"
                )
        check_endpoints(grid, s.start, s.goal)
    except PlanningError as e:
        raise ScenarioError(s.name, [str(e)]) from e
    return LoadedScene(grid, elev)


# --------------------------------------------------------------------------- measurement


@dataclass(frozen=True)
class MetricsRecord:
    scenario: str
    planner: str
    run: int
    seed: int
    path_cost: float
    wall_time: float
    accounted_memory: int
    expanded: int
    allocator_peak: int | None = None
    path: GridPath | None = field(default=None, compare=False, repr=False)

    @property
    def reachable(self) -> bool:
        return math.isfinite(self.path_cost)


def measure_memory(outcome: PlanOutcome) -> int:
    """Peak logical bytes held by the planner's own structures during the run."""
    return outcome.meter.peak


def _execute(
    s: Scenario, scene: LoadedScene, spec: PlannerSpec, run: int, timed: bool
) -> MetricsRecord:
    seed = s.base_seed + run
    allocator_peak = None
    track = timed and s.track_allocations
    if track:
        tracemalloc.start()
        tracemalloc.reset_peak()
    try:
        started = time.perf_counter()
        outcome = run_planner(
            spec.id, scene.grid, s.start, s.goal, spec.params, seed, scene.elev, s.cost3d
        )
        elapsed = time.perf_counter() - started
    finally:
        if track:
            allocator_peak = tracemalloc.get_traced_memory()[1]
            tracemalloc.stop()

    if not outcome.found:
        logger.info(f"[{s.name}] {spec.id} run {run}: no path ({outcome.reason})")
    return MetricsRecord(
        scenario=s.name,
        planner=spec.id,
        run=run,
        seed=seed,
        path_cost=outcome.cost,
        wall_time=elapsed if timed else 0.0,
        accounted_memory=measure_memory(outcome),
        expanded=outcome.expanded,
        allocator_peak=allocator_peak,
        path=outcome.path,
    )


def run_scenario(s: Scenario, workers: int = 1) -> list[MetricsRecord]:
    """
    Run every planner ``repeats`` times with seeds ``base_seed + run``.

    With ``workers > 1`` the runs execute on a thread pool and wall time is
    not captured (reported as 0.0). Records come back in schedule order:
    planners in listed order, runs ascending.

    Raises:
        ScenarioError: If the maps cannot be loaded; raised before any run
    """
    if workers < 1:
        raise ParameterError(f"workers must be >= 1, got {workers}")
    scene = load_scene(s)
    jobs = [(spec, run) for spec in s.planners for run in range(s.repeats)]
    logger.info(
        f"Scenario '{s.name}': {len(s.planners)} planner(s) x {s.repeats} repeat(s) "
        f"on {scene.grid.width}x{scene.grid.height}"
    )

    if workers == 1:
        records = [_execute(s, scene, spec, run, timed=True) for spec, run in jobs]
    else:
        if s.track_allocations:
            logger.warning(f"Scenario '{s.name}': allocator tracking is off for concurrent runs")
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(lambda job: _execute(s, scene, *job, timed=False), jobs))

    failures = sum(not r.reachable for r in records)
    logger.info(f"Scenario '{s.name}' finished: {len(records)} run(s), {failures} without path")
    return records


# --------------------------------------------------------------------------- aggregation


@dataclass(frozen=True)
class MetricStats:
    mean: float
    std: float
    min: float
    max: float

    @classmethod
    def of(cls, values: Sequence[float]) -> "MetricStats":
        arr = np.asarray(values, dtype=np.float64)
        return cls(float(arr.mean()), float(arr.std()), float(arr.min()), float(arr.max()))


@dataclass(frozen=True)
class PlannerStats:
    scenario: str
    planner: str
    runs: int
    failures: int
    metrics: dict[Metric, MetricStats | None]


@dataclass
class RunStats:
    """Aggregates keyed by ``(scenario, planner)`` in first-seen order."""

    entries: dict[tuple[str, str], PlannerStats] = field(default_factory=dict)

    @property
    def scenarios(self) -> list[str]:
        return list(dict.fromkeys(s for s, _ in self.entries))

    @property
    def planners(self) -> list[str]:
        return list(dict.fromkeys(p for _, p in self.entries))

    @property
    def metrics(self) -> list[Metric]:
        shown = [Metric.PATH_COST, Metric.WALL_TIME, Metric.MEMORY]
        if any(e.metrics.get(Metric.ALLOCATOR_PEAK) for e in self.entries.values()):
            shown.append(Metric.ALLOCATOR_PEAK)
        return shown

    def get(self, scenario: str, planner: str) -> PlannerStats | None:
        return self.entries.get((scenario, planner))


def aggregate_runs(records: Sequence[MetricsRecord]) -> RunStats:
    """
    Group records by (scenario, planner) and summarize each metric.

    Unreachable runs are left out of the path-cost statistics and counted as
    failures; time and memory cover every run.

    Raises:
        ContractError: If ``records`` is empty
    """
    if not records:
        raise ContractError("aggregate_runs needs at least one record")
    groups: dict[tuple[str, str], list[MetricsRecord]] = {}
    for r in records:
        groups.setdefault((r.scenario, r.planner), []).append(r)

    stats = RunStats()
    for key, group in groups.items():
        costs = [r.path_cost for r in group if r.reachable]
        peaks = [r.allocator_peak for r in group if r.allocator_peak is not None]
        stats.entries[key] = PlannerStats(
            scenario=key[0],
            planner=key[1],
            runs=len(group),
            failures=len(group) - len(costs),
            metrics={
                Metric.PATH_COST: MetricStats.of(costs) if costs else None,
                Metric.WALL_TIME: MetricStats.of([r.wall_time for r in group]),
                Metric.MEMORY: MetricStats.of([r.accounted_memory for r in group]),
                Metric.ALLOCATOR_PEAK: MetricStats.of(peaks) if peaks else None,
            },
        )
    return stats


# --------------------------------------------------------------------------- reports


def _table_cell(metric: Metric, entry: PlannerStats | None) -> str:
    if entry is None:
        return "-"
    value = entry.metrics.get(metric)
    if value is None:
        return "unreachable" if metric == Metric.PATH_COST else "-"
    match metric:
        case Metric.PATH_COST:
            return f"{value.mean:.1f}"
        case Metric.WALL_TIME:
            return f"{value.mean:.4f}"
        case _:
            return f"{value.mean / BYTES_PER_MB:.4f}"


def render_text_table(stats: RunStats) -> str:
    """Metric-major rows by planner, one column per scenario."""
    header = ["Metric", "Algorithm", *stats.scenarios]
    rows = [
        [
            TABLE_LABELS[metric],
            DISPLAY_NAMES.get(planner, planner),
            *(_table_cell(metric, stats.get(s, planner)) for s in stats.scenarios),
        ]
        for metric in stats.metrics
        for planner in stats.planners
    ]
    widths = [max(len(r[i]) for r in [header, *rows]) for i in range(len(header))]

    def line(cells: list[str]) -> str:
        return " | ".join(c.ljust(w) for c, w in zip(cells, widths, strict=True)).rstrip()

    rule = "-+-".join("-" * w for w in widths)
    return "\n".join([line(header), rule, *(line(r) for r in rows)]) + "\n"


def stats_records(stats: RunStats) -> list[dict[str, Any]]:
    """Flat rows ``scenario, planner, metric, mean, std, min, max, failures``."""
    out = []
    for entry in stats.entries.values():
        for metric in stats.metrics:
            value = entry.metrics.get(metric)
            out.append(
                {
                    "scenario": entry.scenario,
                    "planner": entry.planner,
                    "metric": str(metric),
                    "mean": value.mean if value else None,
                    "std": value.std if value else None,
                    "min": value.min if value else None,
                    "max": value.max if value else None,
                    "failures": entry.failures,
                }
            )
    return out


STATS_COLUMNS = ["scenario", "planner", "metric", "mean", "std", "min", "max", "failures"]
RECORD_COLUMNS = [
    "scenario",
    "planner",
    "run",
    "seed",
    "path_cost",
    "wall_time",
    "accounted_memory",
    "expanded",
    "allocator_peak",
]


def _csv_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_table(
    stats: RunStats, path: str | Path, fmt: ReportFormat | str = ReportFormat.TEXT
) -> Path:
    """
    Write aggregate statistics as text table, CSV or JSON.

    Raises:
        ContractError: If ``stats`` is empty
        OSError: If the file cannot be written
    """
    if not stats.entries:
        raise ContractError("emit_table needs at least one planner entry")
    fmt = ReportFormat(fmt)
    path = Path(path)
    match fmt:
        case ReportFormat.TEXT:
            path.write_text(render_text_table(stats), encoding="utf-8")
        case ReportFormat.CSV:
            with path.open("w", newline="", encoding="utf-8") as f:
                writer = csv.writer(f)
                writer.writerow(STATS_COLUMNS)
                for row in stats_records(stats):
                    writer.writerow([_csv_value(row[c]) for c in STATS_COLUMNS])
        case ReportFormat.JSON:
            path.write_text(json.dumps(stats_records(stats), indent=2) + "\n", encoding="utf-8")
    logger.info(f"Wrote {fmt} report to {path}")
    return path


def emit_records(records: Sequence[MetricsRecord], path: str | Path) -> Path:
    """Write one CSV row per run. Unreachable costs are written as ``inf``."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(RECORD_COLUMNS)
        for r in records:
            writer.writerow([_csv_value(getattr(r, c)) for c in RECORD_COLUMNS])
    return path
