"""
Command-line entry point: plan single routes, run benchmark suites, render
overlays and generate synthetic maps.

Exit codes: 0 success, 1 usage / configuration / I/O error, 2 no path found.
"""

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any, NoReturn

from src.bench_harness import (
    DISPLAY_NAMES,
    PLANNER_IDS,
    ReportFormat,
    aggregate_runs,
    emit_records,
    emit_table,
    load_scenarios,
    run_planner,
    run_scenario,
)
from src.config import Config
from src.exceptions import (
    GridBoundsError,
    ParameterError,
    PlanningError,
    PlanningInputError,
    RasterFormatError,
    RasterIOError,
    ScenarioError,
    UsageError,
)
from src.grid_model import CellCoord, Cost3DParams, ElevationField, from_raster_weights
from src.raster_io import (
    DEFAULT_PALETTE,
    RGB,
    load_grayscale_raster,
    load_palette,
    render_overlay,
    save_grayscale_raster,
)
from src.synthetic import MapKind, generate_map

LOG_FILE_NAME = "roadmap_planner.log"
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NO_PATH = 2

REPORT_SUFFIX = {ReportFormat.TEXT: "txt", ReportFormat.CSV: "csv", ReportFormat.JSON: "json"}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        raise UsageError(f"{self.prog}: {message}")


def parse_cell(text: str) -> CellCoord:
    """Parse ``X,Y`` into a cell."""
    parts = text.split(",")
    try:
        if len(parts) != 2:
            raise ValueError
        return CellCoord(int(parts[0]), int(parts[1]))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected X,Y integers, got '{text}'") from e


def setup_logging(config: Config) -> logging.Logger:
    """
    Configure the package logger with console and optional file handlers.

    Returns:
        logging.Logger: The ``src`` package logger
    """
    logger = logging.getLogger("src")
    logger.setLevel(config.log_level)

    # Only add handlers if they don't exist (prevent duplicate handlers)
    if not logger.handlers:
        formatter = logging.Formatter(LOG_FORMAT)
        console_handler = logging.StreamHandler()
        console_handler.setFormatter(formatter)
        logger.addHandler(console_handler)

        if config.log_to_file:
            config.log_dir.mkdir(parents=True, exist_ok=True)
            file_handler = logging.FileHandler(
                config.log_dir / LOG_FILE_NAME, mode="a", encoding="utf-8"
            )
            file_handler.setFormatter(formatter)
            logger.addHandler(file_handler)

    return logger


def _add_raster_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--impassable-value", type=int, default=0)
    parser.add_argument("--weight-scale", type=float, default=1.0)
    parser.add_argument("--meters-per-level", type=float, default=1.0)
    parser.add_argument("--resolution", type=float, default=1.0, help="meters per pixel of the DEM")
    parser.add_argument("--median-filter", action="store_true", help="3x3 median on the DEM")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="roadmap-planner", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--log-level", help="overrides ROADMAP_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    plan = sub.add_parser("plan", help="plan one route")
    plan.add_argument("--weights", type=Path, required=True)
    plan.add_argument("--elevation", type=Path)
    plan.add_argument("--start", type=parse_cell, required=True)
    plan.add_argument("--goal", type=parse_cell, required=True)
    plan.add_argument("--planner", choices=PLANNER_IDS, default="dijkstra")
    plan.add_argument("--params", type=Path, help="JSON object of planner parameters")
    plan.add_argument("--seed", type=int)
    plan.add_argument("--out", type=Path, required=True)
    plan.add_argument("--image", type=Path, help="optional overlay PNG")
    plan.add_argument("--palette", type=Path)
    plan.add_argument("--kappa", type=float, default=1.0)
    plan.add_argument("--gradient-window", type=int, default=3)
    plan.add_argument("--gradient-penalty", type=float, default=0.0)
    _add_raster_flags(plan)

    bench = sub.add_parser("bench", help="run benchmark scenarios")
    bench.add_argument("scenario_file", type=Path)
    bench.add_argument("--out", type=Path, required=True, help="output directory")
    bench.add_argument("--format", choices=[f.value for f in ReportFormat], default="text")
    bench.add_argument("--workers", type=int, default=1)

    render = sub.add_parser("render", help="paint planned paths over a map")
    render.add_argument("--weights", type=Path, required=True)
    render.add_argument("paths", nargs="*", type=Path, help="path JSON files from 'plan'")
    render.add_argument("--out", type=Path, required=True)
    render.add_argument("--palette", type=Path)

    gen = sub.add_parser("gen", help="generate a synthetic map")
    gen.add_argument("kind", choices=[k.value for k in MapKind])
    gen.add_argument("size", type=int)
    gen.add_argument("--seed", type=int)
    gen.add_argument("--out", type=Path, required=True)

    return parser


def legend_path(image: Path) -> Path:
    return image.with_name(image.name + ".legend.txt")


def write_legend(image: Path, entries: Sequence[tuple[str, RGB]]) -> Path:
    """Sidecar text mapping each color to its planner, one line per layer."""
    lines = [
        f"{r},{g},{b}\t{planner}\t{DISPLAY_NAMES.get(planner, planner)}"
        for planner, (r, g, b) in entries
    ]
    out = legend_path(image)
    out.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
    return out


def load_path_document(path: Path) -> tuple[str, list[CellCoord]]:
    """
    Read a path JSON written by ``plan``.

    Raises:
        ParameterError: If the document lacks a planner id or a cell list
    """
    doc = json.loads(path.read_text(encoding="utf-8"))
    if not isinstance(doc, dict) or not isinstance(doc.get("cells"), list):
        raise ParameterError(f"{path} is not a path document (missing 'cells')")
    try:
        cells = [CellCoord(int(c[0]), int(c[1])) for c in doc["cells"]]
    except (TypeError, ValueError, IndexError) as e:
        raise ParameterError(f"{path} has malformed cells: {e}") from e
    return str(doc.get("planner", "")), cells


def _load_params(path: Path | None) -> dict[str, Any]:
    if path is None:
        return {}
    params = json.loads(path.read_text(encoding="utf-8"))
    if not isinstance(params, dict):
        raise ParameterError(f"--params file {path} must hold a JSON object")
    return params


class RoadmapCli:
    """Runs one subcommand and reports its outcome."""

    def __init__(self, config: Config):
        self.config = config
        self.logger = setup_logging(config)

    def run(self, args: argparse.Namespace) -> int:
        command = args.command
        handler = getattr(self, f"cmd_{command}")
        try:
            return handler(args)
        except ScenarioError as e:
            for problem in e.problems:
                self.logger.error(f"Scenario '{e.scenario}': {problem}")
            self._log_summary(command, False, {"error": "Invalid scenario", "message": str(e)})
        except PlanningInputError as e:
            self.logger.error(f"Bad start/goal: {e}")
            self._log_summary(command, False, {"error": "Bad start/goal", "message": str(e)})
        except GridBoundsError as e:
            self.logger.error(f"Cell out of bounds: {e}")
            self._log_summary(command, False, {"error": "Out of bounds", "message": str(e)})
        except (RasterIOError, RasterFormatError, OSError) as e:
            self.logger.error(f"I/O error: {e}")
            self._log_summary(command, False, {"error": "I/O error", "message": str(e)})
        except (ValueError, PlanningError) as e:
            self.logger.error(f"Invalid input: {e}")
            self._log_summary(command, False, {"error": "Invalid input", "message": str(e)})
        return EXIT_ERROR

    def cmd_plan(self, args: argparse.Namespace) -> int:
        raster = load_grayscale_raster(args.weights)
        grid = from_raster_weights(raster, args.impassable_value, args.weight_scale)
        elev = None
        if args.elevation is not None:
            elev = ElevationField.from_raster(
                load_grayscale_raster(args.elevation),
                meters_per_level=args.meters_per_level,
                horizontal_resolution=args.resolution,
                median_filter=args.median_filter,
            )
        cost3d = Cost3DParams(
            kappa=args.kappa,
            gradient_window=args.gradient_window,
            gradient_penalty=args.gradient_penalty,
        )
        seed = self.config.default_seed if args.seed is None else args.seed
        params = _load_params(args.params)

        self.logger.info(
            f"Planning {args.planner} on {grid.width}x{grid.height} "
            f"from {tuple(args.start)} to {tuple(args.goal)} (seed {seed})"
        )
        outcome = run_planner(args.planner, grid, args.start, args.goal, params, seed, elev, cost3d)

        document = {
            "planner": args.planner,
            "seed": seed,
            "found": outcome.found,
            "cells": [[c.x, c.y] for c in outcome.path.cells] if outcome.path else [],
            "total_cost": outcome.path.total_cost if outcome.path else None,
            "expanded": outcome.expanded,
            "iterations": outcome.iterations,
            "accounted_memory": outcome.accounted_memory,
        }
        if not outcome.found:
            document["reason"] = outcome.reason
        args.out.write_text(json.dumps(document, indent=2) + "\n", encoding="utf-8")

        if not outcome.found:
            self._log_summary("plan", False, {"error": "No path", "message": outcome.reason})
            return EXIT_NO_PATH

        if args.image is not None:
            palette = load_palette(args.palette) if args.palette else DEFAULT_PALETTE
            color = palette[args.planner]
            render_overlay(raster, [(outcome.path, color)], args.image)
            write_legend(args.image, [(args.planner, color)])

        self._log_summary(
            "plan",
            True,
            {
                "Planner": DISPLAY_NAMES[args.planner],
                "Cost": f"{outcome.cost:.6f}",
                "Cells": len(outcome.path),
                "Output": args.out,
            },
        )
        return EXIT_OK

    def cmd_bench(self, args: argparse.Namespace) -> int:
        scenarios = load_scenarios(args.scenario_file)
        fmt = ReportFormat(args.format)
        args.out.mkdir(parents=True, exist_ok=True)

        records = []
        for scenario in scenarios:
            records.extend(run_scenario(scenario, workers=args.workers))
        stats = aggregate_runs(records)

        records_file = emit_records(records, args.out / "records.csv")
        table_file = emit_table(stats, args.out / f"summary.{REPORT_SUFFIX[fmt]}", fmt)
        failures = sum(not r.reachable for r in records)
        self._log_summary(
            "bench",
            True,
            {
                "Scenarios": len(scenarios),
                "Runs": len(records),
                "Runs without path": failures,
                "Records": records_file,
                "Report": table_file,
            },
        )
        return EXIT_OK

    def cmd_render(self, args: argparse.Namespace) -> int:
        base = load_grayscale_raster(args.weights)
        palette = load_palette(args.palette) if args.palette else DEFAULT_PALETTE

        layers = []
        legend: list[tuple[str, RGB]] = []
        for path_file in args.paths:
            planner, cells = load_path_document(path_file)
            if planner not in palette:
                raise ParameterError(f"No palette color for planner '{planner}' in {path_file}")
            layers.append((cells, palette[planner]))
            legend.append((planner, palette[planner]))

        render_overlay(base, layers, args.out)
        write_legend(args.out, legend)
        self._log_summary("render", True, {"Layers": len(layers), "Image": args.out})
        return EXIT_OK

    def cmd_gen(self, args: argparse.Namespace) -> int:
        seed = self.config.default_seed if args.seed is None else args.seed
        raster = generate_map(args.kind, args.size, seed)
        save_grayscale_raster(raster, args.out)
        self._log_summary(
            "gen", True, {"Kind": args.kind, "Size": args.size, "Seed": seed, "Output": args.out}
        )
        return EXIT_OK

    def _log_summary(self, command: str, success: bool, details: dict[str, Any]) -> None:
        """
        Log a structured summary block for a finished subcommand.

        Args:
            command: Subcommand name
            success: Whether it succeeded
            details: Key/value lines to include
        """
        title = command.upper()
        if success:
            body = "\n".join(f"{key}: {value}" for key, value in details.items())
            self.logger.info(f"=== {title} SUCCESS ===\n{body}")
        else:
            self.logger.error(
                f"=== {title} FAILED ===\n"
                f"Error: {details.get('error', 'Unknown')}\n"
                f"Message: {details.get('message', 'No details')}"
            )


def main(argv: Sequence[str] | None = None) -> int:
    """
    Entry point for the ``roadmap-planner`` command.

    Returns:
        int: Exit code (0 success, 1 usage/config/IO error, 2 no path)
    """
    try:
        args = build_parser().parse_args(argv)
        config = Config.from_env()
        if args.log_level:
            config.log_level = args.log_level.upper()
        config.validate()
    except UsageError as e:
        logging.error(f"Usage error: {e}")
        return EXIT_ERROR
    except ValueError as e:
        logging.error(f"Configuration error: {e}")
        return EXIT_ERROR

    try:
        return RoadmapCli(config).run(args)
    except Exception as e:
        logging.error(f"Fatal error: {e}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
