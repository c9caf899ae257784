"""
Tests for the roadmap-planner command line.
"""

import argparse
import csv
import json

import numpy as np
import pytest
from PIL import Image

from src.cli import EXIT_ERROR, EXIT_NO_PATH, EXIT_OK, legend_path, main, parse_cell
from src.grid_model import from_raster_weights
from src.oracle import brute_force_shortest_path
from src.raster_io import (
    ASTAR_BLUE,
    DIJKSTRA_GOLD,
    RasterGrid,
    load_grayscale_raster,
    save_grayscale_raster,
)

pytestmark = pytest.mark.usefixtures("quiet_env")


@pytest.fixture
def walled_map(tmp_path):
    values = np.ones((6, 6), dtype=np.int64)
    values[:, 3] = 0
    f = tmp_path / "walled.pgm"
    save_grayscale_raster(RasterGrid.from_array(values), f)
    return f


@pytest.fixture
def ramp_map(tmp_path):
    f = tmp_path / "ramp16.pgm"
    ramp = np.tile(np.arange(16, dtype=np.int64) * 10, (16, 1))
    save_grayscale_raster(RasterGrid.from_array(ramp), f)
    return f


def plan(weights, out, *extra, start="0,0", goal="15,15"):
    return main(
        ["plan", "--weights", str(weights), "--start", start, "--goal", goal, "--out", str(out)]
        + [str(e) for e in extra]
    )


class TestParseCell:
    """Tests for parse_cell()."""

    def test_valid(self):
        """Test X,Y parses to a cell."""
        assert parse_cell("3,14") == (3, 14)

    @pytest.mark.parametrize("text", ["3", "a,b", "1,2,3", ""])
    def test_invalid(self, text):
        """Test malformed cells are argument errors."""
        with pytest.raises(argparse.ArgumentTypeError):
            parse_cell(text)


class TestPlanCommand:
    """Tests for the plan subcommand."""

    def test_dijkstra_matches_oracle(self, road16_path, tmp_path):
        """Test the written cost equals the brute-force optimum."""
        out = tmp_path / "path.json"

        assert plan(road16_path, out) == EXIT_OK

        doc = json.loads(out.read_text())
        grid = from_raster_weights(load_grayscale_raster(road16_path))
        reference = brute_force_shortest_path(grid, (0, 0), (15, 15))
        assert doc["found"] is True
        assert doc["planner"] == "dijkstra"
        assert doc["total_cost"] == pytest.approx(reference.cost, rel=1e-9)
        assert doc["cells"][0] == [0, 0] and doc["cells"][-1] == [15, 15]

    def test_start_equals_goal(self, road16_path, tmp_path):
        """Test a trivial query writes a one-cell path at cost 0."""
        out = tmp_path / "path.json"

        assert plan(road16_path, out, start="4,4", goal="4,4") == EXIT_OK

        doc = json.loads(out.read_text())
        assert doc["cells"] == [[4, 4]]
        assert doc["total_cost"] == 0.0

    def test_impassable_goal(self, road16_path, tmp_path):
        """Test a goal on an off-road cell exits 1."""
        assert plan(road16_path, tmp_path / "p.json", goal="8,4") == EXIT_ERROR

    def test_goal_out_of_bounds(self, road16_path, tmp_path):
        """Test a goal outside the map exits 1."""
        assert plan(road16_path, tmp_path / "p.json", goal="16,0") == EXIT_ERROR

    def test_malformed_start(self, road16_path, tmp_path):
        """Test an unparsable --start exits 1 without writing output."""
        out = tmp_path / "p.json"

        assert plan(road16_path, out, start="3") == EXIT_ERROR
        assert not out.exists()

    def test_no_path(self, walled_map, tmp_path):
        """Test an unreachable goal exits 2 and records the reason."""
        out = tmp_path / "p.json"

        assert plan(walled_map, out, start="0,0", goal="5,5") == EXIT_NO_PATH

        doc = json.loads(out.read_text())
        assert doc["found"] is False
        assert doc["cells"] == []
        assert "not reachable" in doc["reason"]

    def test_missing_weights(self, tmp_path):
        """Test a missing map file exits 1."""
        assert plan(tmp_path / "absent.pgm", tmp_path / "p.json") == EXIT_ERROR

    def test_3d_planner_needs_elevation(self, road16_path, tmp_path):
        """Test elevation-aware planners without --elevation exit 1."""
        out = tmp_path / "p.json"

        assert plan(road16_path, out, "--planner", "astar3d") == EXIT_ERROR

    def test_3d_planner_with_elevation(self, road16_path, ramp_map, tmp_path):
        """Test an elevation-aware run with cost options succeeds."""
        out = tmp_path / "p.json"

        code = plan(
            road16_path, out, "--planner", "astar3d", "--elevation", ramp_map, "--kappa", "0.5"
        )

        assert code == EXIT_OK
        assert json.loads(out.read_text())["planner"] == "astar3d"

    def test_params_file_and_seed(self, road16_path, tmp_path):
        """Test planner parameters and the seed are taken from the command line."""
        params = tmp_path / "params.json"
        params.write_text(json.dumps({"n_ants": 4, "n_iterations": 5}))
        out = tmp_path / "p.json"

        code = plan(road16_path, out, "--planner", "niaco", "--params", params, "--seed", "3")

        assert code in (EXIT_OK, EXIT_NO_PATH)
        doc = json.loads(out.read_text())
        assert doc["seed"] == 3
        assert doc["iterations"] == 5

    def test_overlay_and_legend(self, road16_path, tmp_path):
        """Test --image paints the path and writes a legend beside it."""
        out, image = tmp_path / "p.json", tmp_path / "astar.png"

        assert plan(road16_path, out, "--planner", "astar", "--image", image) == EXIT_OK

        pixels = np.asarray(Image.open(image).convert("RGB"))
        for x, y in json.loads(out.read_text())["cells"]:
            assert tuple(pixels[y, x]) == ASTAR_BLUE
        assert legend_path(image).read_text() == "0,0,255\tastar\tA*\n"


class TestBenchCommand:
    """Tests for the bench subcommand."""

    @pytest.fixture
    def scenario_file(self, tmp_path, road16_path):
        f = tmp_path / "scenarios.json"
        f.write_text(
            json.dumps(
                {
                    "name": "Road",
                    "weight_map": str(road16_path),
                    "start": [0, 0],
                    "goal": [15, 15],
                    "planners": ["dijkstra", "astar"],
                    "repeats": 2,
                }
            )
        )
        return f

    def test_records_and_summary(self, scenario_file, tmp_path):
        """Test two planners by two repeats give four records and a table."""
        out = tmp_path / "bench"

        assert main(["bench", str(scenario_file), "--out", str(out)]) == EXIT_OK

        with (out / "records.csv").open(newline="") as f:
            rows = list(csv.DictReader(f))
        assert len(rows) == 4
        assert [r["planner"] for r in rows] == ["dijkstra", "dijkstra", "astar", "astar"]
        table = (out / "summary.txt").read_text()
        assert "Path Cost" in table and "Dijkstra" in table and "Road" in table

    def test_csv_format(self, scenario_file, tmp_path):
        """Test --format csv writes summary.csv."""
        out = tmp_path / "bench"

        assert main(["bench", str(scenario_file), "--out", str(out), "--format", "csv"]) == EXIT_OK
        assert (out / "summary.csv").exists()

    def test_missing_elevation(self, tmp_path, road16_path):
        """Test a 3D planner without elevation_map exits 1."""
        f = tmp_path / "bad.json"
        f.write_text(
            json.dumps(
                {
                    "name": "Terrain",
                    "weight_map": str(road16_path),
                    "start": [0, 0],
                    "goal": [15, 15],
                    "planners": ["niaco3d"],
                }
            )
        )

        assert main(["bench", str(f), "--out", str(tmp_path / "o")]) == EXIT_ERROR

    def test_missing_scenario_file(self, tmp_path):
        """Test an unreadable scenario file exits 1."""
        assert main(["bench", str(tmp_path / "none.json"), "--out", str(tmp_path)]) == EXIT_ERROR


class TestRenderCommand:
    """Tests for the render subcommand."""

    def test_no_paths_is_gray_copy(self, road16_path, tmp_path):
        """Test zero paths render the base map as gray RGB with an empty legend."""
        image = tmp_path / "base.png"

        assert main(["render", "--weights", str(road16_path), "--out", str(image)]) == EXIT_OK

        pixels = np.asarray(Image.open(image).convert("RGB"))
        base = load_grayscale_raster(road16_path).values
        assert np.array_equal(pixels[:, :, 0], base)
        assert np.array_equal(pixels[:, :, 2], base)
        assert legend_path(image).read_text() == ""

    def test_layers_in_order(self, road16_path, tmp_path):
        """Test later paths overdraw earlier ones and the legend lists each layer."""
        docs = []
        for planner in ("dijkstra", "astar"):
            f = tmp_path / f"{planner}.json"
            assert plan(road16_path, f, "--planner", planner) == EXIT_OK
            docs.append(str(f))
        image = tmp_path / "both.png"

        argv = ["render", "--weights", str(road16_path), *docs, "--out", str(image)]
        assert main(argv) == EXIT_OK

        pixels = np.asarray(Image.open(image).convert("RGB"))
        astar_cells = json.loads((tmp_path / "astar.json").read_text())["cells"]
        dijkstra_cells = json.loads((tmp_path / "dijkstra.json").read_text())["cells"]
        for x, y in astar_cells:
            assert tuple(pixels[y, x]) == ASTAR_BLUE
        for x, y in dijkstra_cells:
            if [x, y] not in astar_cells:
                assert tuple(pixels[y, x]) == DIJKSTRA_GOLD
        assert legend_path(image).read_text().splitlines() == [
            "255,215,0\tdijkstra\tDijkstra",
            "0,0,255\tastar\tA*",
        ]

    def test_deterministic(self, road16_path, tmp_path):
        """Test two renders of the same inputs are byte-identical."""
        doc = tmp_path / "d.json"
        assert plan(road16_path, doc) == EXIT_OK

        for name in ("a.png", "b.png"):
            out = tmp_path / name
            argv = ["render", "--weights", str(road16_path), str(doc), "--out", str(out)]
            assert main(argv) == EXIT_OK

        assert (tmp_path / "a.png").read_bytes() == (tmp_path / "b.png").read_bytes()

    def test_not_a_path_document(self, road16_path, tmp_path):
        """Test an arbitrary JSON file is rejected."""
        doc = tmp_path / "junk.json"
        doc.write_text(json.dumps({"hello": 1}))

        argv = ["render", "--weights", str(road16_path), str(doc), "--out", str(tmp_path / "x.png")]
        assert main(argv) == EXIT_ERROR


class TestGenCommand:
    """Tests for the gen subcommand."""

    def test_uniform(self, tmp_path):
        """Test gen uniform 8 writes an 8x8 map of ones."""
        out = tmp_path / "u.pgm"

        assert main(["gen", "uniform", "8", "--out", str(out)]) == EXIT_OK

        raster = load_grayscale_raster(out)
        assert (raster.width, raster.height) == (8, 8)
        assert (raster.values == 1).all()

    def test_size_too_small(self, tmp_path):
        """Test gen with size 1 exits 1."""
        assert main(["gen", "uniform", "1", "--out", str(tmp_path / "u.pgm")]) == EXIT_ERROR


class TestMain:
    """Tests for argument and configuration handling in main()."""

    def test_missing_subcommand(self):
        """Test no subcommand is a usage error."""
        assert main([]) == EXIT_ERROR

    def test_bad_log_level(self, tmp_path):
        """Test an unknown --log-level is a configuration error."""
        argv = ["--log-level", "chatty", "gen", "uniform", "4", "--out", str(tmp_path / "u.pgm")]

        assert main(argv) == EXIT_ERROR

    def test_default_seed_from_environment(self, monkeypatch, tmp_path):
        """Test ROADMAP_DEFAULT_SEED feeds runs without --seed."""
        monkeypatch.setenv("ROADMAP_DEFAULT_SEED", "21")
        out = tmp_path / "r.pgm"

        assert main(["gen", "random-weights", "8", "--out", str(out)]) == EXIT_OK
        seeded = ["gen", "random-weights", "8", "--seed", "21", "--out", str(tmp_path / "s.pgm")]
        assert main(seeded) == EXIT_OK

        assert out.read_bytes() == (tmp_path / "s.pgm").read_bytes()
