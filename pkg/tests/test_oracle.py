"""
Tests for the brute-force references themselves.
"""

import math

import numpy as np
import pytest

from src.exceptions import GridBoundsError, OracleGuardError
from src.grid_model import Scene3D, WeightedGrid
from src.oracle import brute_force_shortest_path, enumerate_simple_paths
from tests.conftest import random_elevation, random_endpoints, random_grid


def blocked_center() -> WeightedGrid:
    passable = np.ones((3, 3), dtype=bool)
    passable[1, 1] = False
    return WeightedGrid.from_arrays(np.ones((3, 3)), passable)


class TestBruteForceShortestPath:
    """Tests for brute_force_shortest_path()."""

    def test_single_cell(self):
        """Test a 1x1 grid has a zero-cost path."""
        result = brute_force_shortest_path(WeightedGrid.uniform(1, 1), (0, 0), (0, 0))

        assert result.cost == 0.0
        assert result.cells == ((0, 0),)

    def test_diagonal_step(self):
        """Test a 2x2 open grid costs sqrt(2) corner to corner."""
        result = brute_force_shortest_path(WeightedGrid.uniform(2, 2), (0, 0), (1, 1))

        assert result.cost == pytest.approx(math.sqrt(2))

    def test_two_by_one(self):
        """Test a single orthogonal step costs the mean weight."""
        grid = WeightedGrid.from_arrays(np.array([[1.0, 3.0]]))

        assert brute_force_shortest_path(grid, (0, 0), (1, 0)).cost == pytest.approx(2.0)

    def test_no_corner_cutting(self):
        """Test a blocked center forces the long way around."""
        result = brute_force_shortest_path(blocked_center(), (0, 0), (2, 2))

        assert result.cost == pytest.approx(4.0)
        assert len(result.cells) == 5

    def test_impassable_goal(self):
        """Test an impassable endpoint is unreachable, not an error."""
        result = brute_force_shortest_path(blocked_center(), (0, 0), (1, 1))

        assert not result.reachable

    def test_out_of_bounds(self):
        """Test endpoints outside the grid raise a bounds error."""
        with pytest.raises(GridBoundsError):
            brute_force_shortest_path(WeightedGrid.uniform(2, 2), (0, 0), (2, 0))

    def test_guard(self):
        """Test grids wider than 64 cells are refused."""
        with pytest.raises(OracleGuardError, match="64x64"):
            brute_force_shortest_path(WeightedGrid.uniform(65, 1), (0, 0), (1, 0))


class TestEnumerateSimplePaths:
    """Tests for enumerate_simple_paths()."""

    @pytest.mark.parametrize("terrain", [False, True], ids=["flat", "terrain"])
    def test_agrees_with_relaxation(self, rng, terrain):
        """Test both references agree on 100 random grids up to 4x4, flat and with elevation."""
        checked = 0
        while checked < 100:
            w = int(rng.integers(2, 5))
            h = int(rng.integers(1, 5))
            grid = random_grid(rng, w, h, blocked=0.25)
            ends = random_endpoints(rng, grid)
            if ends is None:
                continue
            model = Scene3D(grid, random_elevation(rng, w, h)).cost_model() if terrain else None
            relaxed = brute_force_shortest_path(grid, *ends, model=model).cost
            enumerated = enumerate_simple_paths(grid, *ends, model=model)
            if math.isinf(relaxed):
                assert math.isinf(enumerated)
            else:
                assert enumerated == pytest.approx(relaxed, rel=1e-12)
            checked += 1

    def test_blocked_center(self):
        """Test the hand-checked 3x3 case."""
        assert enumerate_simple_paths(blocked_center(), (0, 0), (2, 2)) == pytest.approx(4.0)

    def test_guard(self):
        """Test grids larger than 4x4 are refused."""
        with pytest.raises(OracleGuardError, match="4x4"):
            enumerate_simple_paths(WeightedGrid.uniform(5, 5), (0, 0), (1, 1))
