"""
Shared fixtures and random-instance builders.
"""

from pathlib import Path

import numpy as np
import pytest

from src.grid_model import CellCoord, ElevationField, WeightedGrid

FIXTURES = Path(__file__).parent / "fixtures"


def random_grid(
    rng: np.random.Generator, width: int, height: int, blocked: float = 0.2
) -> WeightedGrid:
    """Integer weights 1-9 with a fraction of impassable cells."""
    weight = rng.integers(1, 10, size=(height, width)).astype(np.float64)
    passable = rng.random((height, width)) >= blocked
    return WeightedGrid.from_arrays(weight, passable)


def random_elevation(rng: np.random.Generator, width: int, height: int) -> ElevationField:
    return ElevationField(z=rng.uniform(0.0, 5.0, size=(height, width)))


def random_endpoints(
    rng: np.random.Generator, grid: WeightedGrid
) -> tuple[CellCoord, CellCoord] | None:
    """Two passable cells, or None when the grid has fewer than two."""
    free = grid.passable_indices
    if free.size < 2:
        return None
    a, b = rng.choice(free, size=2, replace=False)
    return (
        CellCoord(int(a) % grid.width, int(a) // grid.width),
        CellCoord(int(b) % grid.width, int(b) // grid.width),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def open_grid():
    """Obstacle-free 20x20 grid with unit weights."""
    return WeightedGrid.uniform(20, 20)


@pytest.fixture
def road16_path():
    return FIXTURES / "road16.pgm"


@pytest.fixture
def quiet_env(monkeypatch, tmp_path):
    """Keep CLI runs from writing log files into the working tree."""
    monkeypatch.setenv("ROADMAP_LOG_TO_FILE", "false")
    monkeypatch.setenv("ROADMAP_LOG_DIR", str(tmp_path / "logs"))
    monkeypatch.delenv("ROADMAP_LOG_LEVEL", raising=False)
    monkeypatch.delenv("ROADMAP_DEFAULT_SEED", raising=False)
