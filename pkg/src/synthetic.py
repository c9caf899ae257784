"""
Synthetic weight and elevation maps for tests, fixtures and benchmarks.
"""

import logging
from enum import StrEnum

import numpy as np
from scipy import ndimage

from src.exceptions import ParameterError
from src.raster_io import RasterGrid

logger = logging.getLogger(__name__)

IMPASSABLE_FRACTION = 0.2
RIDGE_HEIGHT = 200
RIDGE_BASE = 20


class MapKind(StrEnum):
    UNIFORM = "uniform"
    RANDOM_WEIGHTS = "random-weights"
    RIDGE = "ridge"
    SMOOTHED_NOISE = "smoothed-noise"


def uniform_weights(size: int) -> np.ndarray:
    return np.ones((size, size), dtype=np.uint8)


def random_weights(size: int, rng: np.random.Generator) -> np.ndarray:
    """Integer weights 1-9 with about a fifth of the cells set to 0 (impassable)."""
    values = rng.integers(1, 10, size=(size, size))
    values[rng.random((size, size)) < IMPASSABLE_FRACTION] = 0
    return values.astype(np.uint8)


def ridge_elevation(size: int) -> np.ndarray:
    """Gray levels with a Gaussian ridge across the middle rows."""
    center = (size - 1) / 2.0
    half_width = max(size / 8.0, 1.0)
    rows = np.arange(size, dtype=np.float64)
    profile = RIDGE_BASE + RIDGE_HEIGHT * np.exp(-(((rows - center) / half_width) ** 2))
    return np.repeat(np.rint(profile)[:, None], size, axis=1).astype(np.uint8)


def smoothed_noise(size: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform noise box-blurred twice and rescaled to weights 1-9."""
    noise = rng.random((size, size))
    for _ in range(2):
        noise = ndimage.uniform_filter(noise, size=3, mode="reflect")
    lo, hi = float(noise.min()), float(noise.max())
    if hi == lo:
        return np.full((size, size), 5, dtype=np.uint8)
    return (1 + np.rint((noise - lo) / (hi - lo) * 8)).astype(np.uint8)


def generate_map(kind: MapKind | str, size: int, seed: int = 0) -> RasterGrid:
    """
    Build a square 8-bit raster of the given kind.

    Args:
        kind: One of ``MapKind``
        size: Side length in pixels, at least 2
        seed: Seed for the random kinds; the same seed yields the same raster

    Raises:
        ParameterError: If ``size < 2`` or ``kind`` is unknown
    """
    if size < 2:
        raise ParameterError(f"Map size must be >= 2, got {size}")
    try:
        kind = MapKind(kind)
    except ValueError as e:
        raise ParameterError(
            f"Unknown map kind '{kind}'; expected one of {', '.join(MapKind)}"
        ) from e

    rng = np.random.default_rng(seed)
    match kind:
        case MapKind.UNIFORM:
            values = uniform_weights(size)
        case MapKind.RANDOM_WEIGHTS:
            values = random_weights(size, rng)
        case MapKind.RIDGE:
            values = ridge_elevation(size)
        case MapKind.SMOOTHED_NOISE:
            values = smoothed_noise(size, rng)
    logger.debug(f"Generated {kind} map {size}x{size} (seed {seed})")
    return RasterGrid.from_array(values, bit_depth=8)
