"""
Grayscale raster input/output and RGB path overlays.

Weight maps and elevation maps enter the system as single-channel 8- or
16-bit rasters, either Netpbm PGM (ASCII P2 or binary P5) or PNG. Pixel
values are returned exactly as stored; nothing is rescaled.
"""

import json
import logging
import re
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from enum import StrEnum
from pathlib import Path
from typing import Any

import numpy as np
from PIL import Image, UnidentifiedImageError

from src.exceptions import GridBoundsError, ParameterError, RasterFormatError, RasterIOError

logger = logging.getLogger(__name__)

_PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
_COMMENT = re.compile(rb"#[^\n]*")

RGB = tuple[int, int, int]

# Default overlay color per planner family.
ASTAR_BLUE: RGB = (0, 0, 255)
DIJKSTRA_GOLD: RGB = (255, 215, 0)
RRT_RED: RGB = (255, 0, 0)
NIACO_LIGHT_BLUE: RGB = (135, 206, 250)

DEFAULT_PALETTE: dict[str, RGB] = {
    "astar": ASTAR_BLUE,
    "astar3d": ASTAR_BLUE,
    "dijkstra": DIJKSTRA_GOLD,
    "dijkstra3d": DIJKSTRA_GOLD,
    "rrtstar": RRT_RED,
    "rrtstar3d": RRT_RED,
    "rrtconnect": RRT_RED,
    "rrtconnect2d": RRT_RED,
    "niaco": NIACO_LIGHT_BLUE,
    "niaco3d": NIACO_LIGHT_BLUE,
}


class RasterFormat(StrEnum):
    PGM = "pgm"
    PNG = "png"

    @classmethod
    def from_path(cls, path: Path) -> "RasterFormat":
        suffix = path.suffix.lower().lstrip(".")
        try:
            return cls(suffix)
        except ValueError as e:
            raise RasterFormatError(
                f"Cannot infer raster format from suffix '{path.suffix}'"
            ) from e


@dataclass(frozen=True, eq=False)
class RasterGrid:
    """Single-channel raster; ``values`` is indexed ``[y, x]``."""

    width: int
    height: int
    bit_depth: int
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise RasterFormatError(
                f"Raster dimensions must be >= 1, got {self.width}x{self.height}"
            )
        if self.bit_depth not in (8, 16):
            raise RasterFormatError(f"Unsupported bit depth {self.bit_depth} (expected 8 or 16)")

        raw = np.asarray(self.values)
        if raw.size != self.width * self.height:
            raise RasterFormatError(
                f"Raster holds {raw.size} values, expected {self.width}x{self.height}"
            )
        if raw.size and not np.issubdtype(raw.dtype, np.integer):
            raise RasterFormatError(f"Raster values must be integers, got dtype {raw.dtype}")
        raw = raw.astype(np.int64).reshape(self.height, self.width)
        if raw.min() < 0 or raw.max() > self.max_value:
            raise RasterFormatError(
                f"Raster value range [{raw.min()}, {raw.max()}] exceeds {self.bit_depth}-bit "
                f"maximum {self.max_value}"
            )

        stored = raw.astype(np.uint8 if self.bit_depth == 8 else np.uint16)
        stored.flags.writeable = False
        object.__setattr__(self, "values", stored)

    @property
    def max_value(self) -> int:
        return (1 << self.bit_depth) - 1

    @classmethod
    def from_array(cls, array: Any, bit_depth: int | None = None) -> "RasterGrid":
        """Wrap a 2D integer array, inferring the smallest bit depth when not given."""
        arr = np.asarray(array)
        if arr.ndim != 2:
            raise RasterFormatError(f"Raster array must be 2D, got {arr.ndim} dimensions")
        if bit_depth is None:
            bit_depth = 8 if arr.size == 0 or int(arr.max()) <= 255 else 16
        return cls(width=arr.shape[1], height=arr.shape[0], bit_depth=bit_depth, values=arr)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RasterGrid):
            return NotImplemented
        return (
            self.width == other.width
            and self.height == other.height
            and self.bit_depth == other.bit_depth
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None  # type: ignore[assignment]


def load_grayscale_raster(path: str | Path) -> RasterGrid:
    """
    Load a PGM (P2/P5) or single-channel PNG raster.

    Raises:
        RasterIOError: If the file cannot be read
        RasterFormatError: If the format, channel count or bit depth is unsupported
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise RasterIOError(f"Cannot read raster {path}: {e}") from e

    if data.startswith(_PNG_SIGNATURE):
        raster = _decode_png(path, data)
    elif data[:2] in (b"P2", b"P5"):
        raster = _decode_pgm(data, path)
    else:
        raise RasterFormatError(f"{path}: unsupported raster magic {data[:2]!r}")

    logger.debug(f"Loaded {raster.width}x{raster.height} {raster.bit_depth}-bit raster {path}")
    return raster


def save_grayscale_raster(
    grid: RasterGrid,
    path: str | Path,
    format: RasterFormat | str | None = None,
    *,
    binary: bool = False,
) -> None:
    """
    Write a raster as PGM (ASCII P2 unless ``binary``) or PNG.

    The format defaults to the file suffix.

    Raises:
        RasterFormatError: If the grid violates its invariants
        RasterIOError: If the file cannot be written
    """
    path = Path(path)
    fmt = RasterFormat(format) if format is not None else RasterFormat.from_path(path)
    # Re-check invariants: values may have been swapped in behind the frozen dataclass.
    RasterGrid(grid.width, grid.height, grid.bit_depth, grid.values)

    try:
        if fmt is RasterFormat.PGM:
            path.write_bytes(_encode_pgm(grid, binary=binary))
        else:
            Image.fromarray(np.ascontiguousarray(grid.values)).save(path, format="PNG")
    except OSError as e:
        raise RasterIOError(f"Cannot write raster {path}: {e}") from e


def _header_tokens(data: bytes, count: int, pos: int, path: Path) -> tuple[list[bytes], int]:
    tokens: list[bytes] = []
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos : pos + 1].isspace():
            pos += 1
        if pos < n and data[pos : pos + 1] == b"#":
            while pos < n and data[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise RasterFormatError(f"{path}: truncated PGM header")
        tokens.append(data[start:pos])
    return tokens, pos


def _decode_pgm(data: bytes, path: Path) -> RasterGrid:
    magic = data[:2]
    (w_tok, h_tok, max_tok), pos = _header_tokens(data, 3, 2, path)
    try:
        width, height, maxval = int(w_tok), int(h_tok), int(max_tok)
    except ValueError as e:
        raise RasterFormatError(f"{path}: non-numeric PGM header") from e
    if not 0 < maxval <= 65535:
        raise RasterFormatError(f"{path}: PGM maxval {maxval} outside 1..65535")
    bit_depth = 8 if maxval < 256 else 16
    count = width * height

    if magic == b"P2":
        body = _COMMENT.sub(b"", data[pos:]).split()
        if len(body) != count:
            raise RasterFormatError(f"{path}: PGM body has {len(body)} samples, expected {count}")
        values = np.array([int(tok) for tok in body], dtype=np.int64)
    else:
        pos += 1  # single whitespace byte after maxval
        dtype = np.dtype(np.uint8) if bit_depth == 8 else np.dtype(">u2")
        if len(data) - pos < count * dtype.itemsize:
            raise RasterFormatError(f"{path}: PGM body truncated")
        values = np.frombuffer(data, dtype=dtype, count=count, offset=pos).astype(np.int64)

    if count and values.max() > maxval:
        raise RasterFormatError(f"{path}: sample {values.max()} exceeds PGM maxval {maxval}")
    return RasterGrid(width, height, bit_depth, values.reshape(height, width))


def _encode_pgm(grid: RasterGrid, *, binary: bool) -> bytes:
    header = f"{'P5' if binary else 'P2'}\n{grid.width} {grid.height}\n{grid.max_value}\n"
    if binary:
        dtype = np.uint8 if grid.bit_depth == 8 else ">u2"
        return header.encode("ascii") + grid.values.astype(dtype).tobytes()
    rows = "\n".join(" ".join(str(v) for v in row) for row in grid.values.tolist())
    return (header + rows + "\n").encode("ascii")


def _png_bit_depth(data: bytes, path: Path) -> int:
    # IHDR is always the first chunk: length, type, width, height, then bit depth.
    if len(data) < 26 or data[12:16] != b"IHDR":
        raise RasterFormatError(f"{path}: PNG is missing its IHDR header")
    return data[24]


def _decode_png(path: Path, data: bytes) -> RasterGrid:
    try:
        with Image.open(path) as img:
            mode = img.mode
            if mode in ("RGB", "RGBA", "LA", "CMYK", "YCbCr", "P", "PA"):
                raise RasterFormatError(
                    f"{path}: PNG has {len(img.getbands())} channels (mode {mode}); "
                    "only single-channel rasters are supported"
                )
            if mode == "F":
                raise RasterFormatError(f"{path}: PNG float samples unsupported")
            bit_depth = _png_bit_depth(data, path)
            if bit_depth not in (8, 16):
                raise RasterFormatError(
                    f"{path}: PNG bit depth {bit_depth} unsupported (expected 8 or 16)"
                )
            array = np.array(img)
    except UnidentifiedImageError as e:
        raise RasterFormatError(f"{path}: not a decodable PNG") from e
    except OSError as e:
        raise RasterIOError(f"Cannot read raster {path}: {e}") from e

    return RasterGrid.from_array(array.astype(np.int64), bit_depth=bit_depth)


def _check_color(color: Sequence[int]) -> RGB:
    rgb = tuple(int(c) for c in color)
    if len(rgb) != 3 or any(not 0 <= c <= 255 for c in rgb):
        raise ParameterError(f"Color must be three integers in 0..255, got {list(color)}")
    return rgb  # type: ignore[return-value]


def load_palette(path: str | Path) -> dict[str, RGB]:
    """Read a JSON ``{planner: [r, g, b]}`` file layered over the default palette."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise RasterIOError(f"Cannot read palette {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ParameterError(f"Palette {path} is not valid JSON: {e}") from e
    if not isinstance(raw, Mapping):
        raise ParameterError(f"Palette {path} must be a JSON object")
    palette = dict(DEFAULT_PALETTE)
    palette.update({str(name): _check_color(color) for name, color in raw.items()})
    return palette


def gray_to_rgb(base: RasterGrid) -> np.ndarray:
    """Replicate a grayscale raster into 8-bit RGB; 16-bit bases are scaled down."""
    if base.bit_depth == 8:
        gray = base.values.astype(np.uint8)
    else:
        gray = (base.values.astype(np.uint32) * 255 // 65535).astype(np.uint8)
    return np.repeat(gray[:, :, np.newaxis], 3, axis=2)


def render_overlay(
    base: RasterGrid,
    layers: Iterable[tuple[Any, Sequence[int]]],
    out_path: str | Path | None = None,
) -> np.ndarray:
    """
    Paint path layers over a grayscale base.

    Each layer is ``(path, color)`` where ``path`` is a ``Path`` or a sequence
    of ``(x, y)`` cells. Later layers overdraw earlier ones. The base raster
    is left untouched.

    Returns:
        np.ndarray: ``(height, width, 3)`` uint8 image, also written as PNG when
        ``out_path`` is given

    Raises:
        GridBoundsError: If a path cell lies outside the base raster
    """
    rgb = gray_to_rgb(base)
    for path, color in layers:
        paint = np.array(_check_color(color), dtype=np.uint8)
        for x, y in getattr(path, "cells", path):
            if not (0 <= x < base.width and 0 <= y < base.height):
                raise GridBoundsError(x, y, base.width, base.height, what="path cell")
            rgb[y, x] = paint

    if out_path is not None:
        save_rgb_png(rgb, out_path)
    return rgb


def save_rgb_png(rgb: np.ndarray, path: str | Path) -> None:
    try:
        Image.fromarray(np.ascontiguousarray(rgb, dtype=np.uint8)).save(Path(path), format="PNG")
    except OSError as e:
        raise RasterIOError(f"Cannot write overlay {path}: {e}") from e
