"""
Weighted traversal grids, elevation fields and the shared edge-cost models.

Cells are addressed ``(x, y)`` with ``x`` the column and ``y`` the row; arrays
are indexed ``[y, x]``. Movement is 8-connected. A diagonal move is allowed
only when both orthogonal companions are passable, so no path slips between
two touching obstacles.
"""

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, NamedTuple, Protocol

import numpy as np
from scipy import ndimage

from src.exceptions import ContractError, GridBoundsError, ParameterError
from src.raster_io import RasterGrid

# Moore neighborhood in fixed scan order: NW, N, NE, W, E, SW, S, SE.
DIRECTIONS: tuple[tuple[int, int], ...] = (
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
)
DIRECTION_INDEX: dict[tuple[int, int], int] = {d: i for i, d in enumerate(DIRECTIONS)}

PATH_COST_REL_TOL = 1e-9


class CellCoord(NamedTuple):
    x: int
    y: int


@dataclass(frozen=True, eq=False)
class WeightedGrid:
    """Per-cell traversal weights with a passability mask."""

    weight: np.ndarray
    passable: np.ndarray

    def __post_init__(self) -> None:
        weight = np.array(self.weight, dtype=np.float64)
        passable = np.array(self.passable, dtype=bool)
        if weight.ndim != 2 or weight.shape != passable.shape:
            raise ContractError(
                f"Weight {weight.shape} and passability {passable.shape} must be matching 2D arrays"
            )
        if weight.shape[0] < 1 or weight.shape[1] < 1:
            raise ContractError("Grid must have at least one cell")
        bad = passable & ~(np.isfinite(weight) & (weight > 0))
        if bad.any():
            y, x = np.argwhere(bad)[0]
            raise ContractError(f"Passable cell ({x},{y}) has non-positive weight {weight[y, x]}")
        weight[~passable] = 0.0
        weight.flags.writeable = False
        passable.flags.writeable = False
        object.__setattr__(self, "weight", weight)
        object.__setattr__(self, "passable", passable)

    @classmethod
    def from_arrays(cls, weight: Any, passable: Any | None = None) -> "WeightedGrid":
        """Build from weights; cells with weight <= 0 are impassable unless a mask is given."""
        weight = np.asarray(weight, dtype=np.float64)
        if passable is None:
            passable = weight > 0
        return cls(weight=weight, passable=passable)

    @classmethod
    def uniform(cls, width: int, height: int, weight: float = 1.0) -> "WeightedGrid":
        return cls.from_arrays(np.full((height, width), weight, dtype=np.float64))

    @property
    def width(self) -> int:
        return self.weight.shape[1]

    @property
    def height(self) -> int:
        return self.weight.shape[0]

    @property
    def n_cells(self) -> int:
        return self.weight.size

    def in_bounds(self, c: Sequence[int]) -> bool:
        return 0 <= c[0] < self.width and 0 <= c[1] < self.height

    def is_passable(self, c: Sequence[int]) -> bool:
        return self.in_bounds(c) and bool(self.passable[c[1], c[0]])

    def require_in_bounds(self, c: Sequence[int], what: str = "cell") -> None:
        if not self.in_bounds(c):
            raise GridBoundsError(c[0], c[1], self.width, self.height, what=what)

    def scaled(self, s: float) -> "WeightedGrid":
        if s <= 0:
            raise ParameterError(f"Scale must be positive, got {s}")
        return WeightedGrid(weight=self.weight * s, passable=self.passable)

    @cached_property
    def min_passable_weight(self) -> float:
        if not self.passable.any():
            return math.inf
        return float(self.weight[self.passable].min())

    @cached_property
    def weight_rows(self) -> list[list[float]]:
        return self.weight.tolist()

    @cached_property
    def passable_rows(self) -> list[list[bool]]:
        return self.passable.tolist()

    @cached_property
    def passable_indices(self) -> np.ndarray:
        """Flat ``y * width + x`` indices of passable cells, ascending."""
        return np.flatnonzero(self.passable.ravel())

    @cached_property
    def neighbor_table(self) -> list[tuple[tuple[int, int, int], ...]]:
        """Per flat index, the allowed moves as ``(nx, ny, squared_length)`` in scan order."""
        w, h = self.width, self.height
        rows = self.passable_rows
        table: list[tuple[tuple[int, int, int], ...]] = []
        for y in range(h):
            for x in range(w):
                moves = []
                for dx, dy in DIRECTIONS:
                    if _move_allowed(rows, w, h, x, y, dx, dy):
                        moves.append((x + dx, y + dy, dx * dx + dy * dy))
                table.append(tuple(moves))
        return table

    @cached_property
    def neighbor_index(self) -> np.ndarray:
        """``(n_cells, 8)`` flat neighbor indices by direction, ``-1`` for disallowed moves."""
        w = self.width
        index = np.full((self.n_cells, len(DIRECTIONS)), -1, dtype=np.int64)
        for i, moves in enumerate(self.neighbor_table):
            x, y = i % w, i // w
            for nx, ny, _ in moves:
                index[i, DIRECTION_INDEX[(nx - x, ny - y)]] = ny * w + nx
        return index


def _move_allowed(rows: list[list[bool]], w: int, h: int, x: int, y: int, dx: int, dy: int) -> bool:
    nx, ny = x + dx, y + dy
    if not (0 <= nx < w and 0 <= ny < h) or not rows[ny][nx]:
        return False
    if dx and dy:
        return rows[y][nx] and rows[ny][x]
    return True


@dataclass(frozen=True, eq=False)
class ElevationField:
    """Per-cell elevation in meters."""

    z: np.ndarray
    horizontal_resolution: float = 1.0

    def __post_init__(self) -> None:
        z = np.array(self.z, dtype=np.float64)
        if z.ndim != 2 or z.shape[0] < 1 or z.shape[1] < 1:
            raise ContractError(f"Elevation must be a non-empty 2D array, got shape {z.shape}")
        if not np.isfinite(z).all():
            raise ContractError("Elevation field contains non-finite values")
        if not self.horizontal_resolution > 0:
            raise ParameterError(
                f"Horizontal resolution must be positive, got {self.horizontal_resolution}"
            )
        z.flags.writeable = False
        object.__setattr__(self, "z", z)

    @classmethod
    def from_raster(
        cls,
        raster: RasterGrid,
        meters_per_level: float = 1.0,
        offset: float = 0.0,
        horizontal_resolution: float = 1.0,
        median_filter: bool = False,
    ) -> "ElevationField":
        """
        Convert DEM gray levels to meters.

        ``median_filter`` applies a 3x3 median to suppress point-cloud speckle
        before the field is frozen.
        """
        levels = raster.values.astype(np.float64)
        if median_filter:
            levels = ndimage.median_filter(levels, size=3, mode="nearest")
        return cls(
            z=levels * meters_per_level + offset, horizontal_resolution=horizontal_resolution
        )

    @classmethod
    def flat(
        cls, width: int, height: int, z: float = 0.0, horizontal_resolution: float = 1.0
    ) -> "ElevationField":
        return cls(z=np.full((height, width), z), horizontal_resolution=horizontal_resolution)

    @property
    def width(self) -> int:
        return self.z.shape[1]

    @property
    def height(self) -> int:
        return self.z.shape[0]

    @cached_property
    def z_rows(self) -> list[list[float]]:
        return self.z.tolist()


@dataclass(frozen=True)
class Cost3DParams:
    """Elevation terms of the 3D edge cost."""

    kappa: float = 1.0
    gradient_window: int = 3
    gradient_penalty: float = 0.0

    def __post_init__(self) -> None:
        if self.kappa < 0:
            raise ParameterError(f"kappa must be >= 0, got {self.kappa}")
        if self.gradient_window < 1 or self.gradient_window % 2 == 0:
            raise ParameterError(
                f"gradient_window must be odd and >= 1, got {self.gradient_window}"
            )
        if self.gradient_penalty < 0:
            raise ParameterError(f"gradient_penalty must be >= 0, got {self.gradient_penalty}")


@dataclass(frozen=True)
class Path:
    """Ordered cells from start to goal with their accumulated cost."""

    cells: tuple[CellCoord, ...]
    total_cost: float

    def __len__(self) -> int:
        return len(self.cells)

    @property
    def start(self) -> CellCoord:
        return self.cells[0]

    @property
    def goal(self) -> CellCoord:
        return self.cells[-1]


class SegmentResult(NamedTuple):
    blocked: bool
    cost: float
    cells: tuple[CellCoord, ...]


BLOCKED = SegmentResult(blocked=True, cost=math.inf, cells=())


def bresenham(a: Sequence[int], b: Sequence[int]) -> list[CellCoord]:
    """Rasterize the segment from ``a`` to ``b``; the walk always starts at ``a``."""
    x0, y0 = a
    x1, y1 = b
    dx, dy = abs(x1 - x0), -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    cells = [CellCoord(x0, y0)]
    while x0 != x1 or y0 != y1:
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x0 += sx
        if e2 <= dx:
            err += dx
            y0 += sy
        cells.append(CellCoord(x0, y0))
    return cells


class CostModel(Protocol):
    """Edge-cost metric shared by planners, the oracle and path costing."""

    grid: WeightedGrid

    def edge(self, u: Sequence[int], v: Sequence[int]) -> float: ...

    def goal_distance(self, c: Sequence[int], goal: Sequence[int]) -> float: ...

    def segment(self, a: Sequence[int], b: Sequence[int]) -> "SegmentResult": ...

    def sum_edges(self, cells: Sequence[Sequence[int]]) -> float: ...

    def path_cost(self, cells: Sequence[Sequence[int]]) -> float: ...


class _CostModelBase:
    grid: WeightedGrid

    def edge(self, u: Sequence[int], v: Sequence[int]) -> float:
        raise NotImplementedError

    def segment(self, a: Sequence[int], b: Sequence[int]) -> SegmentResult:
        """Cost of the straight Bresenham segment ``a -> b``, or ``BLOCKED``."""
        grid = self.grid
        grid.require_in_bounds(a, what="segment start")
        grid.require_in_bounds(b, what="segment end")
        cells = bresenham(a, b)
        rows = grid.passable_rows
        for x, y in cells:
            if not rows[y][x]:
                return BLOCKED
        cost = 0.0
        for u, v in zip(cells, cells[1:], strict=False):
            if u.x != v.x and u.y != v.y and not (rows[u.y][v.x] and rows[v.y][u.x]):
                return BLOCKED
            cost += self.edge(u, v)
        return SegmentResult(blocked=False, cost=cost, cells=tuple(cells))

    def sum_edges(self, cells: Sequence[Sequence[int]]) -> float:
        """Sum edge costs along ``cells`` without validating moves."""
        total = 0.0
        for u, v in zip(cells, cells[1:], strict=False):
            total += self.edge(u, v)
        return total

    def path_cost(self, cells: Sequence[Sequence[int]]) -> float:
        """Sum edge costs along ``cells``, checking every move first."""
        check_moves(self.grid, cells)
        return self.sum_edges(cells)


class CostModel2D(_CostModelBase):
    """Step length times the mean endpoint weight."""

    dimension = 2

    def __init__(self, grid: WeightedGrid):
        self.grid = grid
        self._w = grid.weight_rows

    def edge(self, u: Sequence[int], v: Sequence[int]) -> float:
        dx = v[0] - u[0]
        dy = v[1] - u[1]
        length = math.sqrt(dx * dx + dy * dy)
        return length * (self._w[u[1]][u[0]] + self._w[v[1]][v[0]]) * 0.5

    def goal_distance(self, c: Sequence[int], goal: Sequence[int]) -> float:
        dx = goal[0] - c[0]
        dy = goal[1] - c[1]
        return math.sqrt(dx * dx + dy * dy)


class CostModel3D(_CostModelBase):
    """
    Weighted 3D step length over a 2.5D lattice.

    The vertical component is ``kappa * dz / horizontal_resolution`` in pixel
    units. With ``gradient_penalty > 0`` each edge is multiplied by
    ``1 + penalty * avg_gradient(target)``. Gradients are cached per cell when
    ``memoize_gradient`` is set; disabling the cache changes timing only.
    """

    dimension = 3

    def __init__(
        self,
        grid: WeightedGrid,
        elev: ElevationField,
        params: Cost3DParams | None = None,
        memoize_gradient: bool = True,
    ):
        if (grid.width, grid.height) != (elev.width, elev.height):
            raise ContractError(
                f"Elevation {elev.width}x{elev.height} does not match "
                f"grid {grid.width}x{grid.height}"
            )
        self.grid = grid
        self.elev = elev
        self.params = params or Cost3DParams()
        self.memoize_gradient = memoize_gradient
        self._w = grid.weight_rows
        self._z = elev.z_rows
        self._vscale = self.params.kappa / elev.horizontal_resolution
        self._gradient_cache: dict[tuple[int, int], float] = {}

    def gradient(self, c: Sequence[int]) -> float:
        if not self.memoize_gradient:
            return avg_gradient(self.elev, c, self.params.gradient_window)
        key = (c[0], c[1])
        value = self._gradient_cache.get(key)
        if value is None:
            value = avg_gradient(self.elev, c, self.params.gradient_window)
            self._gradient_cache[key] = value
        return value

    def edge(self, u: Sequence[int], v: Sequence[int]) -> float:
        dx = v[0] - u[0]
        dy = v[1] - u[1]
        vz = self._vscale * (self._z[v[1]][v[0]] - self._z[u[1]][u[0]])
        length = math.sqrt(dx * dx + dy * dy + vz * vz)
        cost = length * (self._w[u[1]][u[0]] + self._w[v[1]][v[0]]) * 0.5
        if self.params.gradient_penalty:
            cost *= 1.0 + self.params.gradient_penalty * self.gradient(v)
        return cost

    def goal_distance(self, c: Sequence[int], goal: Sequence[int]) -> float:
        dx = goal[0] - c[0]
        dy = goal[1] - c[1]
        vz = self._vscale * (self._z[goal[1]][goal[0]] - self._z[c[1]][c[0]])
        return math.sqrt(dx * dx + dy * dy + vz * vz)


@dataclass(frozen=True)
class Scene3D:
    """A weighted grid paired with its elevation field and 3D cost terms."""

    grid: WeightedGrid
    elev: ElevationField
    cost: Cost3DParams = field(default_factory=Cost3DParams)

    def __post_init__(self) -> None:
        if (self.grid.width, self.grid.height) != (self.elev.width, self.elev.height):
            raise ContractError(
                f"Elevation {self.elev.width}x{self.elev.height} does not match "
                f"grid {self.grid.width}x{self.grid.height}"
            )

    def cost_model(self, memoize_gradient: bool = True) -> CostModel3D:
        return CostModel3D(self.grid, self.elev, self.cost, memoize_gradient=memoize_gradient)


def make_cost_model(
    grid: WeightedGrid,
    elev: ElevationField | None = None,
    params: Cost3DParams | None = None,
    memoize_gradient: bool = True,
) -> CostModel2D | CostModel3D:
    if elev is None:
        return CostModel2D(grid)
    return CostModel3D(grid, elev, params, memoize_gradient=memoize_gradient)


def from_raster_weights(
    raster: RasterGrid, impassable_value: int = 0, scale: float = 1.0
) -> WeightedGrid:
    """
    Interpret raster values as traversal weights.

    Cells equal to ``impassable_value`` are blocked; every other cell weighs
    ``value * scale``. Zero-valued cells are blocked as well because a passable
    cell must carry a positive weight.

    Raises:
        ParameterError: If scale is not positive
    """
    if not scale > 0:
        raise ParameterError(f"Weight scale must be positive, got {scale}")
    values = raster.values.astype(np.float64)
    passable = (raster.values != impassable_value) & (values > 0)
    return WeightedGrid(weight=np.where(passable, values * scale, 0.0), passable=passable)


def neighbors(c: Sequence[int], grid: WeightedGrid) -> list[CellCoord]:
    """Passable Moore neighbors of ``c`` in NW, N, NE, W, E, SW, S, SE order."""
    grid.require_in_bounds(c)
    moves = grid.neighbor_table[c[1] * grid.width + c[0]]
    return [CellCoord(nx, ny) for nx, ny, _ in moves]


def is_move_allowed(grid: WeightedGrid, u: Sequence[int], v: Sequence[int]) -> bool:
    if not (grid.in_bounds(u) and grid.in_bounds(v)):
        return False
    dx, dy = v[0] - u[0], v[1] - u[1]
    if (dx, dy) not in DIRECTION_INDEX or not grid.passable_rows[u[1]][u[0]]:
        return False
    return _move_allowed(grid.passable_rows, grid.width, grid.height, u[0], u[1], dx, dy)


def check_moves(grid: WeightedGrid, cells: Sequence[Sequence[int]]) -> None:
    """
    Raises:
        ContractError: Naming the first cell or consecutive pair that is not a legal move
    """
    if not cells:
        raise ContractError("Path has no cells")
    first = cells[0]
    if not grid.is_passable(first):
        raise ContractError(f"Path cell ({first[0]},{first[1]}) is not a passable in-bounds cell")
    for u, v in zip(cells, cells[1:], strict=False):
        if not is_move_allowed(grid, u, v):
            raise ContractError(
                f"Cells ({u[0]},{u[1]}) -> ({v[0]},{v[1]}) are not a legal neighbor move"
            )


def edge_cost_2d(grid: WeightedGrid, u: Sequence[int], v: Sequence[int]) -> float:
    """
    ``L(u, v) * (weight(u) + weight(v)) / 2`` with ``L`` 1 or sqrt(2).

    Raises:
        ContractError: If ``u`` and ``v`` are not passable neighbors
    """
    if not is_move_allowed(grid, u, v):
        raise ContractError(f"({u[0]},{u[1]}) and ({v[0]},{v[1]}) are not passable neighbors")
    return CostModel2D(grid).edge(u, v)


def edge_cost_3d(
    grid: WeightedGrid,
    elev: ElevationField,
    u: Sequence[int],
    v: Sequence[int],
    p: Cost3DParams | None = None,
) -> float:
    """
    Weighted 3D step cost between neighbors.

    Raises:
        ContractError: On dimension mismatch or if ``u``, ``v`` are not passable neighbors
    """
    model = CostModel3D(grid, elev, p)
    if not is_move_allowed(grid, u, v):
        raise ContractError(f"({u[0]},{u[1]}) and ({v[0]},{v[1]}) are not passable neighbors")
    return model.edge(u, v)


def avg_gradient(elev: ElevationField, c: Sequence[int], k: int) -> float:
    """
    Mean absolute slope from ``c`` to the other cells of the ``k x k`` window.

    Slopes are ``|dz| / (pixel distance * horizontal resolution)``; cells
    outside the field are skipped. ``k = 1`` has no neighbors and gives 0.
    """
    if k < 1 or k % 2 == 0:
        raise ParameterError(f"Gradient window must be odd and >= 1, got {k}")
    r = k // 2
    if r == 0:
        return 0.0
    z = elev.z_rows
    cx, cy = c[0], c[1]
    zc = z[cy][cx]
    res = elev.horizontal_resolution
    total = 0.0
    count = 0
    for ny in range(max(0, cy - r), min(elev.height, cy + r + 1)):
        row = z[ny]
        dy = ny - cy
        for nx in range(max(0, cx - r), min(elev.width, cx + r + 1)):
            dx = nx - cx
            if dx == 0 and dy == 0:
                continue
            total += abs(row[nx] - zc) / (math.sqrt(dx * dx + dy * dy) * res)
            count += 1
    return total / count if count else 0.0


def segment_cost(
    grid: WeightedGrid,
    a: Sequence[int],
    b: Sequence[int],
    elev: ElevationField | None = None,
    p: Cost3DParams | None = None,
) -> SegmentResult:
    """Weighted cost of the straight segment ``a -> b``; blockage is a result, not an error."""
    return make_cost_model(grid, elev, p).segment(a, b)


def path_cost(
    grid: WeightedGrid,
    path: Path | Sequence[Sequence[int]],
    elev: ElevationField | None = None,
    p: Cost3DParams | None = None,
) -> float:
    """
    Sum of edge costs along a path under the 2D or 3D model.

    Raises:
        ContractError: If consecutive cells are not a legal move
    """
    cells = path.cells if isinstance(path, Path) else path
    return make_cost_model(grid, elev, p).path_cost(cells)


def build_path(model: CostModel, cells: Iterable[Sequence[int]]) -> Path:
    """Freeze cells into a ``Path`` whose cost is recomputed under ``model``."""
    coords = tuple(CellCoord(int(c[0]), int(c[1])) for c in cells)
    return Path(cells=coords, total_cost=model.path_cost(coords))


def validate_path(model: CostModel, path: Path, rel_tol: float = PATH_COST_REL_TOL) -> None:
    """
    Check adjacency, passability and the stored cost of ``path``.

    Raises:
        ContractError: If any invariant fails
    """
    recomputed = model.path_cost(path.cells)
    if not math.isclose(recomputed, path.total_cost, rel_tol=rel_tol, abs_tol=1e-12):
        raise ContractError(
            f"Path total_cost {path.total_cost} differs from recomputed cost {recomputed}"
        )
