"""
Brute-force shortest-path references used only by the tests.

Both solvers are deliberately naive and share no queue or visit order with
the planners. They take any ``CostModel``, so the same code checks the flat
and the elevation-aware planners.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass

from src.exceptions import OracleGuardError
from src.grid_model import CellCoord, CostModel, CostModel2D, WeightedGrid

MAX_RELAXATION_SIDE = 64
MAX_ENUMERATION_SIDE = 4


@dataclass(frozen=True)
class OracleResult:
    cost: float
    cells: tuple[CellCoord, ...] = ()

    @property
    def reachable(self) -> bool:
        return math.isfinite(self.cost)


def _guard(grid: WeightedGrid, side: int, name: str) -> None:
    if grid.width > side or grid.height > side:
        raise OracleGuardError(
            f"{name} is limited to {side}x{side} grids, got {grid.width}x{grid.height}"
        )


def _endpoints_usable(grid: WeightedGrid, start: Sequence[int], goal: Sequence[int]) -> bool:
    grid.require_in_bounds(start, what="start")
    grid.require_in_bounds(goal, what="goal")
    return grid.is_passable(start) and grid.is_passable(goal)


def brute_force_shortest_path(
    grid: WeightedGrid,
    start: Sequence[int],
    goal: Sequence[int],
    model: CostModel | None = None,
) -> OracleResult:
    """
    Bellman-Ford over every directed lattice edge, swept in row-major order
    until no label changes.

    An impassable or unreachable endpoint yields ``cost = inf``.

    Raises:
        OracleGuardError: If either side exceeds 64 cells
    """
    _guard(grid, MAX_RELAXATION_SIDE, "brute_force_shortest_path")
    model = model or CostModel2D(grid)
    if not _endpoints_usable(grid, start, goal):
        return OracleResult(math.inf)

    width = grid.width
    edges: list[tuple[int, int, float]] = []
    for u, moves in enumerate(grid.neighbor_table):
        ux, uy = u % width, u // width
        for vx, vy, _ in moves:
            edges.append((u, vy * width + vx, model.edge((ux, uy), (vx, vy))))

    dist = [math.inf] * grid.n_cells
    parent = [-1] * grid.n_cells
    s = start[1] * width + start[0]
    g = goal[1] * width + goal[0]
    dist[s] = 0.0
    changed = True
    while changed:
        changed = False
        for u, v, w in edges:
            if dist[u] + w < dist[v]:
                dist[v] = dist[u] + w
                parent[v] = u
                changed = True

    if math.isinf(dist[g]):
        return OracleResult(math.inf)
    chain = [g]
    while chain[-1] != s:
        chain.append(parent[chain[-1]])
    cells = tuple(CellCoord(i % width, i // width) for i in reversed(chain))
    return OracleResult(dist[g], cells)


def enumerate_simple_paths(
    grid: WeightedGrid,
    start: Sequence[int],
    goal: Sequence[int],
    model: CostModel | None = None,
) -> float:
    """
    Minimum cost over every simple path, by exhaustive depth-first search.

    Branches already costing at least the best complete path are cut, which
    leaves the minimum unchanged for positive edge costs.

    Raises:
        OracleGuardError: If either side exceeds 4 cells
    """
    _guard(grid, MAX_ENUMERATION_SIDE, "enumerate_simple_paths")
    model = model or CostModel2D(grid)
    if not _endpoints_usable(grid, start, goal):
        return math.inf

    width = grid.width
    table = grid.neighbor_table
    goal_cell = (goal[0], goal[1])
    visited = {(start[0], start[1])}
    best = math.inf

    def walk(cell: tuple[int, int], cost: float) -> None:
        nonlocal best
        if cost >= best:
            return
        if cell == goal_cell:
            best = min(best, cost)
            return
        for nx, ny, _ in table[cell[1] * width + cell[0]]:
            nxt = (nx, ny)
            if nxt in visited:
                continue
            visited.add(nxt)
            walk(nxt, cost + model.edge(cell, nxt))
            visited.discard(nxt)

    walk((start[0], start[1]), 0.0)
    return best
