"""
Elevation-aware planners over a ``Scene3D``.

Dijkstra, A*, RRT* and NIACO run the same code as their flat counterparts
with a ``CostModel3D``, so a constant elevation field reproduces the 2D
results exactly. RRT-Connect lives here and is also offered on flat grids.
"""

import logging
from collections.abc import Sequence
from enum import StrEnum
from typing import NamedTuple

import numpy as np

from src.accounting import MemoryMeter
from src.exceptions import ParameterError
from src.grid_model import CellCoord, CostModel, CostModel2D, Scene3D, WeightedGrid, build_path
from src.planners2d import (
    HeuristicScale,
    NiacoParams,
    PlanOutcome,
    RrtParams,
    RrtTree,
    best_first_search,
    check_endpoints,
    resolve_heuristic_scale,
    rrt_steer,
    run_niaco,
    run_rrtstar,
    sample_free_cell,
)

logger = logging.getLogger(__name__)


def plan_dijkstra_3d(
    scene: Scene3D, start: Sequence[int], goal: Sequence[int], memoize_gradient: bool = True
) -> PlanOutcome:
    model = scene.cost_model(memoize_gradient)
    return best_first_search(model, start, goal, 0.0, planner="dijkstra3d")


def plan_astar_3d(
    scene: Scene3D,
    start: Sequence[int],
    goal: Sequence[int],
    heuristic_scale: HeuristicScale = "auto",
    memoize_gradient: bool = True,
) -> PlanOutcome:
    """
    A* with ``h = sqrt(dx^2 + dy^2 + (kappa * dz / res)^2) * heuristic_scale``.

    With ``gradient_penalty > 0`` every edge looks up the neighborhood
    gradient of its target, which is what makes this planner slow and its
    paths less smooth. Optimality is only claimed with the penalty off.
    """
    model = scene.cost_model(memoize_gradient)
    scale = resolve_heuristic_scale(scene.grid, heuristic_scale)
    return best_first_search(model, start, goal, scale, planner="astar3d")


def plan_rrtstar_3d(
    scene: Scene3D,
    start: Sequence[int],
    goal: Sequence[int],
    p: RrtParams | None = None,
    memoize_gradient: bool = True,
) -> PlanOutcome:
    return run_rrtstar(
        scene.cost_model(memoize_gradient), start, goal, p or RrtParams(), planner="rrtstar3d"
    )


def plan_niaco_3d(
    scene: Scene3D,
    start: Sequence[int],
    goal: Sequence[int],
    p: NiacoParams | None = None,
    memoize_gradient: bool = True,
) -> PlanOutcome:
    """NIACO whose heuristic and deposits use 3D edge costs and 3D goal distance."""
    return run_niaco(
        scene.cost_model(memoize_gradient), start, goal, p or NiacoParams(), planner="niaco3d"
    )


# --------------------------------------------------------------------------- RRT-Connect


class ExtendStatus(StrEnum):
    ADVANCED = "advanced"
    REACHED = "reached"
    TRAPPED = "trapped"


class ExtendResult(NamedTuple):
    status: ExtendStatus
    node: int
    inserted: int


def rrt_connect_extend(
    tree: RrtTree,
    target: Sequence[int],
    model: CostModel,
    delta: float,
    max_steps: int | None = None,
) -> ExtendResult:
    """
    Grow ``tree`` toward ``target`` in steps of at most ``delta``.

    Each step starts from the node currently nearest to the target. Growth
    stops at the target (REACHED), at a blocked segment, or after
    ``max_steps`` steps (ADVANCED). A blocked first step returns TRAPPED and
    leaves the tree untouched.

    Raises:
        ParameterError: If ``delta < 1``
    """
    if delta < 1:
        raise ParameterError(f"Steering step must be >= 1, got {delta}")
    target = CellCoord(int(target[0]), int(target[1]))
    inserted = steps = 0
    node = tree.nearest(target)
    while True:
        current = tree.cells[node]
        if current == target:
            return ExtendResult(ExtendStatus.REACHED, node, inserted)
        if max_steps is not None and steps >= max_steps:
            return ExtendResult(ExtendStatus.ADVANCED, node, inserted)
        x_new = rrt_steer(current, target, delta)
        seg = model.segment(current, x_new)
        if seg.blocked:
            status = ExtendStatus.TRAPPED if steps == 0 else ExtendStatus.ADVANCED
            return ExtendResult(status, node, inserted)
        tree.add(x_new, node, tree.cost[node] + seg.cost)
        inserted += 1
        steps += 1
        node = tree.nearest(target)


def run_rrtconnect(
    model: CostModel,
    start: Sequence[int],
    goal: Sequence[int],
    params: RrtParams,
    planner: str = "rrtconnect",
) -> PlanOutcome:
    """
    Bidirectional RRT-Connect.

    Each round one tree takes a single step toward a uniform free-cell
    sample and the other tree greedily connects toward the new node; the
    trees then swap roles. Both trees draw from one random stream.
    """
    grid = model.grid
    start, goal = check_endpoints(grid, start, goal)
    meter = MemoryMeter()
    capacity = min(params.max_iterations + 2, grid.n_cells + 1)
    start_tree = RrtTree(start, meter, capacity=capacity)
    goal_tree = RrtTree(goal, meter, capacity=capacity)
    if start == goal:
        return PlanOutcome(planner, build_path(model, [start]), meter)

    rng = np.random.default_rng(params.seed)
    tree_a, tree_b = start_tree, goal_tree
    rounds = 0
    for _ in range(params.max_iterations):
        rounds += 1
        x_rand = sample_free_cell(grid, rng)
        grown = rrt_connect_extend(tree_a, x_rand, model, params.step_delta, max_steps=1)
        if grown.status != ExtendStatus.TRAPPED:
            x_new = tree_a.cells[grown.node]
            joined = rrt_connect_extend(tree_b, x_new, model, params.step_delta)
            if joined.status == ExtendStatus.REACHED:
                if tree_a is start_tree:
                    s_node, g_node = grown.node, joined.node
                else:
                    s_node, g_node = joined.node, grown.node
                forward = start_tree.densify(s_node)
                backward = goal_tree.densify(g_node)[::-1]
                path = build_path(model, forward + backward[1:])
                logger.debug(
                    f"{planner}: connected after {rounds} rounds "
                    f"({len(start_tree)}+{len(goal_tree)} nodes)"
                )
                return PlanOutcome(
                    planner,
                    path,
                    meter,
                    expanded=len(start_tree) + len(goal_tree),
                    iterations=rounds,
                )
        tree_a, tree_b = tree_b, tree_a

    return PlanOutcome(
        planner,
        None,
        meter,
        expanded=len(start_tree) + len(goal_tree),
        iterations=rounds,
        reason=f"trees did not connect within {params.max_iterations} iterations",
    )


def plan_rrtconnect_3d(
    scene: Scene3D,
    start: Sequence[int],
    goal: Sequence[int],
    p: RrtParams | None = None,
    memoize_gradient: bool = True,
) -> PlanOutcome:
    return run_rrtconnect(
        scene.cost_model(memoize_gradient), start, goal, p or RrtParams(), planner="rrtconnect"
    )


def plan_rrtconnect_2d(
    grid: WeightedGrid, start: Sequence[int], goal: Sequence[int], p: RrtParams | None = None
) -> PlanOutcome:
    return run_rrtconnect(CostModel2D(grid), start, goal, p or RrtParams(), planner="rrtconnect2d")
