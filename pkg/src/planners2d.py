"""
Planners over weighted grids: Dijkstra, A*, RRT* and the improved ant colony (NIACO).

Every planner is written against a ``CostModel`` so the elevation-aware
variants in ``src.planners3d`` reuse the same code with ``CostModel3D``.
Each run returns a ``PlanOutcome``; failing to reach the goal is an outcome,
not an exception.
"""

import heapq
import logging
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any, Literal, NamedTuple

import numpy as np

from src.accounting import (
    CELL_BYTES,
    CLOSED_ENTRY_BYTES,
    FLOAT_BYTES,
    HEAP_ENTRY_BYTES,
    SEARCH_ENTRY_BYTES,
    TREE_NODE_BYTES,
    MemoryMeter,
    pheromone_table_bytes,
)
from src.config import build_params
from src.exceptions import ContractError, ParameterError, PlanningInputError
from src.grid_model import (
    DIRECTION_INDEX,
    DIRECTIONS,
    CellCoord,
    CostModel,
    CostModel2D,
    Path,
    SegmentResult,
    WeightedGrid,
    bresenham,
    build_path,
)

logger = logging.getLogger(__name__)

HeuristicScale = float | Literal["auto"]

_REWIRE_EPS = 1e-12


@dataclass
class PlanOutcome:
    """Result of one planner run."""

    planner: str
    path: Path | None
    meter: MemoryMeter
    expanded: int = 0
    iterations: int = 0
    trace: list[float] = field(default_factory=list)
    reason: str | None = None

    @property
    def found(self) -> bool:
        return self.path is not None

    @property
    def cost(self) -> float:
        return self.path.total_cost if self.path is not None else math.inf

    @property
    def accounted_memory(self) -> int:
        return self.meter.peak


class SearchNode(NamedTuple):
    """Best-first search label: ``f = g + h``."""

    cell: CellCoord
    g: float
    h: float
    f: float
    parent: CellCoord | None


def check_endpoints(
    grid: WeightedGrid, start: Sequence[int], goal: Sequence[int]
) -> tuple[CellCoord, CellCoord]:
    """
    Raises:
        PlanningInputError: If start or goal is out of bounds or impassable
    """
    cells = []
    for name, c in (("start", start), ("goal", goal)):
        cell = CellCoord(int(c[0]), int(c[1]))
        if not grid.in_bounds(cell):
            raise PlanningInputError(
                f"{name} ({cell.x},{cell.y}) outside {grid.width}x{grid.height} grid"
            )
        if not grid.passable_rows[cell.y][cell.x]:
            raise PlanningInputError(f"{name} ({cell.x},{cell.y}) is impassable")
        cells.append(cell)
    return cells[0], cells[1]


def resolve_heuristic_scale(grid: WeightedGrid, heuristic_scale: HeuristicScale) -> float:
    if heuristic_scale == "auto":
        return grid.min_passable_weight
    scale = float(heuristic_scale)
    if scale < 0:
        raise ParameterError(f"heuristic_scale must be >= 0 or 'auto', got {heuristic_scale}")
    return scale


def best_first_search(
    model: CostModel,
    start: Sequence[int],
    goal: Sequence[int],
    heuristic_scale: float = 0.0,
    planner: str = "dijkstra",
) -> PlanOutcome:
    """
    Priority-queue search shared by Dijkstra (scale 0) and A*.

    The queue pops the lowest ``(f, y, x)``. Cells may be reopened when a
    cheaper label arrives, which only happens with an inconsistent heuristic.
    """
    grid = model.grid
    start, goal = check_endpoints(grid, start, goal)
    meter = MemoryMeter()
    width = grid.width
    table = grid.neighbor_table
    edge = model.edge

    def h(c: CellCoord) -> float:
        if not heuristic_scale:
            return 0.0
        return model.goal_distance(c, goal) * heuristic_scale

    h0 = h(start)
    nodes: dict[tuple[int, int], SearchNode] = {start: SearchNode(start, 0.0, h0, 0.0 + h0, None)}
    heap: list[tuple[float, int, int, float]] = [(0.0 + h0, start.y, start.x, 0.0)]
    meter.allocate("nodes", SEARCH_ENTRY_BYTES)
    meter.allocate("open", HEAP_ENTRY_BYTES)
    closed: set[tuple[int, int]] = set()
    expanded = 0

    while heap:
        _, y, x, g = heapq.heappop(heap)
        meter.release("open", HEAP_ENTRY_BYTES)
        cell = (x, y)
        node = nodes[cell]
        if g > node.g or cell in closed:
            continue
        if cell == goal:
            cells = [node.cell]
            while node.parent is not None:
                node = nodes[node.parent]
                cells.append(node.cell)
            cells.reverse()
            return PlanOutcome(planner, build_path(model, cells), meter, expanded=expanded)

        closed.add(cell)
        meter.allocate("closed", CLOSED_ENTRY_BYTES)
        expanded += 1
        for nx, ny, _ in table[y * width + x]:
            nb = (nx, ny)
            ng = g + edge(cell, nb)
            old = nodes.get(nb)
            if old is not None and ng >= old.g:
                continue
            nh = old.h if old is not None else h(CellCoord(nx, ny))
            nodes[nb] = SearchNode(CellCoord(nx, ny), ng, nh, ng + nh, node.cell)
            if old is None:
                meter.allocate("nodes", SEARCH_ENTRY_BYTES)
            elif nb in closed:
                closed.discard(nb)
                meter.release("closed", CLOSED_ENTRY_BYTES)
            heapq.heappush(heap, (ng + nh, ny, nx, ng))
            meter.allocate("open", HEAP_ENTRY_BYTES)

    return PlanOutcome(
        planner, None, meter, expanded=expanded, reason="goal not reachable from start"
    )


def plan_dijkstra_2d(grid: WeightedGrid, start: Sequence[int], goal: Sequence[int]) -> PlanOutcome:
    """Minimum-cost path under ``edge_cost_2d``."""
    return best_first_search(CostModel2D(grid), start, goal, 0.0, planner="dijkstra")


def plan_astar_2d(
    grid: WeightedGrid,
    start: Sequence[int],
    goal: Sequence[int],
    heuristic_scale: HeuristicScale = "auto",
) -> PlanOutcome:
    """
    A* with ``h = euclidean_distance * heuristic_scale``.

    ``"auto"`` uses the smallest passable weight, which keeps the heuristic
    consistent; a scale of 1 is the plain Euclidean heuristic and may
    overestimate on maps with weights below 1.
    """
    scale = resolve_heuristic_scale(grid, heuristic_scale)
    return best_first_search(CostModel2D(grid), start, goal, scale, planner="astar")


# --------------------------------------------------------------------------- RRT*


@dataclass(frozen=True)
class RrtParams:
    max_iterations: int = 5000
    step_delta: int = 3
    neighborhood_gamma: float = 24.0
    goal_bias: float = 0.05
    goal_tolerance: float = 3.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.step_delta < 1:
            raise ParameterError(f"step_delta must be >= 1, got {self.step_delta}")
        if not 0.0 <= self.goal_bias <= 1.0:
            raise ParameterError(f"goal_bias must be in [0, 1], got {self.goal_bias}")
        if self.max_iterations < 0:
            raise ParameterError(f"max_iterations must be >= 0, got {self.max_iterations}")
        if self.neighborhood_gamma < 0 or self.goal_tolerance < 0:
            raise ParameterError("neighborhood_gamma and goal_tolerance must be >= 0")

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Any] | None) -> "RrtParams":
        return build_params(cls, mapping)


class ParentChoice(NamedTuple):
    index: int
    cost: float
    segment: SegmentResult


def rrt_steer(x_nearest: Sequence[int], x_rand: Sequence[int], delta: float) -> CellCoord:
    """Cell nearest to the point ``delta`` along ``x_nearest -> x_rand`` (rounded half-up)."""
    if delta < 1:
        raise ParameterError(f"Steering step must be >= 1, got {delta}")
    dx = x_rand[0] - x_nearest[0]
    dy = x_rand[1] - x_nearest[1]
    dist = math.hypot(dx, dy)
    if dist <= delta:
        return CellCoord(int(x_rand[0]), int(x_rand[1]))
    t = delta / dist
    return CellCoord(
        math.floor(x_nearest[0] + dx * t + 0.5),
        math.floor(x_nearest[1] + dy * t + 0.5),
    )


def rrt_choose_parent(
    candidates: Sequence[tuple[Sequence[int], float]],
    x_new: Sequence[int],
    model: CostModel,
) -> ParentChoice | None:
    """
    Cheapest ``cost_so_far + segment_cost(candidate, x_new)`` among candidates.

    Ties keep the earliest candidate; candidates with a blocked segment are
    skipped, and ``None`` means every segment was blocked.
    """
    best: ParentChoice | None = None
    for i, (cell, cost_so_far) in enumerate(candidates):
        seg = model.segment(cell, x_new)
        if seg.blocked:
            continue
        total = cost_so_far + seg.cost
        if best is None or total < best.cost:
            best = ParentChoice(i, total, seg)
    return best


class RrtTree:
    """Tree of lattice cells with numpy-backed nearest-neighbor queries."""

    def __init__(self, root: CellCoord, meter: MemoryMeter, capacity: int = 256):
        self.meter = meter
        self._xs = np.empty(max(capacity, 1), dtype=np.int64)
        self._ys = np.empty(max(capacity, 1), dtype=np.int64)
        self.cells: list[CellCoord] = []
        self.parent: list[int] = []
        self.cost: list[float] = []
        self.children: list[list[int]] = []
        self.add(root, -1, 0.0)

    def __len__(self) -> int:
        return len(self.cells)

    @property
    def root(self) -> CellCoord:
        return self.cells[0]

    def add(self, cell: CellCoord, parent: int, cost: float) -> int:
        node = len(self.cells)
        if node == self._xs.size:
            self._xs = np.concatenate([self._xs, np.empty_like(self._xs)])
            self._ys = np.concatenate([self._ys, np.empty_like(self._ys)])
        self._xs[node] = cell.x
        self._ys[node] = cell.y
        self.cells.append(cell)
        self.parent.append(parent)
        self.cost.append(cost)
        self.children.append([])
        if parent >= 0:
            self.children[parent].append(node)
        self.meter.allocate("tree", TREE_NODE_BYTES)
        return node

    def _sq_dist(self, cell: Sequence[int]) -> np.ndarray:
        n = len(self.cells)
        dx = self._xs[:n] - cell[0]
        dy = self._ys[:n] - cell[1]
        return dx * dx + dy * dy

    def nearest(self, cell: Sequence[int]) -> int:
        """Closest node; ties go to the earliest inserted."""
        return int(np.argmin(self._sq_dist(cell)))

    def near(self, cell: Sequence[int], radius: float) -> list[int]:
        """Nodes within ``radius``, in insertion order."""
        return np.flatnonzero(self._sq_dist(cell) <= radius * radius).tolist()

    def reparent(self, node: int, new_parent: int, new_cost: float) -> None:
        old_parent = self.parent[node]
        if old_parent >= 0:
            self.children[old_parent].remove(node)
        self.children[new_parent].append(node)
        self.parent[node] = new_parent
        delta = new_cost - self.cost[node]
        stack = [node]
        while stack:
            n = stack.pop()
            self.cost[n] += delta
            stack.extend(self.children[n])

    def subtree(self, node: int) -> set[int]:
        """``node`` and all of its descendants."""
        found = {node}
        stack = [node]
        while stack:
            kids = self.children[stack.pop()]
            found.update(kids)
            stack.extend(kids)
        return found

    def branch(self, node: int) -> list[int]:
        """Node ids from the root down to ``node``."""
        ids = []
        while node >= 0:
            ids.append(node)
            node = self.parent[node]
        ids.reverse()
        return ids

    def densify(self, node: int) -> list[CellCoord]:
        """Lattice cells from the root to ``node``, re-rasterizing each edge parent to child."""
        ids = self.branch(node)
        cells = [self.cells[ids[0]]]
        for parent, child in zip(ids, ids[1:], strict=False):
            cells.extend(bresenham(self.cells[parent], self.cells[child])[1:])
        return cells


def rewire_radius(params: RrtParams, n: int) -> float:
    """Shrinking-ball radius capped at four steps."""
    cap = 4.0 * params.step_delta
    if n < 2:
        return 0.0
    return min(params.neighborhood_gamma * math.sqrt(math.log(n) / n), cap)


def sample_free_cell(grid: WeightedGrid, rng: np.random.Generator) -> CellCoord:
    free = grid.passable_indices
    idx = int(free[rng.integers(free.size)])
    return CellCoord(idx % grid.width, idx // grid.width)


def run_rrtstar(
    model: CostModel,
    start: Sequence[int],
    goal: Sequence[int],
    params: RrtParams,
    planner: str = "rrtstar",
) -> PlanOutcome:
    """
    RRT* on the lattice: sample, steer, choose the cheapest parent, rewire.

    A sample that lands on a cell already in the tree re-runs parent
    selection and rewiring for that node, so refinement continues after the
    tree has covered the reachable cells.
    """
    grid = model.grid
    start, goal = check_endpoints(grid, start, goal)
    meter = MemoryMeter()
    tree = RrtTree(start, meter, capacity=min(params.max_iterations + 2, grid.n_cells + 1))
    if start == goal:
        return PlanOutcome(planner, build_path(model, [start]), meter)

    rng = np.random.default_rng(params.seed)
    goal_id: int | None = None
    trace: list[float] = []
    samples = 0

    for _ in range(params.max_iterations):
        samples += 1
        if rng.random() < params.goal_bias:
            x_rand = goal
        else:
            x_rand = sample_free_cell(grid, rng)

        nearest_id = tree.nearest(x_rand)
        x_nearest = tree.cells[nearest_id]
        if x_nearest == x_rand:
            rrt_refine(tree, model, nearest_id, params)
        else:
            x_new = rrt_steer(x_nearest, x_rand, params.step_delta)
            if not model.segment(x_nearest, x_new).blocked:
                new_id = _insert_and_rewire(tree, model, x_new, nearest_id, params)
                if goal_id is None:
                    goal_id = _try_goal(tree, model, new_id, goal, params.goal_tolerance)

        if goal_id is not None:
            trace.append(tree.cost[goal_id])

    if goal_id is None:
        return PlanOutcome(
            planner,
            None,
            meter,
            expanded=samples,
            iterations=samples,
            reason=f"no goal connection within {params.max_iterations} iterations",
        )
    path = build_path(model, tree.densify(goal_id))
    logger.debug(f"{planner}: {len(tree)} nodes, goal cost {tree.cost[goal_id]:.3f}")
    return PlanOutcome(planner, path, meter, expanded=samples, iterations=samples, trace=trace)


def _insert_and_rewire(
    tree: RrtTree, model: CostModel, x_new: CellCoord, nearest_id: int, params: RrtParams
) -> int:
    near_ids = tree.near(x_new, rewire_radius(params, len(tree)))
    candidate_ids = sorted({*near_ids, nearest_id})
    choice = rrt_choose_parent(
        [(tree.cells[i], tree.cost[i]) for i in candidate_ids], x_new, model
    )
    if choice is None:
        raise ContractError("nearest node segment was checked free but parent choice failed")
    new_id = tree.add(x_new, candidate_ids[choice.index], choice.cost)
    _rewire_through(tree, model, new_id, near_ids)
    return new_id


def rrt_refine(tree: RrtTree, model: CostModel, node: int, params: RrtParams) -> bool:
    """
    Re-run parent choice and rewiring for a node a sample landed on.

    Parent candidates exclude the node's own subtree. Returns True when the
    node or one of its neighbors got cheaper.
    """
    if node == 0:
        return False
    cell = tree.cells[node]
    near_ids = tree.near(cell, rewire_radius(params, len(tree)))
    subtree = tree.subtree(node)
    candidate_ids = [i for i in near_ids if i not in subtree]
    choice = rrt_choose_parent(
        [(tree.cells[i], tree.cost[i]) for i in candidate_ids], cell, model
    )
    improved = False
    if choice is not None and choice.cost < tree.cost[node] - _REWIRE_EPS:
        tree.reparent(node, candidate_ids[choice.index], choice.cost)
        improved = True
    return _rewire_through(tree, model, node, near_ids) or improved


def _rewire_through(tree: RrtTree, model: CostModel, node: int, near_ids: list[int]) -> bool:
    # Ancestors never pass the cost test since edge costs are positive.
    cell = tree.cells[node]
    rewired = False
    for i in near_ids:
        if i == node or i == tree.parent[node]:
            continue
        seg = model.segment(cell, tree.cells[i])
        candidate = tree.cost[node] + seg.cost
        if not seg.blocked and candidate < tree.cost[i] - _REWIRE_EPS:
            tree.reparent(i, node, candidate)
            rewired = True
    return rewired


def _try_goal(
    tree: RrtTree, model: CostModel, node: int, goal: CellCoord, tolerance: float
) -> int | None:
    cell = tree.cells[node]
    if cell == goal:
        return node
    if math.hypot(goal.x - cell.x, goal.y - cell.y) > tolerance:
        return None
    seg = model.segment(cell, goal)
    if seg.blocked:
        return None
    return tree.add(goal, node, tree.cost[node] + seg.cost)


def plan_rrtstar_2d(
    grid: WeightedGrid, start: Sequence[int], goal: Sequence[int], p: RrtParams | None = None
) -> PlanOutcome:
    return run_rrtstar(CostModel2D(grid), start, goal, p or RrtParams(), planner="rrtstar")


# --------------------------------------------------------------------------- NIACO


@dataclass(frozen=True)
class NiacoParams:
    n_ants: int = 32
    n_iterations: int = 200
    alpha: float = 1.0
    beta: float = 2.0
    q0_start: float = 0.9
    q0_end: float = 0.5
    rho_start: float = 0.1
    rho_end: float = 0.3
    deposit_Q: float = 100.0
    deposit_decay: float = 0.99
    tau0: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.q0_end <= self.q0_start <= 1.0:
            raise ParameterError(
                f"Require 0 <= q0_end <= q0_start <= 1, got {self.q0_end}, {self.q0_start}"
            )
        for name in ("rho_start", "rho_end"):
            if not 0.0 < getattr(self, name) < 1.0:
                raise ParameterError(f"{name} must be in (0, 1), got {getattr(self, name)}")
        if not self.tau0 > 0:
            raise ParameterError(f"tau0 must be > 0, got {self.tau0}")
        if not 0.0 < self.deposit_decay <= 1.0:
            raise ParameterError(f"deposit_decay must be in (0, 1], got {self.deposit_decay}")
        if self.n_ants < 1 or self.n_iterations < 1:
            raise ParameterError("n_ants and n_iterations must be >= 1")
        if self.deposit_Q <= 0:
            raise ParameterError(f"deposit_Q must be > 0, got {self.deposit_Q}")

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Any] | None) -> "NiacoParams":
        return build_params(cls, mapping)

    @property
    def tau_min(self) -> float:
        return self.tau0 * 1e-3

    @property
    def tau_max(self) -> float:
        return self.tau0 * 1e3

    def _progress(self, t: int) -> float:
        return t / (self.n_iterations - 1) if self.n_iterations > 1 else 0.0

    def q0(self, t: int) -> float:
        return self.q0_start + (self.q0_end - self.q0_start) * self._progress(t)

    def rho(self, t: int) -> float:
        return self.rho_start + (self.rho_end - self.rho_start) * self._progress(t)


def initial_pheromone(grid: WeightedGrid, p: NiacoParams) -> np.ndarray:
    """``(height, width, 8)`` table filled with ``tau0``, one entry per outgoing direction."""
    return np.full((grid.height, grid.width, len(DIRECTIONS)), p.tau0, dtype=np.float64)


def _eta(
    model: CostModel, current: Sequence[int], j: Sequence[int], goal: Sequence[int], min_w: float
) -> float:
    return 1.0 / (model.edge(current, j) + model.goal_distance(j, goal) * min_w)


def transition_weights(
    current: Sequence[int],
    allowed: Sequence[Sequence[int]],
    tau: np.ndarray,
    model: CostModel,
    goal: Sequence[int],
    alpha: float,
    beta: float,
) -> np.ndarray:
    """Attractiveness ``tau^alpha * eta^beta`` of each allowed move."""
    min_w = model.grid.min_passable_weight
    cx, cy = current[0], current[1]
    return np.array(
        [
            tau[cy, cx, DIRECTION_INDEX[(j[0] - cx, j[1] - cy)]] ** alpha
            * _eta(model, current, j, goal, min_w) ** beta
            for j in allowed
        ],
        dtype=np.float64,
    )


def transition_probabilities(weights: np.ndarray) -> np.ndarray:
    """Attractiveness normalized into the proportional-draw distribution."""
    return weights / weights.sum()


def _pick(weights: np.ndarray, q0_t: float, rng: np.random.Generator) -> int:
    if rng.random() < q0_t:
        return int(np.argmax(weights))
    cumulative = np.cumsum(transition_probabilities(weights))
    k = int(np.searchsorted(cumulative, rng.random(), side="right"))
    return min(k, weights.size - 1)


def niaco_transition(
    current: Sequence[int],
    allowed: Sequence[Sequence[int]],
    tau: np.ndarray,
    model: CostModel,
    goal: Sequence[int],
    q0_t: float,
    rng: np.random.Generator,
    alpha: float = 1.0,
    beta: float = 2.0,
) -> CellCoord:
    """
    Pseudo-random proportional move choice.

    With probability ``q0_t`` the most attractive move is taken (first in
    scan order on ties); otherwise a move is drawn proportionally to
    attractiveness.
    """
    if not allowed:
        raise ContractError("niaco_transition needs at least one allowed move")
    weights = transition_weights(current, allowed, tau, model, goal, alpha, beta)
    j = allowed[_pick(weights, q0_t, rng)]
    return CellCoord(int(j[0]), int(j[1]))


def niaco_update_pheromone(
    tau: np.ndarray, ant_paths: Sequence[Path], t: int, p: NiacoParams
) -> np.ndarray:
    """
    Evaporate at ``rho(t)`` and deposit ``Q / cost * decay^t`` along each goal-reaching path.

    Returns a new table clamped to ``[tau0 * 1e-3, tau0 * 1e3]``.
    """
    if not 0 <= t < p.n_iterations:
        raise ContractError(f"Iteration {t} outside 0..{p.n_iterations - 1}")
    out = tau * (1.0 - p.rho(t))
    decay = p.deposit_decay**t
    for path in ant_paths:
        if not math.isfinite(path.total_cost) or path.total_cost <= 0:
            continue
        amount = p.deposit_Q / path.total_cost * decay
        for u, v in zip(path.cells, path.cells[1:], strict=False):
            out[u[1], u[0], DIRECTION_INDEX[(v[0] - u[0], v[1] - u[1])]] += amount
    np.clip(out, p.tau_min, p.tau_max, out=out)
    return out


def run_niaco(
    model: CostModel,
    start: Sequence[int],
    goal: Sequence[int],
    p: NiacoParams,
    planner: str = "niaco",
) -> PlanOutcome:
    """
    Ant colony search with a decreasing greediness ``q0`` and rising evaporation.

    Ants never revisit a cell; an ant with no unvisited neighbor is abandoned.
    All ants of an iteration read the same pheromone snapshot, which is updated
    once they are done.
    """
    grid = model.grid
    start, goal = check_endpoints(grid, start, goal)
    meter = MemoryMeter()
    if start == goal:
        meter.allocate("tabu", CELL_BYTES)
        return PlanOutcome(planner, build_path(model, [start]), meter)

    width, n = grid.width, grid.n_cells
    nbr = grid.neighbor_index
    min_w = grid.min_passable_weight
    eta_beta = np.zeros((n, len(DIRECTIONS)), dtype=np.float64)
    for idx, moves in enumerate(grid.neighbor_table):
        u = (idx % width, idx // width)
        for nx, ny, _ in moves:
            d = DIRECTION_INDEX[(nx - u[0], ny - u[1])]
            eta_beta[idx, d] = _eta(model, u, (nx, ny), goal, min_w) ** p.beta
    meter.allocate("heuristic", n * len(DIRECTIONS) * FLOAT_BYTES)

    tau = initial_pheromone(grid, p)
    meter.allocate("pheromone", pheromone_table_bytes(n))

    rng = np.random.default_rng(p.seed)
    s_idx, g_idx = start.y * width + start.x, goal.y * width + goal.x
    best: Path | None = None
    trace: list[float] = []
    steps = 0

    for t in range(p.n_iterations):
        q0_t = p.q0(t)
        tau_flat = tau.reshape(n, len(DIRECTIONS))
        arrivals: list[Path] = []
        for _ in range(p.n_ants):
            visited = np.zeros(n, dtype=bool)
            visited[s_idx] = True
            route = [s_idx]
            meter.allocate("tabu", CELL_BYTES)
            cur = s_idx
            while cur != g_idx:
                cand = nbr[cur]
                ok = cand >= 0
                ok[ok] = ~visited[cand[ok]]
                dirs = np.flatnonzero(ok)
                if dirs.size == 0:
                    break
                weights = tau_flat[cur, dirs] ** p.alpha * eta_beta[cur, dirs]
                cur = int(cand[dirs[_pick(weights, q0_t, rng)]])
                visited[cur] = True
                route.append(cur)
                meter.allocate("tabu", CELL_BYTES)
                steps += 1
            if cur == g_idx:
                cells = tuple(CellCoord(i % width, i // width) for i in route)
                arrivals.append(Path(cells=cells, total_cost=model.sum_edges(cells)))

        for ant_path in arrivals:
            if best is None or ant_path.total_cost < best.total_cost:
                best = ant_path
        tau = niaco_update_pheromone(tau, arrivals, t, p)
        meter.release_all("tabu")
        if best is not None:
            trace.append(best.total_cost)
            logger.debug(
                f"{planner} iteration {t}: {len(arrivals)} arrivals, best {best.total_cost:.3f}"
            )

    if best is None:
        return PlanOutcome(
            planner,
            None,
            meter,
            expanded=steps,
            iterations=p.n_iterations,
            reason=f"no ant reached the goal in {p.n_iterations} iterations",
        )
    return PlanOutcome(
        planner,
        build_path(model, best.cells),
        meter,
        expanded=steps,
        iterations=p.n_iterations,
        trace=trace,
    )


def plan_niaco_2d(
    grid: WeightedGrid, start: Sequence[int], goal: Sequence[int], p: NiacoParams | None = None
) -> PlanOutcome:
    return run_niaco(CostModel2D(grid), start, goal, p or NiacoParams(), planner="niaco")
