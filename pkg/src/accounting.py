"""
Logical memory accounting for planner-owned data structures.

Planners report the bytes their own bookkeeping would occupy at fixed
per-entry sizes instead of process RSS, so the numbers are identical across
machines and reruns. The shared map is never counted.
"""

from collections import defaultdict
from dataclasses import dataclass, field

# Per-entry logical sizes in bytes.
CELL_BYTES = 8  # (x, y) as two int32
FLOAT_BYTES = 8
INDEX_BYTES = 8

SEARCH_ENTRY_BYTES = CELL_BYTES + FLOAT_BYTES + CELL_BYTES  # cell, g, parent
HEAP_ENTRY_BYTES = FLOAT_BYTES + CELL_BYTES + FLOAT_BYTES  # f, cell, g
CLOSED_ENTRY_BYTES = CELL_BYTES
TREE_NODE_BYTES = CELL_BYTES + FLOAT_BYTES + INDEX_BYTES  # cell, cost, parent id
PHEROMONE_ENTRY_BYTES = FLOAT_BYTES
DIRECTIONS_PER_CELL = 8

# Bytes held when a run ends before its first expansion / sample / ant.
START_BOOKKEEPING_BYTES = {
    "dijkstra": SEARCH_ENTRY_BYTES + HEAP_ENTRY_BYTES,
    "astar": SEARCH_ENTRY_BYTES + HEAP_ENTRY_BYTES,
    "rrtstar": TREE_NODE_BYTES,
    "rrtconnect": 2 * TREE_NODE_BYTES,
    "niaco": CELL_BYTES,
}


def pheromone_table_bytes(n_cells: int) -> int:
    """Bytes of a pheromone table with one entry per cell and direction."""
    return n_cells * DIRECTIONS_PER_CELL * PHEROMONE_ENTRY_BYTES


@dataclass
class MemoryMeter:
    """Tracks live logical bytes per component and the overall peak."""

    current: int = 0
    peak: int = 0
    by_component: dict[str, int] = field(default_factory=lambda: defaultdict(int))
    component_peak: dict[str, int] = field(default_factory=lambda: defaultdict(int))

    def allocate(self, component: str, nbytes: int) -> None:
        self.current += nbytes
        self.by_component[component] += nbytes
        if self.by_component[component] > self.component_peak[component]:
            self.component_peak[component] = self.by_component[component]
        if self.current > self.peak:
            self.peak = self.current

    def release(self, component: str, nbytes: int) -> None:
        self.current -= nbytes
        self.by_component[component] -= nbytes

    def release_all(self, component: str) -> None:
        self.release(component, self.by_component[component])
