# qaoatransfer/maxcut.py
# GNU General Public License v3.0
# Copyright (C) 2025-2026 Kris Kirby, KE4AHR
#
# Classical MaxCut reference values
# - Brute force over 2^(N-1) assignments (node 0 fixed on side 0) up to 26 nodes
# - Branch-and-bound with greedy degree ordering up to 40 nodes
# - Multistart 1-flip local search for anything larger (lower bound only)

import logging
import time
from dataclasses import dataclass
from typing import Any, Dict, NamedTuple, Sequence, Tuple

import networkx as nx
import numpy as np

from qaoatransfer.errors import CapacityError, MetricError
from qaoatransfer.graph import Graph
from qaoatransfer.seeding import make_rng

logger = logging.getLogger('MaxCut')

BRUTE_FORCE_CAP = 26
BRANCH_AND_BOUND_CAP = 40
CHUNK_BITS = 20
DEFAULT_EFFORT = 100


@dataclass(frozen=True)
class CutResult:
    value: int
    assignment: Tuple[int, ...]
    exact: bool

    @property
    def bitstring(self) -> str:
        """Node 0 first."""
        return "".join(str(b) for b in self.assignment)

    def to_dict(self) -> Dict[str, Any]:
        return {"value": self.value, "exact": self.exact, "assignment": self.bitstring}


class ApproximationRatio(NamedTuple):
    value: float
    # True when the denominator is only a heuristic lower bound on the optimum
    uncertain: bool


def cut_value(g: Graph, assignment: Sequence[int]) -> int:
    if len(assignment) != g.node_count:
        raise ValueError(f"Assignment length {len(assignment)} != node count {g.node_count}")
    return sum(1 for u, v in g.edges if assignment[u] != assignment[v])


def _adjacency(g: Graph) -> np.ndarray:
    return nx.to_numpy_array(g.to_networkx(), nodelist=range(g.node_count), dtype=np.int64)


def _brute_force(g: Graph) -> CutResult:
    n = g.node_count
    if n <= 1 or not g.num_edges:
        return CutResult(0, (0,) * n, True)

    # node k <-> bit n-1-k, so a smaller index is a lexicographically smaller assignment
    total = 1 << (n - 1)
    chunk = 1 << min(CHUNK_BITS, n - 1)
    best_value, best_index = -1, 0
    for start in range(0, total, chunk):
        index = np.arange(start, min(start + chunk, total), dtype=np.int64)
        cuts = np.zeros(index.size, dtype=np.int64)
        for u, v in g.edges:
            cuts += ((index >> (n - 1 - u)) ^ (index >> (n - 1 - v))) & 1
        k = int(np.argmax(cuts))
        if cuts[k] > best_value:
            best_value, best_index = int(cuts[k]), int(index[k])

    assignment = tuple((best_index >> (n - 1 - k)) & 1 for k in range(n))
    return CutResult(best_value, assignment, True)


def _branch_and_bound(g: Graph, incumbent: CutResult) -> CutResult:
    """
    Depth-first search over vertices in decreasing-degree order.
    Bound: current cut + edges with both ends open + for each open vertex
    the larger of its assigned neighbours on either side.
    """
    n = g.node_count
    order = sorted(range(n), key=lambda v: (-g.degree(v), v))
    neighbors = [sorted(g.neighbors(v)) for v in range(n)]
    side = [-1] * n
    counts = [[0, 0] for _ in range(n)]
    state = {"best": incumbent.value, "assignment": list(incumbent.assignment),
             "open_edges": g.num_edges, "nodes": 0}

    def bound(depth: int, current: int) -> int:
        extra = sum(max(counts[v]) for v in order[depth:])
        return current + state["open_edges"] + extra

    def assign(v: int, s: int) -> int:
        side[v] = s
        released = 0
        for w in neighbors[v]:
            counts[w][s] += 1
            if side[w] < 0:
                released += 1
        state["open_edges"] -= released
        return released

    def unassign(v: int, s: int, released: int):
        for w in neighbors[v]:
            counts[w][s] -= 1
        state["open_edges"] += released
        side[v] = -1

    def search(depth: int, current: int):
        state["nodes"] += 1
        if depth == n:
            if current > state["best"]:
                state["best"] = current
                state["assignment"] = list(side)
            return
        if bound(depth, current) <= state["best"]:
            return
        v = order[depth]
        # try the side that cuts more assigned neighbours first
        sides = (0,) if depth == 0 else ((0, 1) if counts[v][1] >= counts[v][0] else (1, 0))
        for s in sides:
            gain = counts[v][1 - s]
            released = assign(v, s)
            search(depth + 1, current + gain)
            unassign(v, s, released)

    search(0, 0)
    assignment = _normalize(state["assignment"])
    logger.debug(f"[MaxCut] Branch-and-bound closed after {state['nodes']} nodes")
    return CutResult(state["best"], assignment, True)


def _normalize(assignment: Sequence[int]) -> Tuple[int, ...]:
    if assignment and assignment[0] == 1:
        return tuple(1 - int(b) for b in assignment)
    return tuple(int(b) for b in assignment)


def solve_exact(g: Graph, brute_force_cap: int = BRUTE_FORCE_CAP,
                branch_and_bound_cap: int = BRANCH_AND_BOUND_CAP) -> CutResult:
    n = g.node_count
    start_time = time.time()
    if n <= brute_force_cap:
        result = _brute_force(g)
        method = "brute force"
    elif n <= branch_and_bound_cap:
        result = _branch_and_bound(g, solve_heuristic(g, seed=0))
        method = "branch-and-bound"
    else:
        raise CapacityError(f"{n} nodes exceed the exact MaxCut cap of {branch_and_bound_cap}; "
                            f"use solve_heuristic")
    logger.debug(f"[MaxCut] Exact cut {result.value} by {method}",
                 extra={"nodes": n, "duration_seconds": round(time.time() - start_time, 3)})
    return result


def _greedy_spins(g: Graph) -> np.ndarray:
    spins = np.zeros(g.node_count, dtype=np.int64)
    for v in sorted(range(g.node_count), key=lambda v: (-g.degree(v), v)):
        placed = [spins[w] for w in g.neighbors(v) if spins[w] != 0]
        # join the side opposite to the majority of placed neighbours
        spins[v] = -1 if sum(placed) > 0 else 1
    return spins


def _local_search(adjacency: np.ndarray, spins: np.ndarray) -> np.ndarray:
    """Steepest-ascent single flips until no flip improves the cut."""
    field = adjacency @ spins
    while True:
        gain = spins * field
        k = int(np.argmax(gain))
        if gain[k] <= 0:
            return spins
        spins[k] = -spins[k]
        field += 2 * spins[k] * adjacency[:, k]


def solve_heuristic(g: Graph, seed: int = 0, effort: int = DEFAULT_EFFORT) -> CutResult:
    n = g.node_count
    if n == 0 or not g.num_edges:
        return CutResult(0, (0,) * n, False)
    if effort < 1:
        raise ValueError(f"effort must be >= 1, got {effort}")

    adjacency = _adjacency(g)
    rng = make_rng(seed)
    best_value, best_spins = -1, None
    for restart in range(effort):
        if restart == 0:
            spins = _greedy_spins(g)
        else:
            spins = rng.choice(np.array([-1, 1], dtype=np.int64), size=n)
        spins = _local_search(adjacency, spins)
        value = int((g.num_edges - int(spins @ adjacency @ spins) // 2) // 2)
        if value > best_value:
            best_value, best_spins = value, spins.copy()

    assignment = _normalize([int(s < 0) for s in best_spins])
    return CutResult(best_value, assignment, False)


def approximation_ratio(qaoa_energy: float, cut: CutResult) -> ApproximationRatio:
    if cut.value <= 0:
        raise MetricError("Approximation ratio undefined for a zero cut")
    return ApproximationRatio(qaoa_energy / cut.value, not cut.exact)


def reference_cut(g: Graph, seed: int = 0, effort: int = DEFAULT_EFFORT) -> CutResult:
    """Exact cut where a solver can close it, heuristic lower bound otherwise."""
    if g.node_count <= BRANCH_AND_BOUND_CAP:
        return solve_exact(g)
    return solve_heuristic(g, seed, effort)
