# qaoatransfer/graph.py
# GNU General Public License v3.0
# Copyright (C) 2025-2026 Kris Kirby, KE4AHR
#
# Graph core: immutable simple graphs, parity-controlled random generation,
# p=1 lightcone classes (i, j, f), census and catalog
# Text graph format: "N M" header, then M lines "u v" (u < v), '#' comments

import hashlib
import itertools
import logging
from collections import Counter
from typing import Dict, FrozenSet, Iterable, Iterator, List, NamedTuple, Optional, Tuple

import networkx as nx
import numpy as np

from qaoatransfer.errors import InfeasibleError
from qaoatransfer.seeding import make_rng

logger = logging.getLogger('GraphCore')

Edge = Tuple[int, int]


class Graph:
    """
    Undirected simple graph on nodes 0..N-1.
    Edges are stored canonically (u < v, sorted); instances are immutable.
    """
    __slots__ = ("_node_count", "_edges", "_adjacency")

    def __init__(self, node_count: int, edges: Iterable[Tuple[int, int]]):
        if node_count < 1:
            raise ValueError(f"node_count must be positive, got {node_count}")
        canonical = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"Self-loop on node {u}")
            if not (0 <= u < node_count and 0 <= v < node_count):
                raise ValueError(f"Edge ({u}, {v}) outside node range [0, {node_count})")
            edge = (u, v) if u < v else (v, u)
            if edge in canonical:
                raise ValueError(f"Duplicate edge {edge}")
            canonical.add(edge)

        adjacency: List[set] = [set() for _ in range(node_count)]
        for u, v in canonical:
            adjacency[u].add(v)
            adjacency[v].add(u)

        self._node_count = node_count
        self._edges: Tuple[Edge, ...] = tuple(sorted(canonical))
        self._adjacency: Tuple[FrozenSet[int], ...] = tuple(frozenset(a) for a in adjacency)

    @property
    def node_count(self) -> int:
        return self._node_count

    @property
    def edges(self) -> Tuple[Edge, ...]:
        return self._edges

    @property
    def num_edges(self) -> int:
        return len(self._edges)

    def neighbors(self, v: int) -> FrozenSet[int]:
        return self._adjacency[v]

    def degree(self, v: int) -> int:
        return len(self._adjacency[v])

    def degrees(self) -> List[int]:
        return [len(a) for a in self._adjacency]

    def has_edge(self, u: int, v: int) -> bool:
        return 0 <= u < self._node_count and v in self._adjacency[u]

    def max_degree(self) -> int:
        return max(self.degrees())

    def is_connected(self) -> bool:
        return nx.is_connected(self.to_networkx())

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self._node_count))
        g.add_edges_from(self._edges)
        return g

    @classmethod
    def from_networkx(cls, g: nx.Graph) -> "Graph":
        """Relabel nodes 0..N-1 in sorted order."""
        mapping = {node: k for k, node in enumerate(sorted(g.nodes()))}
        return cls(len(mapping), ((mapping[u], mapping[v]) for u, v in g.edges()))

    def disjoint_union(self, other: "Graph") -> "Graph":
        offset = self._node_count
        shifted = ((u + offset, v + offset) for u, v in other.edges)
        return Graph(offset + other.node_count, itertools.chain(self._edges, shifted))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._node_count == other._node_count and self._edges == other._edges

    def __hash__(self) -> int:
        return hash((self._node_count, self._edges))

    def __repr__(self) -> str:
        return f"Graph(N={self._node_count}, M={len(self._edges)})"


class DegreeSequence:
    """Degree sequence with graphical (Erdős–Gallai) validation."""

    def __init__(self, degrees: Iterable[int]):
        self.degrees: Tuple[int, ...] = tuple(int(d) for d in degrees)
        if any(d < 0 for d in self.degrees):
            raise ValueError("Degrees must be non-negative")

    def __len__(self) -> int:
        return len(self.degrees)

    @property
    def even_count(self) -> int:
        return sum(1 for d in self.degrees if d % 2 == 0)

    def is_graphical(self) -> bool:
        if sum(self.degrees) % 2:
            return False
        return nx.is_valid_degree_sequence_erdos_gallai(list(self.degrees))

    def sorted_key(self) -> Tuple[int, ...]:
        return tuple(sorted(self.degrees, reverse=True))


class LightconeClass(NamedTuple):
    """
    Isomorphism class of a p=1 edge neighborhood.
    i <= j are the central node degrees, f the number of shared neighbors.
    """
    i: int
    j: int
    f: int

    @classmethod
    def of(cls, i: int, j: int, f: int) -> "LightconeClass":
        """Canonicalize (i <= j) and validate."""
        if i > j:
            i, j = j, i
        if i < 1:
            raise ValueError(f"Central degrees must be >= 1, got ({i}, {j})")
        if not 0 <= f <= i - 1:
            raise ValueError(f"Triangle count f={f} outside [0, {i - 1}]")
        return cls(i, j, f)

    @classmethod
    def parse(cls, label: str) -> "LightconeClass":
        """Parse a "(i,j,f)" label."""
        parts = label.strip().strip("()").split(",")
        if len(parts) != 3:
            raise ValueError(f"Malformed lightcone label: {label!r}")
        return cls.of(*(int(p) for p in parts))

    @property
    def label(self) -> str:
        return f"({self.i},{self.j},{self.f})"

    @property
    def node_count(self) -> int:
        return self.i + self.j - self.f

    @property
    def edge_count(self) -> int:
        """Edges incident to the central pair (the terms U_C acts with)."""
        return self.i + self.j - 1

    @property
    def parity_kind(self) -> str:
        if self.i % 2 == 0 and self.j % 2 == 0:
            return "even"
        if self.i % 2 == 1 and self.j % 2 == 1:
            return "odd"
        return "mixed"


class LightconeCensus:
    """Per-class edge counts of a graph; total equals |E|."""

    def __init__(self, counts: Optional[Dict[LightconeClass, int]] = None):
        self.counts: Dict[LightconeClass, int] = dict(sorted((counts or {}).items()))

    def total(self) -> int:
        return sum(self.counts.values())

    def classes(self) -> List[LightconeClass]:
        return list(self.counts)

    def items(self) -> Iterator[Tuple[LightconeClass, int]]:
        return iter(self.counts.items())

    def __getitem__(self, c: LightconeClass) -> int:
        return self.counts.get(c, 0)

    def __len__(self) -> int:
        return len(self.counts)

    def __eq__(self, other) -> bool:
        if isinstance(other, LightconeCensus):
            return self.counts == other.counts
        if isinstance(other, dict):
            return self.counts == other
        return NotImplemented

    def __repr__(self) -> str:
        body = ", ".join(f"{c.label}: {n}" for c, n in self.counts.items())
        return f"LightconeCensus({{{body}}})"


def parity(g: Graph) -> float:
    """Fraction of nodes with even degree."""
    even = sum(1 for d in g.degrees() if d % 2 == 0)
    return even / g.node_count


def lightcone_class(g: Graph, edge: Tuple[int, int]) -> LightconeClass:
    u, v = edge
    if not g.has_edge(u, v):
        raise ValueError(f"Edge ({u}, {v}) not in graph")
    shared = len(g.neighbors(u) & g.neighbors(v))
    return LightconeClass.of(g.degree(u), g.degree(v), shared)


def census(g: Graph) -> LightconeCensus:
    return LightconeCensus(Counter(lightcone_class(g, e) for e in g.edges))


def catalog(d_max: int, regular_only: bool = False) -> List[LightconeClass]:
    """All p=1 lightcone classes with central degrees <= d_max, sorted by (i, j, f)."""
    if d_max < 1:
        raise ValueError(f"d_max must be >= 1, got {d_max}")
    if regular_only:
        return [LightconeClass(d, d, f) for d in range(2, d_max + 1) for f in range(d)]
    return [
        LightconeClass(i, j, f)
        for i in range(1, d_max + 1)
        for j in range(i, d_max + 1)
        for f in range(i)
    ]


def realize_lightcone(c: LightconeClass) -> Graph:
    """
    Canonical representative: central edge (0, 1), shared neighbors next,
    then the remaining leaves of node 0, then those of node 1.
    """
    c = LightconeClass.of(*c)
    edges = [(0, 1)]
    node = 2
    for _ in range(c.f):
        edges.append((0, node))
        edges.append((1, node))
        node += 1
    for _ in range(c.i - 1 - c.f):
        edges.append((0, node))
        node += 1
    for _ in range(c.j - 1 - c.f):
        edges.append((1, node))
        node += 1
    return Graph(node, edges)


# Generation

def _degree_choices(d_max: int, n: int) -> Tuple[List[int], List[int]]:
    top = min(d_max, n - 1)
    evens = [d for d in range(2, top + 1, 2)]
    odds = [d for d in range(1, top + 1, 2)]
    return evens, odds


def realizable_parity_targets(n: int, d_max: int) -> List[int]:
    """
    Even-node counts k for which some graphical sequence with entries in
    [1, d_max] has exactly k even entries. Exhaustive over degree multisets.
    """
    top = min(d_max, n - 1)
    if top < 1:
        return []
    found = set()
    for multiset in itertools.combinations_with_replacement(range(1, top + 1), n):
        k = sum(1 for d in multiset if d % 2 == 0)
        if k in found:
            continue
        if DegreeSequence(multiset).is_graphical():
            found.add(k)
    return sorted(found)


def _check_feasible(n: int, parity_target: int, d_max: int):
    if n < 2:
        raise InfeasibleError(f"Need at least 2 nodes, got {n}")
    if not 0 <= parity_target <= n:
        raise InfeasibleError(f"parity_target {parity_target} outside [0, {n}]")
    if (n - parity_target) % 2:
        raise InfeasibleError(
            f"{n - parity_target} odd-degree nodes leave an odd degree sum (n={n}, parity_target={parity_target})"
        )
    evens, odds = _degree_choices(d_max, n)
    if parity_target > 0 and not evens:
        raise InfeasibleError(f"No even degree available in [1, {min(d_max, n - 1)}]")
    if parity_target < n and not odds:
        raise InfeasibleError(f"No odd degree available in [1, {min(d_max, n - 1)}]")


def sample_degree_sequence(n: int, parity_target: int, d_max: int, rng: np.random.Generator,
                           connected: bool = True, max_attempts: int = 10_000) -> DegreeSequence:
    """
    Rejection sampler: uniform over labelled sequences with entries in
    [1, d_max] and exactly parity_target even entries that are graphical.
    """
    _check_feasible(n, parity_target, d_max)
    evens, odds = _degree_choices(d_max, n)
    for _ in range(max_attempts):
        even_nodes = set(rng.choice(n, size=parity_target, replace=False).tolist()) if parity_target else set()
        degrees = [
            int(rng.choice(evens)) if v in even_nodes else int(rng.choice(odds))
            for v in range(n)
        ]
        if connected and sum(degrees) < 2 * (n - 1):
            continue
        sequence = DegreeSequence(degrees)
        if sequence.is_graphical():
            return sequence
    raise InfeasibleError(
        f"No graphical degree sequence found for n={n}, parity_target={parity_target}, d_max={d_max}"
    )


def _pair_stubs(degrees: List[int], rng: np.random.Generator, repair_tries: int = 100) -> Optional[set]:
    """Configuration-model pairing; self-loops and multi-edges repaired by edge swaps."""
    stubs = np.repeat(np.arange(len(degrees)), degrees)
    rng.shuffle(stubs)
    edges = set()
    bad = []
    for a, b in zip(stubs[0::2].tolist(), stubs[1::2].tolist()):
        edge = (a, b) if a < b else (b, a)
        if a == b or edge in edges:
            bad.append((a, b))
        else:
            edges.add(edge)

    for a, b in bad:
        for _ in range(repair_tries):
            current = sorted(edges)
            c, d = current[int(rng.integers(len(current)))]
            if rng.random() < 0.5:
                c, d = d, c
            # (a,b) + (c,d) -> (a,c) + (b,d) keeps every degree
            first = (min(a, c), max(a, c))
            second = (min(b, d), max(b, d))
            if a == c or b == d or first == second or first in edges or second in edges:
                continue
            edges.remove((min(c, d), max(c, d)))
            edges.add(first)
            edges.add(second)
            break
        else:
            return None
    return edges


def realize_degree_sequence(sequence: DegreeSequence, rng: np.random.Generator,
                            connected: bool = True, max_attempts: int = 200) -> Graph:
    n = len(sequence)
    for attempt in range(max_attempts):
        edges = _pair_stubs(list(sequence.degrees), rng)
        if edges is None:
            continue
        g = Graph(n, edges)
        if connected and not g.is_connected():
            continue
        if attempt:
            logger.debug(f"[GraphCore] Realized sequence after {attempt + 1} attempts")
        return g
    raise InfeasibleError(f"Could not realize degree sequence {sequence.degrees} in {max_attempts} attempts")


def generate_graph(n: int, parity_target: int, d_max: int, seed: int,
                   connected: bool = True, max_attempts: int = 50) -> Graph:
    """
    Random simple graph with exactly parity_target even-degree nodes and all
    degrees in [1, d_max]. Deterministic for a fixed seed.
    """
    _check_feasible(n, parity_target, d_max)
    rng = make_rng(seed)
    for _ in range(max_attempts):
        sequence = sample_degree_sequence(n, parity_target, d_max, rng, connected=connected)
        try:
            return realize_degree_sequence(sequence, rng, connected=connected, max_attempts=20)
        except InfeasibleError:
            continue
    raise InfeasibleError(
        f"Generation failed for n={n}, parity_target={parity_target}, d_max={d_max} after {max_attempts} sequences"
    )


def random_regular_graph(n: int, d: int, seed: int) -> Graph:
    """Connected random d-regular graph (networkx pairing model)."""
    rng = make_rng(seed)
    for _ in range(100):
        g = nx.random_regular_graph(d, n, seed=int(rng.integers(2**31)))
        if nx.is_connected(g):
            return Graph.from_networkx(g)
    raise InfeasibleError(f"No connected {d}-regular graph on {n} nodes found")


# File format

def format_graph(g: Graph, comment: Optional[str] = None) -> str:
    lines = []
    if comment:
        lines.extend(f"# {line}" for line in comment.splitlines())
    lines.append(f"{g.node_count} {g.num_edges}")
    lines.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Graph:
    rows = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append(line.split())
    if not rows:
        raise ValueError("Empty graph file")
    try:
        n, m = (int(x) for x in rows[0])
        edges = [(int(a), int(b)) for a, b in rows[1:]]
    except ValueError as e:
        raise ValueError(f"Malformed graph file: {e}") from e
    if len(edges) != m:
        raise ValueError(f"Header declares {m} edges, found {len(edges)}")
    return Graph(n, edges)


def read_graph(path: str) -> Graph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_graph(fh.read())


def write_graph(g: Graph, path: str, comment: Optional[str] = None):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_graph(g, comment))


def graph_hash(g: Graph) -> str:
    """SHA-256 of the canonical (comment-free) file text."""
    return hashlib.sha256(format_graph(g).encode("ascii")).hexdigest()
