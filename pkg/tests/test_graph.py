# Copyright (C) 2025-2026 Kris Kirby, KE4AHR
# tests/test_graph.py
import networkx as nx
import pytest

from qaoatransfer.errors import InfeasibleError
from qaoatransfer.graph import (
    DegreeSequence, Graph, LightconeClass, catalog, census, format_graph, generate_graph,
    graph_hash, lightcone_class, parity, parse_graph, random_regular_graph, read_graph,
    realizable_parity_targets, realize_lightcone, write_graph,
)


def test_graph_canonical_edges():
    """Edges are stored as (u < v) and sorted."""
    g = Graph(4, [(3, 2), (1, 0), (2, 0)])
    assert g.edges == ((0, 1), (0, 2), (2, 3))
    assert g.degrees() == [2, 1, 2, 1]
    assert g.has_edge(2, 3) and g.has_edge(3, 2)
    assert not g.has_edge(1, 3)


@pytest.mark.parametrize("edges", [
    [(1, 1)],            # self-loop
    [(0, 1), (1, 0)],    # duplicate
    [(0, 4)],            # out of range
])
def test_graph_rejects_invalid_edges(edges):
    """Self-loops, duplicate edges and unknown nodes are rejected."""
    with pytest.raises(ValueError):
        Graph(4, edges)


def test_graph_needs_a_node():
    with pytest.raises(ValueError):
        Graph(0, [])


def test_parity_examples(k4, cycle6, star5):
    """K4 is all-odd, C6 all-even, the 5-node star has one even node."""
    assert parity(k4) == 0.0
    assert parity(cycle6) == 1.0
    assert parity(star5) == pytest.approx(0.2)


def test_lightcone_class_examples(triangle, path4):
    assert lightcone_class(triangle, (0, 1)) == LightconeClass(2, 2, 1)
    assert lightcone_class(path4, (1, 0)) == LightconeClass(1, 2, 0)
    assert lightcone_class(path4, (1, 2)) == LightconeClass(2, 2, 0)


def test_lightcone_class_missing_edge(path4):
    with pytest.raises(ValueError):
        lightcone_class(path4, (0, 3))


def test_census_examples(triangle, k4, path4):
    """Census of the triangle, K4 and P4."""
    assert census(triangle) == {LightconeClass(2, 2, 1): 3}
    assert census(k4) == {LightconeClass(3, 3, 2): 6}
    assert census(path4) == {LightconeClass(1, 2, 0): 2, LightconeClass(2, 2, 0): 1}


def test_census_total_equals_edge_count():
    """Every edge lands in exactly one class."""
    for seed in range(20):
        g = Graph.from_networkx(nx.gnp_random_graph(12, 0.3, seed=seed))
        cen = census(g)
        assert cen.total() == g.num_edges
        assert all(c in catalog(max(g.max_degree(), 1)) for c in cen.classes())


def test_census_matches_networkx_on_1000_graphs():
    """Class counts agree with degrees and common neighbors read straight off networkx."""
    for seed in range(1000):
        nxg = nx.gnm_random_graph(6 + seed % 15, 8 + seed % 30, seed=seed)
        g = Graph.from_networkx(nxg)
        expected = {}
        for u, v in nxg.edges():
            du, dv = sorted((nxg.degree(u), nxg.degree(v)))
            c = LightconeClass(du, dv, len(list(nx.common_neighbors(nxg, u, v))))
            expected[c] = expected.get(c, 0) + 1
        cen = census(g)
        assert cen == expected
        assert cen.total() == g.num_edges == nxg.number_of_edges()


def test_lightcone_class_canonicalizes():
    assert LightconeClass.of(3, 2, 1) == (2, 3, 1)
    assert LightconeClass.parse(" (3, 3, 0) ") == (3, 3, 0)
    assert LightconeClass(4, 5, 2).label == "(4,5,2)"


@pytest.mark.parametrize("i, j, f", [(2, 2, 2), (0, 3, 0), (3, 3, -1)])
def test_lightcone_class_rejects_invalid(i, j, f):
    with pytest.raises(ValueError):
        LightconeClass.of(i, j, f)


def test_parity_kind():
    assert LightconeClass(3, 5, 1).parity_kind == "odd"
    assert LightconeClass(2, 4, 0).parity_kind == "even"
    assert LightconeClass(2, 3, 1).parity_kind == "mixed"


def test_catalog_counts():
    """56 classes up to degree 6, 35 up to degree 5, a single one at degree 1."""
    assert len(catalog(6)) == 56
    assert len(catalog(5)) == 35
    assert catalog(1) == [LightconeClass(1, 1, 0)]
    assert catalog(6) == sorted(catalog(6))


def test_catalog_regular_only():
    regular = catalog(6, regular_only=True)
    assert all(c.i == c.j for c in regular)
    assert len(regular) == sum(range(2, 7))
    assert len(catalog(8, regular_only=True)) == 35


def test_catalog_rejects_zero_degree():
    with pytest.raises(ValueError):
        catalog(0)


def test_realize_lightcone_examples():
    assert realize_lightcone(LightconeClass(1, 1, 0)) == Graph(2, [(0, 1)])
    assert realize_lightcone(LightconeClass(2, 2, 1)) == Graph(3, [(0, 1), (0, 2), (1, 2)])
    star = realize_lightcone(LightconeClass(3, 3, 0))
    assert star.node_count == 6
    assert star.num_edges == 5


def test_realize_lightcone_round_trips_every_class():
    """The canonical representative's central edge has the class it was built from."""
    for c in catalog(6):
        g = realize_lightcone(c)
        assert g.node_count == c.node_count
        assert lightcone_class(g, (0, 1)) == c


def test_degree_sequence_graphical():
    assert DegreeSequence([3, 3, 3, 3]).is_graphical()
    assert not DegreeSequence([3, 3, 1, 1]).is_graphical()
    assert not DegreeSequence([1, 1, 1]).is_graphical()
    assert DegreeSequence([2, 1, 1, 4]).even_count == 2


def test_realizable_parity_targets_twenty_nodes():
    """At N=20 only even counts of even-degree nodes are reachable; all of them are."""
    assert realizable_parity_targets(20, 6) == list(range(0, 21, 2))


def test_generate_graph_extremes():
    """All-even and all-odd targets at 20 nodes."""
    all_even = generate_graph(20, 20, 6, seed=7)
    assert parity(all_even) == 1.0
    assert all_even.is_connected()
    assert all(1 <= d <= 6 for d in all_even.degrees())

    all_odd = generate_graph(20, 0, 6, seed=7)
    assert parity(all_odd) == 0.0
    assert all_odd.is_connected()


def test_generate_graph_hits_exact_target():
    for k in range(0, 21, 2):
        g = generate_graph(20, k, 6, seed=100 + k)
        assert sum(1 for d in g.degrees() if d % 2 == 0) == k
        assert max(g.degrees()) <= 6


def test_generate_graph_odd_remainder_infeasible():
    """19 odd-degree nodes cannot have an even degree sum."""
    with pytest.raises(InfeasibleError):
        generate_graph(20, 1, 6, seed=7)


def test_generate_graph_no_even_degree_available():
    with pytest.raises(InfeasibleError):
        generate_graph(6, 2, 1, seed=0)


def test_generate_graph_deterministic():
    a = generate_graph(16, 8, 5, seed=42)
    b = generate_graph(16, 8, 5, seed=42)
    assert a == b
    assert graph_hash(a) == graph_hash(b)


def test_random_regular_graph():
    g = random_regular_graph(16, 3, seed=5)
    assert g.node_count == 16
    assert set(g.degrees()) == {3}
    assert g.is_connected()


def test_disjoint_union(triangle, path4):
    g = triangle.disjoint_union(path4)
    assert g.node_count == 7
    assert g.num_edges == 6
    assert g.has_edge(3, 4)
    assert not g.is_connected()


def test_graph_file_round_trip(tmp_path, k4):
    path = str(tmp_path / "k4.txt")
    write_graph(k4, path, comment="complete graph\nfour nodes")
    text = (tmp_path / "k4.txt").read_text()
    assert text.startswith("# complete graph\n# four nodes\n4 6\n")
    assert read_graph(path) == k4


def test_parse_graph_ignores_comments_and_blank_lines():
    g = parse_graph("# header\n\n3 2\n0 1   # first\n1 2\n")
    assert g == Graph(3, [(0, 1), (1, 2)])


@pytest.mark.parametrize("text", ["", "3 2\n0 1\n", "3 1\n0 x\n", "2 1\n0 0\n"])
def test_parse_graph_rejects_malformed(text):
    with pytest.raises(ValueError):
        parse_graph(text)


def test_graph_hash_ignores_comments(k4, cycle6):
    assert graph_hash(k4) == graph_hash(parse_graph(format_graph(k4, "comment")))
    assert graph_hash(k4) != graph_hash(cycle6)
    assert len(graph_hash(k4)) == 64
