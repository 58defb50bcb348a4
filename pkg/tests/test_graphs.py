"""Graphs, local complementation, and canonical labeling.

The canonical labeler is validated by invariance under random relabelings,
and the LC machinery by reproducing the known count of LC equivalence
classes of small connected graphs.
"""

from __future__ import annotations

import itertools
import random

import networkx as nx
import pytest

from graphcode_lt.graphs import (
    Graph,
    canonical_form,
    canonical_key,
    complete_graph,
    cycle_graph,
    graph_state_generators,
    lc_orbit,
    local_complement,
    orbit_key,
    path_graph,
    star_graph,
)


def random_graph(rng: random.Random, n: int, p: float = 0.5) -> Graph:
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return Graph.from_edges(n, edges)


# -- construction -----------------------------------------------------------


def test_construction_validation():
    with pytest.raises(ValueError):
        Graph(2, (0b10, 0b00))  # asymmetric
    with pytest.raises(ValueError):
        Graph(2, (0b01, 0b01))  # self loop
    with pytest.raises(ValueError):
        Graph(2, (0b100, 0b000))  # out of range
    with pytest.raises(ValueError):
        Graph.from_edges(3, [(0, 0)])


def test_builders():
    assert path_graph(4).edges() == [(0, 1), (1, 2), (2, 3)]
    assert cycle_graph(3).edges() == [(0, 1), (0, 2), (1, 2)]
    assert star_graph(4).degree(0) == 3
    assert len(complete_graph(5).edges()) == 10


def test_connectivity():
    assert path_graph(5).is_connected()
    assert not Graph.from_edges(4, [(0, 1), (2, 3)]).is_connected()
    assert Graph.from_edges(1, []).is_connected()


def test_graph6_round_trip_against_networkx():
    rng = random.Random(3)
    for _ in range(30):
        n = rng.randint(1, 9)
        g = random_graph(rng, n)
        text = g.to_graph6()
        back = Graph.from_graph6(text)
        assert back == g
        nxg = nx.from_graph6_bytes(text.encode())
        assert sorted(nxg.edges()) == g.edges()


def test_induced_and_relabeled():
    g = path_graph(5)
    sub = g.induced([1, 2, 3])
    assert sub.edges() == [(0, 1), (1, 2)]
    perm = [4, 3, 2, 1, 0]
    rg = g.relabeled(perm)
    assert rg == path_graph(5).relabeled(perm)
    assert sorted(rg.edges()) == [(0, 1), (1, 2), (2, 3), (3, 4)]


def test_add_vertex():
    g = path_graph(3).add_vertex(0b101)
    assert g.has_edge(3, 0) and g.has_edge(3, 2) and not g.has_edge(3, 1)


# -- local complementation ---------------------------------------------------


def _lc_reference(g: Graph, v: int) -> Graph:
    nbrs = g.neighbors(v)
    edges = set(map(tuple, map(sorted, g.edges())))
    for a, b in itertools.combinations(nbrs, 2):
        e = (a, b)
        if e in edges:
            edges.remove(e)
        else:
            edges.add(e)
    return Graph.from_edges(g.n, edges)


def test_local_complement_matches_reference():
    rng = random.Random(5)
    for _ in range(50):
        n = rng.randint(2, 8)
        g = random_graph(rng, n)
        v = rng.randrange(n)
        assert local_complement(g, v) == _lc_reference(g, v)


def test_local_complement_involution():
    rng = random.Random(6)
    for _ in range(50):
        g = random_graph(rng, rng.randint(2, 8))
        v = rng.randrange(g.n)
        assert local_complement(local_complement(g, v), v) == g


def test_star_complete_equivalence():
    # complementing the center of a star yields the complete graph
    n = 5
    assert local_complement(star_graph(n), 0) == complete_graph(n)


# -- canonical labeling -------------------------------------------------------


def test_canonical_invariant_under_relabeling():
    rng = random.Random(9)
    for _ in range(60):
        n = rng.randint(2, 8)
        n_fixed = rng.randint(0, min(2, n))
        g = random_graph(rng, n)
        perm = list(range(n_fixed)) + rng.sample(range(n_fixed, n), n - n_fixed)
        h = g.relabeled(perm)
        assert canonical_key(g, n_fixed) == canonical_key(h, n_fixed)


def test_canonical_separates_nonisomorphic():
    a = path_graph(4)
    b = star_graph(4)
    assert canonical_key(a) != canonical_key(b)
    # fixing vertex 0 distinguishes center from leaf
    leaf_star = star_graph(4).relabeled([1, 0, 2, 3])
    assert canonical_key(star_graph(4), 1) != canonical_key(leaf_star, 1)
    assert canonical_key(star_graph(4), 0) == canonical_key(leaf_star, 0)


def test_canonical_form_is_isomorphic_relabeling():
    rng = random.Random(12)
    for _ in range(30):
        g = random_graph(rng, rng.randint(2, 7))
        cf = canonical_form(g, 1)
        assert cf.n == g.n
        assert len(cf.edges()) == len(g.edges())
        assert sorted(cf.degree(v) for v in range(cf.n)) == sorted(
            g.degree(v) for v in range(g.n))
        assert cf.degree(0) == g.degree(0)
        assert canonical_form(cf, 1) == cf


# -- LC orbits ----------------------------------------------------------------


def _all_connected_graphs(n: int):
    pairs = list(itertools.combinations(range(n), 2))
    for bits in range(1 << len(pairs)):
        edges = [pairs[i] for i in range(len(pairs)) if (bits >> i) & 1]
        g = Graph.from_edges(n, edges)
        if g.is_connected():
            yield g


def _count_lc_classes(n: int) -> int:
    """Number of LC equivalence classes of connected graphs on n vertices,
    computed by naive orbit closure with no vertex held fixed."""
    seen: set[tuple] = set()
    classes = 0
    for g in _all_connected_graphs(n):
        key = canonical_key(g, 0)
        if key in seen:
            continue
        classes += 1
        members, truncated = lc_orbit(g, n_fixed=0)
        assert not truncated
        for m in members:
            seen.add((m.n, m.nbr))
    return classes


def test_known_lc_class_counts():
    # connected graphs up to joint isomorphism + local complementation
    assert _count_lc_classes(2) == 1
    assert _count_lc_classes(3) == 1
    assert _count_lc_classes(4) == 2
    assert _count_lc_classes(5) == 4


def test_orbit_contains_start_and_respects_fixed_vertex():
    g = path_graph(4)
    members, truncated = lc_orbit(g, n_fixed=1)
    assert not truncated
    assert canonical_form(g, 1) in members
    for m in members:
        assert m.n == 4


def test_orbit_cap_truncates():
    g = cycle_graph(6)
    members, truncated = lc_orbit(g, cap=3, n_fixed=1)
    assert truncated
    assert len(members) == 3
    with pytest.raises(RuntimeError):
        orbit_key(g, cap=3)


def test_orbit_key_lc_and_relabeling_invariant():
    rng = random.Random(21)
    for _ in range(15):
        n = rng.randint(3, 6)
        g = random_graph(rng, n, 0.6)
        base = orbit_key(g)
        v = rng.randrange(n)
        assert orbit_key(local_complement(g, v)) == base
        perm = [0] + rng.sample(range(1, n), n - 1)
        assert orbit_key(g.relabeled(perm)) == base


def test_graph_state_generators_letters():
    gens = graph_state_generators(path_graph(3))
    assert [g.to_string() for g in gens] == ["+XZI", "+ZXZ", "+IZX"]
