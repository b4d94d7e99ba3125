"""
Graph generators shared by the unit tests: Hypothesis strategies and
seeded random cluster graphs for sweeps.
"""

from itertools import combinations, combinations_with_replacement, permutations

import numpy as np
from hypothesis import strategies as st

from cdmg.graph import ClusterSpec, MixedGraph, VertexSet
from cdmg.oracle import enumeration_space

NAMES = ("A", "B", "C", "D", "E", "F", "G", "H")


@st.composite
def mixed_graphs(
    draw: st.DrawFn,
    min_vertices: int = 1,
    max_vertices: int = 6,
    self_loops: bool = True,
) -> MixedGraph:
    """Graphs with arbitrary directed and bidirected edges, cycles included."""
    count = draw(st.integers(min_vertices, max_vertices))
    vertices = NAMES[:count]
    directed = list(permutations(vertices, 2))
    bidirected = list(combinations(vertices, 2))
    if self_loops:
        directed += [(v, v) for v in vertices]
        bidirected += [(v, v) for v in vertices]
    return MixedGraph(
        vertices,
        draw(st.sets(st.sampled_from(directed))) if directed else (),
        draw(st.sets(st.sampled_from(bidirected))) if bidirected else (),
    )


@st.composite
def admgs(draw: st.DrawFn, min_vertices: int = 1, max_vertices: int = 6) -> MixedGraph:
    """Acyclic graphs without self-loops."""
    count = draw(st.integers(min_vertices, max_vertices))
    order = draw(st.permutations(NAMES[:count]))
    forward = list(combinations(order, 2))
    bidirected = list(combinations(sorted(order), 2))
    return MixedGraph(
        order,
        draw(st.sets(st.sampled_from(forward))) if forward else (),
        draw(st.sets(st.sampled_from(bidirected))) if bidirected else (),
    )


@st.composite
def disjoint_triples(
    draw: st.DrawFn, graph: MixedGraph
) -> tuple[VertexSet, VertexSet, VertexSet]:
    """Pairwise disjoint C{(x, y, given)} with nonempty C{x} and C{y}."""
    vertices = graph.vertices
    x_vertex, y_vertex = draw(st.permutations(vertices))[:2]
    roles = draw(
        st.lists(st.integers(0, 3), min_size=len(vertices), max_size=len(vertices))
    )
    x = {x_vertex}
    y = {y_vertex}
    given = set()
    for vertex, role in zip(vertices, roles):
        if vertex in (x_vertex, y_vertex):
            continue
        if role == 1:
            x.add(vertex)
        elif role == 2:
            y.add(vertex)
        elif role == 3:
            given.add(vertex)
    return frozenset(x), frozenset(y), frozenset(given)


@st.composite
def graphs_with_queries(
    draw: st.DrawFn, graphs: st.SearchStrategy[MixedGraph]
) -> tuple[MixedGraph, VertexSet, VertexSet, VertexSet]:
    graph = draw(graphs)
    x, y, given = draw(disjoint_triples(graph))
    return graph, x, y, given


def random_cdmg(rng: np.random.Generator, count: int, density: float) -> MixedGraph:
    """A cluster graph over C{count} clusters in which every possible edge,
    self-loops included, is present with probability C{density}."""
    clusters = [f"C{index}" for index in range(count)]
    directed = [
        (tail, head)
        for tail in clusters
        for head in clusters
        if rng.random() < density
    ]
    bidirected = [
        (first, second)
        for first, second in combinations_with_replacement(clusters, 2)
        if rng.random() < density
    ]
    return MixedGraph(clusters, directed, bidirected)


def enumerable_cdmg(
    rng: np.random.Generator, count: int, density: float, limit: int = 5_000
) -> tuple[MixedGraph, ClusterSpec]:
    """
    Draw C{random_cdmg} graphs until one has at most C{limit} edge
    assignments with two members per cluster.

    @return: The graph and its partition into clusters of size two.
    """
    spec = ClusterSpec.from_sizes({f"C{index}": 2 for index in range(count)})
    spec = spec.realized()
    while True:
        cdmg = random_cdmg(rng, count, density)
        if enumeration_space(cdmg, spec) <= limit:
            return cdmg, spec


def random_disjoint_sets(
    rng: np.random.Generator, vertices: tuple[str, ...], count: int
) -> list[VertexSet]:
    """Split a random selection of C{vertices} into C{count} disjoint sets,
    the first two of them nonempty."""
    shuffled = list(rng.permutation(vertices))
    sets: list[set[str]] = [set() for _ in range(count)]
    sets[0].add(str(shuffled[0]))
    sets[1].add(str(shuffled[1]))
    for vertex in shuffled[2:]:
        role = int(rng.integers(0, count + 1))
        if role < count:
            sets[role].add(str(vertex))
    return [frozenset(s) for s in sets]
