# SPDX-License-Identifier: BSD-3-Clause

"""
C-components, C-forests and hedges.

A C-forest is a subgraph in which every vertex has at most one child,
the directed edges are acyclic and the bidirected edges connect all
vertices. Its roots are the vertices without a child. A hedge for an
effect of M{X} on M{Y} is a pair of C-forests M{F' <= F} with the same
roots M{R}, such that M{F} contains a vertex of M{X}, M{F'} contains none,
and every root is an ancestor of M{Y} once the edges out of M{X} are
removed. A hedge shows the effect is not identifiable.

For cluster graphs, hedges are searched in the SC-projection, which adds
a bidirected edge between every two clusters in a common strongly
connected component.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, replace
from itertools import combinations
from logging import getLogger

import networkx as nx

from cdmg.graph import Edge, MixedGraph, VertexSet, ancestors, bidirected_pair
from cdmg.mutilation import mutilate
from cdmg.separation import check_disjoint

_LOG = getLogger(__name__)


@dataclass(frozen=True)
class CForest:
    """A C-forest as a subgraph of some host graph."""

    graph: MixedGraph
    roots: VertexSet

    @property
    def vertices(self) -> VertexSet:
        return self.graph.vertex_set


@dataclass(frozen=True)
class HedgeCertificate:
    """A hedge for the effect of C{x} on C{y}."""

    f: CForest
    f_prime: CForest
    roots: VertexSet
    x: VertexSet
    y: VertexSet
    projection_edges_used: frozenset[Edge] = frozenset()
    """Bidirected edges of C{f} that only exist in the SC-projection."""


def c_components(graph: MixedGraph) -> list[VertexSet]:
    """
    Partition the vertices into the components that are connected by
    bidirected edges.

    @return: The components, ordered by their smallest vertex.
    """
    connections: nx.Graph[str] = nx.Graph()
    connections.add_nodes_from(graph.vertices)
    connections.add_edges_from((a, b) for a, b in graph.bidirected if a != b)
    return sorted(
        (frozenset(c) for c in nx.connected_components(connections)), key=min
    )


def forest_roots(graph: MixedGraph) -> VertexSet:
    """Return the vertices without children."""
    return frozenset(v for v in graph.vertices if not graph.children_of(v))


def is_c_forest(graph: MixedGraph) -> bool:
    """
    Decide whether C{graph} is a C-forest: nonempty, without self-loops,
    acyclic, every vertex with at most one child, and a single
    C-component.
    """
    if not graph.vertices or graph.has_self_loops:
        return False
    if any(len(graph.children_of(v)) > 1 for v in graph.vertices):
        return False
    if not nx.is_directed_acyclic_graph(graph.digraph):
        return False
    return len(c_components(graph)) == 1


def projection_edges(cdmg: MixedGraph) -> frozenset[Edge]:
    """Return the bidirected edges that the SC-projection adds to C{cdmg}."""
    added = set()
    for component in nx.strongly_connected_components(cdmg.digraph):
        for first, second in combinations(sorted(component), 2):
            edge = bidirected_pair(first, second)
            if edge not in cdmg.bidirected:
                added.add(edge)
    return frozenset(added)


def sc_projection(cdmg: MixedGraph) -> MixedGraph:
    """
    Return C{cdmg} plus a bidirected edge between every two distinct
    vertices in a common strongly connected component.
    """
    added = projection_edges(cdmg)
    if not added:
        return cdmg
    return cdmg.with_edges(bidirected=added)


def _reaching(graph: MixedGraph, roots: VertexSet, within: VertexSet) -> VertexSet:
    """Vertices of C{within} with a directed route into C{roots} that
    stays inside C{within}."""
    seen = set(roots)
    queue = deque(sorted(roots))
    while queue:
        vertex = queue.popleft()
        for parent in graph.parents_of(vertex):
            if parent in within and parent not in seen:
                seen.add(parent)
                queue.append(parent)
    return frozenset(seen)


def _bidirected_component(
    graph: MixedGraph, start: str, within: VertexSet
) -> VertexSet:
    seen = {start}
    queue = deque([start])
    while queue:
        vertex = queue.popleft()
        for spouse in graph.spouses_of(vertex):
            if spouse in within and spouse not in seen:
                seen.add(spouse)
                queue.append(spouse)
    return frozenset(seen)


def _maximal_forest_vertices(
    graph: MixedGraph, roots: VertexSet, pool: VertexSet
) -> VertexSet | None:
    """
    Return the vertex set of the largest C{roots}-rooted C-forest inside
    C{pool}, or C{None} if there is none.

    A set of vertices containing the roots carries such a C-forest iff
    every vertex in it reaches the roots inside the set and its
    bidirected edges connect it. Such sets are closed under union, so the
    largest one is found by shrinking C{pool} until it is stable.
    """
    if not roots <= pool:
        return None
    current = pool
    while True:
        reaching = _reaching(graph, roots, current)
        component = _bidirected_component(graph, min(roots), reaching)
        if not roots <= component:
            return None
        if component == current:
            return current
        current = component


def _forest(
    graph: MixedGraph,
    vertices: VertexSet,
    roots: VertexSet,
    base: Mapping[str, str] | None = None,
) -> tuple[CForest, dict[str, str]]:
    """
    Build a C-forest on C{vertices} by choosing one child per non-root,
    breadth first from the roots. The child choices of C{base} are kept.
    """
    child = dict(base or {})
    queue = deque(sorted(roots | set(child)))
    while queue:
        vertex = queue.popleft()
        for parent in graph.parents_of(vertex):
            if parent in vertices and parent not in roots and parent not in child:
                child[parent] = vertex
                queue.append(parent)
    forest = MixedGraph(
        vertices,
        child.items(),
        (
            (a, b)
            for a, b in graph.bidirected
            if a != b and a in vertices and b in vertices
        ),
    )
    return CForest(forest, roots), child


def _root_candidates(pool: list[str]) -> Iterator[VertexSet]:
    for size in range(1, len(pool) + 1):
        for roots in combinations(pool, size):
            yield frozenset(roots)


def find_hedge(
    graph: MixedGraph, x: Iterable[str], y: Iterable[str]
) -> HedgeCertificate | None:
    """
    Search for a hedge for the effect of C{x} on C{y}.

    Root sets are tried smallest first. For each, the largest C-forests
    with those roots are built with and without the vertices of C{x};
    a hedge with these roots exists iff both exist and the first one
    contains a vertex of C{x}. Self-loops are ignored.

    @return: The hedge for the first root set that has one, or C{None}.
    @raise SetsNotDisjoint: If C{x} and C{y} overlap.
    @raise UnknownVertex: If a vertex is not in the graph.
    """
    xs, ys = check_disjoint(graph.check_vertices(x), graph.check_vertices(y))
    host = graph.without_self_loops()
    reachable = ancestors(mutilate(host, (), xs), ys)
    candidates = sorted(reachable - xs)
    everything = host.vertex_set
    for roots in _root_candidates(candidates):
        inner = _maximal_forest_vertices(host, roots, everything - xs)
        if inner is None:
            continue
        outer = _maximal_forest_vertices(host, roots, everything)
        if outer is None or not outer & xs:
            continue
        f_prime, child = _forest(host, inner, roots)
        f, _ = _forest(host, outer, roots, child)
        _LOG.debug("hedge with roots %s", ", ".join(sorted(roots)))
        return HedgeCertificate(f, f_prime, roots, xs, ys)
    return None


def hedge_violations(
    host: MixedGraph, certificate: HedgeCertificate
) -> list[str]:
    """
    Check every condition of a hedge from scratch.

    @return: A description of each violated condition; empty if
        C{certificate} is a hedge in C{host}.
    """
    problems = []
    f, f_prime = certificate.f, certificate.f_prime
    for name, forest in (("F", f), ("F'", f_prime)):
        subgraph = forest.graph
        if not subgraph.vertex_set <= host.vertex_set:
            problems.append(f"{name} has vertices outside the graph")
            continue
        if not (
            subgraph.directed <= host.directed
            and subgraph.bidirected <= host.bidirected
        ):
            problems.append(f"{name} has edges outside the graph")
        if not is_c_forest(subgraph):
            problems.append(f"{name} is not a C-forest")
        elif forest_roots(subgraph) != certificate.roots:
            problems.append(f"{name} does not have the stated roots")
    if not (
        f_prime.vertices <= f.vertices
        and f_prime.graph.directed <= f.graph.directed
        and f_prime.graph.bidirected <= f.graph.bidirected
    ):
        problems.append("F' is not contained in F")
    if not f.vertices & certificate.x:
        problems.append("F contains no treatment vertex")
    if f_prime.vertices & certificate.x:
        problems.append("F' contains a treatment vertex")
    if certificate.x <= host.vertex_set and certificate.y <= host.vertex_set:
        reachable = ancestors(
            mutilate(host.without_self_loops(), (), certificate.x), certificate.y
        )
        if not certificate.roots <= reachable:
            problems.append("a root is not an ancestor of the outcome")
    else:
        problems.append("treatment or outcome outside the graph")
    return problems


def verify_hedge(host: MixedGraph, certificate: HedgeCertificate) -> bool:
    """C{True} iff C{certificate} is a hedge in C{host}."""
    return not hedge_violations(host, certificate)


def find_sc_hedge(
    cdmg: MixedGraph, x: Iterable[str], y: Iterable[str]
) -> HedgeCertificate | None:
    """
    Search for a hedge in the SC-projection of C{cdmg}.

    A hedge there shows that the macro effect of C{x} on C{y} is not
    identifiable. The certificate records which of its bidirected edges
    were added by the projection.

    @raise SetsNotDisjoint: If C{x} and C{y} overlap.
    @raise UnknownVertex: If a vertex is not in the graph.
    """
    certificate = find_hedge(sc_projection(cdmg), x, y)
    if certificate is None:
        return None
    used = certificate.f.graph.bidirected & projection_edges(cdmg)
    return replace(certificate, projection_edges_used=frozenset(used))
