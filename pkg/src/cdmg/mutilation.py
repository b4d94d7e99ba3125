# SPDX-License-Identifier: BSD-3-Clause

"""
Mutilated graphs: the graphs on which do-calculus side conditions are
evaluated.
"""

from __future__ import annotations

from collections.abc import Iterable

from cdmg.graph import ClusterSpec, MixedGraph, cluster_graph_of


def mutilate(
    graph: MixedGraph,
    incoming_removed: Iterable[str] = (),
    outgoing_removed: Iterable[str] = (),
) -> MixedGraph:
    """
    Remove all edges coming into one set of vertices and all edges going
    out of another.

    A bidirected edge has an arrowhead at both ends, so it comes into
    both of its endpoints and is removed if either endpoint is in
    C{incoming_removed}. The two sets may overlap.

    @raise UnknownVertex: If a vertex is not in the graph.
    """
    incoming = graph.check_vertices(incoming_removed)
    outgoing = graph.check_vertices(outgoing_removed)
    if not incoming and not outgoing:
        return graph
    return MixedGraph(
        graph.vertices,
        (
            (tail, head)
            for tail, head in graph.directed
            if head not in incoming and tail not in outgoing
        ),
        (
            (a, b)
            for a, b in graph.bidirected
            if a not in incoming and b not in incoming
        ),
    )


def check_mutilation_compatibility(
    admg: MixedGraph,
    spec: ClusterSpec,
    cdmg: MixedGraph,
    incoming_clusters: Iterable[str] = (),
    outgoing_clusters: Iterable[str] = (),
) -> bool:
    """
    Check that mutilating commutes with clustering: the cluster graph of
    the mutilated ADMG equals the mutilated cluster graph.

    This always holds for compatible inputs; the check exists so the
    property can be tested on concrete instances.

    @raise InvalidAdmg: If C{admg} is not an ADMG.
    @raise NotAPartition: If C{spec} does not partition C{admg}.
    """
    incoming = cdmg.check_vertices(incoming_clusters)
    outgoing = cdmg.check_vertices(outgoing_clusters)
    micro = mutilate(admg, spec.union(incoming), spec.union(outgoing))
    return cluster_graph_of(micro, spec) == mutilate(cdmg, incoming, outgoing)
