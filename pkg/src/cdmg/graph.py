# SPDX-License-Identifier: BSD-3-Clause

"""
Mixed graphs, cluster specifications and the compatibility relation
between ADMGs and cluster graphs.

A single L{MixedGraph} type represents both acyclic directed mixed graphs
(ADMGs) over micro variables and cluster directed mixed graphs (C-DMGs)
over clusters. The difference is only in validation: an ADMG must pass
L{validate_admg}, while a C-DMG may contain cycles and self-loops of
either kind.

Vertices are plain strings. Everything that iterates over vertices or
edges does so in lexicographic order, so results are reproducible.
"""

from __future__ import annotations

from collections.abc import Collection, Iterable, Iterator, Mapping
from enum import Enum
from functools import cached_property
from typing import NamedTuple

import networkx as nx

VertexSet = frozenset[str]
"""An unordered set of vertex names."""

Edge = tuple[str, str]
"""A directed edge as C{(tail, head)}, or a bidirected edge as a sorted pair."""


class GraphError(Exception):
    """Base class for problems with graphs and cluster specifications."""


class UnknownVertex(GraphError):
    """A vertex was referenced that is not part of the graph."""

    def __init__(self, vertex: str):
        super().__init__(f'unknown vertex "{vertex}"')
        self.vertex = vertex


class InvalidAdmg(GraphError):
    """A graph that is required to be an ADMG is not one."""


class CycleFound(InvalidAdmg):
    """The directed edges of a graph that should be acyclic form a cycle."""

    def __init__(self, cycle: Iterable[str]):
        self.cycle = tuple(cycle)
        """The vertices on the cycle, in traversal order."""
        super().__init__("directed cycle: " + " -> ".join(self.cycle + self.cycle[:1]))


class SelfLoopFound(InvalidAdmg):
    """A graph that should be an ADMG contains a self-loop."""

    def __init__(self, vertex: str):
        super().__init__(f'self-loop on "{vertex}"')
        self.vertex = vertex


class NotAPartition(GraphError):
    """Cluster members do not partition the vertices of a graph."""


class InvalidClusterSpec(GraphError):
    """A cluster specification is inconsistent in itself."""


class UnknownSizes(GraphError):
    """An operation needs cluster sizes that the specification leaves open."""


class Mark(Enum):
    """The symbol at one end of an edge."""

    TAIL = "-"
    HEAD = ">"


class EdgeKind(Enum):
    """Orientation of a walk step relative to the direction of travel."""

    FORWARD = "->"
    BACKWARD = "<-"
    BIDIRECTED = "<->"

    @property
    def marks(self) -> tuple[Mark, Mark]:
        """The marks at the source and at the target of a step."""
        if self is EdgeKind.FORWARD:
            return Mark.TAIL, Mark.HEAD
        if self is EdgeKind.BACKWARD:
            return Mark.HEAD, Mark.TAIL
        return Mark.HEAD, Mark.HEAD


class Incidence(NamedTuple):
    """One edge as seen from one of its endpoints."""

    kind: EdgeKind
    other: str
    near: Mark
    """Mark at the vertex the edge is seen from."""
    far: Mark
    """Mark at L{other}."""


def bidirected_pair(first: str, second: str) -> Edge:
    """Return the canonical representation of a bidirected edge."""
    return (first, second) if first <= second else (second, first)


class MixedGraph:
    """
    A graph with directed and bidirected edges.

    Directed self-loops (C{v -> v}) and bidirected self-loops
    (C{v <-> v}) can be represented; cluster graphs use them to license
    edges between members of the same cluster.

    Instances are immutable; derived structures are computed on first use
    and cached.
    """

    def __init__(
        self,
        vertices: Iterable[str],
        directed: Iterable[Edge] = (),
        bidirected: Iterable[Edge] = (),
    ):
        self.vertices: tuple[str, ...] = tuple(sorted(set(vertices)))
        """All vertices, sorted."""
        self.vertex_set: VertexSet = frozenset(self.vertices)

        directed_edges = frozenset((tail, head) for tail, head in directed)
        bidirected_edges = frozenset(bidirected_pair(a, b) for a, b in bidirected)
        for edge in directed_edges | bidirected_edges:
            for vertex in edge:
                if vertex not in self.vertex_set:
                    raise UnknownVertex(vertex)
        self.directed: frozenset[Edge] = directed_edges
        """Directed edges as C{(tail, head)} pairs."""
        self.bidirected: frozenset[Edge] = bidirected_edges
        """Bidirected edges as sorted C{(first, second)} pairs."""

    def __eq__(self, other: object) -> bool:
        if isinstance(other, MixedGraph):
            return (
                self.vertex_set == other.vertex_set
                and self.directed == other.directed
                and self.bidirected == other.bidirected
            )
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.vertex_set, self.directed, self.bidirected))

    def __repr__(self) -> str:
        return (
            f"MixedGraph({list(self.vertices)!r}, "
            f"directed={sorted(self.directed)!r}, "
            f"bidirected={sorted(self.bidirected)!r})"
        )

    @property
    def has_self_loops(self) -> bool:
        """C{True} iff the graph has a self-loop of either kind."""
        return any(a == b for a, b in self.directed | self.bidirected)

    def without_self_loops(self) -> MixedGraph:
        """Return this graph with all self-loops removed."""
        if not self.has_self_loops:
            return self
        return MixedGraph(
            self.vertices,
            ((a, b) for a, b in self.directed if a != b),
            ((a, b) for a, b in self.bidirected if a != b),
        )

    def subgraph(self, vertices: Iterable[str]) -> MixedGraph:
        """Return the subgraph induced by C{vertices}."""
        keep = self.check_vertices(vertices)
        return MixedGraph(
            keep,
            ((a, b) for a, b in self.directed if a in keep and b in keep),
            ((a, b) for a, b in self.bidirected if a in keep and b in keep),
        )

    def with_edges(
        self, directed: Iterable[Edge] = (), bidirected: Iterable[Edge] = ()
    ) -> MixedGraph:
        """Return a copy of this graph with extra edges added."""
        return MixedGraph(
            self.vertices,
            self.directed.union(directed),
            self.bidirected.union(bidirected_pair(a, b) for a, b in bidirected),
        )

    def check_vertices(self, vertices: Iterable[str]) -> VertexSet:
        """
        Return C{vertices} as a set, after checking they are all part
        of this graph.

        @raise UnknownVertex: If a vertex is not in this graph.
        """
        result = frozenset(vertices)
        for vertex in sorted(result - self.vertex_set):
            raise UnknownVertex(vertex)
        return result

    @cached_property
    def digraph(self) -> nx.DiGraph[str]:
        """The directed part of this graph, excluding self-loops."""
        graph: nx.DiGraph[str] = nx.DiGraph()
        graph.add_nodes_from(self.vertices)
        graph.add_edges_from((a, b) for a, b in self.directed if a != b)
        return graph

    @cached_property
    def _parent_map(self) -> Mapping[str, tuple[str, ...]]:
        parents: dict[str, list[str]] = {v: [] for v in self.vertices}
        for tail, head in self.directed:
            if tail != head:
                parents[head].append(tail)
        return {v: tuple(sorted(p)) for v, p in parents.items()}

    @cached_property
    def _child_map(self) -> Mapping[str, tuple[str, ...]]:
        children: dict[str, list[str]] = {v: [] for v in self.vertices}
        for tail, head in self.directed:
            if tail != head:
                children[tail].append(head)
        return {v: tuple(sorted(c)) for v, c in children.items()}

    @cached_property
    def _spouse_map(self) -> Mapping[str, tuple[str, ...]]:
        spouses: dict[str, list[str]] = {v: [] for v in self.vertices}
        for first, second in self.bidirected:
            if first != second:
                spouses[first].append(second)
                spouses[second].append(first)
        return {v: tuple(sorted(s)) for v, s in spouses.items()}

    @cached_property
    def _incidence_map(self) -> Mapping[str, tuple[Incidence, ...]]:
        result = {}
        for vertex in self.vertices:
            incidences = [
                Incidence(EdgeKind.FORWARD, child, Mark.TAIL, Mark.HEAD)
                for child in self._child_map[vertex]
            ]
            incidences += [
                Incidence(EdgeKind.BACKWARD, parent, Mark.HEAD, Mark.TAIL)
                for parent in self._parent_map[vertex]
            ]
            incidences += [
                Incidence(EdgeKind.BIDIRECTED, spouse, Mark.HEAD, Mark.HEAD)
                for spouse in self._spouse_map[vertex]
            ]
            result[vertex] = tuple(incidences)
        return result

    def parents_of(self, vertex: str) -> tuple[str, ...]:
        """Parents of C{vertex}, sorted, ignoring self-loops."""
        return self._parent_map[vertex]

    def children_of(self, vertex: str) -> tuple[str, ...]:
        """Children of C{vertex}, sorted, ignoring self-loops."""
        return self._child_map[vertex]

    def spouses_of(self, vertex: str) -> tuple[str, ...]:
        """Vertices sharing a bidirected edge with C{vertex}, sorted."""
        return self._spouse_map[vertex]

    def incident(self, vertex: str) -> tuple[Incidence, ...]:
        """All edges at C{vertex} except self-loops, in a fixed order."""
        return self._incidence_map[vertex]

    @cached_property
    def components(self) -> Mapping[str, VertexSet]:
        """Maps every vertex to its strongly connected component."""
        result = {}
        for component in nx.strongly_connected_components(self.digraph):
            members = frozenset(component)
            for vertex in members:
                result[vertex] = members
        return result


def validate_admg(graph: MixedGraph) -> None:
    """
    Check that C{graph} is an ADMG.

    @raise SelfLoopFound: If the graph has a self-loop of either kind.
    @raise CycleFound: If the directed edges form a cycle.
    """
    for first, second in sorted(graph.directed | graph.bidirected):
        if first == second:
            raise SelfLoopFound(first)
    try:
        cycle = nx.find_cycle(graph.digraph)
    except nx.NetworkXNoCycle:
        return
    raise CycleFound(tail for tail, head_ in cycle)


def is_acyclic(graph: MixedGraph) -> bool:
    """C{True} iff the directed edges of C{graph} (self-loops included)
    form no cycle."""
    if any(a == b for a, b in graph.directed):
        return False
    return bool(nx.is_directed_acyclic_graph(graph.digraph))


def parents(graph: MixedGraph, vertex: str) -> VertexSet:
    """
    Return the parents of C{vertex}.

    @raise UnknownVertex: If C{vertex} is not in the graph.
    """
    graph.check_vertices((vertex,))
    return frozenset(graph.parents_of(vertex))


def ancestors(graph: MixedGraph, vertices: Iterable[str]) -> VertexSet:
    """
    Return all ancestors of C{vertices}, including C{vertices} themselves.

    @raise UnknownVertex: If one of the vertices is not in the graph.
    """
    start = graph.check_vertices(vertices)
    found = set(start)
    todo = list(start)
    while todo:
        for parent in graph.parents_of(todo.pop()):
            if parent not in found:
                found.add(parent)
                todo.append(parent)
    return frozenset(found)


def descendants(graph: MixedGraph, vertices: Iterable[str]) -> VertexSet:
    """
    Return all descendants of C{vertices}, including C{vertices}
    themselves.

    @raise UnknownVertex: If one of the vertices is not in the graph.
    """
    start = graph.check_vertices(vertices)
    found = set(start)
    todo = list(start)
    while todo:
        for child in graph.children_of(todo.pop()):
            if child not in found:
                found.add(child)
                todo.append(child)
    return frozenset(found)


def scc(graph: MixedGraph, vertex: str) -> VertexSet:
    """
    Return the strongly connected component containing C{vertex}:
    its ancestors that are also its descendants.

    @raise UnknownVertex: If C{vertex} is not in the graph.
    """
    graph.check_vertices((vertex,))
    return graph.components[vertex]


def strongly_connected_components(graph: MixedGraph) -> list[VertexSet]:
    """Return all strongly connected components, ordered by their
    smallest vertex."""
    return sorted(set(graph.components.values()), key=min)


class Cluster(NamedTuple):
    """What is known about a single cluster."""

    members: tuple[str, ...] | None
    """Sorted member names, or C{None} if unknown."""
    size: int | None
    """Number of members, or C{None} if unknown."""


class ClusterSpec:
    """
    Partition metadata: which clusters exist and what is known about
    their members and sizes.
    """

    def __init__(self, clusters: Mapping[str, Cluster]):
        normalized: dict[str, Cluster] = {}
        owner: dict[str, str] = {}
        for name in sorted(clusters):
            members, size = clusters[name]
            if members is not None:
                members = tuple(sorted(members))
                if len(set(members)) != len(members):
                    raise InvalidClusterSpec(f'cluster "{name}" lists a member twice')
                if size is None:
                    size = len(members)
                elif size != len(members):
                    raise InvalidClusterSpec(
                        f'cluster "{name}" has size {size} '
                        f"but {len(members)} members"
                    )
                for member in members:
                    if member in owner:
                        raise InvalidClusterSpec(
                            f'"{member}" is a member of both "{owner[member]}" '
                            f'and "{name}"'
                        )
                    owner[member] = name
            if size is not None and size < 1:
                raise InvalidClusterSpec(f'cluster "{name}" has size {size}')
            normalized[name] = Cluster(members, size)
        self.clusters: Mapping[str, Cluster] = normalized
        self._owner = owner

    @classmethod
    def from_members(cls, members: Mapping[str, Iterable[str]]) -> ClusterSpec:
        """Create a specification in which all members are known."""
        return cls({name: Cluster(tuple(m), None) for name, m in members.items()})

    @classmethod
    def from_sizes(cls, sizes: Mapping[str, int | None]) -> ClusterSpec:
        """Create a specification with unknown members and given sizes."""
        return cls({name: Cluster(None, size) for name, size in sizes.items()})

    @classmethod
    def singletons(cls, vertices: Iterable[str]) -> ClusterSpec:
        """Create the specification that puts each vertex in its own cluster."""
        return cls.from_members({v: (v,) for v in vertices})

    def __eq__(self, other: object) -> bool:
        if isinstance(other, ClusterSpec):
            return dict(self.clusters) == dict(other.clusters)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.clusters.items())))

    def __repr__(self) -> str:
        return f"ClusterSpec({dict(self.clusters)!r})"

    def __iter__(self) -> Iterator[str]:
        return iter(self.clusters)

    def __len__(self) -> int:
        return len(self.clusters)

    @property
    def satisfies_assumption_1(self) -> bool:
        """C{True} iff every cluster size is unknown or at least 2."""
        return all(c.size is None or c.size >= 2 for c in self.clusters.values())

    @property
    def small_clusters(self) -> tuple[str, ...]:
        """Clusters known to contain a single variable."""
        return tuple(n for n, c in self.clusters.items() if c.size == 1)

    @property
    def members_known(self) -> bool:
        """C{True} iff the members of every cluster are known."""
        return all(c.members is not None for c in self.clusters.values())

    def members(self, cluster: str) -> tuple[str, ...]:
        """
        Return the members of C{cluster}.

        @raise UnknownSizes: If the members are not known.
        """
        members = self.clusters[cluster].members
        if members is None:
            raise UnknownSizes(f'members of cluster "{cluster}" are unknown')
        return members

    def cluster_of(self, member: str) -> str:
        """Return the cluster that C{member} belongs to."""
        return self._owner[member]

    def union(self, clusters: Iterable[str]) -> VertexSet:
        """Return the micro variables in the given clusters."""
        return frozenset(m for c in clusters for m in self.members(c))

    def realized(self, default_size: int | None = None) -> ClusterSpec:
        """
        Return a specification in which all members are known.

        Clusters with a known size but unknown members get generated
        member names C{<cluster>_1}, C{<cluster>_2} and so on.
        Clusters of unknown size get C{default_size} members.

        @raise UnknownSizes: If a cluster has neither members nor a size
            and no default size was given.
        """
        result = {}
        for name, (members, size) in self.clusters.items():
            if members is None:
                if size is None:
                    if default_size is None:
                        raise UnknownSizes(f'size of cluster "{name}" is unknown')
                    size = default_size
                members = tuple(f"{name}_{index}" for index in range(1, size + 1))
            result[name] = Cluster(members, len(members))
        return ClusterSpec(result)


def cluster_graph_of(admg: MixedGraph, spec: ClusterSpec) -> MixedGraph:
    """
    Return the cluster graph of C{admg} under the partition C{spec}.

    There is an edge between two clusters iff there is an edge of the
    same kind between a member of the first and a member of the second.
    Edges between members of one cluster become self-loops.

    @raise InvalidAdmg: If C{admg} is not an ADMG.
    @raise NotAPartition: If the members in C{spec} do not partition
        the vertices of C{admg}.
    """
    validate_admg(admg)
    check_partition(admg.vertex_set, spec)
    owner = spec.cluster_of
    return MixedGraph(
        spec.clusters,
        ((owner(tail), owner(head)) for tail, head in admg.directed),
        ((owner(a), owner(b)) for a, b in admg.bidirected),
    )


def check_partition(vertices: Collection[str], spec: ClusterSpec) -> None:
    """
    @raise NotAPartition: If the members in C{spec} are unknown or do not
        cover exactly C{vertices}.
    """
    if not spec.members_known:
        raise NotAPartition("cluster members are not known")
    covered = spec.union(spec.clusters)
    missing = sorted(set(vertices) - covered)
    if missing:
        raise NotAPartition(f"vertices not in any cluster: {', '.join(missing)}")
    extra = sorted(covered - set(vertices))
    if extra:
        raise NotAPartition(f"cluster members not in graph: {', '.join(extra)}")


def compatible(admg: MixedGraph, spec: ClusterSpec, cdmg: MixedGraph) -> bool:
    """C{True} iff C{cdmg} is the cluster graph of C{admg} under C{spec}."""
    return cluster_graph_of(admg, spec) == cdmg
