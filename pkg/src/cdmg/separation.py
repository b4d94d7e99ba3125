# SPDX-License-Identifier: BSD-3-Clause

"""
Blocked walks, primary paths and d-separation in mixed graphs that may
contain directed cycles.

A walk is blocked by a conditioning set M{Z} when:
  - one of its endpoints is in M{Z}, or
  - some non-collider on it (a vertex with a tail mark on at least one
    side) is in M{Z}, or
  - some collider on it (arrowheads on both sides) has no descendant
    in M{Z}.

Two sets are d-separated by M{Z} when every path between them is blocked.
Since an active walk always contains an active path, L{d_separated} can
search walks instead of paths, which is a finite reachability problem
over (vertex, arrival mark) states.

Self-loops never take part in walks.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass

from cdmg.graph import (
    EdgeKind,
    GraphError,
    Mark,
    MixedGraph,
    VertexSet,
    ancestors,
    bidirected_pair,
)

EXHAUSTIVE_VERTEX_LIMIT = 12
"""Largest graph that L{d_separated_exhaustive} accepts by default."""


class SetsNotDisjoint(GraphError):
    """Vertex sets that must be pairwise disjoint overlap."""


class WalkNotInGraph(GraphError):
    """A walk uses an edge that the graph does not contain."""


class EmptyWalk(GraphError):
    """A walk without vertices was given where one is required."""


class GraphTooLarge(GraphError):
    """A graph is too large for exhaustive path enumeration."""


@dataclass(frozen=True)
class Walk:
    """
    An alternating sequence of vertices and edges.

    Step C{i} goes from C{vertices[i]} to C{vertices[i + 1]} along an edge
    of kind C{kinds[i]}. Vertices may repeat; a walk without repeated
    vertices is a path.
    """

    vertices: tuple[str, ...]
    kinds: tuple[EdgeKind, ...]

    def __post_init__(self) -> None:
        if self.vertices and len(self.kinds) != len(self.vertices) - 1:
            raise ValueError(
                f"walk over {len(self.vertices)} vertices needs "
                f"{len(self.vertices) - 1} steps, got {len(self.kinds)}"
            )
        if not self.vertices and self.kinds:
            raise ValueError("walk without vertices cannot have steps")

    @classmethod
    def parse(cls, text: str) -> Walk:
        """
        Create a walk from text such as C{"A -> B <-> C <- D"}.
        """
        tokens = text.split()
        kinds = tuple(EdgeKind(token) for token in tokens[1::2])
        return cls(tuple(tokens[0::2]), kinds)

    def __str__(self) -> str:
        if not self.vertices:
            return "<empty walk>"
        parts = [self.vertices[0]]
        for kind, vertex in zip(self.kinds, self.vertices[1:]):
            parts += [kind.value, vertex]
        return " ".join(parts)

    def __len__(self) -> int:
        """The number of steps."""
        return len(self.kinds)

    @property
    def is_path(self) -> bool:
        """C{True} iff no vertex occurs twice."""
        return len(set(self.vertices)) == len(self.vertices)

    def steps(self) -> Iterator[tuple[str, EdgeKind, str]]:
        """Iterate through C{(source, kind, target)} triples."""
        return zip(self.vertices, self.kinds, self.vertices[1:])


def check_disjoint(*sets: Iterable[str]) -> tuple[VertexSet, ...]:
    """
    Convert the arguments to vertex sets and check they are pairwise
    disjoint.

    @raise SetsNotDisjoint: If two of the sets share a vertex.
    """
    frozen = tuple(frozenset(s) for s in sets)
    for index, first in enumerate(frozen):
        for second in frozen[index + 1 :]:
            common = first & second
            if common:
                raise SetsNotDisjoint(
                    "sets share vertices: " + ", ".join(sorted(common))
                )
    return frozen


def check_walk(graph: MixedGraph, walk: Walk) -> None:
    """
    @raise WalkNotInGraph: If a step of C{walk} is not an edge of C{graph}.
    """
    for vertex in walk.vertices:
        if vertex not in graph.vertex_set:
            raise WalkNotInGraph(f'vertex "{vertex}" is not in the graph')
    for source, kind, target in walk.steps():
        if kind is EdgeKind.FORWARD:
            present = (source, target) in graph.directed
        elif kind is EdgeKind.BACKWARD:
            present = (target, source) in graph.directed
        else:
            present = bidirected_pair(source, target) in graph.bidirected
        if not present:
            raise WalkNotInGraph(
                f"edge {source} {kind.value} {target} is not in the graph"
            )


def is_blocked(graph: MixedGraph, walk: Walk, given: Iterable[str]) -> bool:
    """
    Decide whether C{walk} is blocked by the conditioning set C{given}.

    @raise EmptyWalk: If the walk has no vertices.
    @raise WalkNotInGraph: If the walk is not a walk in C{graph}.
    """
    if not walk.vertices:
        raise EmptyWalk("cannot decide blocking for an empty walk")
    check_walk(graph, walk)
    conditioned = graph.check_vertices(given)
    vertices = walk.vertices
    if vertices[0] in conditioned or vertices[-1] in conditioned:
        return True
    # A vertex has a descendant in the conditioning set iff it is one of
    # its ancestors.
    reaches_given = ancestors(graph, conditioned)
    for index in range(1, len(vertices) - 1):
        arriving = walk.kinds[index - 1].marks[1]
        leaving = walk.kinds[index].marks[0]
        vertex = vertices[index]
        if arriving is Mark.HEAD and leaving is Mark.HEAD:
            if vertex not in reaches_given:
                return True
        elif vertex in conditioned:
            return True
    return False


def primary_path(walk: Walk) -> Walk:
    """
    Reduce a walk to a path with the same endpoints.

    Starting at the first vertex, repeatedly jump to the last occurrence
    of the current vertex and take the step that follows it.
    Every step of the result is a step of the input walk.

    @raise EmptyWalk: If the walk has no vertices.
    """
    vertices = walk.vertices
    if not vertices:
        raise EmptyWalk("an empty walk has no primary path")
    last = {vertex: index for index, vertex in enumerate(vertices)}
    path_vertices = [vertices[0]]
    path_kinds = []
    index = last[vertices[0]]
    while index < len(vertices) - 1:
        path_kinds.append(walk.kinds[index])
        index = last[vertices[index + 1]]
        path_vertices.append(vertices[index])
    return Walk(tuple(path_vertices), tuple(path_kinds))


_State = tuple[str, Mark | None]


def active_path(
    graph: MixedGraph, x: Iterable[str], y: Iterable[str], given: Iterable[str] = ()
) -> Walk | None:
    """
    Find a path from C{x} to C{y} that is not blocked by C{given}.

    The search explores walk states breadth first, so the walk found is
    a shortest active walk; its primary path is returned.

    @return: An active path, or C{None} if C{x} and C{y} are d-separated
        by C{given}.
    @raise SetsNotDisjoint: If the three sets are not pairwise disjoint.
    @raise UnknownVertex: If a vertex is not in the graph.
    """
    sources = graph.check_vertices(x)
    targets = graph.check_vertices(y)
    conditioned = graph.check_vertices(given)
    check_disjoint(sources, targets, conditioned)
    reaches_given = ancestors(graph, conditioned)

    came_from: dict[_State, tuple[_State, EdgeKind] | None] = {}
    queue: deque[_State] = deque()
    for source in sorted(sources):
        state: _State = (source, None)
        came_from[state] = None
        queue.append(state)

    while queue:
        state = queue.popleft()
        vertex, arrived = state
        for kind, other, near, far in graph.incident(vertex):
            if arrived is not None:
                if arrived is Mark.HEAD and near is Mark.HEAD:
                    if vertex not in reaches_given:
                        continue
                elif vertex in conditioned:
                    continue
            successor = (other, far)
            if successor in came_from:
                continue
            came_from[successor] = (state, kind)
            if other in targets:
                return primary_path(_trace_back(came_from, successor))
            queue.append(successor)
    return None


def _trace_back(
    came_from: dict[_State, tuple[_State, EdgeKind] | None], final: _State
) -> Walk:
    vertices = [final[0]]
    kinds = []
    link = came_from[final]
    while link is not None:
        previous, kind = link
        vertices.append(previous[0])
        kinds.append(kind)
        link = came_from[previous]
    vertices.reverse()
    kinds.reverse()
    return Walk(tuple(vertices), tuple(kinds))


def d_separated(
    graph: MixedGraph, x: Iterable[str], y: Iterable[str], given: Iterable[str] = ()
) -> bool:
    """
    Decide whether C{given} blocks every path between C{x} and C{y}.

    @raise SetsNotDisjoint: If the three sets are not pairwise disjoint.
    @raise UnknownVertex: If a vertex is not in the graph.
    """
    return active_path(graph, x, y, given) is None


def simple_paths(graph: MixedGraph, source: str) -> Iterator[Walk]:
    """
    Yield every path of at least one step that starts at C{source}.

    Parallel edges of different kinds give rise to different paths.
    """
    vertices = [source]
    kinds: list[EdgeKind] = []
    on_path = {source}

    def extend(vertex: str) -> Iterator[Walk]:
        for kind, other, near_, far_ in graph.incident(vertex):
            if other in on_path:
                continue
            vertices.append(other)
            kinds.append(kind)
            on_path.add(other)
            yield Walk(tuple(vertices), tuple(kinds))
            yield from extend(other)
            on_path.discard(other)
            kinds.pop()
            vertices.pop()

    return extend(source)


def d_separated_exhaustive(
    graph: MixedGraph,
    x: Iterable[str],
    y: Iterable[str],
    given: Iterable[str] = (),
    max_vertices: int = EXHAUSTIVE_VERTEX_LIMIT,
) -> bool:
    """
    Decide d-separation by checking every path between C{x} and C{y}.

    This is exponential in the size of the graph; it exists as an
    independent check on L{d_separated}.

    @raise GraphTooLarge: If the graph has more than C{max_vertices}
        vertices.
    @raise SetsNotDisjoint: If the three sets are not pairwise disjoint.
    """
    if len(graph.vertices) > max_vertices:
        raise GraphTooLarge(
            f"{len(graph.vertices)} vertices is more than "
            f"the limit of {max_vertices}"
        )
    sources = graph.check_vertices(x)
    targets = graph.check_vertices(y)
    conditioned = graph.check_vertices(given)
    check_disjoint(sources, targets, conditioned)
    for source in sorted(sources):
        for path in simple_paths(graph, source):
            if path.vertices[-1] in targets and not is_blocked(
                graph, path, conditioned
            ):
                return False
    return True


def format_vertices(vertices: Sequence[str] | VertexSet) -> str:
    """Format a vertex set as C{{A, B}}, sorted."""
    return "{" + ", ".join(sorted(vertices)) + "}"
