"""
Unit tests for `cdmg.mutilation`.
"""

from hypothesis import given
from hypothesis import strategies as st

from cdmg.graph import ClusterSpec, MixedGraph, cluster_graph_of
from cdmg.mutilation import check_mutilation_compatibility, mutilate

from strategies import admgs

GRAPH = MixedGraph(
    "XYZ", [("X", "Y"), ("Z", "X"), ("Y", "Y")], [("X", "Z"), ("Y", "Z"), ("X", "X")]
)


def test_mutilate_nothing() -> None:
    """Without vertices, the graph itself is returned."""
    assert mutilate(GRAPH) is GRAPH


def test_mutilate_incoming() -> None:
    """Removing incoming edges also removes bidirected edges, self-loops
    included."""
    result = mutilate(GRAPH, ["X"])
    assert result.directed == {("X", "Y"), ("Y", "Y")}
    assert result.bidirected == {("Y", "Z")}
    assert result.vertices == GRAPH.vertices


def test_mutilate_outgoing() -> None:
    """Removing outgoing edges keeps bidirected edges."""
    result = mutilate(GRAPH, outgoing_removed=["X"])
    assert result.directed == {("Z", "X"), ("Y", "Y")}
    assert result.bidirected == GRAPH.bidirected


def test_mutilate_overlapping_sets() -> None:
    """A vertex may lose both its incoming and its outgoing edges."""
    result = mutilate(GRAPH, ["Y"], ["Y"])
    assert result.directed == {("Z", "X")}
    assert result.bidirected == {("X", "X"), ("X", "Z")}


PAIRS = ClusterSpec.from_members({"C1": ("A", "B"), "C2": ("C", "D"), "C3": ("E", "F")})


@given(
    admgs(min_vertices=6, max_vertices=6),
    st.sets(st.sampled_from(("C1", "C2", "C3"))),
    st.sets(st.sampled_from(("C1", "C2", "C3"))),
)
def test_mutilation_commutes_with_clustering(
    admg: MixedGraph, incoming: set[str], outgoing: set[str]
) -> None:
    """Mutilating the micro graph and then clustering gives the mutilated
    cluster graph."""
    cdmg = cluster_graph_of(admg, PAIRS)
    assert check_mutilation_compatibility(admg, PAIRS, cdmg, incoming, outgoing)
