"""
Unit tests for `cdmg.graph`.
"""

from pathlib import Path

from hypothesis import given
from pytest import mark, raises

from cdmg.dsl import load
from cdmg.graph import (
    Cluster,
    ClusterSpec,
    CycleFound,
    InvalidClusterSpec,
    MixedGraph,
    NotAPartition,
    SelfLoopFound,
    UnknownSizes,
    UnknownVertex,
    ancestors,
    cluster_graph_of,
    compatible,
    descendants,
    is_acyclic,
    parents,
    scc,
    strongly_connected_components,
    validate_admg,
)

from strategies import admgs, mixed_graphs

FIXTURES = Path(__file__).parent / "fixtures"

CHAIN = MixedGraph("ABC", [("A", "B"), ("B", "C")], [("C", "A")])


def test_graph_sorted_and_normalized() -> None:
    """Vertices are sorted and bidirected edges are stored as sorted pairs."""
    graph = MixedGraph(["C", "A", "B", "A"], [("C", "A")], [("C", "B")])
    assert graph.vertices == ("A", "B", "C")
    assert graph.bidirected == {("B", "C")}
    assert graph == MixedGraph("ABC", [("C", "A")], [("B", "C")])
    assert hash(graph) == hash(MixedGraph("CBA", [("C", "A")], [("C", "B")]))


def test_graph_unknown_vertex() -> None:
    """Edges must connect declared vertices."""
    with raises(UnknownVertex) as excinfo:
        MixedGraph("AB", [("A", "Z")])
    assert excinfo.value.vertex == "Z"
    with raises(UnknownVertex):
        CHAIN.check_vertices(["A", "Q"])


def test_graph_self_loops_ignored_by_neighbours() -> None:
    """Self-loops are stored but are not parents, children or spouses."""
    graph = MixedGraph("AB", [("A", "A"), ("A", "B")], [("B", "B")])
    assert graph.has_self_loops
    assert graph.parents_of("A") == ()
    assert graph.children_of("A") == ("B",)
    assert graph.spouses_of("B") == ()
    assert not graph.without_self_loops().has_self_loops
    assert graph.without_self_loops().directed == {("A", "B")}


def test_subgraph_and_with_edges() -> None:
    """Induced subgraphs keep only edges between kept vertices."""
    sub = CHAIN.subgraph("BC")
    assert sub == MixedGraph("BC", [("B", "C")])
    extended = sub.with_edges(bidirected=[("C", "B")])
    assert extended.bidirected == {("B", "C")}


def test_validate_admg() -> None:
    """Cycles and self-loops are rejected, with the offending vertices."""
    validate_admg(CHAIN)
    with raises(CycleFound) as cycle:
        validate_admg(MixedGraph("ABC", [("A", "B"), ("B", "C"), ("C", "A")]))
    assert sorted(cycle.value.cycle) == ["A", "B", "C"]
    with raises(SelfLoopFound) as loop:
        validate_admg(MixedGraph("AB", [], [("B", "B")]))
    assert loop.value.vertex == "B"


@mark.parametrize(
    "graph, acyclic",
    (
        (CHAIN, True),
        (MixedGraph("A", [("A", "A")]), False),
        (MixedGraph("AB", [("A", "B"), ("B", "A")]), False),
        (MixedGraph("AB", [], [("A", "A")]), True),
    ),
)
def test_is_acyclic(graph: MixedGraph, acyclic: bool) -> None:
    """Only directed edges count, a directed self-loop is a cycle."""
    assert is_acyclic(graph) == acyclic


def test_relatives() -> None:
    """Ancestors and descendants include the vertices themselves."""
    assert parents(CHAIN, "B") == {"A"}
    assert ancestors(CHAIN, ["C"]) == {"A", "B", "C"}
    assert descendants(CHAIN, ["B"]) == {"B", "C"}
    assert ancestors(CHAIN, []) == frozenset()
    with raises(UnknownVertex):
        parents(CHAIN, "Q")


def test_strongly_connected_components() -> None:
    """Components of a graph with a two-cycle and a self-loop."""
    graph = MixedGraph("ABCD", [("A", "B"), ("B", "A"), ("B", "C"), ("D", "D")])
    assert scc(graph, "A") == {"A", "B"}
    assert scc(graph, "D") == {"D"}
    assert strongly_connected_components(graph) == [
        frozenset("AB"),
        frozenset("C"),
        frozenset("D"),
    ]


@given(mixed_graphs())
def test_scc_is_mutual_reachability(graph: MixedGraph) -> None:
    """A component is the intersection of ancestors and descendants."""
    for vertex in graph.vertices:
        assert scc(graph, vertex) == ancestors(graph, [vertex]) & descendants(
            graph, [vertex]
        )


def test_cluster_spec_normalizes() -> None:
    """Member lists are sorted and sizes follow from the members."""
    spec = ClusterSpec.from_members({"CX": ("X2", "X1"), "CY": ("Y1",)})
    assert spec.clusters["CX"] == Cluster(("X1", "X2"), 2)
    assert spec.members("CX") == ("X1", "X2")
    assert spec.cluster_of("X2") == "CX"
    assert spec.union(["CX", "CY"]) == {"X1", "X2", "Y1"}
    assert list(spec) == ["CX", "CY"]
    assert len(spec) == 2


@mark.parametrize(
    "clusters",
    (
        {"CX": Cluster(("X1", "X1"), None)},
        {"CX": Cluster(("X1",), 2)},
        {"CX": Cluster(("X1",), None), "CY": Cluster(("X1",), None)},
        {"CX": Cluster(None, 0)},
    ),
)
def test_cluster_spec_invalid(clusters: dict[str, Cluster]) -> None:
    """Inconsistent cluster descriptions are rejected."""
    with raises(InvalidClusterSpec):
        ClusterSpec(clusters)


def test_cluster_spec_small_clusters() -> None:
    """A cluster of size 1 violates the size assumption, unknown sizes do not."""
    spec = ClusterSpec.from_sizes({"CX": 1, "CY": None, "CW": 2})
    assert not spec.satisfies_assumption_1
    assert spec.small_clusters == ("CX",)
    assert ClusterSpec.from_sizes({"CY": None}).satisfies_assumption_1


def test_cluster_spec_realized() -> None:
    """Generated member names use the cluster name and a 1-based index."""
    spec = ClusterSpec.from_sizes({"CX": 1, "CY": None})
    with raises(UnknownSizes):
        spec.realized()
    realized = spec.realized(default_size=2)
    assert realized.members("CX") == ("CX_1",)
    assert realized.members("CY") == ("CY_1", "CY_2")
    assert realized.members_known
    with raises(UnknownSizes):
        spec.members("CY")


def test_singletons_cluster_graph_is_identity() -> None:
    """With one vertex per cluster, the cluster graph is the graph itself."""
    graph = MixedGraph("AB", [("A", "B")], [("A", "B")])
    assert cluster_graph_of(graph, ClusterSpec.singletons("AB")) == graph


def test_cluster_graph_of_micro_graphs() -> None:
    """Two different ADMGs have the same cluster graph."""
    clustered = load(FIXTURES / "clustered.cdmg").graph
    for name in ("micro_a.cdmg", "micro_b.cdmg"):
        document = load(FIXTURES / name)
        assert document.spec is not None
        assert cluster_graph_of(document.graph, document.spec) == clustered
        assert compatible(document.graph, document.spec, clustered)


def test_cluster_graph_of_rejects_bad_partition() -> None:
    """The members must cover the vertices exactly."""
    graph = MixedGraph("AB", [("A", "B")])
    with raises(NotAPartition):
        cluster_graph_of(graph, ClusterSpec.from_members({"C": ("A",)}))
    with raises(NotAPartition):
        cluster_graph_of(graph, ClusterSpec.from_members({"C": ("A", "B", "Z")}))
    with raises(NotAPartition):
        cluster_graph_of(graph, ClusterSpec.from_sizes({"C": 2}))


@given(admgs(min_vertices=2))
def test_cluster_graph_covers_every_edge(admg: MixedGraph) -> None:
    """Every micro edge maps to a cluster edge and every cluster edge has
    a micro edge."""
    members = {"C1": admg.vertices[::2], "C2": admg.vertices[1::2]}
    spec = ClusterSpec.from_members(members)
    cdmg = cluster_graph_of(admg, spec)
    owner = spec.cluster_of
    assert cdmg.directed == {(owner(a), owner(b)) for a, b in admg.directed}
    assert cdmg.bidirected == {
        tuple(sorted((owner(a), owner(b)))) for a, b in admg.bidirected
    }
