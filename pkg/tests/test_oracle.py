"""
Unit tests for `cdmg.oracle`.
"""

from pathlib import Path

import numpy as np
from pytest import approx, mark, raises

from cdmg.dsl import load
from cdmg.graph import (
    ClusterSpec,
    InvalidClusterSpec,
    MixedGraph,
    NotAPartition,
    compatible,
    validate_admg,
)
from cdmg.oracle import (
    Construction,
    Exhausted,
    FoundPair,
    OrderIncompatible,
    PathNotActive,
    SearchSpaceTooLarge,
    active_path_witness,
    descent_order,
    enumerate_compatible_admgs,
    enumeration_space,
    nonidentifiability_probe,
    sample_compatible_admgs,
)
from cdmg.scm import exact_joint, interventional_gap, interventional_truth, random_scm
from cdmg.separation import Walk, active_path, d_separated, is_blocked

from strategies import enumerable_cdmg, random_disjoint_sets

FIXTURES = Path(__file__).parent / "fixtures"

PAIRS = ClusterSpec.from_sizes({"CX": 2, "CY": 2}).realized()


def fixture_graph(name: str) -> MixedGraph:
    return load(FIXTURES / f"{name}.cdmg").graph


def test_enumerate_small_clusters() -> None:
    """With single-variable clusters, the mediator must split into one
    member on each side of the cycle."""
    document = load(FIXTURES / "small_clusters.cdmg")
    assert document.spec is not None
    spec = document.spec.realized()
    admgs = list(enumerate_compatible_admgs(document.graph, spec))
    assert len(admgs) == 2
    for witness in admgs:
        validate_admg(witness.admg)
        assert compatible(witness.admg, spec, document.graph)
        assert witness.construction is Construction.ENUMERATED
    assert admgs[0].admg != admgs[1].admg


def test_enumerate_two_cycle() -> None:
    """
    Every member order of CX allows 33 acyclic ways to connect the two
    clusters in both directions, and CY has no internal edges.
    """
    graph = fixture_graph("two_cycle")
    assert enumeration_space(graph, PAIRS) == 15 * 15 * 3
    admgs = {witness.admg for witness in enumerate_compatible_admgs(graph, PAIRS)}
    assert len(admgs) == 66
    assert all(compatible(admg, PAIRS, graph) for admg in admgs)


def test_enumerate_limits() -> None:
    graph = fixture_graph("two_cycle")
    with raises(SearchSpaceTooLarge):
        list(enumerate_compatible_admgs(graph, PAIRS, limit=100))
    large = ClusterSpec.from_sizes({"CX": 4, "CY": 2}).realized()
    with raises(SearchSpaceTooLarge):
        list(enumerate_compatible_admgs(graph, large))
    many = MixedGraph(["C1", "C2", "C3", "C4", "C5"])
    with raises(SearchSpaceTooLarge):
        list(
            enumerate_compatible_admgs(many, ClusterSpec.singletons(many.vertices))
        )


def test_enumerate_needs_partition() -> None:
    spec = ClusterSpec.from_sizes({"CX": 2}).realized()
    with raises(NotAPartition):
        list(enumerate_compatible_admgs(fixture_graph("two_cycle"), spec))


def test_sample_compatible() -> None:
    graph = fixture_graph("bow")
    samples = sample_compatible_admgs(graph, PAIRS, 3, 10)
    assert len(samples) == 10
    for witness in samples:
        validate_admg(witness.admg)
        assert compatible(witness.admg, PAIRS, graph)
        assert witness.construction is Construction.SAMPLED


def test_sample_unwitnessable_edge() -> None:
    """A self-loop on a single-variable cluster has no micro witness."""
    graph = MixedGraph(["CX"], [("CX", "CX")])
    spec = ClusterSpec.from_sizes({"CX": 1}).realized()
    assert sample_compatible_admgs(graph, spec, 0, 3) == []


def test_descent_order() -> None:
    """Vertices without a route come first, then by decreasing distance."""
    graph = MixedGraph("ABCD", [("A", "B"), ("B", "C")])
    assert descent_order(graph, "C") == ("D", "A", "B", "C")
    assert descent_order(graph, "") == ("A", "B", "C", "D")


def test_active_path_witness_bow() -> None:
    graph = fixture_graph("bow")
    path = Walk.parse("CX <-> CY")
    witness = active_path_witness(graph, path)
    validate_admg(witness.admg)
    assert compatible(witness.admg, witness.spec, graph)
    assert witness.construction is Construction.ACTIVE_PATH
    assert witness.path == Walk.parse("CX_1 <-> CY_1")
    assert not is_blocked(witness.admg, witness.path, ())


def test_active_path_witness_collider() -> None:
    """A collider descends into the conditioning set through the descent
    copies of the clusters."""
    graph = MixedGraph(
        ["CA", "CB", "CC", "CD"], [("CA", "CB"), ("CC", "CB"), ("CB", "CD")]
    )
    path = Walk.parse("CA -> CB <- CC")
    witness = active_path_witness(graph, path, ["CD"])
    validate_admg(witness.admg)
    assert compatible(witness.admg, witness.spec, graph)
    assert witness.path is not None
    assert not is_blocked(witness.admg, witness.path, witness.spec.union(["CD"]))
    assert not d_separated(
        witness.admg,
        witness.spec.members("CA"),
        witness.spec.members("CC"),
        witness.spec.members("CD"),
    )


def test_active_path_witness_errors() -> None:
    chain = MixedGraph(["CA", "CB", "CC"], [("CA", "CB"), ("CB", "CC")])
    with raises(PathNotActive):
        active_path_witness(chain, Walk.parse("CA -> CB -> CC"), ["CB"])
    with raises(InvalidClusterSpec):
        active_path_witness(
            chain,
            Walk.parse("CA -> CB -> CC"),
            spec=ClusterSpec.from_sizes({"CA": 1, "CB": 2, "CC": 2}),
        )

    collider = MixedGraph(
        ["CA", "CB", "CC", "CD"], [("CA", "CB"), ("CC", "CB"), ("CB", "CD")]
    )
    with raises(OrderIncompatible):
        active_path_witness(
            collider,
            Walk.parse("CA -> CB <- CC"),
            ["CD"],
            order=("CD", "CA", "CB", "CC"),
        )
    with raises(OrderIncompatible):
        active_path_witness(
            collider, Walk.parse("CA -> CB <- CC"), ["CD"], order=("CA", "CB")
        )


@mark.parametrize("seed", range(200))
def test_cluster_separation_sound_and_complete(seed: int) -> None:
    """
    Separation in a cluster graph holds in every compatible ADMG, and an
    active path in the cluster graph has an active copy in some
    compatible ADMG.
    """
    rng = np.random.default_rng(seed)
    cdmg, spec = enumerable_cdmg(rng, 3, 0.3)
    x, y, given = random_disjoint_sets(rng, cdmg.vertices, 3)
    path = active_path(cdmg, x, y, given)
    if path is None:
        for candidate in enumerate_compatible_admgs(cdmg, spec, limit=5_000):
            assert d_separated(
                candidate.admg, spec.union(x), spec.union(y), spec.union(given)
            )
    else:
        witness = active_path_witness(cdmg, path, given, spec)
        validate_admg(witness.admg)
        assert compatible(witness.admg, spec, cdmg)
        assert not d_separated(
            witness.admg, spec.union(x), spec.union(y), spec.union(given)
        )


def test_probe_finds_pair_two_cycle() -> None:
    """Reversing the edges between the clusters of a two-cycle keeps the
    joint distribution but changes the effect."""
    graph = fixture_graph("two_cycle")
    result = nonidentifiability_probe(graph, None, ["CX"], ["CY"], max_admgs=100)
    assert isinstance(result, FoundPair)
    assert result.treatment == ("CX_1", "CX_2")
    assert result.outcome == ("CY_1", "CY_2")
    assert result.gap > 0.01
    assert result.observational_gap <= 1e-9
    assert exact_joint(result.first).probabilities == approx(
        exact_joint(result.second).probabilities, abs=1e-9
    )
    assert interventional_gap(
        result.first, result.second, result.treatment, result.outcome
    ) == approx(result.gap)
    assert compatible(result.first.admg, result.spec, graph)
    assert compatible(result.second.admg, result.spec, graph)


def test_bow_has_distinguishing_pair() -> None:
    """A confounded edge between two clusters gives a pair of models with
    the same joint distribution and clearly different effects."""
    graph = fixture_graph("bow")
    result = nonidentifiability_probe(graph, None, ["CX"], ["CY"])
    assert isinstance(result, FoundPair)
    assert result.gap > 0.01
    assert result.observational_gap <= 1e-9
    assert interventional_gap(
        result.first, result.second, result.treatment, result.outcome
    ) == approx(result.gap)
    assert compatible(result.first.admg, result.spec, graph)
    assert compatible(result.second.admg, result.spec, graph)


def test_probe_threads_same_result() -> None:
    graph = fixture_graph("two_cycle")
    single = nonidentifiability_probe(graph, None, ["CX"], ["CY"], max_admgs=100)
    threaded = nonidentifiability_probe(
        graph, None, ["CX"], ["CY"], max_admgs=100, threads=2
    )
    assert isinstance(single, FoundPair)
    assert isinstance(threaded, FoundPair)
    assert threaded.strategy is single.strategy
    assert threaded.gap == approx(single.gap)
    assert threaded.first.admg == single.first.admg


def test_probe_exhausted_when_identifiable() -> None:
    """Without confounding, no pair exists and the probe reports its effort."""
    graph = MixedGraph(["CX", "CY"], [("CX", "CY")])
    result = nonidentifiability_probe(
        graph, None, ["CX"], ["CY"], trials=1, max_admgs=2, seed=4
    )
    assert isinstance(result, Exhausted)
    assert result.admgs == 2
    assert result.models == 2
    assert result.seed == 4


def test_small_clusters_effect_is_conditional() -> None:
    """
    In both ADMGs compatible with the graph of single-variable clusters,
    the effect equals the observational conditional, although the cluster
    graph has a hedge.
    """
    document = load(FIXTURES / "small_clusters.cdmg")
    assert document.spec is not None
    spec = document.spec.realized()
    for index, witness in enumerate(
        enumerate_compatible_admgs(document.graph, spec)
    ):
        scm = random_scm(witness.admg, index)
        pair = exact_joint(scm).marginal(["CX_1", "CY_1"])
        for x in range(2):
            truth = interventional_truth(scm, {"CX_1": x}, ["CY_1"])
            assert truth == approx(pair[x] / pair[x].sum())
