"""
Unit tests for `cdmg.identify`.
"""

from collections.abc import Sequence
from itertools import product
from logging import WARNING
from pathlib import Path

import numpy as np
from pytest import LogCaptureFixture, approx, mark, raises

from cdmg.dsl import GraphDocument, load
from cdmg.estimand import (
    Symbol,
    canonical,
    evaluate_estimand,
    is_observational,
    probability,
    render,
)
from cdmg.graph import ClusterSpec, MixedGraph
from cdmg.identify import (
    Budget,
    EmptyTarget,
    Identified,
    NonIdentifiable,
    NotIdentified,
    Unknown,
    Verdict,
    _key,
    _Search,
    derivation_trace,
    identify_macro,
)
from cdmg.oracle import sample_compatible_admgs
from cdmg.scm import exact_joint, interventional_truth, random_scm

from strategies import random_cdmg, random_disjoint_sets

FIXTURES = Path(__file__).parent / "fixtures"


def fixture(name: str) -> GraphDocument:
    return load(FIXTURES / f"{name}.cdmg")


def identify_fixture(name: str, budget: Budget = Budget()) -> Verdict:
    document = fixture(name)
    query = document.queries[0]
    return identify_macro(
        document.graph, document.spec, query.do, query.on, query.given, budget
    )


@mark.parametrize(
    "name, estimand",
    (
        ("feedback_treatment", "P(CY|CX)"),
        ("front_door", "sum_{CW} P(CW|CX) * sum_{CX'} P(CY|CW,CX') * P(CX')"),
        ("mediator_cycle", "P(CY|CX)"),
        ("joint_treatment", "sum_{CW} P(CY|CW,CX,CZ) * P(CW|CZ)"),
    ),
)
def test_identified(name: str, estimand: str) -> None:
    """Cluster graphs with cycles whose effect has a closed form."""
    verdict = identify_fixture(name)
    assert isinstance(verdict, Identified)
    assert render(verdict.estimand) == estimand
    assert not verdict.assumption1_warning


def test_identified_by_one_rule() -> None:
    """Exchanging the action for an observation is the whole derivation."""
    verdict = identify_fixture("feedback_treatment")
    trace = derivation_trace(verdict)
    assert [entry.rule for entry in trace] == ["R2"]
    assert trace[0].condition == "R2: ({CY} _||_ {CX} | {})"
    assert trace[0].graph is not None
    assert ("CX", "CY") not in trace[0].graph.directed


def test_joint_treatment_derivation() -> None:
    """The derivation conditions on the mediator first, then removes
    actions one at a time."""
    trace = derivation_trace(identify_fixture("joint_treatment"))
    assert [entry.rule for entry in trace] == [
        "total probability",
        "R2",
        "R2",
        "R3",
        "R2",
    ]
    assert render(trace[0].before) == "P(CY|do(CX,CZ))"


@mark.parametrize(
    "name", ("two_cycle", "bow", "confounded_cycle", "confounded_chain_cycle")
)
def test_non_identifiable(name: str) -> None:
    verdict = identify_fixture(name)
    assert isinstance(verdict, NonIdentifiable)
    assert verdict.certificate.x == {"CX"}
    assert verdict.certificate.y == {"CY"}
    with raises(NotIdentified):
        derivation_trace(verdict)


def test_non_identifiable_two_cycle_uses_projection() -> None:
    """The hedge of a two-cycle only exists because of the projection."""
    verdict = identify_fixture("two_cycle")
    assert isinstance(verdict, NonIdentifiable)
    assert verdict.certificate.projection_edges_used == {("CX", "CY")}


def test_small_clusters_warn(caplog: LogCaptureFixture) -> None:
    """A cluster of a single variable makes the verdict advisory."""
    with caplog.at_level(WARNING):
        verdict = identify_fixture("small_clusters")
    assert isinstance(verdict, NonIdentifiable)
    assert verdict.assumption1_warning
    assert any(
        "clusters with a single variable: CX, CY" in record.getMessage()
        for record in caplog.records
    )


def test_no_treatment() -> None:
    document = fixture("front_door")
    verdict = identify_macro(document.graph, None, (), ["CY"], ["CW"])
    assert isinstance(verdict, Identified)
    assert render(verdict.estimand) == "P(CY|CW)"
    assert verdict.trace == ()


def test_empty_target() -> None:
    document = fixture("front_door")
    with raises(EmptyTarget):
        identify_macro(document.graph, None, ["CX"], ())


def test_unknown_when_depth_runs_out() -> None:
    """The front door needs expansion moves, which depth 0 forbids."""
    verdict = identify_fixture("front_door", Budget(depth=0))
    assert isinstance(verdict, Unknown)
    assert verdict.report.depth == 0
    assert not verdict.report.exhausted


def test_unknown_when_nodes_run_out() -> None:
    verdict = identify_fixture("front_door", Budget(nodes=1))
    assert isinstance(verdict, Unknown)
    assert verdict.report.exhausted
    # Depth 0 needs a single term, so it completes before the budget runs out.
    assert verdict.report.depth == 0




def test_non_identifiable_clustered() -> None:
    """Both cycles through the middle cluster end up in the projection."""
    verdict = identify_fixture("clustered")
    assert isinstance(verdict, NonIdentifiable)
    assert not verdict.assumption1_warning
    assert verdict.certificate.projection_edges_used == {
        ("CW", "CX"),
        ("CW", "CY"),
    }


def test_failure_below_refused_term_is_retried() -> None:
    """
    A term that fails only because its successors are being solved
    further up is solved when it is reached again from elsewhere.
    """
    graph = MixedGraph(["CX", "CY", "CZ"], [("CX", "CY")], [("CY", "CZ")])
    term = probability(["CY"], do=["CX", "CZ"])
    above = frozenset(
        {
            _key(probability(["CY"], ["CX"], ["CZ"])),
            _key(probability(["CY"], do=["CX"])),
        }
    )
    search = _Search(graph, Budget())
    assert search.solve(term, 0, term.symbols, above) is None
    result = search.solve(term, 0, term.symbols, frozenset())
    assert result is not None
    estimand, trace = result
    assert render(canonical(estimand)) == "P(CY|CX)"
    assert [entry.rule for entry in trace] == ["R2", "R3"]


def check_estimand(
    verdict: Identified,
    spec: ClusterSpec,
    admg: MixedGraph,
    treatment_clusters: Sequence[str],
    outcome_clusters: Sequence[str],
    rng: np.random.Generator,
    models: int = 20,
) -> None:
    """
    Compare the estimand with the interventional distribution of
    C{models} random models on C{admg}, for every value of the treatment
    and the outcome.
    """
    clusters = {c: spec.members(c) for c in spec}
    treatment = [v for c in treatment_clusters for v in spec.members(c)]
    outcome = [v for c in outcome_clusters for v in spec.members(c)]
    for _ in range(models):
        scm = random_scm(admg, rng)
        joint = exact_joint(scm)
        for x_values in product(range(2), repeat=len(treatment)):
            truth = interventional_truth(scm, dict(zip(treatment, x_values)), outcome)
            for y_values in product(range(2), repeat=len(outcome)):
                values = dict(zip(treatment + outcome, x_values + y_values))
                assignment = {
                    Symbol(c): tuple(values[v] for v in spec.members(c))
                    for c in (*treatment_clusters, *outcome_clusters)
                }
                value = evaluate_estimand(
                    verdict.estimand, joint, assignment, clusters
                )
                assert value == approx(float(truth[y_values]), abs=1e-9)


@mark.parametrize(
    "name",
    ("feedback_treatment", "front_door", "mediator_cycle", "joint_treatment"),
)
def test_estimand_matches_compatible_models(name: str) -> None:
    """
    The estimand computed on the cluster graph gives the interventional
    distribution of random models on compatible ADMGs.
    """
    document = fixture(name)
    verdict = identify_fixture(name)
    assert isinstance(verdict, Identified)
    query = document.queries[0]
    spec = ClusterSpec.from_sizes({c: 2 for c in document.graph.vertices}).realized()
    rng = np.random.default_rng(len(name))
    witnesses = sample_compatible_admgs(
        document.graph, spec, rng, 2, max_attempts=5_000
    )
    assert len(witnesses) == 2
    for witness in witnesses:
        check_estimand(verdict, spec, witness.admg, query.do, query.on, rng)


@mark.parametrize("seed", range(100))
def test_random_estimands_match_compatible_models(seed: int) -> None:
    """
    Random cluster graphs are drawn until the effect of one random set of
    clusters on another is identified; the estimand is then checked on
    random models over compatible ADMGs.
    """
    rng = np.random.default_rng(seed)
    while True:
        cdmg = random_cdmg(rng, 3, 0.3)
        x, y = random_disjoint_sets(rng, cdmg.vertices, 2)
        budget = Budget(depth=4, nodes=2_000)
        verdict = identify_macro(cdmg, None, x, y, budget=budget)
        if isinstance(verdict, Identified):
            break
    assert isinstance(verdict, Identified)
    assert is_observational(verdict.estimand)
    spec = ClusterSpec.from_sizes({c: 2 for c in cdmg.vertices}).realized()
    witnesses = sample_compatible_admgs(cdmg, spec, rng, 2, max_attempts=5_000)
    assert len(witnesses) == 2
    for witness in witnesses:
        check_estimand(verdict, spec, witness.admg, sorted(x), sorted(y), rng)
