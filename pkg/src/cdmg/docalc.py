# SPDX-License-Identifier: BSD-3-Clause

"""
Side conditions of the three do-calculus rules.

For disjoint vertex sets Y, X, Z and W, the rules are:

  1. Insertion or deletion of observations:
     P(y|do(z),x,w) = P(y|do(z),w)
     if (Y _||_ X | Z, W) holds in the graph with the edges coming into
     Z removed.
  2. Exchange of action and observation:
     P(y|do(z),do(x),w) = P(y|do(z),x,w)
     if (Y _||_ X | Z, W) holds in the graph with the edges coming into
     Z and the edges going out of X removed.
  3. Insertion or deletion of actions:
     P(y|do(z),do(x),w) = P(y|do(z),w)
     if (Y _||_ X | Z, W) holds in the graph with the edges coming into
     Z and into X(W) removed, where X(W) are the vertices of X that
     are not ancestors of W once the edges into Z are removed.

The rules apply to ADMGs and to cluster graphs alike; on a cluster graph
a rule that applies is valid in every compatible ADMG.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field
from enum import Enum
from logging import getLogger

from cdmg.graph import ClusterSpec, MixedGraph, VertexSet, ancestors
from cdmg.mutilation import mutilate
from cdmg.oracle import (
    CompatibleAdmgWitness,
    active_path_witness,
    descent_order,
    enumerate_compatible_admgs,
)
from cdmg.separation import active_path, check_disjoint, d_separated, format_vertices

_LOG = getLogger(__name__)


class AssumptionOneViolated(Exception):
    """A cluster is known to contain a single variable, which the
    requested operation does not support."""


class Rule(Enum):
    """The three rules of the do-calculus."""

    R1 = 1
    R2 = 2
    R3 = 3

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class RuleQuery:
    """
    A question whether one rule of the do-calculus may be applied.

    The sets follow the rule statements in the module documentation:
    C{x} is the set that is inserted or deleted (rules 1 and 3) or whose
    actions are exchanged for observations (rule 2), C{z} are the other
    actions and C{w} the other observations.
    """

    graph: MixedGraph
    rule: Rule
    y: VertexSet
    x: VertexSet
    z: VertexSet = field(default=frozenset())
    w: VertexSet = field(default=frozenset())

    def __post_init__(self) -> None:
        for name in ("y", "x", "z", "w"):
            object.__setattr__(
                self, name, self.graph.check_vertices(getattr(self, name))
            )
        check_disjoint(self.y, self.x, self.z, self.w)

    @property
    def conditioning(self) -> VertexSet:
        """The conditioning set of the d-separation side condition."""
        return self.z | self.w

    def lifted(self, admg: MixedGraph, spec: ClusterSpec) -> RuleQuery:
        """Return the same query posed on C{admg}, with every cluster
        replaced by its members."""
        return RuleQuery(
            admg,
            self.rule,
            spec.union(self.y),
            spec.union(self.x),
            spec.union(self.z),
            spec.union(self.w),
        )

    def __str__(self) -> str:
        return (
            f"{self.rule}: ({format_vertices(self.y)} _||_ "
            f"{format_vertices(self.x)} | {format_vertices(self.conditioning)})"
        )


def x_given_w(
    graph: MixedGraph, x: Iterable[str], w: Iterable[str], z: Iterable[str] = ()
) -> VertexSet:
    """
    Return the vertices of C{x} that are not ancestors of any vertex of
    C{w} in the graph with the edges coming into C{z} removed.

    @raise SetsNotDisjoint: If the sets overlap.
    """
    xs, ws, zs = check_disjoint(
        graph.check_vertices(x), graph.check_vertices(w), graph.check_vertices(z)
    )
    return xs - ancestors(mutilate(graph, zs), ws)


def rule_graph(query: RuleQuery) -> MixedGraph:
    """Return the mutilated graph on which the side condition of
    C{query} is evaluated."""
    graph = query.graph
    if query.rule is Rule.R1:
        return mutilate(graph, query.z)
    if query.rule is Rule.R2:
        return mutilate(graph, query.z, query.x)
    return mutilate(graph, query.z | x_given_w(graph, query.x, query.w, query.z))


def rule_applies(query: RuleQuery) -> bool:
    """Decide the side condition of C{query}."""
    return d_separated(rule_graph(query), query.y, query.x, query.conditioning)


def rule_counterexample(
    query: RuleQuery, spec: ClusterSpec | None = None
) -> CompatibleAdmgWitness | None:
    """
    Find an ADMG compatible with the cluster graph of C{query} in which
    the corresponding rule does not apply.

    The two-copies construction is tried first: it is built from an
    active path in the mutilated cluster graph and usually works.
    If it is not a counterexample, compatible ADMGs are enumerated.

    @param spec:
        Cluster sizes; clusters of unknown size get two members.
    @return: A witness, or C{None} if the rule applies on the cluster graph.
    @raise AssumptionOneViolated: If C{spec} has a cluster of size 1.
    @raise SearchSpaceTooLarge: If the fallback enumeration is too large.
    """
    if spec is None:
        spec = ClusterSpec.from_sizes({c: None for c in query.graph.vertices})
    if not spec.satisfies_assumption_1:
        raise AssumptionOneViolated(
            "clusters of size 1: " + ", ".join(spec.small_clusters)
        )
    mutilated = rule_graph(query)
    path = active_path(mutilated, query.y, query.x, query.conditioning)
    if path is None:
        return None

    order = descent_order(mutilated, query.conditioning)
    witness = active_path_witness(
        query.graph, path, query.conditioning, spec, order
    )
    if not rule_applies(query.lifted(witness.admg, witness.spec)):
        return witness
    _LOG.debug(
        "two-copies witness does not refute %s; enumerating compatible ADMGs",
        query,
    )

    for candidate in enumerate_compatible_admgs(
        query.graph, spec.realized(default_size=2)
    ):
        if not rule_applies(query.lifted(candidate.admg, candidate.spec)):
            return candidate
    _LOG.error("no compatible ADMG refutes %s", query)
    return None
