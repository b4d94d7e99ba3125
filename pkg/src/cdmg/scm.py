# SPDX-License-Identifier: BSD-3-Clause

"""
Discrete structural causal models over ADMGs and exact inference in them.

Every bidirected edge of the ADMG becomes one latent variable that feeds
exactly the two endpoints of the edge. Observed variables have a
conditional probability table over their parents and their latents;
latents have a prior.

Joint and interventional distributions are computed exactly with
C{numpy.einsum}, summing out the latents. Interventions use truncated
factorization: the tables of intervened variables are replaced by point
masses at the assigned values.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from math import prod
from typing import Any

import numpy as np
from numpy.typing import NDArray

from cdmg.graph import MixedGraph, validate_admg

STATE_SPACE_LIMIT = 10**7
"""Largest joint state space (observed and latent) that is enumerated."""

FloatArray = NDArray[np.float64]


class StateSpaceTooLarge(Exception):
    """Exact inference would have to enumerate too many states."""


@dataclass(frozen=True)
class Latent:
    """An unobserved common cause of exactly two observed variables."""

    name: str
    children: tuple[str, str]
    prior: FloatArray


@dataclass(frozen=True)
class Mechanism:
    """
    Conditional probability table of one observed variable.

    The axes of C{table} are the parents, then the latents, then the
    variable itself; every slice along the last axis sums to 1.
    """

    variable: str
    parents: tuple[str, ...]
    latents: tuple[str, ...]
    table: FloatArray


@dataclass(frozen=True)
class DiscreteScm:
    """A discrete structural causal model over an ADMG."""

    admg: MixedGraph
    cardinalities: Mapping[str, int]
    latents: tuple[Latent, ...]
    mechanisms: Mapping[str, Mechanism]

    @property
    def latent_cardinalities(self) -> Mapping[str, int]:
        return {latent.name: len(latent.prior) for latent in self.latents}

    def state_space(self) -> int:
        """Number of joint states of all observed and latent variables."""
        return prod(self.cardinalities.values()) * prod(
            self.latent_cardinalities.values()
        )

    def parameters(self) -> list[FloatArray]:
        """All tables, latent priors first, in a fixed order."""
        return [latent.prior for latent in self.latents] + [
            self.mechanisms[v].table for v in self.admg.vertices
        ]

    def with_parameters(self, tables: Sequence[FloatArray]) -> DiscreteScm:
        """Return a model with the same structure and different tables,
        given in the order of L{parameters}."""
        count = len(self.latents)
        latents = tuple(
            Latent(latent.name, latent.children, table)
            for latent, table in zip(self.latents, tables[:count])
        )
        mechanisms = {
            vertex: Mechanism(
                vertex,
                self.mechanisms[vertex].parents,
                self.mechanisms[vertex].latents,
                table,
            )
            for vertex, table in zip(self.admg.vertices, tables[count:])
        }
        return DiscreteScm(self.admg, self.cardinalities, latents, mechanisms)


@dataclass(frozen=True)
class ExactJointTable:
    """A probability table over observed variables."""

    variables: tuple[str, ...]
    probabilities: FloatArray
    """One axis per variable, in the order of L{variables}."""

    @property
    def cardinalities(self) -> tuple[int, ...]:
        return tuple(self.probabilities.shape)

    @property
    def flat(self) -> FloatArray:
        """The table as a flat array, last variable varying fastest."""
        return self.probabilities.reshape(-1)

    def marginal(self, variables: Sequence[str]) -> FloatArray:
        """Return the marginal table over C{variables}, axes in that order."""
        keep = [self.variables.index(v) for v in variables]
        drop = tuple(i for i in range(len(self.variables)) if i not in keep)
        reduced = self.probabilities.sum(axis=drop) if drop else self.probabilities
        remaining = [i for i in range(len(self.variables)) if i in keep]
        return np.transpose(reduced, [remaining.index(i) for i in keep])

    def probability(self, assignment: Mapping[str, int]) -> float:
        """Return the probability of a partial assignment."""
        variables = sorted(assignment)
        table = self.marginal(variables)
        return float(table[tuple(assignment[v] for v in variables)])


def _random_table(
    rng: np.random.Generator, shape: Sequence[int]
) -> FloatArray:
    weights = rng.uniform(0.05, 1.0, size=tuple(shape))
    table: FloatArray = weights / weights.sum(axis=-1, keepdims=True)
    return table


def random_scm(
    admg: MixedGraph,
    seed: int | np.random.Generator,
    max_cardinality: int = 2,
    latent_cardinality: int = 2,
    confounded: bool = True,
) -> DiscreteScm:
    """
    Create a model with random, strictly positive tables.

    @param seed:
        Seed or generator; equal seeds give equal models.
    @param max_cardinality:
        Observed variables get between 2 and this many values.
    @param confounded:
        If C{False}, tables do not depend on the latents, so the
        bidirected edges carry no confounding.
    @raise InvalidAdmg: If C{admg} is not an ADMG.
    """
    validate_admg(admg)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    cardinalities = {
        vertex: int(rng.integers(2, max_cardinality + 1)) if max_cardinality > 2 else 2
        for vertex in admg.vertices
    }
    latents = tuple(
        Latent(
            f"{first}<->{second}",
            (first, second),
            _random_table(rng, (latent_cardinality,)),
        )
        for first, second in sorted(admg.bidirected)
    )
    mechanisms = {}
    for vertex in admg.vertices:
        parents = admg.parents_of(vertex)
        own_latents = tuple(l.name for l in latents if vertex in l.children)
        shape = [cardinalities[p] for p in parents]
        if confounded:
            shape += [latent_cardinality] * len(own_latents)
            table = _random_table(rng, shape + [cardinalities[vertex]])
        else:
            table = _random_table(rng, shape + [cardinalities[vertex]])
            table = np.broadcast_to(
                np.expand_dims(
                    table, tuple(range(len(parents), len(parents) + len(own_latents)))
                ),
                tuple(shape + [latent_cardinality] * len(own_latents))
                + (cardinalities[vertex],),
            ).copy()
        mechanisms[vertex] = Mechanism(vertex, parents, own_latents, table)
    return DiscreteScm(admg, cardinalities, latents, mechanisms)


def fit_scm(
    admg: MixedGraph, joint: ExactJointTable, latent_cardinality: int = 2
) -> DiscreteScm:
    """
    Create a model on C{admg} whose tables are the conditionals of
    C{joint} given the parents of each variable.

    The latents get uniform priors and are ignored by the tables, so the
    model reproduces C{joint} exactly iff C{joint} factorizes along the
    directed part of C{admg}.
    """
    validate_admg(admg)
    cardinalities = dict(zip(joint.variables, joint.cardinalities))
    latents = tuple(
        Latent(
            f"{first}<->{second}",
            (first, second),
            np.full(latent_cardinality, 1.0 / latent_cardinality),
        )
        for first, second in sorted(admg.bidirected)
    )
    mechanisms = {}
    for vertex in admg.vertices:
        parents = admg.parents_of(vertex)
        own_latents = tuple(l.name for l in latents if vertex in l.children)
        family = joint.marginal(parents + (vertex,))
        conditional = family / family.sum(axis=-1, keepdims=True)
        expanded = np.expand_dims(
            conditional, tuple(range(len(parents), len(parents) + len(own_latents)))
        )
        shape = (
            conditional.shape[:-1]
            + (latent_cardinality,) * len(own_latents)
            + conditional.shape[-1:]
        )
        table = np.broadcast_to(expanded, shape).copy()
        mechanisms[vertex] = Mechanism(vertex, parents, own_latents, table)
    return DiscreteScm(admg, cardinalities, latents, mechanisms)


def _contract(
    scm: DiscreteScm,
    output: Sequence[str],
    clamp: Mapping[str, int],
    state_limit: int,
) -> FloatArray:
    if scm.state_space() > state_limit:
        raise StateSpaceTooLarge(
            f"{scm.state_space()} joint states exceed the limit of {state_limit}"
        )
    labels = {
        name: index
        for index, name in enumerate(
            list(scm.admg.vertices) + [latent.name for latent in scm.latents]
        )
    }
    operands: list[Any] = []
    for latent in scm.latents:
        operands += [latent.prior, [labels[latent.name]]]
    for vertex in scm.admg.vertices:
        if vertex in clamp:
            point = np.zeros(scm.cardinalities[vertex])
            point[clamp[vertex]] = 1.0
            operands += [point, [labels[vertex]]]
        else:
            mechanism = scm.mechanisms[vertex]
            axes = mechanism.parents + mechanism.latents + (vertex,)
            operands += [mechanism.table, [labels[name] for name in axes]]
    if not operands:
        return np.ones(())
    operands.append([labels[name] for name in output])
    result: FloatArray = np.einsum(*operands, optimize=True)
    return result


def exact_joint(
    scm: DiscreteScm, state_limit: int = STATE_SPACE_LIMIT
) -> ExactJointTable:
    """
    Compute the distribution of the observed variables.

    @raise StateSpaceTooLarge: If more than C{state_limit} joint states
        would be enumerated.
    """
    variables = scm.admg.vertices
    return ExactJointTable(variables, _contract(scm, variables, {}, state_limit))


def interventional_truth(
    scm: DiscreteScm,
    assignment: Mapping[str, int],
    outcome: Iterable[str],
    state_limit: int = STATE_SPACE_LIMIT,
) -> FloatArray:
    """
    Compute P(outcome | do(assignment)) by truncated factorization.

    @return: A table with one axis per outcome variable, in the order
        given.
    @raise StateSpaceTooLarge: If more than C{state_limit} joint states
        would be enumerated.
    """
    outcome = tuple(outcome)
    scm.admg.check_vertices(assignment)
    scm.admg.check_vertices(outcome)
    return _contract(scm, outcome, assignment, state_limit)


def interventional_gap(
    first: DiscreteScm,
    second: DiscreteScm,
    treatment: Sequence[str],
    outcome: Sequence[str],
) -> float:
    """
    Return the largest difference between the interventional
    distributions of two models, over all values of the treatment and
    the outcome.
    """
    cardinalities = [first.cardinalities[v] for v in treatment]
    gap = 0.0
    for values in np.ndindex(*cardinalities):
        assignment = dict(zip(treatment, (int(v) for v in values)))
        difference = interventional_truth(
            first, assignment, outcome
        ) - interventional_truth(second, assignment, outcome)
        gap = max(gap, float(np.abs(difference).max(initial=0.0)))
    return gap
