# SPDX-License-Identifier: BSD-3-Clause

"""
Ground truth by brute force: compatible ADMGs and two-model evidence of
non-identifiability.

The graph-level algorithms in this package make claims about I{every}
ADMG compatible with a cluster graph. This module makes such claims
checkable on small instances:

  - L{enumerate_compatible_admgs} lists every compatible ADMG;
  - L{active_path_witness} builds, from an active path in a cluster
    graph, one compatible ADMG in which the path's micro copy is active;
  - L{nonidentifiability_probe} searches for two models that agree on
    the observational distribution but disagree on an interventional
    one.

Intra-cluster micro edges are licensed only by self-loops of the cluster
graph: a cluster without a directed self-loop has no directed edges among
its members, and likewise for bidirected self-loops.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable, Iterator, Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from itertools import combinations, permutations, product
from logging import getLogger
from math import prod

import networkx as nx
import numpy as np

from cdmg.graph import (
    ClusterSpec,
    Edge,
    EdgeKind,
    InvalidClusterSpec,
    Mark,
    MixedGraph,
    NotAPartition,
    VertexSet,
    bidirected_pair,
)
from cdmg.hedge import find_hedge
from cdmg.scm import (
    DiscreteScm,
    FloatArray,
    exact_joint,
    fit_scm,
    interventional_gap,
    interventional_truth,
    random_scm,
)
from cdmg.separation import Walk, check_walk, is_blocked

_LOG = getLogger(__name__)

MAX_CLUSTERS = 4
"""Largest number of clusters L{enumerate_compatible_admgs} accepts."""

MAX_CLUSTER_SIZE = 3
"""Largest cluster size L{enumerate_compatible_admgs} accepts."""

DEFAULT_ENUMERATION_LIMIT = 100_000
"""Largest number of edge assignments that is enumerated by default."""

OBSERVATIONAL_TOLERANCE = 1e-9
"""Largest difference between two joints that still counts as equal."""


class SearchSpaceTooLarge(Exception):
    """An enumeration would have to visit too many candidates."""


class PathNotActive(Exception):
    """A path given as active is blocked."""


class OrderIncompatible(Exception):
    """An order does not let every collider on a path descend into the
    conditioning set along increasing vertices."""


class Construction(Enum):
    """How a compatible ADMG was obtained."""

    ENUMERATED = "enumerated"
    SAMPLED = "sampled"
    ACTIVE_PATH = "active-path"


@dataclass(frozen=True)
class CompatibleAdmgWitness:
    """An ADMG together with the partition that makes it compatible with
    a given cluster graph."""

    admg: MixedGraph
    spec: ClusterSpec
    construction: Construction
    order: tuple[str, ...] | None = None
    """The descent order used by the active-path construction."""
    path: Walk | None = None
    """The micro copy of the cluster path, for the active-path construction."""


def _check_clusters(cdmg: MixedGraph, spec: ClusterSpec) -> None:
    if set(spec) != cdmg.vertex_set:
        raise NotAPartition(
            "clusters of the specification do not match the graph: "
            + ", ".join(sorted(set(spec) ^ cdmg.vertex_set))
        )


def _candidates(
    cdmg: MixedGraph, spec: ClusterSpec
) -> tuple[list[list[Edge]], list[list[Edge]]]:
    """Return, for every directed and every bidirected edge of C{cdmg},
    the micro edges that can witness it."""
    directed = []
    for tail, head in sorted(cdmg.directed):
        if tail == head:
            directed.append(list(permutations(spec.members(tail), 2)))
        else:
            directed.append(list(product(spec.members(tail), spec.members(head))))
    bidirected = []
    for first, second in sorted(cdmg.bidirected):
        if first == second:
            bidirected.append(list(combinations(spec.members(first), 2)))
        else:
            bidirected.append(
                [
                    bidirected_pair(u, v)
                    for u, v in product(spec.members(first), spec.members(second))
                ]
            )
    return directed, bidirected


def _nonempty_subsets(edges: Sequence[Edge]) -> Iterator[tuple[Edge, ...]]:
    for size in range(1, len(edges) + 1):
        yield from combinations(edges, size)


def enumeration_space(cdmg: MixedGraph, spec: ClusterSpec) -> int:
    """
    Return the number of edge assignments that
    L{enumerate_compatible_admgs} visits, before filtering out cyclic ones.

    @raise UnknownSizes: If a cluster has unknown members.
    """
    _check_clusters(cdmg, spec)
    directed, bidirected = _candidates(cdmg, spec)
    return prod(2 ** len(c) - 1 for c in directed + bidirected)


def enumerate_compatible_admgs(
    cdmg: MixedGraph, spec: ClusterSpec, limit: int = DEFAULT_ENUMERATION_LIMIT
) -> Iterator[CompatibleAdmgWitness]:
    """
    Yield every ADMG compatible with C{cdmg} under the partition C{spec}.

    Each edge of the cluster graph is witnessed by a nonempty set of
    micro edges between the members of its endpoints. The assignments
    are visited in a fixed order: edges in sorted order, and for each
    edge the smaller witness sets first.

    @param spec:
        Partition with known members; use L{ClusterSpec.realized} to
        fill in members of clusters with only a known size.
    @raise SearchSpaceTooLarge: If there are more than L{MAX_CLUSTERS}
        clusters, a cluster has more than L{MAX_CLUSTER_SIZE} members, or
        there are more than C{limit} edge assignments.
    @raise UnknownSizes: If a cluster has unknown members.
    @raise NotAPartition: If the clusters of C{spec} are not the
        vertices of C{cdmg}.
    """
    _check_clusters(cdmg, spec)
    if len(spec) > MAX_CLUSTERS:
        raise SearchSpaceTooLarge(
            f"{len(spec)} clusters is more than the limit of {MAX_CLUSTERS}"
        )
    for cluster in spec:
        if len(spec.members(cluster)) > MAX_CLUSTER_SIZE:
            raise SearchSpaceTooLarge(
                f'cluster "{cluster}" has {len(spec.members(cluster))} members, '
                f"more than the limit of {MAX_CLUSTER_SIZE}"
            )
    space = enumeration_space(cdmg, spec)
    if space > limit:
        raise SearchSpaceTooLarge(
            f"{space} edge assignments is more than the limit of {limit}"
        )
    _LOG.debug("enumerating %d edge assignments", space)

    vertices = spec.union(spec)
    directed, bidirected = _candidates(cdmg, spec)
    for directed_choice in product(*(_nonempty_subsets(c) for c in directed)):
        directed_edges = [edge for choice in directed_choice for edge in choice]
        digraph: nx.DiGraph[str] = nx.DiGraph(directed_edges)
        if not nx.is_directed_acyclic_graph(digraph):
            continue
        for bidirected_choice in product(
            *(_nonempty_subsets(c) for c in bidirected)
        ):
            admg = MixedGraph(
                vertices,
                directed_edges,
                (edge for choice in bidirected_choice for edge in choice),
            )
            yield CompatibleAdmgWitness(admg, spec, Construction.ENUMERATED)


def sample_compatible_admgs(
    cdmg: MixedGraph,
    spec: ClusterSpec,
    seed: int | np.random.Generator,
    count: int,
    max_attempts: int | None = None,
) -> list[CompatibleAdmgWitness]:
    """
    Draw compatible ADMGs at random.

    Every edge of the cluster graph gets a uniformly drawn nonempty set
    of witnessing micro edges; cyclic draws are rejected. Unlike
    enumeration, there is no limit on the size of the graph.

    @param max_attempts:
        Number of draws after which to give up, by default 50 per
        requested ADMG.
    @return: Up to C{count} ADMGs, possibly with repetitions.
    """
    _check_clusters(cdmg, spec)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if max_attempts is None:
        max_attempts = 50 * count
    vertices = spec.union(spec)
    directed, bidirected = _candidates(cdmg, spec)

    def draw(candidates: Sequence[Edge]) -> list[Edge]:
        if not candidates:
            return []
        mask = int(rng.integers(1, 2 ** len(candidates)))
        return [edge for bit, edge in enumerate(candidates) if mask >> bit & 1]

    samples: list[CompatibleAdmgWitness] = []
    for _ in range(max_attempts):
        if len(samples) == count:
            break
        if any(not c for c in directed + bidirected):
            # Some edge cannot be witnessed at all.
            break
        directed_edges = [edge for c in directed for edge in draw(c)]
        if not nx.is_directed_acyclic_graph(nx.DiGraph(directed_edges)):
            continue
        bidirected_edges = [edge for c in bidirected for edge in draw(c)]
        samples.append(
            CompatibleAdmgWitness(
                MixedGraph(vertices, directed_edges, bidirected_edges),
                spec,
                Construction.SAMPLED,
            )
        )
    if len(samples) < count:
        _LOG.info("drew %d of %d requested compatible ADMGs", len(samples), count)
    return samples


def descent_order(graph: MixedGraph, targets: Iterable[str]) -> tuple[str, ...]:
    """
    Return a total order of the vertices of C{graph} in which every vertex
    that has a directed route into C{targets} has one that visits
    strictly increasing vertices.

    Vertices are ordered by decreasing distance to C{targets}, vertices
    without a route first, ties broken by name.
    """
    goal = graph.check_vertices(targets)
    distance: Mapping[str, int] = (
        nx.multi_source_dijkstra_path_length(graph.digraph.reverse(copy=False), goal)
        if goal
        else {}
    )

    def key(vertex: str) -> tuple[int, int, str]:
        if vertex in distance:
            return (1, -distance[vertex], vertex)
        return (0, 0, vertex)

    return tuple(sorted(graph.vertices, key=key))


def _can_descend(
    graph: MixedGraph, order: Sequence[str], targets: VertexSet
) -> VertexSet:
    """Return the vertices with a directed route into C{targets} that
    visits vertices in increasing C{order}."""
    position = {vertex: index for index, vertex in enumerate(order)}
    reached = set(targets)
    for vertex in reversed(order):
        if vertex in reached:
            continue
        if any(
            child in reached and position[child] > position[vertex]
            for child in graph.children_of(vertex)
        ):
            reached.add(vertex)
    return frozenset(reached)


def active_path_witness(
    cdmg: MixedGraph,
    path: Walk,
    given: Iterable[str] = (),
    spec: ClusterSpec | None = None,
    order: Sequence[str] | None = None,
) -> CompatibleAdmgWitness:
    """
    Build a compatible ADMG in which the micro copy of an active cluster
    path is active.

    Every cluster C gets a path copy M{C_0} and a descent copy M{C_1}:
      - each directed cluster edge C -> D becomes M{C_0 -> D_1};
      - each step of C{path} becomes the same kind of edge between path
        copies;
      - each directed cluster edge C -> D with C before D in C{order}
        becomes M{C_1 -> D_1};
      - each bidirected cluster edge C <-> D becomes M{C_0 <-> D_0}, and a
        bidirected self-loop on C becomes M{C_0 <-> C_1}.
    The result is acyclic because path copies only feed each other along
    the path, and descent copies only feed each other in C{order}.
    A collider on the path descends through its descent copies.

    @param given:
        The clusters the path is active given.
    @param spec:
        Cluster sizes or members; the first two members of every cluster
        serve as its copies and any other members stay isolated.
        By default every cluster gets two generated members.
    @param order:
        Total order of the clusters; by default L{descent_order}.
    @raise PathNotActive: If C{path} is blocked by C{given}.
    @raise OrderIncompatible: If some collider on C{path} cannot descend
        into C{given} along increasing clusters.
    @raise InvalidClusterSpec: If a cluster has fewer than two members.
    @raise WalkNotInGraph: If C{path} is not a path in C{cdmg}.
    """
    conditioned = cdmg.check_vertices(given)
    check_walk(cdmg, path)
    if is_blocked(cdmg, path, conditioned):
        raise PathNotActive(f"path {path} is blocked")
    if order is None:
        order = descent_order(cdmg, conditioned)
    elif sorted(order) != list(cdmg.vertices):
        raise OrderIncompatible("order must list every cluster exactly once")
    position = {cluster: index for index, cluster in enumerate(order)}

    descending = _can_descend(cdmg, order, conditioned)
    for index in range(1, len(path.vertices) - 1):
        arriving = path.kinds[index - 1].marks[1]
        leaving = path.kinds[index].marks[0]
        cluster = path.vertices[index]
        collider = arriving is Mark.HEAD and leaving is Mark.HEAD
        if collider and cluster not in descending:
            raise OrderIncompatible(
                f'collider "{cluster}" has no increasing route into the '
                f"conditioning set"
            )

    if spec is None:
        spec = ClusterSpec.from_sizes({c: 2 for c in cdmg.vertices})
    spec = spec.realized(default_size=2)
    _check_clusters(cdmg, spec)
    for cluster in spec:
        if len(spec.members(cluster)) < 2:
            raise InvalidClusterSpec(
                f'cluster "{cluster}" needs at least two members '
                f"for the active-path construction"
            )
    path_copy = {c: spec.members(c)[0] for c in spec}
    descent_copy = {c: spec.members(c)[1] for c in spec}

    directed = {(path_copy[a], descent_copy[b]) for a, b in cdmg.directed}
    for source, kind, target in path.steps():
        if kind is EdgeKind.FORWARD:
            directed.add((path_copy[source], path_copy[target]))
        elif kind is EdgeKind.BACKWARD:
            directed.add((path_copy[target], path_copy[source]))
    directed |= {
        (descent_copy[a], descent_copy[b])
        for a, b in cdmg.directed
        if position[a] < position[b]
    }
    bidirected = {
        (path_copy[a], descent_copy[b] if a == b else path_copy[b])
        for a, b in cdmg.bidirected
    }
    admg = MixedGraph(spec.union(spec), directed, bidirected)
    micro_path = Walk(tuple(path_copy[c] for c in path.vertices), path.kinds)
    return CompatibleAdmgWitness(
        admg, spec, Construction.ACTIVE_PATH, tuple(order), micro_path
    )


class ProbeStrategy(Enum):
    """How a pair of models was found."""

    EQUIVALENT_STRUCTURES = "equivalent-structures"
    """Two compatible ADMGs with Markov equivalent directed parts."""
    PARAMETER_COUPLING = "parameter-coupling"
    """One compatible ADMG with two parameterizations."""


@dataclass(frozen=True)
class FoundPair:
    """Two models that agree observationally but not interventionally."""

    first: DiscreteScm
    second: DiscreteScm
    spec: ClusterSpec
    treatment: tuple[str, ...]
    outcome: tuple[str, ...]
    gap: float
    """Largest difference between the interventional distributions."""
    observational_gap: float
    """Largest difference between the observational distributions."""
    strategy: ProbeStrategy
    seed: int


@dataclass(frozen=True)
class Exhausted:
    """No pair was found within the given effort."""

    admgs: int
    """Number of compatible ADMGs that were tried."""
    models: int
    """Number of models that were tried."""
    seed: int


ProbeResult = FoundPair | Exhausted


_Signature = tuple[frozenset[VertexSet], frozenset[tuple[VertexSet, str]]]


def _markov_signature(admg: MixedGraph) -> _Signature:
    """Skeleton and unshielded colliders of the directed part."""
    skeleton = frozenset(frozenset(edge) for edge in admg.directed)
    colliders = set()
    for vertex in admg.vertices:
        for first, second in combinations(admg.parents_of(vertex), 2):
            if frozenset((first, second)) not in skeleton:
                colliders.add((frozenset((first, second)), vertex))
    return skeleton, frozenset(colliders)


def _joint_gap(first: DiscreteScm, second: DiscreteScm) -> float:
    difference = exact_joint(first).probabilities - exact_joint(second).probabilities
    return float(np.abs(difference).max(initial=0.0))


def _try_equivalent_pair(
    first: MixedGraph,
    second: MixedGraph,
    rng: np.random.Generator,
    trials: int,
    treatment: Sequence[str],
    outcome: Sequence[str],
    min_gap: float,
) -> tuple[DiscreteScm, DiscreteScm, float, float] | None:
    for _ in range(trials):
        model = random_scm(first, rng, confounded=False)
        fitted = fit_scm(second, exact_joint(model))
        observational = _joint_gap(model, fitted)
        if observational > OBSERVATIONAL_TOLERANCE:
            _LOG.debug("fitted model does not reproduce the joint: %g", observational)
            continue
        gap = interventional_gap(model, fitted, treatment, outcome)
        if gap > min_gap:
            return model, fitted, gap, observational
    return None


class _Coupling:
    """Softmax parameterization of a model, with numeric Jacobians."""

    def __init__(
        self, model: DiscreteScm, treatment: Sequence[str], outcome: Sequence[str]
    ):
        self.model = model
        self.treatment = {vertex: 0 for vertex in treatment}
        self.outcome = tuple(outcome)
        tables = model.parameters()
        self.shapes = [table.shape for table in tables]
        self.sizes = [table.size for table in tables]
        self.theta0 = np.concatenate([np.log(table).reshape(-1) for table in tables])

    def model_at(self, theta: FloatArray) -> DiscreteScm:
        tables = []
        offset = 0
        for shape, size in zip(self.shapes, self.sizes):
            logits = theta[offset : offset + size].reshape(shape)
            offset += size
            weights = np.exp(logits - logits.max(axis=-1, keepdims=True))
            tables.append(weights / weights.sum(axis=-1, keepdims=True))
        return self.model.with_parameters(tables)

    def observational(self, theta: FloatArray) -> FloatArray:
        return exact_joint(self.model_at(theta)).flat

    def interventional(self, theta: FloatArray) -> FloatArray:
        result = interventional_truth(
            self.model_at(theta), self.treatment, self.outcome
        )
        return result.reshape(-1)

    @staticmethod
    def jacobian(
        function: Callable[[FloatArray], FloatArray], theta: FloatArray
    ) -> FloatArray:
        step = 1e-5
        columns = []
        for index in range(len(theta)):
            delta = np.zeros_like(theta)
            delta[index] = step
            difference = function(theta + delta) - function(theta - delta)
            columns.append(difference / (2 * step))
        return np.stack(columns, axis=1)


def _try_coupling(
    admg: MixedGraph,
    rng: np.random.Generator,
    trials: int,
    treatment: Sequence[str],
    outcome: Sequence[str],
    min_gap: float,
    max_steps: int = 20,
) -> tuple[DiscreteScm, DiscreteScm, float, float] | None:
    """Walk along the parameters with an unchanged observational joint,
    in the direction that changes the interventional distribution most."""
    for _ in range(trials):
        coupling = _Coupling(random_scm(admg, rng), treatment, outcome)
        theta = coupling.theta0
        target = coupling.observational(theta)
        start = coupling.interventional(theta)
        for _step in range(max_steps):
            observational = coupling.jacobian(coupling.observational, theta)
            _, singular, vh = np.linalg.svd(observational)
            rank = int((singular > 1e-8 * max(singular.max(initial=0.0), 1.0)).sum())
            null = vh[rank:].T
            if null.shape[1] == 0:
                break
            interventional = coupling.jacobian(coupling.interventional, theta) @ null
            _, moves, directions = np.linalg.svd(interventional)
            if moves.size == 0 or moves[0] < 1e-10:
                break
            theta = theta + 0.5 * (null @ directions[0])
            for _newton in range(30):
                residual = coupling.observational(theta) - target
                if np.abs(residual).max() < 1e-12:
                    break
                correction, *_ = np.linalg.lstsq(
                    coupling.jacobian(coupling.observational, theta),
                    -residual,
                    rcond=None,
                )
                theta = theta + correction
            first = coupling.model_at(coupling.theta0)
            second = coupling.model_at(theta)
            observational_gap = _joint_gap(first, second)
            if observational_gap > OBSERVATIONAL_TOLERANCE:
                _LOG.debug("projection did not converge: %g", observational_gap)
                break
            moved = float(np.abs(coupling.interventional(theta) - start).max())
            if moved > min_gap:
                return (
                    first,
                    second,
                    interventional_gap(first, second, treatment, outcome),
                    observational_gap,
                )
    return None


def _rank_by_hedge(
    pool: Sequence[MixedGraph],
    treatment: VertexSet,
    outcome: VertexSet,
    max_checks: int,
) -> list[MixedGraph]:
    """Put ADMGs that contain a hedge for the effect first."""
    with_hedge = []
    without_hedge = []
    for index, admg in enumerate(pool):
        if index < max_checks and find_hedge(admg, treatment, outcome) is not None:
            with_hedge.append(admg)
        else:
            without_hedge.append(admg)
    return with_hedge + without_hedge


def nonidentifiability_probe(
    cdmg: MixedGraph,
    spec: ClusterSpec | None,
    x: Iterable[str],
    y: Iterable[str],
    trials: int = 5,
    seed: int = 0,
    limit: int = DEFAULT_ENUMERATION_LIMIT,
    max_admgs: int = 20,
    min_gap: float = 0.01,
    threads: int = 1,
) -> ProbeResult:
    """
    Look for two models, each on an ADMG compatible with C{cdmg}, that
    have the same observational distribution but a different effect of
    C{x} on C{y}.

    Two strategies are tried, each over a pool of compatible ADMGs:
      1. Equivalent structures: for two ADMGs whose directed parts are
         Markov equivalent, a random unconfounded model on the first is
         refitted on the second. Both share the joint; their effects
         can still differ when the directions differ.
      2. Parameter coupling: a random model on one ADMG is moved along
         the parameters that leave the joint unchanged, in the direction
         in which the effect changes fastest.
    The pool holds up to C{max_admgs} compatible ADMGs in an order drawn
    from C{seed}, with ADMGs that contain a micro hedge first.

    Finding a pair proves the effect is not identifiable. Not finding
    one proves nothing.

    @param spec:
        Cluster sizes or members; clusters of unknown size get two
        members. By default every cluster gets two members.
    @param trials:
        Number of random models per ADMG, or per pair of ADMGs.
    @param threads:
        Number of candidates evaluated concurrently. The result does not
        depend on it.
    @raise SearchSpaceTooLarge: If enumerating compatible ADMGs is too
        expensive.
    """
    if spec is None:
        spec = ClusterSpec.from_sizes({c: None for c in cdmg.vertices})
    spec = spec.realized(default_size=2)
    treatment_clusters = cdmg.check_vertices(x)
    outcome_clusters = cdmg.check_vertices(y)
    treatment = tuple(sorted(spec.union(treatment_clusters)))
    outcome = tuple(sorted(spec.union(outcome_clusters)))

    rng = np.random.default_rng(seed)
    pool = [w.admg for w in enumerate_compatible_admgs(cdmg, spec, limit)]
    rng.shuffle(pool)  # type: ignore[arg-type]
    pool = pool[:max_admgs]
    pool = _rank_by_hedge(
        pool, frozenset(treatment), frozenset(outcome), max_checks=max_admgs
    )
    _LOG.info("probing %d compatible ADMGs", len(pool))

    # Bidirected edges play no part in the equivalent-structures strategy.
    by_structure: dict[frozenset[Edge], MixedGraph] = {}
    for admg in pool:
        by_structure.setdefault(admg.directed, admg)
    groups: dict[_Signature, list[MixedGraph]] = {}
    for admg in by_structure.values():
        groups.setdefault(_markov_signature(admg), []).append(admg)
    pairs = [
        (first, second)
        for group in groups.values()
        for first, second in permutations(group, 2)
    ]

    tasks: list[tuple[ProbeStrategy, tuple[MixedGraph, ...]]] = [
        (ProbeStrategy.EQUIVALENT_STRUCTURES, pair) for pair in pairs
    ] + [(ProbeStrategy.PARAMETER_COUPLING, (admg,)) for admg in pool]
    streams = np.random.SeedSequence(seed).spawn(len(tasks))

    def run(
        task: tuple[ProbeStrategy, tuple[MixedGraph, ...]],
        stream: np.random.SeedSequence,
    ) -> tuple[DiscreteScm, DiscreteScm, float, float] | None:
        strategy, graphs = task
        task_rng = np.random.default_rng(stream)
        if strategy is ProbeStrategy.EQUIVALENT_STRUCTURES:
            return _try_equivalent_pair(
                graphs[0], graphs[1], task_rng, trials, treatment, outcome, min_gap
            )
        return _try_coupling(
            graphs[0], task_rng, trials, treatment, outcome, min_gap
        )

    def found(
        task: tuple[ProbeStrategy, tuple[MixedGraph, ...]],
        outcome_: tuple[DiscreteScm, DiscreteScm, float, float],
    ) -> FoundPair:
        first, second, gap, observational = outcome_
        _LOG.info("found a pair by %s with gap %g", task[0].value, gap)
        return FoundPair(
            first,
            second,
            spec,
            treatment,
            outcome,
            gap,
            observational,
            task[0],
            seed,
        )

    if threads <= 1:
        for task, stream in zip(tasks, streams):
            result = run(task, stream)
            if result is not None:
                return found(task, result)
    else:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            futures = [
                executor.submit(run, task, stream)
                for task, stream in zip(tasks, streams)
            ]
            for task, future in zip(tasks, futures):
                result = future.result()
                if result is not None:
                    for pending in futures:
                        pending.cancel()
                    return found(task, result)

    models = trials * len(tasks)
    return Exhausted(len(pool), models, seed)
