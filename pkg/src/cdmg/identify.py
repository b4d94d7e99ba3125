# SPDX-License-Identifier: BSD-3-Clause

"""
Identification of macro causal effects in cluster graphs.

L{identify_macro} first looks for an SC-hedge, which proves the effect is
not identifiable. Otherwise it searches for a derivation that rewrites
M{P(y | do(x))} into an expression without actions, using the rules of
the do-calculus on the cluster graph together with a few moves of
probability calculus:

  - total probability: M{P(y|do(x),w) = sum_v P(y|do(x),w,v) P(v|do(x),w)};
  - the second rule read from right to left, turning an observation
    into an action;
  - the chain rule, splitting off one target at a time;
  - normalization: M{P(y|do(x),w) = P(y,w|do(x)) / sum_y P(y,w|do(x))}.

These moves make a term larger, so they are limited by a depth budget;
the rules themselves only remove actions or observations and are applied
freely. The search deepens iteratively, so the first derivation found
uses as few expansion moves as possible.

The verdict is three-valued: a bounded search that finds nothing does
not prove non-identifiability.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from logging import getLogger

from cdmg.docalc import Rule, RuleQuery, rule_applies, rule_graph
from cdmg.estimand import (
    ConditionalProb,
    Estimand,
    Fraction,
    Product,
    SumOver,
    Symbol,
    canonical,
    is_observational,
)
from cdmg.graph import ClusterSpec, MixedGraph, VertexSet, ancestors
from cdmg.hedge import (
    HedgeCertificate,
    c_components,
    find_sc_hedge,
    sc_projection,
    verify_hedge,
)
from cdmg.separation import check_disjoint
from cdmg.typing import LoggerT

_LOG = getLogger(__name__)


class EmptyTarget(Exception):
    """An effect was asked for on no variables at all."""


class NotIdentified(Exception):
    """A derivation was asked for an effect that was not identified."""


@dataclass(frozen=True)
class Budget:
    """Limits on the rewrite search."""

    depth: int = 8
    """Largest number of expansion moves on one branch."""
    nodes: int = 10_000
    """Largest number of terms visited over the whole search."""


@dataclass(frozen=True)
class TraceEntry:
    """One step of a derivation."""

    rule: str
    """A do-calculus rule, or the name of a probability calculus move."""
    condition: str
    """The d-separation statement that licenses a rule, or empty."""
    graph: MixedGraph | None
    """The mutilated graph the condition holds in, for rules."""
    before: Estimand
    after: Estimand


@dataclass(frozen=True)
class SearchReport:
    """What an unsuccessful search did."""

    depth: int
    """The deepest expansion depth that was searched completely."""
    nodes: int
    budget: Budget
    exhausted: bool
    """C{True} if the node budget ran out."""


@dataclass(frozen=True)
class Identified:
    estimand: Estimand
    trace: tuple[TraceEntry, ...]
    assumption1_warning: bool = False


@dataclass(frozen=True)
class NonIdentifiable:
    certificate: HedgeCertificate
    assumption1_warning: bool = False


@dataclass(frozen=True)
class Unknown:
    report: SearchReport
    assumption1_warning: bool = False


Verdict = Identified | NonIdentifiable | Unknown


class _BudgetExhausted(Exception):
    pass


_Key = tuple[VertexSet, VertexSet, VertexSet]
_Result = tuple[Estimand, list[TraceEntry]]


def _key(term: ConditionalProb) -> _Key:
    """Identifies a term up to primes."""
    return (
        frozenset(s.vertex for s in term.target),
        frozenset(s.vertex for s in term.given),
        frozenset(s.vertex for s in term.do),
    )


def _by_vertex(symbols: Iterable[Symbol], vertices: Iterable[str]) -> frozenset[Symbol]:
    wanted = set(vertices)
    return frozenset(s for s in symbols if s.vertex in wanted)


def _vertices(symbols: Iterable[Symbol]) -> VertexSet:
    return frozenset(s.vertex for s in symbols)


class _Search:
    def __init__(self, graph: MixedGraph, budget: Budget):
        self.graph = graph
        self.budget = budget
        self.nodes = 0
        self.failed: set[tuple[_Key, int]] = set()
        self.cuts: list[_Key] = []
        """Terms that were refused because they were being solved further
        up. A failure is only remembered if none of the refusals below it
        concern a term above it."""
        self.component = {
            vertex: component
            for component in c_components(graph)
            for vertex in component
        }

    def solve(
        self,
        term: ConditionalProb,
        depth: int,
        scope: frozenset[Symbol],
        stack: frozenset[_Key],
    ) -> _Result | None:
        if not term.do:
            return term, []
        key = _key(term)
        if key in stack:
            self.cuts.append(key)
            return None
        if (key, depth) in self.failed:
            return None
        outer = stack
        first_cut = len(self.cuts)
        self.nodes += 1
        if self.nodes > self.budget.nodes:
            raise _BudgetExhausted()
        stack = stack | {key}
        scope = scope | term.symbols

        moves: list[Iterator[_Result | None]] = []
        if depth > 0:
            moves += [
                self._total_probability(term, depth - 1, scope, stack),
                self._observation_to_action(term, depth - 1, scope, stack),
                self._chain_rule(term, depth - 1, scope, stack),
                self._normalization(term, depth - 1, scope, stack),
            ]
        moves.append(self._rules(term, depth, scope, stack))
        for generator in moves:
            for result in generator:
                if result is not None:
                    return result
        below = self.cuts[first_cut:]
        if outer.isdisjoint(below):
            self.failed.add((key, depth))
        # Only refusals of terms above this one matter further up.
        self.cuts[first_cut:] = [cut for cut in below if cut in outer]
        return None

    def _apply(
        self,
        query: RuleQuery,
        before: ConditionalProb,
        after: ConditionalProb,
        depth: int,
        scope: frozenset[Symbol],
        stack: frozenset[_Key],
    ) -> _Result | None:
        if not rule_applies(query):
            return None
        solved = self.solve(after, depth, scope, stack)
        if solved is None:
            return None
        estimand, trace = solved
        entry = TraceEntry(
            str(query.rule), str(query), rule_graph(query), before, after
        )
        return estimand, [entry] + trace

    def _rules(
        self,
        term: ConditionalProb,
        depth: int,
        scope: frozenset[Symbol],
        stack: frozenset[_Key],
    ) -> Iterator[_Result | None]:
        """Rules 3 and 2 on actions, then rule 1 on observations."""
        y = _vertices(term.target)
        do = _vertices(term.do)
        given = _vertices(term.given)
        choices: list[VertexSet] = [frozenset([v]) for v in sorted(do)]
        if len(do) > 1:
            choices.append(do)
        for chosen in choices:
            others = do - chosen
            moved = _by_vertex(term.do, chosen)
            rule3 = RuleQuery(self.graph, Rule.R3, y, chosen, others, given)
            yield self._apply(
                rule3,
                term,
                ConditionalProb(term.target, term.given, term.do - moved),
                depth,
                scope,
                stack,
            )
            rule2 = RuleQuery(self.graph, Rule.R2, y, chosen, others, given)
            yield self._apply(
                rule2,
                term,
                ConditionalProb(term.target, term.given | moved, term.do - moved),
                depth,
                scope,
                stack,
            )
        for observed in sorted(term.given):
            rule1 = RuleQuery(
                self.graph, Rule.R1, y, {observed.vertex}, do, given - {observed.vertex}
            )
            yield self._apply(
                rule1,
                term,
                ConditionalProb(term.target, term.given - {observed}, term.do),
                depth,
                scope,
                stack,
            )

    def _fresh(self, vertex: str, scope: frozenset[Symbol]) -> Symbol:
        primes = 0
        while Symbol(vertex, primes) in scope:
            primes += 1
        return Symbol(vertex, primes)

    def _solve_all(
        self,
        terms: Sequence[ConditionalProb],
        depth: int,
        scope: frozenset[Symbol],
        stack: frozenset[_Key],
    ) -> tuple[list[Estimand], list[TraceEntry]] | None:
        estimands: list[Estimand] = []
        trace: list[TraceEntry] = []
        for term in terms:
            solved = self.solve(term, depth, scope, stack)
            if solved is None:
                return None
            estimands.append(solved[0])
            trace += solved[1]
        return estimands, trace

    def _total_probability(
        self,
        term: ConditionalProb,
        depth: int,
        scope: frozenset[Symbol],
        stack: frozenset[_Key],
    ) -> Iterator[_Result | None]:
        targets = _vertices(term.target)
        related = frozenset().union(*(self.component[v] for v in targets))
        reaching = ancestors(self.graph, targets)
        unused = self.graph.vertex_set - _vertices(term.symbols)
        for vertex in sorted(
            unused, key=lambda v: (v not in related, v not in reaching, v)
        ):
            symbol = self._fresh(vertex, scope)
            conditional = ConditionalProb(term.target, term.given | {symbol}, term.do)
            marginal = ConditionalProb(frozenset([symbol]), term.given, term.do)
            expansion = SumOver(frozenset([symbol]), Product((conditional, marginal)))
            solved = self._solve_all(
                (conditional, marginal), depth, scope | {symbol}, stack
            )
            if solved is None:
                yield None
                continue
            (first, second), trace = solved
            entry = TraceEntry("total probability", "", None, term, expansion)
            yield SumOver(frozenset([symbol]), Product((first, second))), [
                entry
            ] + trace

    def _observation_to_action(
        self,
        term: ConditionalProb,
        depth: int,
        scope: frozenset[Symbol],
        stack: frozenset[_Key],
    ) -> Iterator[_Result | None]:
        y = _vertices(term.target)
        do = _vertices(term.do)
        given = _vertices(term.given)
        for observed in sorted(term.given):
            query = RuleQuery(
                self.graph, Rule.R2, y, {observed.vertex}, do, given - {observed.vertex}
            )
            yield self._apply(
                query,
                term,
                ConditionalProb(
                    term.target, term.given - {observed}, term.do | {observed}
                ),
                depth,
                scope,
                stack,
            )

    def _chain_rule(
        self,
        term: ConditionalProb,
        depth: int,
        scope: frozenset[Symbol],
        stack: frozenset[_Key],
    ) -> Iterator[_Result | None]:
        if len(term.target) < 2:
            return
        for target in sorted(term.target):
            rest = term.target - {target}
            first = ConditionalProb(frozenset([target]), term.given | rest, term.do)
            second = ConditionalProb(rest, term.given, term.do)
            solved = self._solve_all((first, second), depth, scope, stack)
            if solved is None:
                yield None
                continue
            estimands, trace = solved
            entry = TraceEntry("chain rule", "", None, term, Product((first, second)))
            yield Product(tuple(estimands)), [entry] + trace

    def _normalization(
        self,
        term: ConditionalProb,
        depth: int,
        scope: frozenset[Symbol],
        stack: frozenset[_Key],
    ) -> Iterator[_Result | None]:
        if not term.given:
            return
        joint = ConditionalProb(term.target | term.given, frozenset(), term.do)
        solved = self.solve(joint, depth, scope, stack)
        if solved is None:
            return
        estimand, trace = solved
        entry = TraceEntry(
            "normalization",
            "",
            None,
            term,
            Fraction(joint, SumOver(term.target, joint)),
        )
        yield Fraction(estimand, SumOver(term.target, estimand)), [entry] + trace


def identify_macro(
    cdmg: MixedGraph,
    spec: ClusterSpec | None,
    x: Iterable[str],
    y: Iterable[str],
    given: Iterable[str] = (),
    budget: Budget = Budget(),
    logger: LoggerT = _LOG,
) -> Verdict:
    """
    Decide whether the effect of C{x} on C{y}, optionally conditioned on
    C{given}, is identifiable from the observational distribution in
    every ADMG compatible with C{cdmg}.

    When a cluster is known to hold a single variable, the hedge
    criterion and the completeness of the rules no longer hold for the
    cluster graph. A warning is logged and the verdict carries
    C{assumption1_warning}; an L{Identified} verdict is still sound, the
    other verdicts are advisory.

    An SC-hedge is only looked for when C{given} is empty.

    @param spec:
        What is known about the clusters; C{None} means nothing.
    @raise EmptyTarget: If C{y} is empty.
    @raise SetsNotDisjoint: If the sets overlap.
    @raise UnknownVertex: If a vertex is not in C{cdmg}.
    """
    xs, ys, ws = check_disjoint(
        cdmg.check_vertices(x), cdmg.check_vertices(y), cdmg.check_vertices(given)
    )
    if not ys:
        raise EmptyTarget("the effect must be on at least one cluster")
    small = spec.small_clusters if spec is not None else ()
    warning = bool(small)
    if warning:
        logger.warning(
            "clusters with a single variable: %s; verdict is advisory",
            ", ".join(small),
        )

    query = ConditionalProb(
        frozenset(Symbol(v) for v in ys),
        frozenset(Symbol(v) for v in ws),
        frozenset(Symbol(v) for v in xs),
    )
    if not xs:
        return Identified(canonical(query), (), warning)

    if not ws:
        certificate = find_sc_hedge(cdmg, xs, ys)
        if certificate is not None:
            if verify_hedge(sc_projection(cdmg), certificate):
                return NonIdentifiable(certificate, warning)
            logger.error("discarding a hedge that does not verify")

    search = _Search(cdmg, budget)
    completed = -1
    try:
        for depth in range(budget.depth + 1):
            search.failed.clear()
            result = search.solve(query, depth, query.symbols, frozenset())
            if result is not None:
                estimand, trace = result
                estimand = canonical(estimand)
                assert is_observational(estimand), estimand
                logger.debug(
                    "identified at depth %d after %d terms", depth, search.nodes
                )
                return Identified(estimand, tuple(trace), warning)
            completed = depth
    except _BudgetExhausted:
        logger.info("search stopped after %d terms", search.nodes)
        return Unknown(SearchReport(completed, search.nodes, budget, True), warning)
    logger.info("no derivation up to depth %d", budget.depth)
    return Unknown(SearchReport(completed, search.nodes, budget, False), warning)


def derivation_trace(verdict: Verdict) -> tuple[TraceEntry, ...]:
    """
    Return the steps that derive an identified estimand.

    @raise NotIdentified: If C{verdict} is not L{Identified}.
    """
    if not isinstance(verdict, Identified):
        raise NotIdentified(f"no derivation for a {type(verdict).__name__} verdict")
    return verdict.trace
