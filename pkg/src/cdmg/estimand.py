# SPDX-License-Identifier: BSD-3-Clause

"""
Symbolic estimands: expressions built from conditional probabilities,
sums, products and fractions.

Estimands have a canonical form, in which products are flat and sorted
and nested sums are merged, and a canonical text rendering such as::

    sum_{W} P(W|X) * sum_{X'} P(Y|W,X') * P(X')

A sum extends to the end of the product it appears in; a sum that is
not the last factor of a product is put in parentheses. The rendering
can be parsed back with L{parse_estimand}, and L{to_json} and
L{from_json} convert to and from a JSON tree.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from itertools import product
from math import prod
from typing import Any, Union

import numpy as np

from cdmg.scm import ExactJointTable, FloatArray


class EstimandError(Exception):
    """Base class for problems with estimands."""


class UnboundVariable(EstimandError):
    """A variable of the estimand has no value and is not summed over."""


class NotObservational(EstimandError):
    """An estimand that still contains an action was evaluated."""


class NonPositiveDistribution(EstimandError):
    """A conditioning event has probability zero."""


class EstimandSyntaxError(EstimandError):
    """Text could not be parsed as an estimand."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


@dataclass(frozen=True, order=True)
class Symbol:
    """
    A value of a vertex. Primes distinguish summation variables from
    other values of the same vertex.
    """

    vertex: str
    primes: int = 0

    def __str__(self) -> str:
        return self.vertex + "'" * self.primes

    @classmethod
    def parse(cls, text: str) -> Symbol:
        """Create a symbol from text such as C{"X''"}."""
        vertex = text.rstrip("'")
        return cls(vertex, len(text) - len(vertex))


def _symbols(symbols: Iterable[Symbol]) -> frozenset[Symbol]:
    return frozenset(symbols)


def _format_symbols(symbols: Iterable[Symbol]) -> str:
    return ",".join(str(s) for s in sorted(symbols))


@dataclass(frozen=True)
class ConditionalProb:
    """M{P(target | do(do), given)}."""

    target: frozenset[Symbol]
    given: frozenset[Symbol] = field(default=frozenset())
    do: frozenset[Symbol] = field(default=frozenset())

    def __str__(self) -> str:
        conditions = []
        if self.do:
            conditions.append(f"do({_format_symbols(self.do)})")
        if self.given:
            conditions.append(_format_symbols(self.given))
        text = _format_symbols(self.target)
        if conditions:
            text += "|" + ",".join(conditions)
        return f"P({text})"

    @property
    def symbols(self) -> frozenset[Symbol]:
        return self.target | self.given | self.do


@dataclass(frozen=True)
class SumOver:
    """The sum of C{body} over all values of the C{bound} symbols."""

    bound: frozenset[Symbol]
    body: Estimand

    def __str__(self) -> str:
        return f"sum_{{{_format_symbols(self.bound)}}} {self.body}"


@dataclass(frozen=True)
class Product:
    """The product of some factors; the empty product is 1."""

    factors: tuple[Estimand, ...]

    def __str__(self) -> str:
        if not self.factors:
            return "1"
        parts = []
        for index, factor in enumerate(self.factors):
            text = str(factor)
            last = index == len(self.factors) - 1
            if isinstance(factor, Product) or (
                isinstance(factor, SumOver) and not last
            ):
                text = f"({text})"
            parts.append(text)
        return " * ".join(parts)


@dataclass(frozen=True)
class Fraction:
    numerator: Estimand
    denominator: Estimand

    def __str__(self) -> str:
        return f"frac{{{self.numerator}}}{{{self.denominator}}}"


Estimand = Union[ConditionalProb, SumOver, Product, Fraction]

ONE = Product(())


def probability(
    target: Iterable[Symbol | str],
    given: Iterable[Symbol | str] = (),
    do: Iterable[Symbol | str] = (),
) -> ConditionalProb:
    """Convenience constructor that accepts vertex names for unprimed
    symbols."""

    def convert(items: Iterable[Symbol | str]) -> frozenset[Symbol]:
        return frozenset(
            item if isinstance(item, Symbol) else Symbol(item) for item in items
        )

    return ConditionalProb(convert(target), convert(given), convert(do))


def is_observational(estimand: Estimand) -> bool:
    """C{True} iff no probability in C{estimand} has an action."""
    return all(not p.do for p in probabilities(estimand))


def probabilities(estimand: Estimand) -> Iterator[ConditionalProb]:
    """Iterate through the probabilities in C{estimand}, left to right."""
    if isinstance(estimand, ConditionalProb):
        yield estimand
    elif isinstance(estimand, SumOver):
        yield from probabilities(estimand.body)
    elif isinstance(estimand, Product):
        for factor in estimand.factors:
            yield from probabilities(factor)
    else:
        yield from probabilities(estimand.numerator)
        yield from probabilities(estimand.denominator)


def free_symbols(estimand: Estimand) -> frozenset[Symbol]:
    """Return the symbols that are not bound by a sum."""
    if isinstance(estimand, ConditionalProb):
        return estimand.symbols
    if isinstance(estimand, SumOver):
        return free_symbols(estimand.body) - estimand.bound
    if isinstance(estimand, Product):
        return frozenset().union(*(free_symbols(f) for f in estimand.factors))
    return free_symbols(estimand.numerator) | free_symbols(estimand.denominator)


def _sort_key(estimand: Estimand) -> tuple[int, int, str]:
    if isinstance(estimand, ConditionalProb):
        return (0, -len(estimand.symbols), str(estimand))
    if isinstance(estimand, Fraction):
        return (1, 0, str(estimand))
    return (2, 0, str(estimand))


def _factors(estimand: Estimand) -> list[Estimand]:
    return list(estimand.factors) if isinstance(estimand, Product) else [estimand]


def _multiply(factors: Iterable[Estimand]) -> Estimand:
    flat: list[Estimand] = []
    for factor in factors:
        flat += _factors(factor)
    flat.sort(key=_sort_key)
    return flat[0] if len(flat) == 1 else Product(tuple(flat))


def canonical(estimand: Estimand) -> Estimand:
    """
    Return the canonical form of C{estimand}.

    Products are flattened and their factors sorted: probabilities first
    (those over more variables first), then fractions, then sums.
    Nested sums are merged, empty sums and products of one factor are
    dropped, and identical factors cancel in fractions.
    """
    if isinstance(estimand, ConditionalProb):
        return estimand if estimand.target else ONE
    if isinstance(estimand, SumOver):
        body = canonical(estimand.body)
        bound = estimand.bound
        if isinstance(body, SumOver):
            bound |= body.bound
            body = body.body
        return SumOver(bound, body) if bound else body
    if isinstance(estimand, Product):
        return _multiply(canonical(f) for f in estimand.factors)
    numerator = _factors(canonical(estimand.numerator))
    denominator = _factors(canonical(estimand.denominator))
    for factor in list(numerator):
        if factor in denominator:
            numerator.remove(factor)
            denominator.remove(factor)
    if not denominator:
        return _multiply(numerator)
    return Fraction(_multiply(numerator), _multiply(denominator))


def render(estimand: Estimand) -> str:
    """Return the canonical text form of C{estimand}."""
    return str(canonical(estimand))


_TOKEN = re.compile(r"\s*(?:([A-Za-z_][A-Za-z0-9_.]*'*)|(\d+)|([(){}|,*]))")


class _Parser:
    """Recursive descent parser for the text form."""

    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, int]] = []
        position = 0
        while position < len(text):
            if text[position:].strip() == "":
                break
            match = _TOKEN.match(text, position)
            if match is None:
                rest = text[position:].lstrip()
                raise EstimandSyntaxError(
                    f'unexpected character "{rest[0]}"', len(text) - len(rest)
                )
            token = match.group(match.lastindex or 0)
            self.tokens.append((token, match.start(match.lastindex or 0)))
            position = match.end()
        self.index = 0

    def peek(self, offset: int = 0) -> str | None:
        index = self.index + offset
        return self.tokens[index][0] if index < len(self.tokens) else None

    def position(self) -> int:
        if self.index < len(self.tokens):
            return self.tokens[self.index][1]
        return len(self.text)

    def take(self, expected: str | None = None) -> str:
        token = self.peek()
        if token is None or (expected is not None and token != expected):
            raise EstimandSyntaxError(
                f'expected "{expected}"' if expected else "unexpected end of input",
                self.position(),
            )
        self.index += 1
        return token

    def parse(self) -> Estimand:
        estimand = self.product()
        if self.peek() is not None:
            raise EstimandSyntaxError(
                f'unexpected "{self.peek()}"', self.position()
            )
        return estimand

    def product(self) -> Estimand:
        factors = [self.factor()]
        while self.peek() == "*":
            self.take("*")
            factors.append(self.factor())
        return factors[0] if len(factors) == 1 else Product(tuple(factors))

    def factor(self) -> Estimand:
        token = self.peek()
        if token == "(":
            self.take("(")
            inner = self.product()
            self.take(")")
            return inner
        if token == "1":
            self.take()
            return ONE
        if token == "P" and self.peek(1) == "(":
            return self.probability()
        if token == "sum_" and self.peek(1) == "{":
            self.take()
            self.take("{")
            bound = self.symbols("}")
            self.take("}")
            return SumOver(bound, self.product())
        if token == "frac" and self.peek(1) == "{":
            self.take()
            self.take("{")
            numerator = self.product()
            self.take("}")
            self.take("{")
            denominator = self.product()
            self.take("}")
            return Fraction(numerator, denominator)
        raise EstimandSyntaxError(
            "expected a probability, sum, fraction or parenthesis", self.position()
        )

    def symbol(self) -> Symbol:
        position = self.position()
        token = self.take()
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_.]*'*", token):
            raise EstimandSyntaxError(f'expected a variable, got "{token}"', position)
        return Symbol.parse(token)

    def symbols(self, *stops: str) -> frozenset[Symbol]:
        result = set()
        if self.peek() in stops:
            return frozenset()
        result.add(self.symbol())
        while self.peek() == "," and (self.peek(1), self.peek(2)) != ("do", "("):
            self.take(",")
            result.add(self.symbol())
        return frozenset(result)

    def probability(self) -> ConditionalProb:
        self.take("P")
        self.take("(")
        target = self.symbols("|", ")")
        do: frozenset[Symbol] = frozenset()
        given: frozenset[Symbol] = frozenset()
        if self.peek() == "|":
            self.take("|")
            if self.peek() == "do" and self.peek(1) == "(":
                self.take()
                self.take("(")
                do = self.symbols(")")
                self.take(")")
                if self.peek() == ",":
                    self.take(",")
                    given = self.symbols(")")
            else:
                given = self.symbols(")")
        self.take(")")
        return ConditionalProb(target, given, do)


def parse_estimand(text: str) -> Estimand:
    """
    Parse the text form of an estimand.

    @raise EstimandSyntaxError: If C{text} is not a valid estimand.
    """
    return _Parser(text).parse()


def to_json(estimand: Estimand) -> dict[str, Any]:
    """Return C{estimand} as a JSON-compatible tree."""
    if isinstance(estimand, ConditionalProb):
        return {
            "kind": "prob",
            "target": [str(s) for s in sorted(estimand.target)],
            "given": [str(s) for s in sorted(estimand.given)],
            "do": [str(s) for s in sorted(estimand.do)],
        }
    if isinstance(estimand, SumOver):
        return {
            "kind": "sum",
            "bound": [str(s) for s in sorted(estimand.bound)],
            "body": to_json(estimand.body),
        }
    if isinstance(estimand, Product):
        return {"kind": "product", "factors": [to_json(f) for f in estimand.factors]}
    return {
        "kind": "fraction",
        "numerator": to_json(estimand.numerator),
        "denominator": to_json(estimand.denominator),
    }


def from_json(tree: Mapping[str, Any]) -> Estimand:
    """
    Create an estimand from a tree produced by L{to_json}.

    @raise EstimandSyntaxError: If the tree is malformed.
    """

    def symbols(key: str) -> frozenset[Symbol]:
        return frozenset(Symbol.parse(text) for text in tree.get(key, ()))

    try:
        kind = tree["kind"]
        if kind == "prob":
            return ConditionalProb(symbols("target"), symbols("given"), symbols("do"))
        if kind == "sum":
            return SumOver(symbols("bound"), from_json(tree["body"]))
        if kind == "product":
            return Product(tuple(from_json(f) for f in tree["factors"]))
        if kind == "fraction":
            return Fraction(
                from_json(tree["numerator"]), from_json(tree["denominator"])
            )
    except (KeyError, TypeError) as ex:
        raise EstimandSyntaxError(f"malformed estimand tree: {ex}", 0) from ex
    raise EstimandSyntaxError(f'unknown estimand kind "{kind}"', 0)


Value = tuple[int, ...]
"""The value of a symbol: one entry per variable of its vertex."""


class _Evaluator:
    def __init__(
        self, joint: ExactJointTable, clusters: Mapping[str, Sequence[str]] | None
    ):
        self.joint = joint
        self.clusters = clusters
        self.cardinality = dict(zip(joint.variables, joint.cardinalities))
        self.marginals: dict[tuple[str, ...], FloatArray] = {}

    def variables(self, vertex: str) -> Sequence[str]:
        if self.clusters is None:
            return (vertex,)
        try:
            return self.clusters[vertex]
        except KeyError:
            raise UnboundVariable(f'"{vertex}" is not a known cluster') from None

    def domain(self, symbol: Symbol) -> Iterator[Value]:
        variables = self.variables(symbol.vertex)
        return product(*(range(self.cardinality[v]) for v in variables))

    def event(
        self, symbols: Iterable[Symbol], assignment: Mapping[Symbol, Value]
    ) -> dict[str, int] | None:
        """Return the variable values, or C{None} if they contradict."""
        values: dict[str, int] = {}
        for symbol in symbols:
            if symbol not in assignment:
                raise UnboundVariable(f'"{symbol}" has no value')
            for variable, value in zip(
                self.variables(symbol.vertex), assignment[symbol], strict=True
            ):
                if values.setdefault(variable, value) != value:
                    return None
        return values

    def probability(self, values: Mapping[str, int]) -> float:
        variables = tuple(sorted(values))
        if not variables:
            return 1.0
        table = self.marginals.get(variables)
        if table is None:
            table = self.joint.marginal(variables)
            self.marginals[variables] = table
        return float(table[tuple(values[v] for v in variables)])

    def evaluate(self, estimand: Estimand, assignment: Mapping[Symbol, Value]) -> float:
        if isinstance(estimand, ConditionalProb):
            if estimand.do:
                raise NotObservational(f"cannot evaluate {estimand}")
            condition = self.event(estimand.given, assignment)
            if condition is None:
                raise NonPositiveDistribution(f"contradictory condition in {estimand}")
            denominator = self.probability(condition)
            if denominator <= 0:
                raise NonPositiveDistribution(
                    f"condition of {estimand} has probability 0"
                )
            joint = self.event(estimand.target | estimand.given, assignment)
            if joint is None:
                return 0.0
            return self.probability(joint) / denominator
        if isinstance(estimand, SumOver):
            bound = sorted(estimand.bound)
            total = 0.0
            for values in product(*(self.domain(s) for s in bound)):
                extended = dict(assignment)
                extended.update(zip(bound, values))
                total += self.evaluate(estimand.body, extended)
            return total
        if isinstance(estimand, Product):
            return prod(self.evaluate(f, assignment) for f in estimand.factors)
        denominator = self.evaluate(estimand.denominator, assignment)
        if denominator <= 0:
            raise NonPositiveDistribution(f"denominator of {estimand} is 0")
        return self.evaluate(estimand.numerator, assignment) / denominator


def evaluate_estimand(
    estimand: Estimand,
    joint: ExactJointTable,
    assignment: Mapping[Symbol, Value | int],
    clusters: Mapping[str, Sequence[str]] | None = None,
) -> float:
    """
    Evaluate an observational estimand on a joint distribution.

    @param assignment:
        Values for the free symbols. With C{clusters}, the value of a
        symbol is a tuple with one entry per member of its cluster;
        without, a symbol names a single variable and an integer value
        can be given.
    @param clusters:
        Maps each vertex of the estimand to the variables of C{joint}
        that it stands for.
    @raise UnboundVariable: If a free symbol has no value.
    @raise NotObservational: If the estimand contains an action.
    @raise NonPositiveDistribution: If a conditioning event has
        probability zero.
    """
    values = {
        symbol: (value,) if isinstance(value, (int, np.integer)) else tuple(value)
        for symbol, value in assignment.items()
    }
    return _Evaluator(joint, clusters).evaluate(estimand, values)
