# SPDX-License-Identifier: BSD-3-Clause

"""
Text format for ADMGs, cluster graphs and effect queries.

The format is line oriented; C{#} starts a comment::

    graph cdmg
    cluster CX size=2
    cluster CY members= Y1 Y2
    node CW
    CX -> CY
    CX -> CX
    CX <-> CY
    query effect do=(CX) on=(CY) given=(CW)

The first statement says what kind of graph the document holds.
In a C{cdmg} document, every C{node} or C{cluster} line declares a
cluster, optionally with its size or members, and self-loops of either
kind are allowed. In an C{admg} document, C{node} lines declare
variables and C{cluster} lines, if present, partition them; self-loops
and directed cycles are errors. C{<->} always is a bidirected edge.

Parsing is split into L{scan_dsl}, which turns lines into tokens, and
L{parse_statements}, which interprets them. Problems that do not prevent
understanding the document, such as a repeated edge, are logged as
warnings; other problems raise a L{DslError} that names the line and
column and what was expected there.
"""

from __future__ import annotations

import os
import re
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from enum import Enum
from logging import getLogger
from pathlib import Path
from typing import NamedTuple

from cdmg.graph import (
    Cluster,
    ClusterSpec,
    CycleFound,
    Edge,
    GraphError,
    MixedGraph,
    SelfLoopFound,
    bidirected_pair,
    check_partition,
    validate_admg,
)
from cdmg.typing import LoggerT

_LOG = getLogger(__name__)

FIXTURES_VARIABLE = "CDMG_FIXTURES"
"""Environment variable naming a directory to search for graph files."""


class DslError(Exception):
    """A problem in a graph document that prevents reading it."""

    def __init__(
        self, message: str, line: int, column: int, expected: Sequence[str] = ()
    ):
        text = f"line {line}, column {column}: {message}"
        if expected:
            text += "; expected " + " or ".join(f'"{e}"' for e in expected)
        super().__init__(text)
        self.line = line
        self.column = column
        self.expected = tuple(expected)


class DslSyntaxError(DslError):
    """A statement does not follow the grammar."""


class DslSemanticError(DslError):
    """A statement is well formed but does not describe a valid graph."""


class GraphKind(Enum):
    ADMG = "admg"
    CDMG = "cdmg"


@dataclass(frozen=True)
class Query:
    """An effect query: the effect of C{do} on C{on}, given C{given}."""

    do: tuple[str, ...]
    on: tuple[str, ...]
    given: tuple[str, ...] = ()

    def __str__(self) -> str:
        text = f"query effect do=({','.join(self.do)}) on=({','.join(self.on)})"
        if self.given:
            text += f" given=({','.join(self.given)})"
        return text


@dataclass(frozen=True)
class GraphDocument:
    """The contents of a graph file."""

    kind: GraphKind
    graph: MixedGraph
    spec: ClusterSpec | None = None
    """Cluster metadata; for an ADMG, the partition into clusters, if any."""
    queries: tuple[Query, ...] = field(default=())


class Token(NamedTuple):
    kind: str
    """One of C{"name"}, C{"int"}, or the punctuation itself."""
    text: str
    column: int


_TOKEN = re.compile(
    r"\s*(?:(?P<comment>#.*)|(?P<punct><->|->|[=(),])|(?P<int>\d+)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_.]*))"
)


def scan_dsl(lines: Iterable[str]) -> Iterator[tuple[int, list[Token]]]:
    """
    Split the lines of a document into tokens.

    @return: Yields C{(lineno, tokens)} for every line that has tokens.
        Columns are 1-based.
    @raise DslSyntaxError: If a line contains a character that starts
        no token.
    """
    for lineno, line in enumerate(lines, 1):
        tokens = []
        position = 0
        line = line.rstrip("\r\n")
        while line[position:].strip():
            match = _TOKEN.match(line, position)
            if match is None:
                column = len(line) - len(line[position:].lstrip()) + 1
                raise DslSyntaxError(
                    f'unexpected character "{line[column - 1]}"', lineno, column
                )
            kind = match.lastgroup
            assert kind is not None
            if kind != "comment":
                text = match.group(kind)
                tokens.append(
                    Token(
                        text if kind == "punct" else kind,
                        text,
                        match.start(kind) + 1,
                    )
                )
            position = match.end()
        if tokens:
            yield lineno, tokens


class _Line:
    """Cursor over the tokens of one line."""

    def __init__(self, lineno: int, tokens: list[Token]):
        self.lineno = lineno
        self.tokens = tokens
        self.index = 0

    def peek(self, offset: int = 0) -> Token | None:
        index = self.index + offset
        return self.tokens[index] if index < len(self.tokens) else None

    def at(self, kind: str, offset: int = 0) -> bool:
        """C{True} iff the token at C{offset} exists and is of C{kind}."""
        token = self.peek(offset)
        return token is not None and token.kind == kind

    def column(self) -> int:
        token = self.peek()
        if token is not None:
            return token.column
        last = self.tokens[-1]
        return last.column + len(last.text)

    def expect(self, *kinds: str) -> Token:
        token = self.peek()
        if token is None or token.kind not in kinds:
            found = "end of line" if token is None else f'"{token.text}"'
            raise DslSyntaxError(
                f"unexpected {found}", self.lineno, self.column(), kinds
            )
        self.index += 1
        return token

    def keyword(self, *words: str) -> str:
        token = self.peek()
        if token is None or token.kind != "name" or token.text not in words:
            found = "end of line" if token is None else f'"{token.text}"'
            raise DslSyntaxError(
                f"unexpected {found}", self.lineno, self.column(), words
            )
        self.index += 1
        return token.text

    def end(self) -> None:
        token = self.peek()
        if token is not None:
            raise DslSyntaxError(
                f'unexpected "{token.text}"',
                self.lineno,
                token.column,
                ("end of line",),
            )

    def name_list(self) -> tuple[Token, ...]:
        self.expect("(")
        names = []
        if self.at("name"):
            names.append(self.expect("name"))
            while self.at(","):
                self.expect(",")
                names.append(self.expect("name"))
        self.expect(")")
        return tuple(names)


@dataclass
class _Declarations:
    kind: GraphKind
    lineno: int
    nodes: dict[str, int] = field(default_factory=dict)
    clusters: dict[str, tuple[Cluster, int]] = field(default_factory=dict)
    directed: dict[Edge, tuple[int, int]] = field(default_factory=dict)
    bidirected: dict[Edge, tuple[int, int]] = field(default_factory=dict)
    endpoints: list[Token] = field(default_factory=list)
    endpoint_lines: list[int] = field(default_factory=list)
    queries: list[tuple[Query, int, tuple[Token, ...]]] = field(default_factory=list)


def _declare(line: _Line, decl: _Declarations, logger: LoggerT) -> None:
    first = line.peek()
    assert first is not None
    second = line.peek(1)
    if second is not None and second.kind in ("->", "<->"):
        tail = line.expect("name")
        arrow = line.expect("->", "<->")
        head = line.expect("name")
        line.end()
        if decl.kind is GraphKind.ADMG and tail.text == head.text:
            raise DslSemanticError(
                f"self-loop on \"{tail.text}\" in an ADMG", line.lineno, tail.column
            ) from SelfLoopFound(tail.text)
        edges = decl.directed if arrow.kind == "->" else decl.bidirected
        edge = (
            (tail.text, head.text)
            if arrow.kind == "->"
            else bidirected_pair(tail.text, head.text)
        )
        if edge in edges:
            logger.warning(
                "line %d: edge %s %s %s was already declared on line %d",
                line.lineno,
                tail.text,
                arrow.text,
                head.text,
                edges[edge][0],
            )
        else:
            edges[edge] = (line.lineno, tail.column)
        decl.endpoints += [tail, head]
        decl.endpoint_lines += [line.lineno, line.lineno]
        return

    statement = line.keyword("node", "cluster", "query")
    if statement == "node":
        name = line.expect("name")
        line.end()
        _add_name(decl, name, line.lineno)
        if decl.kind is GraphKind.CDMG:
            decl.clusters[name.text] = (Cluster(None, None), line.lineno)
    elif statement == "cluster":
        name = line.expect("name")
        size: int | None = None
        members: tuple[str, ...] | None = None
        while line.peek() is not None:
            option = line.keyword("size", "members")
            line.expect("=")
            if option == "size":
                size = int(line.expect("int").text)
            else:
                tokens = [line.expect("name")]
                while line.at("name") and not line.at("=", 1):
                    tokens.append(line.expect("name"))
                members = tuple(t.text for t in tokens)
        if decl.kind is GraphKind.CDMG:
            _add_name(decl, name, line.lineno)
        elif name.text in decl.clusters:
            raise DslSemanticError(
                f'cluster "{name.text}" was already declared', line.lineno, name.column
            )
        if decl.kind is GraphKind.ADMG and members is None:
            raise DslSemanticError(
                "clusters of an ADMG must list their members",
                line.lineno,
                line.column(),
                ("members",),
            )
        decl.clusters[name.text] = (Cluster(members, size), line.lineno)
    else:
        line.keyword("effect")
        lists: dict[str, tuple[Token, ...]] = {}
        while line.peek() is not None:
            option = line.keyword("do", "on", "given")
            if option in lists:
                raise DslSyntaxError(
                    f'"{option}" given twice', line.lineno, line.column()
                )
            line.expect("=")
            lists[option] = line.name_list()
        for required in ("do", "on"):
            if required not in lists:
                raise DslSyntaxError(
                    "incomplete query", line.lineno, line.column(), (required,)
                )
        query = Query(
            tuple(t.text for t in lists["do"]),
            tuple(t.text for t in lists["on"]),
            tuple(t.text for t in lists.get("given", ())),
        )
        if any(q == query for q, _, _ in decl.queries):
            logger.warning("line %d: repeated query is ignored", line.lineno)
        else:
            tokens = lists["do"] + lists["on"] + lists.get("given", ())
            decl.queries.append((query, line.lineno, tokens))


def _add_name(decl: _Declarations, name: Token, lineno: int) -> None:
    if name.text in decl.nodes:
        raise DslSemanticError(
            f'"{name.text}" was already declared on line {decl.nodes[name.text]}',
            lineno,
            name.column,
        )
    decl.nodes[name.text] = lineno


def parse_statements(
    statements: Iterable[tuple[int, list[Token]]], logger: LoggerT = _LOG
) -> GraphDocument:
    """
    Interpret tokenized statements as a graph document.

    @raise DslSyntaxError: If a statement does not follow the grammar.
    @raise DslSemanticError: If the statements do not describe a valid
        graph, for example when an edge uses an undeclared vertex or
        an ADMG has a cycle.
    """
    decl: _Declarations | None = None
    for lineno, tokens in statements:
        line = _Line(lineno, tokens)
        if decl is None:
            line.keyword("graph")
            kind = line.keyword("admg", "cdmg")
            line.end()
            decl = _Declarations(GraphKind(kind), lineno)
            continue
        _declare(line, decl, logger)
    if decl is None:
        raise DslSyntaxError("empty document", 1, 1, ("graph",))

    for token, lineno in zip(decl.endpoints, decl.endpoint_lines):
        if token.text not in decl.nodes:
            raise DslSemanticError(
                f'"{token.text}" is not declared', lineno, token.column
            )
    for query, lineno, tokens in decl.queries:
        for token in tokens:
            if token.text not in decl.nodes:
                raise DslSemanticError(
                    f'"{token.text}" is not declared', lineno, token.column
                )
        if len(set(query.do + query.on + query.given)) != len(
            query.do + query.on + query.given
        ):
            raise DslSemanticError(
                "query sets must be disjoint", lineno, tokens[0].column if tokens else 1
            )

    graph = MixedGraph(decl.nodes, decl.directed, decl.bidirected)
    spec: ClusterSpec | None = None
    try:
        if decl.clusters:
            spec = ClusterSpec({name: c for name, (c, _) in decl.clusters.items()})
        if decl.kind is GraphKind.ADMG:
            validate_admg(graph)
            if spec is not None:
                check_partition(graph.vertex_set, spec)
    except CycleFound as ex:
        cycle = set(ex.cycle)
        lineno, column = max(
            where
            for (tail, head), where in decl.directed.items()
            if tail in cycle and head in cycle
        )
        raise DslSemanticError(str(ex), lineno, column) from ex
    except GraphError as ex:
        raise DslSemanticError(str(ex), decl.lineno, 1) from ex

    return GraphDocument(
        decl.kind, graph, spec, tuple(query for query, _, _ in decl.queries)
    )


def parse(text: str, logger: LoggerT = _LOG) -> GraphDocument:
    """
    Parse a graph document.

    @raise DslError: If C{text} is not a valid document.
    """
    return parse_statements(scan_dsl(text.splitlines()), logger)


def serialize(document: GraphDocument) -> str:
    """
    Return the canonical text of C{document}: declarations sorted by
    name, then edges sorted, then queries in their original order.
    """
    lines = [f"graph {document.kind.value}"]
    spec = document.spec
    clusters = spec.clusters if spec is not None else {}
    if document.kind is GraphKind.CDMG:
        names = document.graph.vertices
    else:
        names = document.graph.vertices
        lines += [f"node {name}" for name in names]
        names = tuple(sorted(clusters))
    for name in names:
        members, size = clusters.get(name, Cluster(None, None))
        if members is None and size is None:
            lines.append(f"node {name}")
        elif members is None:
            lines.append(f"cluster {name} size={size}")
        else:
            lines.append(f"cluster {name} members= {' '.join(members)}")
    lines += [f"{tail} -> {head}" for tail, head in sorted(document.graph.directed)]
    lines += [f"{a} <-> {b}" for a, b in sorted(document.graph.bidirected)]
    lines += [str(query) for query in document.queries]
    return "\n".join(lines) + "\n"


def resolve(path: str | Path) -> Path:
    """
    Find a graph file: relative names that do not exist are looked up in
    the directory named by the C{CDMG_FIXTURES} environment variable.
    """
    path = Path(path)
    if not path.exists() and not path.is_absolute():
        fixtures = os.environ.get(FIXTURES_VARIABLE)
        if fixtures:
            candidate = Path(fixtures) / path
            if candidate.exists():
                return candidate
    return path


def load(path: str | Path, logger: LoggerT = _LOG) -> GraphDocument:
    """
    Read and parse a graph file.

    @raise OSError: If the file cannot be read.
    @raise DslError: If the file is not a valid document.
    """
    data = resolve(path).read_bytes()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as ex:
        line_start = data.rfind(b"\n", 0, ex.start) + 1
        raise DslSyntaxError(
            f"byte 0x{data[ex.start]:02x} is not valid UTF-8",
            data.count(b"\n", 0, ex.start) + 1,
            ex.start - line_start + 1,
        ) from ex
    return parse(text, logger)


def to_dot(document: GraphDocument) -> str:
    """Return C{document} in Graphviz DOT format, for viewing only."""
    lines = ["digraph G {"]
    lines += [f'  "{v}";' for v in document.graph.vertices]
    lines += [f'  "{a}" -> "{b}";' for a, b in sorted(document.graph.directed)]
    lines += [
        f'  "{a}" -> "{b}" [dir=both, style=dashed];'
        for a, b in sorted(document.graph.bidirected)
    ]
    lines.append("}")
    return "\n".join(lines) + "\n"
