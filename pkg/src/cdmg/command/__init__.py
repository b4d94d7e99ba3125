# SPDX-License-Identifier: BSD-3-Clause

"""
Subcommands of the C{cdmg} command line tool.

Each subcommand is a separate module in the L{cdmg.command} package; the
module name is the subcommand name. A command module registers its
command line options by defining the following function::

    def command_arguments(parser):
        parser.add_argument('--rule', type=int, choices=(1, 2, 3))

The C{parser} argument is the L{ArgumentParser} of the subcommand.
The first line of the module docstring is used as the subcommand's help.

To run the subcommand, the module must define the following function::

    def command_run(args):
        ...
        return EXIT_OK

C{args} is a L{Namespace} that contains the result of the command line
parsing. The return value is the process exit code. Problems that the
user should fix, such as a missing file, are reported by raising
L{CommandError} with a message that is meaningful to the end user.
"""

from __future__ import annotations

import os
from argparse import ArgumentParser, Namespace, _SubParsersAction
from collections.abc import Iterator, Sequence
from importlib import import_module
from logging import getLogger
from pkgutil import iter_modules
from types import ModuleType
from typing import Any, Callable

from cdmg.dsl import DslError, GraphDocument, GraphKind, Query, load
from cdmg.report import dump_json

_LOG = getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NON_IDENTIFIABLE = 3
EXIT_UNKNOWN = 4
EXIT_SEARCH_SPACE = 5

ASSUMPTION_WARNING = "Assumption 1 violated: verdict advisory"


class CommandError(Exception):
    """
    A subcommand raises this when it cannot do what was asked because
    of a problem in its input. It results in a one-line message on
    stderr and exit code L{EXIT_USAGE}.
    """


def load_commands() -> Iterator[ModuleType]:
    """
    Discover and import command modules.

    Errors will be logged to the default logger.

    @return: Yields the imported command modules, sorted by name.
    """

    for finder_, name, ispkg_ in sorted(
        iter_modules(__path__, "cdmg.command."), key=lambda info: info.name
    ):
        try:
            yield import_module(name)
        except Exception:  # pylint: disable=broad-except
            _LOG.exception('Error importing command module "%s":', name)


def add_command(
    module: ModuleType, subparsers: _SubParsersAction[ArgumentParser]
) -> None:
    """
    Create the subcommand parser for a command module and let the module
    register its arguments.

    @param module:
        Command module.
    @param subparsers:
        The subcommand collection of the main parser.
    """
    name = module.__name__.rsplit(".", 1)[-1]
    summary = (module.__doc__ or "").strip().split("\n", 1)[0]
    parser = subparsers.add_parser(name, help=summary, description=summary)
    func: Callable[[ArgumentParser], None] = getattr(module, "command_arguments")
    func(parser)
    run: Callable[[Namespace], int] = getattr(module, "command_run")
    parser.set_defaults(run=run)


def add_graph_argument(parser: ArgumentParser) -> None:
    parser.add_argument(
        "graph",
        metavar="FILE",
        help="graph file; relative names are also looked up in $CDMG_FIXTURES",
    )


def add_json_argument(parser: ArgumentParser) -> None:
    parser.add_argument(
        "--json", action="store_true", help="print results as JSON"
    )


def vertex_list(text: str) -> tuple[str, ...]:
    """Parse a comma-separated vertex list given on the command line."""
    return tuple(name.strip() for name in text.split(",") if name.strip())


def add_query_arguments(parser: ArgumentParser, required: bool = False) -> None:
    suffix = "" if required else "; default: the first query in the file"
    parser.add_argument(
        "--do",
        type=vertex_list,
        required=required,
        metavar="A,B",
        help="clusters that are intervened on" + suffix,
    )
    parser.add_argument(
        "--on",
        type=vertex_list,
        required=required,
        metavar="Y",
        help="clusters whose distribution is asked for" + suffix,
    )
    parser.add_argument(
        "--given",
        type=vertex_list,
        metavar="W",
        help="clusters that are conditioned on",
    )


def add_random_arguments(parser: ArgumentParser) -> None:
    parser.add_argument(
        "--seed",
        type=int,
        default=None,
        help="seed for random choices (default: 0)",
    )
    parser.add_argument(
        "--strict",
        action="store_true",
        help="refuse to run without an explicit --seed",
    )
    parser.add_argument(
        "--threads",
        type=int,
        default=os.cpu_count() or 1,
        help="number of worker threads (default: number of cores)",
    )


def seed_from_args(args: Namespace) -> int:
    """
    @raise CommandError: If C{--strict} was given without C{--seed}.
    """
    if args.seed is None:
        if args.strict:
            raise CommandError("--strict requires an explicit --seed")
        return 0
    seed: int = args.seed
    return seed


def load_document(args: Namespace, kind: GraphKind | None = None) -> GraphDocument:
    """
    Load the graph file named on the command line.

    @raise CommandError: If the file cannot be read or parsed, or does
        not hold a graph of the given kind.
    """
    try:
        document = load(args.graph)
    except OSError as ex:
        raise CommandError(f'cannot read "{args.graph}": {ex.strerror}') from ex
    except DslError as ex:
        raise CommandError(f"{args.graph}: {ex}") from ex
    if kind is not None and document.kind is not kind:
        raise CommandError(f'"{args.graph}" does not hold a {kind.value} graph')
    return document


def query_from_args(args: Namespace, document: GraphDocument) -> Query:
    """
    Return the query given by C{--do}, C{--on} and C{--given}, falling
    back to the first query in the document.

    @raise CommandError: If neither is available.
    """
    if args.do is None and args.on is None:
        if not document.queries:
            raise CommandError(
                "no query: pass --do and --on or add a query line to the file"
            )
        query = document.queries[0]
        if args.given is not None:
            query = Query(query.do, query.on, args.given)
        return query
    if args.on is None:
        raise CommandError("--on is required together with --do")
    return Query(args.do or (), args.on, args.given or ())


def print_lines(lines: Sequence[str] | Iterator[str]) -> None:
    for line in lines:
        print(line)


def json_or_text(
    args: Namespace, tree: dict[str, Any], lines: Sequence[str] | Iterator[str]
) -> None:
    """Print C{tree} as JSON if C{--json} was given, else C{lines}."""
    if args.json:
        print(dump_json(tree))
    else:
        print_lines(lines)
