# SPDX-License-Identifier: BSD-3-Clause

"""Decide whether a macro causal effect is identifiable."""

from __future__ import annotations

import sys
from argparse import ArgumentParser, Namespace

from cdmg.command import (
    ASSUMPTION_WARNING,
    EXIT_NON_IDENTIFIABLE,
    EXIT_OK,
    EXIT_UNKNOWN,
    CommandError,
    add_graph_argument,
    add_json_argument,
    add_query_arguments,
    json_or_text,
    load_document,
    query_from_args,
)
from cdmg.graph import GraphError
from cdmg.identify import (
    Budget,
    EmptyTarget,
    Identified,
    NonIdentifiable,
    identify_macro,
)
from cdmg.report import verdict_json, verdict_lines


def command_arguments(parser: ArgumentParser) -> None:
    add_graph_argument(parser)
    add_query_arguments(parser)
    parser.add_argument(
        "--depth",
        type=int,
        default=Budget.depth,
        help=f"largest number of expansion moves (default: {Budget.depth})",
    )
    parser.add_argument(
        "--budget",
        type=int,
        default=Budget.nodes,
        help=f"largest number of terms to visit (default: {Budget.nodes})",
    )
    add_json_argument(parser)


def command_run(args: Namespace) -> int:
    document = load_document(args)
    query = query_from_args(args, document)
    try:
        verdict = identify_macro(
            document.graph,
            document.spec,
            query.do,
            query.on,
            query.given,
            Budget(args.depth, args.budget),
        )
    except (GraphError, EmptyTarget) as ex:
        raise CommandError(str(ex)) from ex
    if verdict.assumption1_warning:
        print(ASSUMPTION_WARNING, file=sys.stderr)
    json_or_text(
        args, {"command": "identify", **verdict_json(verdict)}, verdict_lines(verdict)
    )
    if isinstance(verdict, Identified):
        return EXIT_OK
    if isinstance(verdict, NonIdentifiable):
        return EXIT_NON_IDENTIFIABLE
    return EXIT_UNKNOWN
