# SPDX-License-Identifier: BSD-3-Clause

"""Search the SC-projection of a cluster graph for a hedge."""

from __future__ import annotations

from argparse import ArgumentParser, Namespace

from cdmg.command import (
    EXIT_OK,
    CommandError,
    add_graph_argument,
    add_json_argument,
    add_query_arguments,
    json_or_text,
    load_document,
    query_from_args,
)
from cdmg.graph import GraphError
from cdmg.hedge import find_sc_hedge
from cdmg.report import certificate_json, certificate_lines


def command_arguments(parser: ArgumentParser) -> None:
    add_graph_argument(parser)
    add_query_arguments(parser)
    add_json_argument(parser)


def command_run(args: Namespace) -> int:
    document = load_document(args)
    query = query_from_args(args, document)
    try:
        certificate = find_sc_hedge(document.graph, query.do, query.on)
    except GraphError as ex:
        raise CommandError(str(ex)) from ex
    if certificate is None:
        lines = ["no SC-hedge"]
    else:
        lines = ["SC-hedge:"] + ["  " + line for line in certificate_lines(certificate)]
    json_or_text(
        args,
        {
            "command": "hedge",
            "certificate": (
                None if certificate is None else certificate_json(certificate)
            ),
        },
        lines,
    )
    return EXIT_OK
