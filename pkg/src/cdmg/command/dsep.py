# SPDX-License-Identifier: BSD-3-Clause

"""Decide d-separation between two vertex sets."""

from __future__ import annotations

from argparse import ArgumentParser, Namespace

from cdmg.command import (
    EXIT_OK,
    CommandError,
    add_graph_argument,
    add_json_argument,
    json_or_text,
    load_document,
    vertex_list,
)
from cdmg.graph import GraphError
from cdmg.separation import active_path


def command_arguments(parser: ArgumentParser) -> None:
    add_graph_argument(parser)
    parser.add_argument("--x", type=vertex_list, required=True, metavar="A,B")
    parser.add_argument("--y", type=vertex_list, required=True, metavar="C,D")
    parser.add_argument("--given", type=vertex_list, default=(), metavar="Z")
    add_json_argument(parser)


def command_run(args: Namespace) -> int:
    document = load_document(args)
    try:
        path = active_path(document.graph, args.x, args.y, args.given)
    except GraphError as ex:
        raise CommandError(str(ex)) from ex
    lines = [f"d-separated: {'true' if path is None else 'false'}"]
    if path is not None:
        lines.append(f"active path: {path}")
    json_or_text(
        args,
        {
            "command": "dsep",
            "separated": path is None,
            "path": None if path is None else str(path),
        },
        lines,
    )
    return EXIT_OK
