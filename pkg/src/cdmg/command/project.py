# SPDX-License-Identifier: BSD-3-Clause

"""Print the SC-projection of a cluster graph."""

from __future__ import annotations

from argparse import ArgumentParser, Namespace
from dataclasses import replace

from cdmg.command import (
    EXIT_OK,
    add_graph_argument,
    add_json_argument,
    json_or_text,
    load_document,
)
from cdmg.dsl import serialize
from cdmg.hedge import projection_edges, sc_projection


def command_arguments(parser: ArgumentParser) -> None:
    add_graph_argument(parser)
    add_json_argument(parser)


def command_run(args: Namespace) -> int:
    document = load_document(args)
    added = projection_edges(document.graph)
    projected = replace(document, graph=sc_projection(document.graph))
    text = serialize(projected)
    json_or_text(
        args,
        {
            "command": "project",
            "added": [list(edge) for edge in sorted(added)],
            "document": text,
        },
        text.splitlines(),
    )
    return EXIT_OK
