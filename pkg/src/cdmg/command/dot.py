# SPDX-License-Identifier: BSD-3-Clause

"""Print a graph file in Graphviz DOT format."""

from __future__ import annotations

from argparse import ArgumentParser, Namespace

from cdmg.command import EXIT_OK, add_graph_argument, load_document
from cdmg.dsl import to_dot


def command_arguments(parser: ArgumentParser) -> None:
    add_graph_argument(parser)


def command_run(args: Namespace) -> int:
    print(to_dot(load_document(args)), end="")
    return EXIT_OK
