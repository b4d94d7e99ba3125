# SPDX-License-Identifier: BSD-3-Clause

"""Command line interface."""

from __future__ import annotations

import logging
import sys
from argparse import ArgumentParser
from collections.abc import Sequence

from cdmg.command import (
    EXIT_SEARCH_SPACE,
    EXIT_USAGE,
    CommandError,
    add_command,
    load_commands,
)
from cdmg.docalc import AssumptionOneViolated
from cdmg.dsl import DslError
from cdmg.estimand import EstimandError
from cdmg.graph import GraphError
from cdmg.identify import EmptyTarget
from cdmg.oracle import OrderIncompatible, PathNotActive, SearchSpaceTooLarge
from cdmg.scm import StateSpaceTooLarge
from cdmg.version import VERSION_STRING

_USAGE_ERRORS = (
    CommandError,
    GraphError,
    DslError,
    EstimandError,
    EmptyTarget,
    AssumptionOneViolated,
    StateSpaceTooLarge,
    PathNotActive,
    OrderIncompatible,
)


def build_parser() -> ArgumentParser:
    """Create the argument parser, with one subcommand per command module."""

    parser = ArgumentParser(
        prog="cdmg",
        description="Identification of macro causal effects "
        "in cluster directed mixed graphs",
    )
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="increase amount of logging, can be passed multiple times",
    )
    parser.add_argument(
        "-V", "--version", action="version", version=f"cdmg {VERSION_STRING}"
    )

    subparsers = parser.add_subparsers(
        title="commands", metavar="COMMAND", required=True
    )
    for module in load_commands():
        add_command(module, subparsers)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """
    Parse command line arguments and run the requested subcommand.

    This is the entry point that gets called by the wrapper script.

    @return:
        The exit code: 0 on success, 2 on a usage error, 3 if the effect
        is not identifiable, 4 if that could not be decided and 5 if an
        enumeration would be too large.
    """

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as ex:
        return ex.code if isinstance(ex.code, int) else EXIT_USAGE

    level_map = {0: logging.WARNING, 1: logging.INFO, 2: logging.DEBUG}
    level = level_map.get(args.verbose, logging.DEBUG)
    logging.basicConfig(
        level=level, format="%(levelname)s: %(message)s", stream=sys.stderr
    )

    try:
        exit_code: int = args.run(args)
    except SearchSpaceTooLarge as ex:
        print(f"cdmg: search space too large: {ex}", file=sys.stderr)
        return EXIT_SEARCH_SPACE
    except _USAGE_ERRORS as ex:
        print(f"cdmg: {ex}", file=sys.stderr)
        return EXIT_USAGE
    return exit_code
