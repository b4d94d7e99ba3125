# SPDX-License-Identifier: BSD-3-Clause

"""Check the side condition of a do-calculus rule."""

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
from cdmg.docalc import Rule, RuleQuery, rule_applies, rule_counterexample, rule_graph
from cdmg.dsl import GraphDocument, GraphKind, serialize
from cdmg.graph import GraphError
from cdmg.report import graph_json, graph_lines, witness_json
from cdmg.separation import active_path


def command_arguments(parser: ArgumentParser) -> None:
    add_graph_argument(parser)
    parser.add_argument(
        "--rule", type=int, choices=(1, 2, 3), required=True, help="rule number"
    )
    parser.add_argument("--y", type=vertex_list, required=True, metavar="Y")
    parser.add_argument(
        "--x",
        type=vertex_list,
        required=True,
        metavar="X",
        help="observations or actions that the rule inserts, deletes or exchanges",
    )
    parser.add_argument(
        "--z", type=vertex_list, default=(), metavar="Z", help="other actions"
    )
    parser.add_argument(
        "--w", type=vertex_list, default=(), metavar="W", help="other observations"
    )
    parser.add_argument(
        "--witness",
        action="store_true",
        help="when the rule does not apply, print a compatible ADMG in which "
        "it fails",
    )
    add_json_argument(parser)


def command_run(args: Namespace) -> int:
    document = load_document(args)
    try:
        query = RuleQuery(
            document.graph,
            Rule(args.rule),
            frozenset(args.y),
            frozenset(args.x),
            frozenset(args.z),
            frozenset(args.w),
        )
    except GraphError as ex:
        raise CommandError(str(ex)) from ex

    mutilated = rule_graph(query)
    applies = rule_applies(query)
    lines = [f"{query}", f"applies: {'true' if applies else 'false'}"]
    tree = {
        "command": "rules",
        "rule": args.rule,
        "condition": str(query),
        "applies": applies,
        "graph": graph_json(mutilated),
        "path": None,
        "witness": None,
    }
    if args.verbose:
        lines += ["mutilated graph:"] + ["  " + line for line in graph_lines(mutilated)]
    if not applies:
        path = active_path(mutilated, query.y, query.x, query.conditioning)
        tree["path"] = str(path)
        lines.append(f"active path: {path}")
        if args.witness:
            if document.kind is not GraphKind.CDMG:
                raise CommandError("--witness needs a cluster graph")
            witness = rule_counterexample(query, document.spec)
            if witness is not None:
                tree["witness"] = witness_json(witness)
                lines.append(f"witness ({witness.construction.value}):")
                text = serialize(
                    GraphDocument(GraphKind.ADMG, witness.admg, witness.spec)
                )
                lines += ["  " + line for line in text.splitlines()]
    json_or_text(args, tree, lines)
    return EXIT_OK
