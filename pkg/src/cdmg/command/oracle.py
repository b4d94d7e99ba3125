# SPDX-License-Identifier: BSD-3-Clause

"""Compare a cluster graph with the ADMGs compatible with it."""

from __future__ import annotations

from argparse import ArgumentParser, Namespace

from cdmg.command import (
    EXIT_NON_IDENTIFIABLE,
    EXIT_OK,
    EXIT_UNKNOWN,
    CommandError,
    add_graph_argument,
    add_json_argument,
    add_query_arguments,
    add_random_arguments,
    json_or_text,
    load_document,
    query_from_args,
    seed_from_args,
    vertex_list,
)
from cdmg.dsl import GraphDocument, GraphKind, serialize
from cdmg.graph import ClusterSpec
from cdmg.oracle import (
    DEFAULT_ENUMERATION_LIMIT,
    FoundPair,
    active_path_witness,
    enumerate_compatible_admgs,
    nonidentifiability_probe,
)
from cdmg.report import probe_json, probe_lines, witness_json
from cdmg.separation import active_path


def _add_limit_argument(parser: ArgumentParser) -> None:
    parser.add_argument(
        "--limit",
        type=int,
        default=DEFAULT_ENUMERATION_LIMIT,
        help="largest number of edge assignments to enumerate "
        f"(default: {DEFAULT_ENUMERATION_LIMIT})",
    )


def command_arguments(parser: ArgumentParser) -> None:
    actions = parser.add_subparsers(
        dest="action", metavar="ACTION", required=True
    )

    enumerate_parser = actions.add_parser(
        "enumerate", help="list every compatible ADMG"
    )
    add_graph_argument(enumerate_parser)
    _add_limit_argument(enumerate_parser)
    add_json_argument(enumerate_parser)

    probe_parser = actions.add_parser(
        "probe",
        help="look for two compatible models that agree on observations "
        "but not on the effect",
    )
    add_graph_argument(probe_parser)
    add_query_arguments(probe_parser)
    probe_parser.add_argument(
        "--trials", type=int, default=5, help="random models per candidate"
    )
    probe_parser.add_argument(
        "--max-admgs",
        type=int,
        default=20,
        help="largest number of compatible ADMGs to try",
    )
    _add_limit_argument(probe_parser)
    add_random_arguments(probe_parser)
    add_json_argument(probe_parser)

    witness_parser = actions.add_parser(
        "witness",
        help="build a compatible ADMG in which an active cluster path is active",
    )
    add_graph_argument(witness_parser)
    witness_parser.add_argument("--x", type=vertex_list, required=True, metavar="X")
    witness_parser.add_argument("--y", type=vertex_list, required=True, metavar="Y")
    witness_parser.add_argument(
        "--given", type=vertex_list, default=(), metavar="W"
    )
    add_json_argument(witness_parser)


def _spec(document: GraphDocument) -> ClusterSpec:
    spec = document.spec
    if spec is None:
        spec = ClusterSpec.from_sizes({c: None for c in document.graph.vertices})
    return spec.realized(default_size=2)


def _run_enumerate(args: Namespace, document: GraphDocument) -> int:
    witnesses = list(
        enumerate_compatible_admgs(document.graph, _spec(document), args.limit)
    )
    lines = [f"compatible ADMGs: {len(witnesses)}"]
    for index, witness in enumerate(witnesses, 1):
        lines.append(f"# {index}")
        lines += serialize(
            GraphDocument(GraphKind.ADMG, witness.admg, witness.spec)
        ).splitlines()
    json_or_text(
        args,
        {
            "command": "oracle enumerate",
            "count": len(witnesses),
            "admgs": [witness_json(witness) for witness in witnesses],
        },
        lines,
    )
    return EXIT_OK


def _run_probe(args: Namespace, document: GraphDocument) -> int:
    query = query_from_args(args, document)
    if query.given:
        raise CommandError("the probe does not support conditional effects")
    result = nonidentifiability_probe(
        document.graph,
        document.spec,
        query.do,
        query.on,
        trials=args.trials,
        seed=seed_from_args(args),
        limit=args.limit,
        max_admgs=args.max_admgs,
        threads=args.threads,
    )
    json_or_text(
        args, {"command": "oracle probe", **probe_json(result)}, probe_lines(result)
    )
    return EXIT_NON_IDENTIFIABLE if isinstance(result, FoundPair) else EXIT_UNKNOWN


def _run_witness(args: Namespace, document: GraphDocument) -> int:
    graph = document.graph
    path = active_path(graph, args.x, args.y, args.given)
    if path is None:
        raise CommandError(
            "the clusters are d-separated, so no compatible ADMG connects them"
        )
    witness = active_path_witness(graph, path, args.given, _spec(document))
    lines = [f"cluster path: {path}", f"micro path: {witness.path}"]
    lines += serialize(
        GraphDocument(GraphKind.ADMG, witness.admg, witness.spec)
    ).splitlines()
    json_or_text(args, {"command": "oracle witness", **witness_json(witness)}, lines)
    return EXIT_OK


def command_run(args: Namespace) -> int:
    document = load_document(args, GraphKind.CDMG)
    if args.action == "enumerate":
        return _run_enumerate(args, document)
    if args.action == "probe":
        return _run_probe(args, document)
    return _run_witness(args, document)
