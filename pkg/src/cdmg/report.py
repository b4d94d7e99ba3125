# SPDX-License-Identifier: BSD-3-Clause

"""
Presents analysis results as text for people and as JSON for programs.

Every C{*_lines} function returns lines of plain text; every C{*_json}
function returns a tree of plain Python values that L{dump_json} turns
into text. The JSON output of the command line interface follows the
schema in C{schema/output.schema.json}, which L{load_schema} returns.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Iterator, Sequence
from importlib.resources import files
from typing import Any

from cdmg.estimand import render, to_json
from cdmg.graph import ClusterSpec, Edge, MixedGraph
from cdmg.hedge import CForest, HedgeCertificate
from cdmg.identify import (
    Identified,
    NonIdentifiable,
    SearchReport,
    TraceEntry,
    Unknown,
    Verdict,
)
from cdmg.oracle import CompatibleAdmgWitness, Exhausted, FoundPair, ProbeResult
from cdmg.separation import Walk, format_vertices
from cdmg.version import VERSION_STRING

JsonTree = dict[str, Any]


def dump_json(tree: JsonTree) -> str:
    """Serialize C{tree} with sorted keys, so equal results give equal
    text."""
    return json.dumps({"version": VERSION_STRING, **tree}, indent=2, sort_keys=True)


def load_schema() -> JsonTree:
    """Return the JSON schema that L{dump_json} output follows."""
    text = files("cdmg").joinpath("schema/output.schema.json").read_text("utf-8")
    schema: JsonTree = json.loads(text)
    return schema


def verdict_name(verdict: Verdict) -> str:
    if isinstance(verdict, Identified):
        return "identified"
    if isinstance(verdict, NonIdentifiable):
        return "non-identifiable"
    return "unknown"


def _edges(edges: Iterable[Edge]) -> list[list[str]]:
    return [list(edge) for edge in sorted(edges)]


def graph_json(graph: MixedGraph) -> JsonTree:
    return {
        "vertices": list(graph.vertices),
        "directed": _edges(graph.directed),
        "bidirected": _edges(graph.bidirected),
    }


def graph_lines(graph: MixedGraph) -> Iterator[str]:
    yield "vertices: " + " ".join(graph.vertices)
    for tail, head in sorted(graph.directed):
        yield f"{tail} -> {head}"
    for first, second in sorted(graph.bidirected):
        yield f"{first} <-> {second}"


def spec_json(spec: ClusterSpec) -> JsonTree:
    return {
        name: {"members": list(members) if members is not None else None, "size": size}
        for name, (members, size) in spec.clusters.items()
    }


def _forest_json(forest: CForest) -> JsonTree:
    return {"roots": sorted(forest.roots), **graph_json(forest.graph)}


def certificate_json(certificate: HedgeCertificate) -> JsonTree:
    return {
        "f": _forest_json(certificate.f),
        "f_prime": _forest_json(certificate.f_prime),
        "roots": sorted(certificate.roots),
        "x": sorted(certificate.x),
        "y": sorted(certificate.y),
        "projection_edges_used": _edges(certificate.projection_edges_used),
    }


def certificate_lines(certificate: HedgeCertificate) -> Iterator[str]:
    yield f"roots: {format_vertices(certificate.roots)}"
    for name, forest in (("F", certificate.f), ("F'", certificate.f_prime)):
        yield f"{name}: {format_vertices(forest.vertices)}"
        for line in graph_lines(forest.graph):
            if not line.startswith("vertices:"):
                yield f"  {line}"
    if certificate.projection_edges_used:
        used = sorted(certificate.projection_edges_used)
        edges = ", ".join(f"{a} <-> {b}" for a, b in used)
        yield f"edges added by the SC-projection: {edges}"


def trace_json(trace: Sequence[TraceEntry]) -> list[JsonTree]:
    return [
        {
            "rule": entry.rule,
            "condition": entry.condition,
            "graph": graph_json(entry.graph) if entry.graph is not None else None,
            "before": render(entry.before),
            "after": render(entry.after),
        }
        for entry in trace
    ]


def trace_lines(trace: Sequence[TraceEntry]) -> Iterator[str]:
    for index, entry in enumerate(trace, 1):
        step = f"{index}. {entry.rule}: {render(entry.before)} = {render(entry.after)}"
        yield step
        if entry.condition:
            yield f"   since {entry.condition}"


def _report_json(report: SearchReport) -> JsonTree:
    return {
        "depth": report.depth,
        "nodes": report.nodes,
        "budget_depth": report.budget.depth,
        "budget_nodes": report.budget.nodes,
        "exhausted": report.exhausted,
    }


def verdict_json(verdict: Verdict) -> JsonTree:
    tree: JsonTree = {
        "verdict": verdict_name(verdict),
        "assumption1_warning": verdict.assumption1_warning,
    }
    if isinstance(verdict, Identified):
        tree["estimand"] = render(verdict.estimand)
        tree["estimand_tree"] = to_json(verdict.estimand)
        tree["trace"] = trace_json(verdict.trace)
    elif isinstance(verdict, NonIdentifiable):
        tree["certificate"] = certificate_json(verdict.certificate)
    else:
        tree["search"] = _report_json(verdict.report)
    return tree


def verdict_lines(verdict: Verdict) -> Iterator[str]:
    yield f"verdict: {verdict_name(verdict)}"
    if isinstance(verdict, Identified):
        yield f"estimand: {render(verdict.estimand)}"
        if verdict.trace:
            yield "derivation:"
            for line in trace_lines(verdict.trace):
                yield "  " + line
    elif isinstance(verdict, NonIdentifiable):
        yield "SC-hedge:"
        for line in certificate_lines(verdict.certificate):
            yield "  " + line
    else:
        report = verdict.report
        reason = "node budget exhausted" if report.exhausted else "no derivation found"
        yield (
            f"search: {reason} after {report.nodes} terms, "
            f"completed depth {report.depth} of {report.budget.depth}"
        )


def walk_json(walk: Walk | None) -> str | None:
    return None if walk is None else str(walk)


def witness_json(witness: CompatibleAdmgWitness) -> JsonTree:
    tree: JsonTree = {
        "construction": witness.construction.value,
        "admg": graph_json(witness.admg),
        "clusters": spec_json(witness.spec),
    }
    if witness.order is not None:
        tree["order"] = list(witness.order)
    if witness.path is not None:
        tree["path"] = str(witness.path)
    return tree


def probe_json(result: ProbeResult) -> JsonTree:
    if isinstance(result, FoundPair):
        return {
            "result": "found",
            "strategy": result.strategy.value,
            "gap": result.gap,
            "observational_gap": result.observational_gap,
            "seed": result.seed,
            "first": graph_json(result.first.admg),
            "second": graph_json(result.second.admg),
        }
    return {
        "result": "exhausted",
        "admgs": result.admgs,
        "models": result.models,
        "seed": result.seed,
    }


def probe_lines(result: ProbeResult) -> Iterator[str]:
    yield f"seed: {result.seed}"
    if isinstance(result, Exhausted):
        yield (
            f"exhausted: no pair among {result.admgs} compatible ADMGs "
            f"and {result.models} models"
        )
        return
    yield f"found pair by {result.strategy.value}"
    yield f"interventional gap: {result.gap:.6g}"
    yield f"observational gap: {result.observational_gap:.3g}"
    for name, model in (("first", result.first), ("second", result.second)):
        yield f"{name} ADMG:"
        for line in graph_lines(model.admg):
            yield "  " + line
