"""Wigmore argument charts.

A chart is a DAG of statements — probanda, evidence, testimony, and
explicit inference steps — whose edges carry a polarity: an edge either
*supports* or *opposes* its head.  Everything is oriented toward the
designated probandum, which makes relevance a reachability question and
an argument a directed path.

The model is deliberately qualitative: nodes and two edge polarities,
no numeric weights.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Mapping

from .errors import CycleError, MissingProbandum, ParseError, UnknownNode
from .graphs import Dag, _quote
from .validation import Finding, ValidationReport

NODE_KINDS = ("evidence", "inference_step", "probandum", "subprobandum", "testimony")
PROBANDUM_KINDS = ("probandum", "subprobandum")
POLARITIES = ("opposes", "supports")


@dataclass(frozen=True)
class ChartNode:
    """One statement in a chart.

    ``item_ref`` ties the node back to a numbered corpus evidence item;
    ``source`` names who asserted it (used for testimony without an
    item number).
    """

    id: str
    kind: str
    text: str
    item_ref: str | None = None
    source: str | None = None

    def __post_init__(self) -> None:
        if not self.id:
            raise ParseError("chart node id must be non-empty")
        if self.kind not in NODE_KINDS:
            raise ParseError(
                f"unknown chart node kind {self.kind!r}; expected one of {NODE_KINDS}"
            )


@dataclass(frozen=True)
class ChartEdge:
    tail: str
    head: str
    polarity: str

    def __post_init__(self) -> None:
        if self.polarity not in POLARITIES:
            raise ParseError(
                f"unknown edge polarity {self.polarity!r}; expected one of {POLARITIES}"
            )
        if self.tail == self.head:
            raise CycleError(f"self-edge on {self.tail!r}")


@dataclass(frozen=True)
class WigmoreChart:
    """A validated chart; build with :func:`build_chart`."""

    nodes: tuple[ChartNode, ...]
    edges: tuple[ChartEdge, ...]
    probandum: str

    @cached_property
    def node_map(self) -> Mapping[str, ChartNode]:
        return MappingProxyType({n.id: n for n in self.nodes})

    @cached_property
    def dag(self) -> Dag:
        g = Dag(frozenset(n.id for n in self.nodes), frozenset())
        for e in self.edges:
            g = g.add_edge(e.tail, e.head)
        return g

    @cached_property
    def _polarity(self) -> Mapping[tuple[str, str], str]:
        return MappingProxyType({(e.tail, e.head): e.polarity for e in self.edges})

    def node(self, node_id: str) -> ChartNode:
        try:
            return self.node_map[node_id]
        except KeyError:
            raise UnknownNode(f"no chart node {node_id!r}") from None


def build_chart(
    nodes: Iterable[ChartNode],
    edges: Iterable[ChartEdge],
    probandum: str,
) -> WigmoreChart:
    """Assemble and validate a chart.

    Raises ``MissingProbandum`` if the designated probandum is absent or
    is not a probandum/subprobandum node, ``UnknownNode`` for edges into
    thin air, and ``CycleError`` if the argument graph is not acyclic.
    """
    nodes = tuple(nodes)
    edges = tuple(edges)
    seen: set[str] = set()
    for n in nodes:
        if n.id in seen:
            raise ParseError(f"duplicate chart node id {n.id!r}")
        seen.add(n.id)
    for e in edges:
        for end in (e.tail, e.head):
            if end not in seen:
                raise UnknownNode(f"edge endpoint {end!r} is not a chart node")
    by_id = {n.id: n for n in nodes}
    target = by_id.get(probandum)
    if target is None:
        raise MissingProbandum(f"designated probandum {probandum!r} is not in the chart")
    if target.kind not in PROBANDUM_KINDS:
        raise MissingProbandum(
            f"designated probandum {probandum!r} has kind {target.kind!r}"
        )
    chart = WigmoreChart(nodes, edges, probandum)
    chart.dag  # force the acyclicity check now rather than at first query
    return chart


def validate_chart(chart: WigmoreChart) -> ValidationReport:
    """Soft invariants that do not prevent construction."""
    findings = []
    for n in chart.nodes:
        if n.kind == "testimony" and n.item_ref is None and n.source is None:
            findings.append(
                Finding(
                    "unsourced-testimony",
                    f"testimony node {n.id!r} has neither an item reference nor a source",
                    subject=n.id,
                )
            )
    return ValidationReport(tuple(findings))


@dataclass(frozen=True)
class RelevancePartition:
    """Nodes split by whether any argument reaches the probandum."""

    probandum: str
    relevant: tuple[str, ...]
    irrelevant: tuple[str, ...]

    def as_dict(self) -> dict[str, object]:
        return {
            "probandum": self.probandum,
            "relevant": list(self.relevant),
            "irrelevant": list(self.irrelevant),
        }


def relevant_items(chart: WigmoreChart) -> RelevancePartition:
    """Partition every node except the probandum by reachability.

    A node is relevant when a directed path — through supports or
    opposes edges alike — leads from it to the designated probandum.
    Opposing evidence still *bears on* the probandum; only disconnected
    material is irrelevant.
    """
    reaches = chart.dag.ancestors(chart.probandum)
    rest = {n.id for n in chart.nodes} - reaches - {chart.probandum}
    return RelevancePartition(
        chart.probandum,
        tuple(sorted(reaches)),
        tuple(sorted(rest)),
    )


@dataclass(frozen=True)
class ArgumentChain:
    """One simple directed path of statements ending at the probandum."""

    nodes: tuple[str, ...]
    polarities: tuple[str, ...]

    @property
    def terminal_polarity(self) -> str:
        return self.polarities[-1]

    def as_dict(self) -> dict[str, object]:
        return {"nodes": list(self.nodes), "polarities": list(self.polarities)}


def _simple_paths(chart: WigmoreChart, start: str, target: str) -> list[ArgumentChain]:
    chains: list[ArgumentChain] = []
    polarity = chart._polarity
    path = [start]
    on_path = {start}

    def walk(vertex: str) -> None:
        if vertex == target:
            pols = tuple(
                polarity[(path[i], path[i + 1])] for i in range(len(path) - 1)
            )
            chains.append(ArgumentChain(tuple(path), pols))
            return
        for child in sorted(chart.dag.children(vertex)):
            if child in on_path:
                continue
            path.append(child)
            on_path.add(child)
            walk(child)
            path.pop()
            on_path.remove(child)

    walk(start)
    return sorted(chains, key=lambda c: c.nodes)


def argument_chains(chart: WigmoreChart, item: str) -> list[ArgumentChain]:
    """Every simple directed path from ``item`` to the probandum.

    The probandum itself has no chains: there is nothing left to argue.
    """
    if item not in chart.node_map:
        raise UnknownNode(f"no chart node {item!r}")
    if item == chart.probandum:
        return []
    return _simple_paths(chart, item, chart.probandum)


@dataclass(frozen=True)
class OppositionTally:
    supports: int
    opposes: int

    def as_dict(self) -> dict[str, int]:
        return {"supports": self.supports, "opposes": self.opposes}


def opposition_summary(chart: WigmoreChart) -> dict[str, OppositionTally]:
    """Per-probandum counts of incoming argument chains by final polarity.

    A chain starts at any node without incoming edges and is classified
    by the polarity of the edge that actually lands on the probandum.
    """
    sources = [
        n.id for n in chart.nodes if not chart.dag.parents(n.id)
    ]
    out: dict[str, OppositionTally] = {}
    for node in chart.nodes:
        if node.kind not in PROBANDUM_KINDS:
            continue
        supports = opposes = 0
        for source in sources:
            if source == node.id:
                continue
            for chain in _simple_paths(chart, source, node.id):
                if chain.terminal_polarity == "supports":
                    supports += 1
                else:
                    opposes += 1
        out[node.id] = OppositionTally(supports, opposes)
    return out


def chart_to_dot(chart: WigmoreChart, name: str = "chart") -> str:
    """DOT text: probanda boxed, opposes edges dashed."""
    lines = [f"digraph {_quote(name)} {{"]
    for n in sorted(chart.nodes, key=lambda n: n.id):
        attrs = [f"label={_quote(n.text)}"]
        if n.kind in PROBANDUM_KINDS:
            attrs.append("shape=box")
        elif n.kind == "testimony":
            attrs.append("shape=ellipse")
        lines.append(f"  {_quote(n.id)} [{', '.join(attrs)}];")
    for e in sorted(chart.edges, key=lambda e: (e.tail, e.head)):
        style = " [style=dashed]" if e.polarity == "opposes" else ""
        lines.append(f"  {_quote(e.tail)} -> {_quote(e.head)}{style};")
    lines.append("}")
    return "\n".join(lines) + "\n"
