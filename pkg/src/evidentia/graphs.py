"""Directed-acyclic and undirected graph substrate.

All graphs are immutable values: mutating operations return new graphs and
never touch their input, so models can be shared freely across threads. Node
identity is a non-empty string; corpus nodes carry names like ``"40"`` or
``"S knife used?"`` verbatim.

The conditional-independence query runs the three-step moralisation routine:
restrict to the ancestral graph of the query sets, marry co-parents and drop
arrow directions, then look for a connecting path that avoids the
conditioning set.
"""

from __future__ import annotations

import heapq
from collections.abc import Iterable
from dataclasses import dataclass, field
from functools import cached_property

from .errors import (
    CycleError,
    DuplicateEdge,
    InvalidQuery,
    UnknownNode,
)

__all__ = [
    "Dag",
    "UGraph",
    "CiQuery",
    "ancestral_graph",
    "moralize",
    "separated",
    "query_ci",
    "dag_to_dot",
    "ugraph_to_dot",
]


def _check_node_ids(nodes: Iterable[str]) -> frozenset[str]:
    out = frozenset(nodes)
    for n in out:
        if not isinstance(n, str) or not n:
            raise UnknownNode(f"node ids must be non-empty strings, got {n!r}")
    return out


@dataclass(frozen=True)
class Dag:
    """A directed acyclic graph over string node ids."""

    nodes: frozenset[str] = field(default_factory=frozenset)
    edges: frozenset[tuple[str, str]] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", _check_node_ids(self.nodes))
        object.__setattr__(self, "edges", frozenset(tuple(e) for e in self.edges))
        for tail, head in self.edges:
            if tail not in self.nodes or head not in self.nodes:
                raise UnknownNode(f"edge ({tail!r}, {head!r}) mentions a node not in the graph")
            if tail == head:
                raise CycleError(f"self-loop on {tail!r}")
        # Kahn's algorithm; leftovers mean a directed cycle.
        indeg = {v: 0 for v in self.nodes}
        for _, head in self.edges:
            indeg[head] += 1
        frontier = [v for v, d in indeg.items() if d == 0]
        seen = 0
        children = self._child_map
        while frontier:
            v = frontier.pop()
            seen += 1
            for c in children[v]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    frontier.append(c)
        if seen != len(self.nodes):
            raise CycleError("edge set contains a directed cycle")

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[str, str]], nodes: Iterable[str] = ()) -> "Dag":
        """Build a DAG from an edge list, adding endpoints as nodes."""
        edges = frozenset(tuple(e) for e in edges)
        all_nodes = set(nodes)
        for tail, head in edges:
            all_nodes.add(tail)
            all_nodes.add(head)
        return cls(frozenset(all_nodes), edges)

    @cached_property
    def _parent_map(self) -> dict[str, frozenset[str]]:
        acc: dict[str, set[str]] = {v: set() for v in self.nodes}
        for tail, head in self.edges:
            acc[head].add(tail)
        return {v: frozenset(ps) for v, ps in acc.items()}

    @cached_property
    def _child_map(self) -> dict[str, frozenset[str]]:
        acc: dict[str, set[str]] = {v: set() for v in self.nodes}
        for tail, head in self.edges:
            acc[tail].add(head)
        return {v: frozenset(cs) for v, cs in acc.items()}

    @cached_property
    def _ancestor_map(self) -> dict[str, frozenset[str]]:
        anc: dict[str, frozenset[str]] = {}
        for v in self.topological_order():
            acc: set[str] = set()
            for p in self._parent_map[v]:
                acc.add(p)
                acc |= anc[p]
            anc[v] = frozenset(acc)
        return anc

    def _require(self, v: str) -> None:
        if v not in self.nodes:
            raise UnknownNode(f"node {v!r} is not in the graph")

    def add_node(self, v: str) -> "Dag":
        if v in self.nodes:
            return self
        return Dag(self.nodes | {v}, self.edges)

    def add_edge(self, tail: str, head: str) -> "Dag":
        """Return a new DAG with the edge; reject cycles and duplicates."""
        self._require(tail)
        self._require(head)
        if (tail, head) in self.edges:
            raise DuplicateEdge(f"edge ({tail!r}, {head!r}) already present")
        if tail == head or head in self._ancestor_map[tail]:
            raise CycleError(f"edge ({tail!r}, {head!r}) would close a directed cycle")
        return Dag(self.nodes, self.edges | {(tail, head)})

    def parents(self, v: str) -> frozenset[str]:
        self._require(v)
        return self._parent_map[v]

    def children(self, v: str) -> frozenset[str]:
        self._require(v)
        return self._child_map[v]

    def ancestors(self, v: str) -> frozenset[str]:
        self._require(v)
        return self._ancestor_map[v]

    def descendants(self, v: str) -> frozenset[str]:
        self._require(v)
        out: set[str] = set()
        frontier = list(self._child_map[v])
        while frontier:
            w = frontier.pop()
            if w not in out:
                out.add(w)
                frontier.extend(self._child_map[w])
        return frozenset(out)

    def topological_order(self) -> tuple[str, ...]:
        """Nodes with every edge pointing forward; ties broken lexicographically."""
        indeg = {v: 0 for v in self.nodes}
        for _, head in self.edges:
            indeg[head] += 1
        heap = [v for v, d in indeg.items() if d == 0]
        heapq.heapify(heap)
        out: list[str] = []
        while heap:
            v = heapq.heappop(heap)
            out.append(v)
            for c in sorted(self._child_map[v]):
                indeg[c] -= 1
                if indeg[c] == 0:
                    heapq.heappush(heap, c)
        return tuple(out)

    def skeleton(self) -> "UGraph":
        """The undirected graph with one arc per directed edge."""
        return UGraph(self.nodes, frozenset(_norm(t, h) for t, h in self.edges))


def _norm(x: str, y: str) -> tuple[str, str]:
    return (x, y) if x <= y else (y, x)


@dataclass(frozen=True)
class UGraph:
    """An undirected graph; arcs are stored as sorted pairs."""

    nodes: frozenset[str] = field(default_factory=frozenset)
    arcs: frozenset[tuple[str, str]] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", _check_node_ids(self.nodes))
        norm = frozenset(_norm(*a) for a in self.arcs)
        object.__setattr__(self, "arcs", norm)
        for x, y in norm:
            if x == y:
                raise CycleError(f"self-loop on {x!r}")
            if x not in self.nodes or y not in self.nodes:
                raise UnknownNode(f"arc ({x!r}, {y!r}) mentions a node not in the graph")

    @cached_property
    def _adjacency(self) -> dict[str, frozenset[str]]:
        acc: dict[str, set[str]] = {v: set() for v in self.nodes}
        for x, y in self.arcs:
            acc[x].add(y)
            acc[y].add(x)
        return {v: frozenset(ns) for v, ns in acc.items()}

    def neighbours(self, v: str) -> frozenset[str]:
        if v not in self.nodes:
            raise UnknownNode(f"node {v!r} is not in the graph")
        return self._adjacency[v]


@dataclass(frozen=True)
class CiQuery:
    """Is ``a`` independent of ``b`` given ``c``?"""

    a: frozenset[str]
    b: frozenset[str]
    c: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", frozenset(self.a))
        object.__setattr__(self, "b", frozenset(self.b))
        object.__setattr__(self, "c", frozenset(self.c))
        if not self.a or not self.b:
            raise InvalidQuery("query sets a and b must be non-empty")
        if self.a & self.b or self.a & self.c or self.b & self.c:
            raise InvalidQuery("query sets a, b, c must be pairwise disjoint")


def ancestral_graph(g: Dag, keep: Iterable[str]) -> Dag:
    """Step 1: drop every node that is not in ``keep`` or an ancestor of it."""
    keep = frozenset(keep)
    for v in keep:
        if v not in g.nodes:
            raise UnknownNode(f"node {v!r} is not in the graph")
    retained = set(keep)
    for v in keep:
        retained |= g._ancestor_map[v]
    return Dag(
        frozenset(retained),
        frozenset(e for e in g.edges if e[0] in retained and e[1] in retained),
    )


def moralize(g: Dag) -> UGraph:
    """Step 2: marry co-parents, then drop all arrow directions."""
    arcs = {_norm(t, h) for t, h in g.edges}
    for v in g.nodes:
        ps = sorted(g._parent_map[v])
        for i, p in enumerate(ps):
            for q in ps[i + 1:]:
                arcs.add((p, q))
    return UGraph(g.nodes, frozenset(arcs))


def separated(u: UGraph, a: Iterable[str], b: Iterable[str], c: Iterable[str] = ()) -> bool:
    """Step 3: true iff every path from ``a`` to ``b`` passes through ``c``."""
    a, b, c = frozenset(a), frozenset(b), frozenset(c)
    for v in a | b | c:
        if v not in u.nodes:
            raise UnknownNode(f"node {v!r} is not in the graph")
    if not a or not b:
        raise InvalidQuery("separation sets a and b must be non-empty")
    if a & b or a & c or b & c:
        raise InvalidQuery("separation sets must be pairwise disjoint")
    adjacency = u._adjacency
    seen = set(a)
    frontier = list(a)
    while frontier:
        v = frontier.pop()
        if v in b:
            return False
        for w in adjacency[v]:
            if w not in seen and w not in c:
                seen.add(w)
                frontier.append(w)
    return True


def query_ci(g: Dag, q: CiQuery) -> bool:
    """Decide a conditional-independence query by the three-step routine.

    The three steps run on an internal adjacency map for speed; they are the
    same ancestral-restriction, moralisation, and separation steps exposed by
    :func:`ancestral_graph`, :func:`moralize` and :func:`separated`, and the
    test suite checks this function against that composition.
    """
    for v in q.a | q.b | q.c:
        if v not in g.nodes:
            raise InvalidQuery(f"query mentions unknown node {v!r}")
    # Step 1: ancestral node set.
    keep = q.a | q.b | q.c
    anc_map = g._ancestor_map
    retained = set(keep)
    for v in keep:
        retained |= anc_map[v]
    # Step 2: moralise the induced subgraph.
    parent_map = g._parent_map
    adjacency: dict[str, set[str]] = {v: set() for v in retained}
    for v in retained:
        ps = [p for p in parent_map[v] if p in retained]
        for p in ps:
            adjacency[p].add(v)
            adjacency[v].add(p)
        for i, p in enumerate(ps):
            for qq in ps[i + 1:]:
                adjacency[p].add(qq)
                adjacency[qq].add(p)
    # Step 3: search for an a--b path avoiding c.
    seen = set(q.a)
    frontier = list(q.a)
    blocked = q.c
    target = q.b
    while frontier:
        v = frontier.pop()
        if v in target:
            return False
        for w in adjacency[v]:
            if w not in seen and w not in blocked:
                seen.add(w)
                frontier.append(w)
    return True


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def dag_to_dot(g: Dag, name: str = "dag") -> str:
    """One ``digraph`` block; node ids quoted verbatim, lines sorted."""
    lines = [f"digraph {_quote(name)} {{"]
    for v in sorted(g.nodes):
        lines.append(f"  {_quote(v)};")
    for tail, head in sorted(g.edges):
        lines.append(f"  {_quote(tail)} -> {_quote(head)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def ugraph_to_dot(u: UGraph, name: str = "ugraph") -> str:
    """One ``graph`` block; node ids quoted verbatim, lines sorted."""
    lines = [f"graph {_quote(name)} {{"]
    for v in sorted(u.nodes):
        lines.append(f"  {_quote(v)};")
    for x, y in sorted(u.arcs):
        lines.append(f"  {_quote(x)} -- {_quote(y)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
