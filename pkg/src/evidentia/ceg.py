"""Chain event graphs: event trees, stages, positions, and path queries.

An event tree unfolds a story edge by edge; a staging colours internal
vertices whose next-step uncertainties are judged identical, with an explicit
label correspondence between the florets (so ``D1`` on one floret may pair
with ``D2`` on another). Once every stage carries a probability vector, the
staged tree collapses to a chain event graph: vertices whose rooted subtrees
are topologically and colour isomorphic become one *position*, and all leaves
fuse into the sink ``w_inf``.

Logical impossibilities are represented by omitting edges, never by explicit
zero probabilities; constructors reject zeros and point here.

Path labels are reported in stage *slot* labels (the representative member's
local labels). Under identity correspondences — by far the common case —
these are exactly the local edge labels.
"""

from __future__ import annotations

import itertools
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field, replace
from functools import cached_property
from math import fsum, prod
from types import MappingProxyType

from .bn import DEFAULT_JOINT_CAP, DiscreteBayesNet
from .errors import (
    CycleError,
    Disconnected,
    DuplicateSiblingLabel,
    FloretMismatch,
    InvalidOrder,
    InvalidWeights,
    LeafStaging,
    NoSurvivingPath,
    NotACut,
    TooLarge,
    UnassignedStageProbability,
    UnknownNode,
)
from .validation import Finding, ValidationReport

__all__ = [
    "TreeEdge",
    "EventTree",
    "Stage",
    "StagedTree",
    "CegEdge",
    "Ceg",
    "CegPath",
    "CutVariable",
    "build_event_tree",
    "assign_stage",
    "set_stage_probabilities",
    "validate_staging",
    "to_ceg",
    "enumerate_paths",
    "tree_paths",
    "condition",
    "path_predicate",
    "bn_to_ceg",
    "cut_variable",
    "staged_tree_to_dot",
    "ceg_to_dot",
]

SINK = "w_inf"


@dataclass(frozen=True)
class TreeEdge:
    tail: str
    head: str
    label: str
    evidence: bool = False


@dataclass(frozen=True)
class EventTree:
    """A finite rooted tree with labeled edges, children ordered by label."""

    root: str
    edges: tuple[TreeEdge, ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "edges", tuple(e if isinstance(e, TreeEdge) else TreeEdge(*e) for e in self.edges)
        )
        incoming: dict[str, int] = {}
        for e in self.edges:
            incoming[e.head] = incoming.get(e.head, 0) + 1
            if incoming[e.head] > 1:
                raise Disconnected(f"vertex {e.head!r} has more than one incoming edge")
        if self.root in incoming:
            raise Disconnected(f"root {self.root!r} has an incoming edge")
        by_tail: dict[str, list[TreeEdge]] = {}
        for e in self.edges:
            siblings = by_tail.setdefault(e.tail, [])
            if any(s.label == e.label for s in siblings):
                raise DuplicateSiblingLabel(
                    f"vertex {e.tail!r} has two outgoing edges labeled {e.label!r}"
                )
            siblings.append(e)
        reached = {self.root}
        frontier = [self.root]
        while frontier:
            v = frontier.pop()
            for e in by_tail.get(v, ()):
                reached.add(e.head)
                frontier.append(e.head)
        stray = self.vertices - reached
        if stray:
            raise Disconnected(f"vertices {sorted(stray)} are not reachable from the root")

    @cached_property
    def vertices(self) -> frozenset[str]:
        vs = {self.root}
        for e in self.edges:
            vs.add(e.tail)
            vs.add(e.head)
        return frozenset(vs)

    @cached_property
    def _children(self) -> dict[str, tuple[TreeEdge, ...]]:
        acc: dict[str, list[TreeEdge]] = {v: [] for v in self.vertices}
        for e in self.edges:
            acc[e.tail].append(e)
        return {v: tuple(sorted(es, key=lambda e: e.label)) for v, es in acc.items()}

    def children(self, v: str) -> tuple[TreeEdge, ...]:
        if v not in self.vertices:
            raise UnknownNode(f"vertex {v!r} is not in the tree")
        return self._children[v]

    @cached_property
    def leaves(self) -> frozenset[str]:
        return frozenset(v for v in self.vertices if not self._children[v])

    @cached_property
    def internal(self) -> frozenset[str]:
        return self.vertices - self.leaves


def build_event_tree(
    edges: Iterable[TreeEdge | tuple], root: str | None = None
) -> EventTree:
    """Assemble and check a tree; the root is inferred when omitted."""
    edges = tuple(e if isinstance(e, TreeEdge) else TreeEdge(*e) for e in edges)
    if root is None:
        heads = {e.head for e in edges}
        candidates = sorted({e.tail for e in edges} - heads)
        if len(candidates) != 1:
            raise Disconnected(
                f"cannot infer a unique root; parentless tails: {candidates}"
            )
        root = candidates[0]
    return EventTree(root, edges)


@dataclass(frozen=True)
class Stage:
    """Vertices sharing one next-step uncertainty.

    ``slots`` are the canonical edge labels (the first member's local labels,
    sorted); ``member_labels`` aligns each member's local labels with the
    slots.
    """

    id: str
    members: tuple[str, ...]
    slots: tuple[str, ...]
    member_labels: Mapping[str, tuple[str, ...]]

    def __post_init__(self) -> None:
        object.__setattr__(self, "members", tuple(self.members))
        object.__setattr__(self, "slots", tuple(self.slots))
        object.__setattr__(
            self,
            "member_labels",
            MappingProxyType({m: tuple(ls) for m, ls in dict(self.member_labels).items()}),
        )

    def slot_of(self, member: str, local_label: str) -> str:
        labels = self.member_labels[member]
        try:
            return self.slots[labels.index(local_label)]
        except ValueError:
            raise UnknownNode(
                f"edge label {local_label!r} not registered for {member!r} in stage {self.id!r}"
            ) from None


@dataclass(frozen=True)
class StagedTree:
    """An event tree plus a stage partition of its internal vertices."""

    tree: EventTree
    stages: tuple[Stage, ...]
    probabilities: Mapping[str, tuple[float, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "stages", tuple(self.stages))
        object.__setattr__(
            self,
            "probabilities",
            MappingProxyType(
                {s: tuple(float(x) for x in v) for s, v in dict(self.probabilities).items()}
            ),
        )

    @classmethod
    def discrete(cls, tree: EventTree) -> "StagedTree":
        """Every internal vertex in its own singleton stage."""
        stages = []
        for v in _preorder(tree):
            if v in tree.internal:
                labels = tuple(e.label for e in tree.children(v))
                stages.append(Stage(f"s({v})", (v,), labels, {v: labels}))
        return cls(tree, tuple(stages))

    @cached_property
    def stage_of(self) -> Mapping[str, Stage]:
        acc: dict[str, Stage] = {}
        for s in self.stages:
            for m in s.members:
                acc[m] = s
        return MappingProxyType(acc)


def _preorder(tree: EventTree) -> list[str]:
    out: list[str] = []
    stack = [tree.root]
    while stack:
        v = stack.pop()
        out.append(v)
        for e in reversed(tree.children(v)):
            stack.append(e.head)
    return out


def assign_stage(
    st: StagedTree,
    vertices: Sequence[str],
    correspondences: Mapping[str, Mapping[str, str]] | None = None,
    stage_id: str | None = None,
) -> StagedTree:
    """Merge the named internal vertices into one new stage.

    The first vertex is the representative: its local labels, sorted, become
    the slot labels. Other members either share that label set (identity
    correspondence) or appear in ``correspondences`` mapping each local label
    to a slot label.
    """
    vertices = tuple(vertices)
    correspondences = correspondences or {}
    tree = st.tree
    for v in vertices:
        if v not in tree.vertices:
            raise UnknownNode(f"vertex {v!r} is not in the tree")
        if v in tree.leaves:
            raise LeafStaging(f"leaf {v!r} cannot be staged")
    rep = vertices[0]
    slots = tuple(sorted(e.label for e in tree.children(rep)))
    member_labels: dict[str, tuple[str, ...]] = {rep: slots}
    for v in vertices[1:]:
        local = sorted(e.label for e in tree.children(v))
        if len(local) != len(slots):
            raise FloretMismatch(
                f"vertex {v!r} has {len(local)} outgoing edges, representative "
                f"{rep!r} has {len(slots)}"
            )
        mapping = correspondences.get(v)
        if mapping is None:
            if tuple(local) != slots:
                raise FloretMismatch(
                    f"vertex {v!r} labels {local} differ from slots {list(slots)} "
                    f"and no correspondence was given"
                )
            member_labels[v] = slots
        else:
            if sorted(mapping) != local or sorted(mapping.values()) != sorted(slots):
                raise FloretMismatch(
                    f"correspondence for {v!r} is not a bijection {local} -> {list(slots)}"
                )
            member_labels[v] = tuple(
                next(l for l, s in mapping.items() if s == slot) for slot in slots
            )
    if stage_id is None:
        existing = {s.id for s in st.stages}
        k = 0
        while f"u{k}" in existing:
            k += 1
        stage_id = f"u{k}"
    elif any(s.id == stage_id for s in st.stages):
        raise FloretMismatch(f"stage id {stage_id!r} already in use")
    survivors = []
    dropped_probs = set()
    for s in st.stages:
        remaining = tuple(m for m in s.members if m not in vertices)
        if not remaining:
            dropped_probs.add(s.id)
            continue
        if remaining != s.members:
            dropped_probs.add(s.id)
            s = Stage(
                s.id,
                remaining,
                s.slots,
                {m: s.member_labels[m] for m in remaining},
            )
        survivors.append(s)
    merged = Stage(stage_id, vertices, slots, member_labels)
    probs = {k: v for k, v in st.probabilities.items() if k not in dropped_probs}
    return StagedTree(st.tree, tuple(survivors) + (merged,), probs)


def set_stage_probabilities(
    st: StagedTree, stage_id: str, probabilities: Sequence[float] | Mapping[str, float]
) -> StagedTree:
    """Attach a probability vector (aligned with the stage's slots)."""
    stage = next((s for s in st.stages if s.id == stage_id), None)
    if stage is None:
        raise UnknownNode(f"no stage named {stage_id!r}")
    if isinstance(probabilities, Mapping):
        missing = [s for s in stage.slots if s not in probabilities]
        if missing:
            raise InvalidWeights(f"stage {stage_id!r}: no probability for slots {missing}")
        vector = tuple(float(probabilities[s]) for s in stage.slots)
    else:
        vector = tuple(float(x) for x in probabilities)
    if len(vector) != len(stage.slots):
        raise InvalidWeights(
            f"stage {stage_id!r} has {len(stage.slots)} slots, got {len(vector)} values"
        )
    if any(x <= 0 for x in vector):
        raise InvalidWeights(
            f"stage {stage_id!r}: probabilities must be strictly positive — "
            f"represent impossibilities by omitting the edge"
        )
    return StagedTree(
        st.tree, st.stages, {**dict(st.probabilities), stage_id: vector}
    )


def validate_staging(st: StagedTree) -> ValidationReport:
    """Report structural defects in a staging without raising."""
    findings: list[Finding] = []
    tree = st.tree
    seen: dict[str, str] = {}
    for s in st.stages:
        for m in s.members:
            if m in seen:
                findings.append(
                    Finding("multiply-staged", f"vertex {m!r} is in stages {seen[m]!r} and {s.id!r}", m)
                )
            seen[m] = s.id
            if m not in tree.vertices:
                findings.append(Finding("unknown-vertex", f"stage {s.id!r} names unknown vertex {m!r}", m))
                continue
            if m in tree.leaves:
                findings.append(Finding("leaf-staged", f"stage {s.id!r} colours leaf {m!r}", m))
                continue
            local = sorted(e.label for e in tree.children(m))
            registered = sorted(s.member_labels.get(m, ()))
            if registered != local or len(s.member_labels.get(m, ())) != len(s.slots):
                findings.append(
                    Finding(
                        "floret-mismatch",
                        f"stage {s.id!r}: vertex {m!r} floret {local} does not "
                        f"correspond to slots {list(s.slots)}",
                        m,
                    )
                )
    for v in sorted(tree.internal):
        if v not in seen:
            findings.append(Finding("uncoloured-vertex", f"internal vertex {v!r} has no stage", v))
    for sid, vector in sorted(st.probabilities.items()):
        if any(x <= 0 for x in vector):
            findings.append(
                Finding(
                    "explicit-zero",
                    f"stage {sid!r} has a non-positive probability; omit the edge instead",
                    sid,
                )
            )
        elif abs(fsum(vector) - 1.0) > 1e-9:
            findings.append(
                Finding("unnormalized-stage", f"stage {sid!r} probabilities sum to {fsum(vector)!r}", sid)
            )
    return ValidationReport(tuple(findings))


# ---------------------------------------------------------------------------
# Chain event graphs


@dataclass(frozen=True)
class CegEdge:
    tail: str
    head: str
    label: str
    probability: float
    evidence: bool = False

    def __post_init__(self) -> None:
        if self.probability <= 0:
            raise InvalidWeights(
                f"edge {self.tail!r}->{self.head!r} has probability "
                f"{self.probability!r}; impossibilities are represented by omitting edges"
            )


@dataclass(frozen=True)
class Ceg:
    """Positions and probability-weighted edges from ``root`` to one sink."""

    root: str
    sink: str
    edges: tuple[CegEdge, ...]
    colours: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "colours", MappingProxyType(dict(self.colours)))
        outgoing: dict[str, list[CegEdge]] = {v: [] for v in self.positions}
        for e in self.edges:
            if any(s.label == e.label for s in outgoing[e.tail]):
                raise DuplicateSiblingLabel(
                    f"position {e.tail!r} has two outgoing edges labeled {e.label!r}"
                )
            outgoing[e.tail].append(e)
        if outgoing[self.sink]:
            raise CycleError(f"sink {self.sink!r} has outgoing edges")
        for v, es in outgoing.items():
            if v == self.sink:
                continue
            total = fsum(e.probability for e in es)
            if abs(total - 1.0) > 1e-9:
                raise InvalidWeights(
                    f"outgoing probabilities of {v!r} sum to {total!r}"
                )
        # Kahn over the multigraph: every position must be ordered.
        indeg = {v: 0 for v in self.positions}
        for e in self.edges:
            indeg[e.head] += 1
        frontier = [v for v, d in indeg.items() if d == 0]
        count = 0
        while frontier:
            v = frontier.pop()
            count += 1
            for e in outgoing[v]:
                indeg[e.head] -= 1
                if indeg[e.head] == 0:
                    frontier.append(e.head)
        if count != len(self.positions):
            raise CycleError("edge set contains a directed cycle")
        reach_fwd = {self.root}
        stack = [self.root]
        while stack:
            v = stack.pop()
            for e in outgoing[v]:
                if e.head not in reach_fwd:
                    reach_fwd.add(e.head)
                    stack.append(e.head)
        incoming: dict[str, list[CegEdge]] = {v: [] for v in self.positions}
        for e in self.edges:
            incoming[e.head].append(e)
        reach_bwd = {self.sink}
        stack = [self.sink]
        while stack:
            v = stack.pop()
            for e in incoming[v]:
                if e.tail not in reach_bwd:
                    reach_bwd.add(e.tail)
                    stack.append(e.tail)
        stray = self.positions - (reach_fwd & reach_bwd)
        if stray:
            raise Disconnected(
                f"positions {sorted(stray)} are not on a root-to-sink path"
            )

    @cached_property
    def positions(self) -> frozenset[str]:
        vs = {self.root, self.sink}
        for e in self.edges:
            vs.add(e.tail)
            vs.add(e.head)
        return frozenset(vs)

    @cached_property
    def _outgoing(self) -> dict[str, tuple[CegEdge, ...]]:
        acc: dict[str, list[CegEdge]] = {v: [] for v in self.positions}
        for e in self.edges:
            acc[e.tail].append(e)
        return {v: tuple(sorted(es, key=lambda e: e.label)) for v, es in acc.items()}

    def outgoing(self, v: str) -> tuple[CegEdge, ...]:
        if v not in self.positions:
            raise UnknownNode(f"position {v!r} is not in the graph")
        return self._outgoing[v]


@dataclass(frozen=True)
class CegPath:
    edges: tuple[CegEdge, ...]

    @property
    def probability(self) -> float:
        return prod(e.probability for e in self.edges)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(e.label for e in self.edges)

    @property
    def positions(self) -> tuple[str, ...]:
        return (self.edges[0].tail,) + tuple(e.head for e in self.edges)

    def passes_through(self, position: str) -> bool:
        return position in self.positions

    def has_label(self, label: str) -> bool:
        return label in self.labels


def to_ceg(st: StagedTree) -> Ceg:
    """Collapse a staged tree by merging colour-isomorphic subtrees.

    Signatures are built bottom-up: a leaf signature is a constant, an
    internal signature is the stage id plus the sorted (slot label, child
    signature, evidence flag) triples. Equal signatures become one position;
    names w0, w1, … are assigned in preorder, leaves become ``w_inf``.
    """
    tree = st.tree
    for v in sorted(tree.internal):
        stage = st.stage_of.get(v)
        if stage is None:
            raise UnassignedStageProbability(f"internal vertex {v!r} has no stage")
        if stage.id not in st.probabilities:
            raise UnassignedStageProbability(
                f"stage {stage.id!r} has no probability vector"
            )
    signature: dict[str, object] = {}
    for v in reversed(_preorder(tree)):
        if v in tree.leaves:
            signature[v] = "leaf"
        else:
            stage = st.stage_of[v]
            parts = tuple(
                sorted(
                    (stage.slot_of(v, e.label), signature[e.head], e.evidence)
                    for e in tree.children(v)
                )
            )
            signature[v] = (stage.id, parts)
    names: dict[object, str] = {"leaf": SINK}
    counter = 0
    representative: dict[object, str] = {}
    for v in _preorder(tree):
        sig = signature[v]
        if sig not in names:
            names[sig] = f"w{counter}"
            counter += 1
        representative.setdefault(sig, v)
    edges: list[CegEdge] = []
    colours: dict[str, str] = {}
    for sig, rep in representative.items():
        if sig == "leaf":
            continue
        stage = st.stage_of[rep]
        vector = st.probabilities[stage.id]
        colours[names[sig]] = stage.id
        for e in tree.children(rep):
            slot = stage.slot_of(rep, e.label)
            edges.append(
                CegEdge(
                    names[sig],
                    names[signature[e.head]],
                    slot,
                    vector[stage.slots.index(slot)],
                    e.evidence,
                )
            )
    return Ceg(names[signature[tree.root]], SINK, tuple(edges), colours)


def enumerate_paths(c: Ceg) -> tuple[CegPath, ...]:
    """Every root-to-sink path, edges explored in label order."""
    out: list[CegPath] = []

    def walk(v: str, acc: tuple[CegEdge, ...]) -> None:
        if v == c.sink:
            out.append(CegPath(acc))
            return
        for e in c.outgoing(v):
            walk(e.head, acc + (e,))

    walk(c.root, ())
    return tuple(out)


def tree_paths(st: StagedTree) -> tuple[tuple[tuple[str, ...], float], ...]:
    """(slot-label sequence, probability) for every root-to-leaf tree path."""
    tree = st.tree
    out: list[tuple[tuple[str, ...], float]] = []

    def walk(v: str, labels: tuple[str, ...], p: float) -> None:
        kids = tree.children(v)
        if not kids:
            out.append((labels, p))
            return
        stage = st.stage_of[v]
        vector = st.probabilities[stage.id]
        for e in kids:
            slot = stage.slot_of(v, e.label)
            walk(e.head, labels + (slot,), p * vector[stage.slots.index(slot)])

    walk(tree.root, (), 1.0)
    return tuple(out)


def path_predicate(spec: Mapping) -> Callable[[CegPath], bool]:
    """Compile a JSON-shaped predicate into a path filter.

    Forms: ``{"has_label": L}``, ``{"lacks_label": L}``,
    ``{"through_position": W}``, ``{"all": [...]}`, ``{"any": [...]}``,
    ``{"not": {...}}``.
    """
    if not isinstance(spec, Mapping) or len(spec) != 1:
        raise InvalidOrder(f"predicate must be a single-key object, got {spec!r}")
    ((key, value),) = spec.items()
    if key == "has_label":
        return lambda p: p.has_label(value)
    if key == "lacks_label":
        return lambda p: not p.has_label(value)
    if key == "through_position":
        return lambda p: p.passes_through(value)
    if key == "all":
        subs = [path_predicate(s) for s in value]
        return lambda p: all(f(p) for f in subs)
    if key == "any":
        subs = [path_predicate(s) for s in value]
        return lambda p: any(f(p) for f in subs)
    if key == "not":
        sub = path_predicate(value)
        return lambda p: not sub(p)
    raise InvalidOrder(f"unknown predicate key {key!r}")


def condition(c: Ceg, keep: Callable[[CegPath], bool] | Mapping) -> Ceg:
    """Drop paths failing the predicate and renormalize what survives.

    The surviving paths are laid out as a prefix tree whose edge
    probabilities are ratios of surviving mass, then re-merged by signature;
    keeping every path returns the input unchanged.
    """
    if isinstance(keep, Mapping):
        keep = path_predicate(keep)
    paths = enumerate_paths(c)
    kept = [p for p in paths if keep(p)]
    mass = fsum(p.probability for p in kept)
    if mass < 1e-15:
        raise NoSurvivingPath(
            f"kept mass {mass!r} is below 1e-15 ({len(kept)} of {len(paths)} paths kept)"
        )
    if len(kept) == len(paths):
        return c

    # Prefix tree over surviving paths; nodes are path prefixes.
    class Node:
        __slots__ = ("position", "mass", "children")

        def __init__(self, position: str):
            self.position = position
            self.mass = 0.0
            self.children: dict[str, tuple[CegEdge, Node]] = {}

    top = Node(c.root)
    for p in kept:
        top.mass += p.probability
        node = top
        for e in p.edges:
            if e.label not in node.children:
                node.children[e.label] = (e, Node(e.head))
            child = node.children[e.label][1]
            child.mass += p.probability
            node = child

    signature: dict[int, object] = {}
    order: list[Node] = []

    def collect(node: Node) -> None:
        for _, child in node.children.values():
            collect(child)
        if not node.children:
            signature[id(node)] = "leaf"
        else:
            signature[id(node)] = (
                node.position,
                tuple(
                    sorted(
                        (label, child.mass / node.mass, signature[id(child)], edge.evidence)
                        for label, (edge, child) in node.children.items()
                    )
                ),
            )

    collect(top)

    def preorder(node: Node) -> None:
        order.append(node)
        for label in sorted(node.children):
            preorder(node.children[label][1])

    preorder(top)
    names: dict[object, str] = {"leaf": SINK}
    representative: dict[object, Node] = {}
    counter = 0
    for node in order:
        sig = signature[id(node)]
        if sig not in names:
            names[sig] = f"w{counter}"
            counter += 1
        representative.setdefault(sig, node)
    edges: list[CegEdge] = []
    colours: dict[str, str] = {}
    for sig, node in representative.items():
        if sig == "leaf":
            continue
        name = names[sig]
        if node.position in c.colours:
            colours[name] = c.colours[node.position]
        for label in sorted(node.children):
            edge, child = node.children[label]
            edges.append(
                CegEdge(
                    name,
                    names[signature[id(child)]],
                    label,
                    child.mass / node.mass,
                    edge.evidence,
                )
            )
    return Ceg(names[signature[id(top)]], SINK, tuple(edges), colours)


def bn_to_ceg(
    net: DiscreteBayesNet,
    order: Sequence[str] | None = None,
    cap: int = DEFAULT_JOINT_CAP,
) -> StagedTree:
    """Unfold a net variable by variable into a staged tree.

    Vertices at one depth share a stage exactly when their next variable has
    an identical conditional row given the path history; zero-probability
    states are omitted rather than drawn with probability zero.
    """
    if net.joint_size() > cap:
        raise TooLarge(f"joint has {net.joint_size()} cells, cap is {cap}")
    default = net.dag.topological_order()
    if order is None:
        order = default
    else:
        order = tuple(order)
        if sorted(order) != sorted(net.dag.nodes):
            raise InvalidOrder(
                f"order must be a permutation of the net's nodes, got {list(order)}"
            )
        pos = {v: i for i, v in enumerate(order)}
        bad = [
            (t, h) for t, h in net.dag.edges if pos[t] > pos[h]
        ]
        if bad:
            raise InvalidOrder(f"order violates edges {sorted(bad)}")

    edges: list[TreeEdge] = []
    stages: list[Stage] = []
    probabilities: dict[str, tuple[float, ...]] = {}
    stage_index: dict[tuple, str] = {}
    stage_members: dict[str, list[str]] = {}
    stage_slots: dict[str, tuple[str, ...]] = {}
    counter = itertools.count()
    vertex_counter = itertools.count(1)
    frontier: list[tuple[str, dict[str, str]]] = [("v0", {})]
    for v in order:
        cpt = net.cpt(v)
        states = net.states(v)
        next_frontier: list[tuple[str, dict[str, str]]] = []
        for vertex, history in frontier:
            row_idx = 0
            for p in cpt.parents:
                row_idx = row_idx * net.card(p) + net.space(p).index(history[p])
            row = cpt.rows[row_idx]
            kept = tuple(
                (f"{v}={s}", s, x) for s, x in zip(states, row) if x > 0
            )
            key = (v, row_idx, row)
            if key not in stage_index:
                sid = f"u{next(counter)}"
                stage_index[key] = sid
                stage_members[sid] = []
                slots = tuple(sorted(label for label, _, _ in kept))
                stage_slots[sid] = slots
                by_label = {label: x for label, _, x in kept}
                probabilities[sid] = tuple(by_label[slot] for slot in slots)
            sid = stage_index[key]
            stage_members[sid].append(vertex)
            for label, s, _ in kept:
                child = f"v{next(vertex_counter)}"
                edges.append(TreeEdge(vertex, child, label))
                next_frontier.append((child, {**history, v: s}))
        frontier = next_frontier
    tree = EventTree("v0", tuple(edges))
    for sid, members in stage_members.items():
        slots = stage_slots[sid]
        stages.append(Stage(sid, tuple(members), slots, {m: slots for m in members}))
    return StagedTree(tree, tuple(stages), probabilities)


@dataclass(frozen=True)
class CutVariable:
    """A random variable read off a cut: one value per crossing position."""

    name: str
    values: Mapping[str, float]

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", MappingProxyType(dict(self.values)))


def cut_variable(c: Ceg, cut: Iterable[str], name: str | None = None) -> CutVariable:
    """Mass of paths through each cut position; every path must cross once."""
    cut = frozenset(cut)
    unknown = cut - c.positions
    if unknown:
        raise UnknownNode(f"positions {sorted(unknown)} are not in the graph")
    masses = {w: 0.0 for w in sorted(cut)}
    for p in enumerate_paths(c):
        crossings = [w for w in p.positions if w in cut]
        if len(crossings) != 1:
            raise NotACut(
                f"path {list(p.labels)} crosses the proposed cut "
                f"{len(crossings)} times"
            )
        masses[crossings[0]] += p.probability
    return CutVariable(name or "cut(" + ", ".join(sorted(cut)) + ")", masses)


# ---------------------------------------------------------------------------
# DOT export


def staged_tree_to_dot(st: StagedTree, name: str = "tree") -> str:
    """DOT text for an event tree; stage ids annotate coloured vertices."""
    from .graphs import _quote

    lines = [f"digraph {_quote(name)} {{"]
    for v in sorted(st.tree.vertices):
        stage = st.stage_of.get(v)
        label = v if stage is None else f"{v} ({stage.id})"
        lines.append(f"  {_quote(v)} [label={_quote(label)}];")
    for e in sorted(st.tree.edges, key=lambda e: (e.tail, e.label)):
        attrs = [f"label={_quote(e.label)}"]
        if e.evidence:
            attrs.append("style=bold")
        lines.append(f"  {_quote(e.tail)} -> {_quote(e.head)} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def ceg_to_dot(c: Ceg, name: str = "ceg") -> str:
    """DOT text for the position multigraph; edge labels carry probabilities."""
    from .graphs import _quote

    lines = [f"digraph {_quote(name)} {{"]
    for v in sorted(c.positions):
        attrs = ""
        if v == c.sink:
            attrs = " [shape=doublecircle]"
        lines.append(f"  {_quote(v)}{attrs};")
    for e in sorted(c.edges, key=lambda e: (e.tail, e.head, e.label)):
        attrs = [f"label={_quote(f'{e.label} ({e.probability:g})')}"]
        if e.evidence:
            attrs.append("style=bold")
        lines.append(f"  {_quote(e.tail)} -> {_quote(e.head)} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
