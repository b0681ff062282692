"""Discrete Bayesian networks with exact clique-tree inference.

A net couples a DAG with one state space and one CPT per node. CPT rows are
stored row-major over parent configurations: the first declared parent is the
most significant digit, states in declaration order. Rows whose sum strays
from 1 by at most 1e-6 are renormalized on construction; anything worse is
left alone for :func:`validate` to report.

Inference follows the classic route: moralise, triangulate (min-fill,
lexicographic tie-break), assemble a clique tree by maximum-weight spanning
tree over separator sizes, then two-pass sum-product message passing. Each
message is normalized and the scales are accumulated so the probability of
evidence comes out exact rather than underflowing on long chains.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType

import numpy as np

from .errors import (
    ConflictingEvidence,
    ImpossibleEvidence,
    IncompleteAssignment,
    InvalidWeights,
    TooLarge,
    UnknownNode,
    UnknownState,
)
from .graphs import CiQuery, Dag, moralize
from .validation import Finding, ValidationReport

__all__ = [
    "StateSpace",
    "Cpt",
    "DiscreteBayesNet",
    "EvidenceSet",
    "PosteriorReport",
    "JointTable",
    "CliqueTree",
    "DEFAULT_JOINT_CAP",
    "validate",
    "joint_probability",
    "enumerate_joint",
    "build_junction_tree",
    "posterior_marginals",
    "probability_of_evidence",
    "apply_soft_evidence",
    "numeric_ci_check",
]

DEFAULT_JOINT_CAP = 1 << 20

_ROW_TOLERANCE = 1e-6
_IMPOSSIBLE_MASS = 1e-12


@dataclass(frozen=True)
class StateSpace:
    """Ordered, uniquely-labeled states of one node."""

    node: str
    states: tuple[str, ...]
    constant: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "states", tuple(self.states))
        if len(set(self.states)) != len(self.states):
            raise UnknownState(f"duplicate state labels on {self.node!r}")
        if not self.states:
            raise UnknownState(f"node {self.node!r} has no states")

    def index(self, state: str) -> int:
        try:
            return self.states.index(state)
        except ValueError:
            raise UnknownState(
                f"node {self.node!r} has no state {state!r}; states are {list(self.states)}"
            ) from None


@dataclass(frozen=True)
class Cpt:
    """Conditional probability table, one row per parent configuration."""

    node: str
    parents: tuple[str, ...]
    rows: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "parents", tuple(self.parents))
        normed = []
        for row in self.rows:
            row = tuple(float(x) for x in row)
            total = math.fsum(row)
            # Rows already within 1e-12 of mass one are kept verbatim: a
            # divided row always lands in that band, so construction is
            # idempotent and values survive a save/load cycle bit-for-bit.
            if row and all(x >= 0 for x in row) and 1e-12 < abs(total - 1.0) <= _ROW_TOLERANCE:
                row = tuple(x / total for x in row)
            normed.append(row)
        object.__setattr__(self, "rows", tuple(normed))


@dataclass(frozen=True)
class DiscreteBayesNet:
    """A DAG plus one :class:`StateSpace` and one :class:`Cpt` per node."""

    dag: Dag
    spaces: Mapping[str, StateSpace]
    cpts: Mapping[str, Cpt]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "spaces", MappingProxyType({s.node: s for s in _values(self.spaces)})
        )
        object.__setattr__(
            self, "cpts", MappingProxyType({c.node: c for c in _values(self.cpts)})
        )

    @classmethod
    def from_cpts(cls, spaces: Iterable[StateSpace], cpts: Iterable[Cpt]) -> "DiscreteBayesNet":
        """Build a net whose DAG edges are derived from the CPT parent lists."""
        spaces = tuple(spaces)
        cpts = tuple(cpts)
        nodes = frozenset(s.node for s in spaces)
        edges = frozenset((p, c.node) for c in cpts for p in c.parents)
        return cls(Dag(nodes, edges), spaces, cpts)

    def space(self, v: str) -> StateSpace:
        try:
            return self.spaces[v]
        except KeyError:
            raise UnknownNode(f"node {v!r} is not in the net") from None

    def states(self, v: str) -> tuple[str, ...]:
        return self.space(v).states

    def card(self, v: str) -> int:
        return len(self.space(v).states)

    def cpt(self, v: str) -> Cpt:
        try:
            return self.cpts[v]
        except KeyError:
            raise UnknownNode(f"node {v!r} has no CPT") from None

    def joint_size(self) -> int:
        size = 1
        for v in self.dag.nodes:
            size *= self.card(v)
        return size


def _values(obj: Mapping | Iterable):
    return obj.values() if isinstance(obj, Mapping) else obj


def validate(net: DiscreteBayesNet) -> ValidationReport:
    """Report every structural defect instead of raising on the first."""
    findings: list[Finding] = []
    for v in sorted(net.dag.nodes):
        if v not in net.spaces:
            findings.append(Finding("missing-state-space", f"node {v!r} has no state space", v))
        elif len(net.spaces[v].states) < 2 and not net.spaces[v].constant:
            findings.append(
                Finding("degenerate-state-space", f"node {v!r} has fewer than 2 states", v)
            )
        if v not in net.cpts:
            findings.append(Finding("missing-cpt", f"node {v!r} has no CPT", v))
    for v in sorted(net.spaces):
        if v not in net.dag.nodes:
            findings.append(Finding("orphan-state-space", f"state space for unknown node {v!r}", v))
    for v, cpt in sorted(net.cpts.items()):
        if v not in net.dag.nodes:
            findings.append(Finding("orphan-cpt", f"CPT for unknown node {v!r}", v))
            continue
        if len(set(cpt.parents)) != len(cpt.parents) or set(cpt.parents) != set(
            net.dag.parents(v)
        ):
            findings.append(
                Finding(
                    "parent-mismatch",
                    f"CPT parents {list(cpt.parents)} do not match DAG parents "
                    f"{sorted(net.dag.parents(v))} of {v!r}",
                    v,
                )
            )
            continue
        if v not in net.spaces or any(p not in net.spaces for p in cpt.parents):
            continue
        want_rows = math.prod(net.card(p) for p in cpt.parents)
        if len(cpt.rows) != want_rows:
            findings.append(
                Finding(
                    "row-count-mismatch",
                    f"CPT of {v!r} has {len(cpt.rows)} rows, expected {want_rows}",
                    v,
                )
            )
            continue
        for i, row in enumerate(cpt.rows):
            if len(row) != net.card(v):
                findings.append(
                    Finding(
                        "row-length-mismatch",
                        f"row {i} of {v!r} has {len(row)} entries, expected {net.card(v)}",
                        v,
                    )
                )
            elif any(x < 0 for x in row):
                findings.append(Finding("negative-entry", f"row {i} of {v!r} has a negative entry", v))
            elif abs(math.fsum(row) - 1.0) > 1e-9:
                findings.append(
                    Finding(
                        "unnormalized-row",
                        f"row {i} of {v!r} sums to {math.fsum(row)!r}",
                        v,
                    )
                )
    return ValidationReport(tuple(findings))


def _row_index(net: DiscreteBayesNet, cpt: Cpt, state_of: Mapping[str, str]) -> int:
    idx = 0
    for p in cpt.parents:
        idx = idx * net.card(p) + net.space(p).index(state_of[p])
    return idx


def joint_probability(net: DiscreteBayesNet, assignment: Mapping[str, str]) -> float:
    """Product of parent-conditional entries over a full assignment."""
    for v in assignment:
        if v not in net.dag.nodes:
            raise UnknownNode(f"assignment mentions unknown node {v!r}")
    missing = sorted(net.dag.nodes - set(assignment))
    if missing:
        raise IncompleteAssignment(f"assignment misses nodes {missing}")
    p = 1.0
    for v in net.dag.topological_order():
        cpt = net.cpt(v)
        row = cpt.rows[_row_index(net, cpt, assignment)]
        p *= row[net.space(v).index(assignment[v])]
    return p


@dataclass(frozen=True)
class JointTable:
    """The full joint distribution as a dense array.

    ``array`` is indexed by state indices of the nodes in ``order``.
    """

    order: tuple[str, ...]
    states: tuple[tuple[str, ...], ...]
    array: np.ndarray = field(repr=False)

    def probability(self, assignment: Mapping[str, str]) -> float:
        idx = []
        for v, labels in zip(self.order, self.states):
            if v not in assignment:
                raise IncompleteAssignment(f"assignment misses node {v!r}")
            try:
                idx.append(labels.index(assignment[v]))
            except ValueError:
                raise UnknownState(f"node {v!r} has no state {assignment[v]!r}") from None
        return float(self.array[tuple(idx)])

    def rows(self):
        """Yield (assignment dict, probability) over all cells."""
        for combo in itertools.product(*(range(len(s)) for s in self.states)):
            yield (
                {v: self.states[i][combo[i]] for i, v in enumerate(self.order)},
                float(self.array[combo]),
            )

    def total(self) -> float:
        return float(self.array.sum())


def _cpt_nd(net: DiscreteBayesNet, v: str) -> tuple[tuple[str, ...], np.ndarray]:
    """CPT as an ndarray with axes (*parents, node) reordered to sorted vars."""
    cpt = net.cpt(v)
    axes_vars = cpt.parents + (v,)
    arr = np.asarray(cpt.rows, dtype=float).reshape([net.card(x) for x in axes_vars])
    order = sorted(range(len(axes_vars)), key=lambda i: axes_vars[i])
    return tuple(axes_vars[i] for i in order), arr.transpose(order)


def enumerate_joint(net: DiscreteBayesNet, cap: int = DEFAULT_JOINT_CAP) -> JointTable:
    """Dense joint table over the topological order; refuses huge nets."""
    if net.joint_size() > cap:
        raise TooLarge(f"joint has {net.joint_size()} cells, cap is {cap}")
    order = net.dag.topological_order()
    pos = {v: i for i, v in enumerate(order)}
    full_shape = tuple(net.card(v) for v in order)
    joint = np.ones(full_shape, dtype=float)
    for v in order:
        fvars, arr = _cpt_nd(net, v)
        # Axes must line up with their topological positions before reshaping
        # singleton dimensions in.
        by_pos = sorted(range(len(fvars)), key=lambda i: pos[fvars[i]])
        arr = arr.transpose(by_pos)
        shape = [1] * len(order)
        for i in by_pos:
            shape[pos[fvars[i]]] = net.card(fvars[i])
        joint = joint * arr.reshape(shape)
    return JointTable(order, tuple(net.states(v) for v in order), joint)


# ---------------------------------------------------------------------------
# Clique tree construction


@dataclass(frozen=True)
class CliqueTree:
    """Cliques plus tree links; ``links[k] = (i, j)`` with separator shared vars."""

    cliques: tuple[frozenset[str], ...]
    links: tuple[tuple[int, int], ...]

    def separator(self, k: int) -> frozenset[str]:
        i, j = self.links[k]
        return self.cliques[i] & self.cliques[j]

    @cached_property
    def neighbours(self) -> dict[int, tuple[int, ...]]:
        acc: dict[int, list[int]] = {i: [] for i in range(len(self.cliques))}
        for i, j in self.links:
            acc[i].append(j)
            acc[j].append(i)
        return {i: tuple(sorted(ns)) for i, ns in acc.items()}


def _triangulated_cliques(net: DiscreteBayesNet) -> list[frozenset[str]]:
    moral = moralize(net.dag)
    adj: dict[str, set[str]] = {v: set(moral.neighbours(v)) for v in moral.nodes}
    remaining = set(adj)
    cliques: list[frozenset[str]] = []
    while remaining:
        best = None
        best_fill = None
        for v in sorted(remaining):
            nbs = adj[v] & remaining
            nbs_list = sorted(nbs)
            fill = sum(
                1
                for i, x in enumerate(nbs_list)
                for y in nbs_list[i + 1 :]
                if y not in adj[x]
            )
            if best_fill is None or fill < best_fill:
                best, best_fill = v, fill
        nbs = adj[best] & remaining
        for x in nbs:
            for y in nbs:
                if x != y:
                    adj[x].add(y)
        cliques.append(frozenset({best} | nbs))
        remaining.remove(best)
    # Keep maximal cliques only, deterministically ordered.
    maximal = [c for c in cliques if not any(c < d for d in cliques)]
    out: list[frozenset[str]] = []
    for c in sorted(maximal, key=sorted):
        if c not in out:
            out.append(c)
    return out


def build_junction_tree(net: DiscreteBayesNet) -> CliqueTree:
    """Clique tree with the running-intersection property.

    Maximum-weight spanning tree over pairwise separator sizes; zero-weight
    links are allowed so a disconnected net still yields one tree.
    """
    cliques = _triangulated_cliques(net)
    n = len(cliques)
    candidates = sorted(
        ((i, j) for i in range(n) for j in range(i + 1, n)),
        key=lambda ij: (-len(cliques[ij[0]] & cliques[ij[1]]), ij),
    )
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    links: list[tuple[int, int]] = []
    for i, j in candidates:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            links.append((i, j))
    return CliqueTree(tuple(cliques), tuple(links))


# ---------------------------------------------------------------------------
# Evidence


@dataclass(frozen=True)
class EvidenceSet:
    """Hard observations plus likelihood (soft) weight vectors."""

    hard: Mapping[str, str] = field(default_factory=dict)
    soft: Mapping[str, tuple[float, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        hard = dict(self.hard)
        soft = {v: tuple(float(x) for x in w) for v, w in dict(self.soft).items()}
        overlap = sorted(set(hard) & set(soft))
        if overlap:
            raise ConflictingEvidence(f"nodes {overlap} have both hard and soft evidence")
        for v, weights in soft.items():
            if not weights or any(x < 0 for x in weights):
                raise InvalidWeights(f"weights for {v!r} must be non-negative and non-empty")
            if not any(x > 0 for x in weights):
                raise InvalidWeights(f"weights for {v!r} are all zero")
        object.__setattr__(self, "hard", MappingProxyType(hard))
        object.__setattr__(self, "soft", MappingProxyType(soft))

    def __bool__(self) -> bool:
        return bool(self.hard) or bool(self.soft)

    def nodes(self) -> frozenset[str]:
        return frozenset(self.hard) | frozenset(self.soft)


def apply_soft_evidence(
    ev: EvidenceSet, node: str, weights: Sequence[float]
) -> EvidenceSet:
    """Attach a likelihood vector to ``node``; the input set is unchanged."""
    if node in ev.hard or node in ev.soft:
        raise ConflictingEvidence(f"node {node!r} already carries evidence")
    return EvidenceSet(dict(ev.hard), {**dict(ev.soft), node: tuple(weights)})


def _check_evidence(net: DiscreteBayesNet, ev: EvidenceSet) -> None:
    for v, s in ev.hard.items():
        net.space(v).index(s)
    for v, weights in ev.soft.items():
        if len(weights) != net.card(v):
            raise InvalidWeights(
                f"weights for {v!r} have length {len(weights)}, node has {net.card(v)} states"
            )


@dataclass(frozen=True)
class PosteriorReport:
    """Marginals for every node plus the prior probability of the evidence."""

    marginals: Mapping[str, tuple[float, ...]]
    evidence_probability: float

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "marginals",
            MappingProxyType({v: tuple(m) for v, m in dict(self.marginals).items()}),
        )

    def as_dict(self) -> dict:
        return {
            "marginals": {v: list(m) for v, m in sorted(self.marginals.items())},
            "evidence_probability": self.evidence_probability,
        }


# ---------------------------------------------------------------------------
# Propagation


def _expand_to(
    arr: np.ndarray, arr_vars: tuple[str, ...], clique_vars: tuple[str, ...], card
) -> np.ndarray:
    shape = [1] * len(clique_vars)
    pos = {v: i for i, v in enumerate(clique_vars)}
    # arr axes are in arr_vars order; transpose into clique-relative order first.
    order = sorted(range(len(arr_vars)), key=lambda i: pos[arr_vars[i]])
    arr = arr.transpose(order)
    for v in arr_vars:
        shape[pos[v]] = card(v)
    return arr.reshape(shape)


def _marginalize_to(
    arr: np.ndarray, clique_vars: tuple[str, ...], keep: tuple[str, ...]
) -> np.ndarray:
    drop = tuple(i for i, v in enumerate(clique_vars) if v not in keep)
    out = arr.sum(axis=drop) if drop else arr
    # Remaining axes are clique order restricted to keep; reorder to keep order.
    left = [v for v in clique_vars if v in keep]
    perm = [left.index(v) for v in keep]
    return out.transpose(perm)


class _Propagator:
    """Two-pass sum-product over one clique tree, one evidence set."""

    def __init__(self, net: DiscreteBayesNet, tree: CliqueTree, ev: EvidenceSet):
        self.net = net
        self.tree = tree
        self.vars: list[tuple[str, ...]] = [tuple(sorted(c)) for c in tree.cliques]
        self.potentials = [
            np.ones([net.card(v) for v in cv], dtype=float) for cv in self.vars
        ]
        for v in net.dag.topological_order():
            fvars, arr = _cpt_nd(net, v)
            home = self._home(set(fvars))
            self.potentials[home] = self.potentials[home] * _expand_to(
                arr, fvars, self.vars[home], net.card
            )
        for v, s in ev.hard.items():
            vec = np.zeros(net.card(v), dtype=float)
            vec[net.space(v).index(s)] = 1.0
            self._inject(v, vec)
        for v, weights in ev.soft.items():
            self._inject(v, np.asarray(weights, dtype=float))
        self.messages: dict[tuple[int, int], np.ndarray] = {}
        self.scale = 1.0
        self.dead = False

    def _home(self, group: set[str]) -> int:
        for i, c in enumerate(self.tree.cliques):
            if group <= c:
                return i
        raise AssertionError(f"no clique covers {sorted(group)}")

    def _inject(self, v: str, vec: np.ndarray) -> None:
        home = self._home({v})
        self.potentials[home] = self.potentials[home] * _expand_to(
            vec, (v,), self.vars[home], self.net.card
        )

    def _separator_vars(self, i: int, j: int) -> tuple[str, ...]:
        return tuple(sorted(self.tree.cliques[i] & self.tree.cliques[j]))

    def _send(self, i: int, j: int) -> None:
        prod = self.potentials[i]
        for k in self.tree.neighbours[i]:
            if k != j:
                sep = self._separator_vars(k, i)
                prod = prod * _expand_to(self.messages[(k, i)], sep, self.vars[i], self.net.card)
        msg = _marginalize_to(prod, self.vars[i], self._separator_vars(i, j))
        norm = float(msg.sum())
        if norm > 0:
            msg = msg / norm
            self.scale *= norm
        else:
            self.dead = True
        self.messages[(i, j)] = msg

    def run(self) -> None:
        # Collect toward clique 0, then distribute back out.
        order: list[tuple[int, int]] = []
        seen = {0}
        stack = [0]
        while stack:
            i = stack.pop()
            for j in self.tree.neighbours[i]:
                if j not in seen:
                    seen.add(j)
                    order.append((j, i))
                    stack.append(j)
        for i, j in reversed(order):
            self._send(i, j)
        # After the collect pass the scale times the root mass is P(evidence).
        root_belief = self.potentials[0]
        for k in self.tree.neighbours[0]:
            sep = self._separator_vars(k, 0)
            root_belief = root_belief * _expand_to(
                self.messages[(k, 0)], sep, self.vars[0], self.net.card
            )
        self.evidence_mass = 0.0 if self.dead else float(root_belief.sum()) * self.scale
        for j, i in order:
            self._send(i, j)

    def belief(self, i: int) -> np.ndarray:
        b = self.potentials[i]
        for k in self.tree.neighbours[i]:
            sep = self._separator_vars(k, i)
            b = b * _expand_to(self.messages[(k, i)], sep, self.vars[i], self.net.card)
        return b

    def node_marginal(self, v: str) -> np.ndarray:
        i = self._home({v})
        b = _marginalize_to(self.belief(i), self.vars[i], (v,))
        total = float(b.sum())
        if total <= 0:
            raise ImpossibleEvidence(f"no posterior mass for node {v!r}")
        return b / total


def posterior_marginals(net: DiscreteBayesNet, ev: EvidenceSet) -> PosteriorReport:
    """Exact marginals for every node, conditioned on the evidence."""
    _check_evidence(net, ev)
    tree = build_junction_tree(net)
    prop = _Propagator(net, tree, ev)
    prop.run()
    if prop.evidence_mass < _IMPOSSIBLE_MASS:
        raise ImpossibleEvidence(
            f"evidence has probability {prop.evidence_mass!r}, below 1e-12"
        )
    marginals = {
        v: tuple(float(x) for x in prop.node_marginal(v)) for v in sorted(net.dag.nodes)
    }
    mass = 1.0 if not ev else prop.evidence_mass
    return PosteriorReport(marginals, mass)


def probability_of_evidence(net: DiscreteBayesNet, ev: EvidenceSet) -> float:
    """Prior probability of observing the evidence; exactly 1 when empty."""
    if not ev:
        return 1.0
    _check_evidence(net, ev)
    prop = _Propagator(net, build_junction_tree(net), ev)
    prop.run()
    if prop.evidence_mass < _IMPOSSIBLE_MASS:
        raise ImpossibleEvidence(
            f"evidence has probability {prop.evidence_mass!r}, below 1e-12"
        )
    return prop.evidence_mass


def numeric_ci_check(
    net: DiscreteBayesNet,
    q: CiQuery,
    tol: float = 1e-9,
    cap: int = DEFAULT_JOINT_CAP,
) -> bool:
    """Does the joint satisfy P(a,b|c) = P(a|c)·P(b|c) everywhere (within tol)?

    Conditioning events with zero probability are skipped: independence is
    vacuous on null events.
    """
    for v in q.a | q.b | q.c:
        if v not in net.dag.nodes:
            raise UnknownNode(f"query mentions unknown node {v!r}")
    table = enumerate_joint(net, cap=cap)
    pos = {v: i for i, v in enumerate(table.order)}
    a = sorted(q.a)
    b = sorted(q.b)
    c = sorted(q.c)
    rest = [v for v in table.order if v not in q.a | q.b | q.c]
    perm = [pos[v] for v in a + b + c + rest]
    arr = table.array.transpose(perm)
    na = int(np.prod([net.card(v) for v in a], dtype=int))
    nb = int(np.prod([net.card(v) for v in b], dtype=int))
    nc = int(np.prod([net.card(v) for v in c], dtype=int))
    abc = arr.reshape(na, nb, nc, -1).sum(axis=3)
    pc = abc.sum(axis=(0, 1))
    pac = abc.sum(axis=1)
    pbc = abc.sum(axis=0)
    ok = True
    for k in range(nc):
        if pc[k] <= 0:
            continue
        diff = np.abs(abc[:, :, k] / pc[k] - np.outer(pac[:, k], pbc[:, k]) / (pc[k] ** 2))
        if float(diff.max()) > tol:
            ok = False
            break
    return ok
