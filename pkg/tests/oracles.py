"""Independent reference implementations used to check the engine.

Everything in this file is deliberately written from first principles with
different algorithms than the package under test: d-separation by undirected
path enumeration with the blocking rules, ancestral restriction by repeated
leaf deletion, separation by separator removal, and exact inference by brute
enumeration of the joint table. Keep these slow and obvious.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Sequence


# ---------------------------------------------------------------------------
# Graphs


def descendants_of(edges: Iterable[tuple[str, str]], v: str) -> set[str]:
    children: dict[str, set[str]] = {}
    for t, h in edges:
        children.setdefault(t, set()).add(h)
    seen: set[str] = set()
    stack = [v]
    while stack:
        x = stack.pop()
        for c in children.get(x, ()):
            if c not in seen:
                seen.add(c)
                stack.append(c)
    return seen


def d_separated_by_paths(
    nodes: Iterable[str],
    edges: Iterable[tuple[str, str]],
    a: Iterable[str],
    b: Iterable[str],
    c: Iterable[str] = (),
) -> bool:
    """Path-blocking definition of d-separation.

    Enumerates every undirected simple path from a node of ``a`` to a node of
    ``b`` and applies the blocking rules at each interior node: a collider
    blocks unless it or one of its descendants is conditioned on; any other
    node blocks exactly when it is conditioned on. d-separation holds iff
    every path is blocked.
    """
    nodes = set(nodes)
    edge_set = set(edges)
    a, b, c = set(a), set(b), set(c)
    neighbours: dict[str, set[str]] = {v: set() for v in nodes}
    for t, h in edge_set:
        neighbours[t].add(h)
        neighbours[h].add(t)
    cond_closure = {
        v: ({v} | descendants_of(edge_set, v)) & c != set() for v in nodes
    }

    def path_active(path: Sequence[str]) -> bool:
        for i in range(1, len(path) - 1):
            prev, mid, nxt = path[i - 1], path[i], path[i + 1]
            is_collider = (prev, mid) in edge_set and (nxt, mid) in edge_set
            if is_collider:
                if not cond_closure[mid]:
                    return False
            else:
                if mid in c:
                    return False
        return True

    def extend(path: list[str], seen: set[str]) -> bool:
        tip = path[-1]
        if tip in b:
            return path_active(path)
        for nb in neighbours[tip]:
            if nb in seen or nb in a:
                continue
            path.append(nb)
            seen.add(nb)
            if extend(path, seen):
                return True
            seen.remove(nb)
            path.pop()
        return False

    for src in a:
        if extend([src], {src}):
            return False
    return True


def ancestral_by_leaf_stripping(
    nodes: Iterable[str],
    edges: Iterable[tuple[str, str]],
    keep: Iterable[str],
) -> tuple[set[str], set[tuple[str, str]]]:
    """Repeatedly delete childless nodes outside ``keep`` until a fixpoint."""
    nodes = set(nodes)
    edge_set = set(edges)
    keep = set(keep)
    while True:
        with_children = {t for t, _ in edge_set}
        removable = {v for v in nodes if v not in keep and v not in with_children}
        if not removable:
            return nodes, edge_set
        nodes -= removable
        edge_set = {(t, h) for t, h in edge_set if t in nodes and h in nodes}


def separated_by_removal(
    nodes: Iterable[str],
    arcs: Iterable[tuple[str, str]],
    a: Iterable[str],
    b: Iterable[str],
    c: Iterable[str] = (),
) -> bool:
    """Delete the separator, then ask whether a and b are disconnected."""
    c = set(c)
    remaining = set(nodes) - c
    neighbours: dict[str, set[str]] = {v: set() for v in remaining}
    for x, y in arcs:
        if x in remaining and y in remaining:
            neighbours[x].add(y)
            neighbours[y].add(x)
    seen = set(v for v in a if v in remaining)
    stack = list(seen)
    while stack:
        v = stack.pop()
        for w in neighbours[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return not (seen & set(b))


# ---------------------------------------------------------------------------
# Discrete Bayesian networks


def joint_by_enumeration(
    order: Sequence[str],
    states: dict[str, Sequence[str]],
    parents: dict[str, Sequence[str]],
    cpt_rows: dict[str, Sequence[Sequence[float]]],
) -> dict[tuple[str, ...], float]:
    """Full joint table as a dict from state tuples (in ``order``) to mass.

    ``cpt_rows[v]`` lists one probability row per parent configuration, with
    configurations enumerated in lexicographic order of parent state indices
    (first listed parent most significant).
    """
    table: dict[tuple[str, ...], float] = {}
    index = {v: i for i, v in enumerate(order)}
    for assignment in itertools.product(*(states[v] for v in order)):
        p = 1.0
        for v in order:
            ps = parents[v]
            row_idx = 0
            for parent in ps:
                row_idx = row_idx * len(states[parent]) + states[parent].index(
                    assignment[index[parent]]
                )
            row = cpt_rows[v][row_idx]
            p *= row[states[v].index(assignment[index[v]])]
        table[assignment] = p
    return table


def posterior_by_enumeration(
    order: Sequence[str],
    states: dict[str, Sequence[str]],
    parents: dict[str, Sequence[str]],
    cpt_rows: dict[str, Sequence[Sequence[float]]],
    hard: dict[str, str] | None = None,
    soft: dict[str, Sequence[float]] | None = None,
) -> tuple[dict[str, list[float]], float]:
    """Posterior marginals and probability of evidence by brute force.

    Soft evidence multiplies each joint entry by the weight attached to the
    observed node's state. Returns ``(marginals, p_evidence)`` where each
    marginal lists one probability per state in declaration order.
    """
    hard = dict(hard or {})
    soft = dict(soft or {})
    index = {v: i for i, v in enumerate(order)}
    joint = joint_by_enumeration(order, states, parents, cpt_rows)
    mass = 0.0
    marg = {v: [0.0] * len(states[v]) for v in order}
    for assignment, p in joint.items():
        ok = all(assignment[index[v]] == s for v, s in hard.items())
        if not ok:
            continue
        for v, weights in soft.items():
            p *= weights[states[v].index(assignment[index[v]])]
        mass += p
        for v in order:
            marg[v][states[v].index(assignment[index[v]])] += p
    if mass > 0:
        for v in order:
            marg[v] = [x / mass for x in marg[v]]
    return marg, mass


# ---------------------------------------------------------------------------
# Trees and charts


def tree_paths(
    root: str,
    children: dict[str, Sequence[tuple[str, str, float]]],
) -> list[tuple[tuple[str, ...], float]]:
    """All root-to-leaf (label sequence, probability product) pairs.

    ``children[v]`` lists (label, child, probability) triples in order.
    """
    out: list[tuple[tuple[str, ...], float]] = []

    def walk(v: str, labels: tuple[str, ...], p: float) -> None:
        kids = children.get(v, ())
        if not kids:
            out.append((labels, p))
            return
        for label, child, q in kids:
            walk(child, labels + (label,), p * q)

    walk(root, (), 1.0)
    return out


def reachable_to(
    edges: Iterable[tuple[str, str]], target: str
) -> set[str]:
    """Nodes with a directed path to ``target`` (target included)."""
    parents: dict[str, set[str]] = {}
    for t, h in edges:
        parents.setdefault(h, set()).add(t)
    seen = {target}
    stack = [target]
    while stack:
        v = stack.pop()
        for p in parents.get(v, ()):
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return seen
