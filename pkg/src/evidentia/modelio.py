"""JSON persistence for every model kind.

All documents carry ``format_version`` (currently ``"1"``) and an
optional explicit ``kind``; loaders reject unknown keys outright so a
typo fails loudly rather than being silently ignored.  The byte-level
layouts are documented in ``docs/FORMATS.md``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Iterable, Mapping

from .bn import Cpt, DiscreteBayesNet, EvidenceSet, StateSpace
from .ceg import (
    Ceg,
    CegEdge,
    Stage,
    StagedTree,
    TreeEdge,
    build_event_tree,
    ceg_to_dot,
    staged_tree_to_dot,
)
from .errors import IoError, ParseError
from .graphs import dag_to_dot
from .oobn import InstanceSpec, NetworkClass, OobnModel, flatten
from .wigmore import ChartEdge, ChartNode, WigmoreChart, build_chart, chart_to_dot

FORMAT_VERSION = "1"

MODEL_KINDS = ("bn", "oobn", "staged_tree", "ceg", "chart", "evidence")


def read_json(path: str | Path) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc


def write_json(path: str | Path, payload: Any) -> None:
    try:
        Path(path).write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def _obj(value: Any, what: str) -> dict:
    if not isinstance(value, dict):
        raise ParseError(f"{what} must be a JSON object, got {type(value).__name__}")
    return value


def _keys(obj: Mapping, what: str, required: Iterable[str], optional: Iterable[str] = ()) -> None:
    required = set(required)
    allowed = required | set(optional)
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise ParseError(f"{what} has unknown keys {unknown}")
    missing = sorted(required - set(obj))
    if missing:
        raise ParseError(f"{what} is missing keys {missing}")


def _check_header(obj: Mapping, what: str, kind: str) -> None:
    version = obj.get("format_version")
    if version != FORMAT_VERSION:
        raise ParseError(
            f"{what} has format_version {version!r}; this reader understands {FORMAT_VERSION!r}"
        )
    declared = obj.get("kind")
    if declared is not None and declared != kind:
        raise ParseError(f"{what} declares kind {declared!r}, expected {kind!r}")


def _space(entry: Any, what: str) -> StateSpace:
    entry = _obj(entry, what)
    _keys(entry, what, required=("id", "states"))
    return StateSpace(str(entry["id"]), tuple(str(s) for s in entry["states"]))


def _cpt(entry: Any, what: str) -> Cpt:
    entry = _obj(entry, what)
    _keys(entry, what, required=("node", "rows"), optional=("parents",))
    return Cpt(
        str(entry["node"]),
        tuple(str(p) for p in entry.get("parents", ())),
        tuple(tuple(float(x) for x in row) for row in entry["rows"]),
    )


def _edge_pairs(entries: Any, what: str) -> frozenset[tuple[str, str]]:
    pairs = set()
    for entry in entries:
        entry = _obj(entry, f"{what} edge")
        _keys(entry, f"{what} edge", required=("tail", "head"))
        pairs.add((str(entry["tail"]), str(entry["head"])))
    return frozenset(pairs)


# ---------------------------------------------------------------------------
# Bayesian networks and evidence


def bn_to_payload(net: DiscreteBayesNet) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "kind": "bn",
        "nodes": [
            {"id": v, "states": list(net.states(v))} for v in sorted(net.dag.nodes)
        ],
        "edges": [
            {"tail": t, "head": h} for t, h in sorted(net.dag.edges)
        ],
        "cpts": [
            {
                "node": v,
                "parents": list(net.cpt(v).parents),
                "rows": [list(row) for row in net.cpt(v).rows],
            }
            for v in sorted(net.cpts)
        ],
    }


def bn_from_payload(obj: Any, what: str = "bn model") -> DiscreteBayesNet:
    obj = _obj(obj, what)
    _keys(obj, what, required=("format_version", "nodes", "cpts"), optional=("kind", "edges"))
    _check_header(obj, what, "bn")
    spaces = [_space(e, f"{what} node") for e in obj["nodes"]]
    cpts = [_cpt(e, f"{what} cpt") for e in obj["cpts"]]
    net = DiscreteBayesNet.from_cpts(spaces, cpts)
    if "edges" in obj:
        declared = _edge_pairs(obj["edges"], what)
        if declared != net.dag.edges:
            raise ParseError(
                f"{what} edge list disagrees with the CPT parent lists"
            )
    return net


def evidence_to_payload(ev: EvidenceSet) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "kind": "evidence",
        "hard": dict(sorted(ev.hard.items())),
        "soft": {v: list(w) for v, w in sorted(ev.soft.items())},
    }


def evidence_from_payload(obj: Any, what: str = "evidence") -> EvidenceSet:
    obj = _obj(obj, what)
    _keys(obj, what, required=("format_version",), optional=("kind", "hard", "soft"))
    _check_header(obj, what, "evidence")
    hard = {str(v): str(s) for v, s in _obj(obj.get("hard", {}), f"{what}.hard").items()}
    soft = {
        str(v): tuple(float(x) for x in w)
        for v, w in _obj(obj.get("soft", {}), f"{what}.soft").items()
    }
    return EvidenceSet(hard, soft)


# ---------------------------------------------------------------------------
# Object-oriented networks


def _class_to_payload(cls: NetworkClass) -> dict:
    edges = sorted(
        {(p, c.node) for c in cls.cpts for p in c.parents}
    )
    return {
        "name": cls.name,
        "inputs": [{"id": sp.node, "states": list(sp.states)} for sp in cls.inputs],
        "nodes": [{"id": sp.node, "states": list(sp.states)} for sp in cls.nodes],
        "outputs": list(cls.outputs),
        "edges": [{"tail": t, "head": h} for t, h in edges],
        "cpts": [
            {"node": c.node, "parents": list(c.parents), "rows": [list(r) for r in c.rows]}
            for c in cls.cpts
        ],
        "instances": [
            {"name": i.name, "of": i.of, "bindings": dict(sorted(i.bindings.items()))}
            for i in cls.instances
        ],
    }


def _class_from_payload(entry: Any, what: str) -> NetworkClass:
    entry = _obj(entry, what)
    _keys(
        entry,
        what,
        required=("name", "nodes", "cpts"),
        optional=("inputs", "outputs", "edges", "instances"),
    )
    instances = []
    for spec in entry.get("instances", ()):
        spec = _obj(spec, f"{what} instance")
        _keys(spec, f"{what} instance", required=("name", "of"), optional=("bindings",))
        instances.append(
            InstanceSpec(
                str(spec["name"]),
                str(spec["of"]),
                {str(k): str(v) for k, v in _obj(spec.get("bindings", {}), "bindings").items()},
            )
        )
    cls = NetworkClass(
        str(entry["name"]),
        nodes=tuple(_space(e, f"{what} node") for e in entry["nodes"]),
        cpts=tuple(_cpt(e, f"{what} cpt") for e in entry["cpts"]),
        inputs=tuple(_space(e, f"{what} input") for e in entry.get("inputs", ())),
        outputs=tuple(str(o) for o in entry.get("outputs", ())),
        instances=tuple(instances),
    )
    if "edges" in entry:
        declared = _edge_pairs(entry["edges"], what)
        derived = frozenset((p, c.node) for c in cls.cpts for p in c.parents)
        if declared != derived:
            raise ParseError(f"{what} edge list disagrees with the CPT parent lists")
    return cls


def oobn_to_payload(model: OobnModel) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "kind": "oobn",
        "classes": [_class_to_payload(c) for c in model.classes],
        "top": _class_to_payload(model.top),
    }


def oobn_from_payload(obj: Any, what: str = "oobn model") -> OobnModel:
    obj = _obj(obj, what)
    _keys(obj, what, required=("format_version", "classes", "top"), optional=("kind",))
    _check_header(obj, what, "oobn")
    classes = tuple(
        _class_from_payload(e, f"{what} class") for e in obj["classes"]
    )
    top = _class_from_payload(obj["top"], f"{what} top network")
    return OobnModel(classes, top)


# ---------------------------------------------------------------------------
# Staged trees and chain event graphs
#
# Both kinds share one vocabulary: vertices, labelled edges, stages with
# label correspondences, and per-stage probability vectors.  A CEG may
# additionally name its root and sink and carry explicit per-edge
# probabilities (conditioning can reweight edges away from their stage
# vector, so the stage table alone cannot always reconstruct them).


def _stage_to_payload(stage: Stage) -> dict:
    entry: dict[str, Any] = {
        "id": stage.id,
        "members": list(stage.members),
        "slots": list(stage.slots),
    }
    labels = {
        m: list(ls) for m, ls in sorted(stage.member_labels.items()) if tuple(ls) != stage.slots
    }
    if labels:
        entry["labels"] = labels
    return entry


def _stage_from_payload(entry: Any, what: str) -> Stage:
    entry = _obj(entry, what)
    _keys(entry, what, required=("id", "members", "slots"), optional=("labels",))
    members = tuple(str(m) for m in entry["members"])
    slots = tuple(str(s) for s in entry["slots"])
    labels = {m: slots for m in members}
    for m, ls in _obj(entry.get("labels", {}), f"{what}.labels").items():
        if str(m) not in labels:
            raise ParseError(f"{what} labels mention non-member {m!r}")
        if len(ls) != len(slots):
            raise ParseError(f"{what} labels for {m!r} do not align with the slots")
        labels[str(m)] = tuple(str(x) for x in ls)
    return Stage(str(entry["id"]), members, slots, labels)


def _stage_probabilities(obj: Any, stages: Iterable[Stage], what: str) -> dict[str, tuple[float, ...]]:
    by_id = {s.id: s for s in stages}
    table: dict[str, tuple[float, ...]] = {}
    for stage_id, value in _obj(obj, what).items():
        stage = by_id.get(str(stage_id))
        if stage is None:
            raise ParseError(f"{what} references unknown stage {stage_id!r}")
        if isinstance(value, dict):
            extra = sorted(set(value) - set(stage.slots))
            if extra:
                raise ParseError(f"{what}[{stage_id!r}] has unknown slots {extra}")
            try:
                row = tuple(float(value[slot]) for slot in stage.slots)
            except KeyError as exc:
                raise ParseError(f"{what}[{stage_id!r}] is missing slot {exc.args[0]!r}") from None
        else:
            row = tuple(float(x) for x in value)
        table[str(stage_id)] = row
    return table


def staged_tree_to_payload(st: StagedTree) -> dict:
    by_id = {s.id: s for s in st.stages}
    return {
        "format_version": FORMAT_VERSION,
        "kind": "staged_tree",
        "root": st.tree.root,
        "vertices": sorted(st.tree.vertices),
        "edges": [
            {"tail": e.tail, "head": e.head, "label": e.label, **({"evidence": True} if e.evidence else {})}
            for e in st.tree.edges
        ],
        "stages": [_stage_to_payload(s) for s in st.stages],
        "stage_probabilities": {
            s: dict(zip(by_id[s].slots, row))
            for s, row in sorted(st.probabilities.items())
        },
    }


def _labelled_edges(entries: Any, what: str) -> list[tuple[str, str, str, bool, float | None]]:
    out = []
    for entry in entries:
        entry = _obj(entry, f"{what} edge")
        _keys(
            entry,
            f"{what} edge",
            required=("tail", "head", "label"),
            optional=("evidence", "probability"),
        )
        prob = entry.get("probability")
        out.append(
            (
                str(entry["tail"]),
                str(entry["head"]),
                str(entry["label"]),
                bool(entry.get("evidence", False)),
                None if prob is None else float(prob),
            )
        )
    return out


_TREE_KEYS = ("format_version", "edges")
_TREE_OPTIONAL = ("kind", "root", "vertices", "stages", "stage_probabilities")


def staged_tree_from_payload(obj: Any, what: str = "staged tree") -> StagedTree:
    obj = _obj(obj, what)
    _keys(obj, what, required=_TREE_KEYS, optional=_TREE_OPTIONAL)
    _check_header(obj, what, "staged_tree")
    edges = [
        TreeEdge(t, h, l, ev)
        for t, h, l, ev, prob in _labelled_edges(obj["edges"], what)
    ]
    root = obj.get("root")
    tree = build_event_tree(edges, root=None if root is None else str(root))
    if "vertices" in obj:
        declared = {str(v) for v in obj["vertices"]}
        if declared != tree.vertices:
            raise ParseError(f"{what} vertex list disagrees with the edges")
    if "stages" in obj:
        stages = tuple(_stage_from_payload(e, f"{what} stage") for e in obj["stages"])
    else:
        return StagedTree.discrete(tree)
    st = StagedTree(tree, stages)
    probs = _stage_probabilities(
        obj.get("stage_probabilities", {}), stages, f"{what}.stage_probabilities"
    )
    return StagedTree(tree, stages, probs)


def ceg_to_payload(c: Ceg) -> dict:
    stages: dict[str, list[str]] = {}
    for position, colour in sorted(c.colours.items()):
        stages.setdefault(colour, []).append(position)
    return {
        "format_version": FORMAT_VERSION,
        "kind": "ceg",
        "root": c.root,
        "sink": c.sink,
        "vertices": sorted(c.positions),
        "edges": [
            {
                "tail": e.tail,
                "head": e.head,
                "label": e.label,
                "probability": e.probability,
                **({"evidence": True} if e.evidence else {}),
            }
            for e in c.edges
        ],
        "stages": [
            {"id": colour, "members": members, "slots": sorted({e.label for e in c.outgoing(members[0])})}
            for colour, members in sorted(stages.items())
        ],
    }


def ceg_from_payload(obj: Any, what: str = "ceg") -> Ceg:
    obj = _obj(obj, what)
    _keys(
        obj,
        what,
        required=("format_version", "edges"),
        optional=("kind", "root", "sink", "vertices", "stages", "stage_probabilities"),
    )
    _check_header(obj, what, "ceg")
    records = _labelled_edges(obj["edges"], what)
    vertices = {t for t, *_ in records} | {h for _, h, *_ in records}
    heads = {h for _, h, *_ in records}
    tails = {t for t, *_ in records}
    root = str(obj["root"]) if "root" in obj else _only(vertices - heads, what, "root")
    sink = str(obj["sink"]) if "sink" in obj else _only(vertices - tails, what, "sink")
    colours: dict[str, str] = {}
    stage_slots: dict[str, tuple[str, ...]] = {}
    for entry in obj.get("stages", ()):
        stage = _stage_from_payload(entry, f"{what} stage")
        stage_slots[stage.id] = stage.slots
        for member in stage.members:
            colours[member] = stage.id
    table = {}
    if "stage_probabilities" in obj:
        dummy = [Stage(sid, (), slots, {}) for sid, slots in stage_slots.items()]
        table = _stage_probabilities(obj["stage_probabilities"], dummy, f"{what}.stage_probabilities")
    edges = []
    for tail, head, label, evidence, prob in records:
        if prob is None:
            colour = colours.get(tail)
            row = table.get(colour) if colour else None
            if row is None:
                raise ParseError(
                    f"{what} edge {tail!r}->{head!r} has no probability and no stage vector"
                )
            prob = row[stage_slots[colour].index(label)]
        edges.append(CegEdge(tail, head, label, prob, evidence))
    return Ceg(root, sink, tuple(edges), colours)


def _only(candidates: set[str], what: str, role: str) -> str:
    if len(candidates) != 1:
        raise ParseError(f"{what} needs an explicit {role!r}: candidates are {sorted(candidates)}")
    return next(iter(candidates))


# ---------------------------------------------------------------------------
# Wigmore charts


def chart_to_payload(chart: WigmoreChart) -> dict:
    nodes = []
    for n in chart.nodes:
        entry: dict[str, Any] = {"id": n.id, "kind": n.kind, "text": n.text}
        if n.item_ref is not None:
            entry["item_ref"] = n.item_ref
        if n.source is not None:
            entry["source"] = n.source
        nodes.append(entry)
    return {
        "format_version": FORMAT_VERSION,
        "kind": "chart",
        "nodes": nodes,
        "edges": [
            {"from": e.tail, "to": e.head, "polarity": e.polarity} for e in chart.edges
        ],
        "probandum": chart.probandum,
    }


def chart_from_payload(obj: Any, what: str = "chart") -> WigmoreChart:
    obj = _obj(obj, what)
    _keys(obj, what, required=("format_version", "nodes", "edges", "probandum"), optional=("kind",))
    _check_header(obj, what, "chart")
    nodes = []
    for entry in obj["nodes"]:
        entry = _obj(entry, f"{what} node")
        _keys(entry, f"{what} node", required=("id", "kind", "text"), optional=("item_ref", "source"))
        item_ref = entry.get("item_ref")
        source = entry.get("source")
        nodes.append(
            ChartNode(
                str(entry["id"]),
                str(entry["kind"]),
                str(entry["text"]),
                None if item_ref is None else str(item_ref),
                None if source is None else str(source),
            )
        )
    edges = []
    for entry in obj["edges"]:
        entry = _obj(entry, f"{what} edge")
        _keys(entry, f"{what} edge", required=("from", "to", "polarity"))
        edges.append(ChartEdge(str(entry["from"]), str(entry["to"]), str(entry["polarity"])))
    return build_chart(nodes, edges, str(obj["probandum"]))


# ---------------------------------------------------------------------------
# Kind dispatch


def sniff_kind(obj: Any) -> str:
    """Best-effort model kind for documents without an explicit ``kind``."""
    obj = _obj(obj, "model document")
    declared = obj.get("kind")
    if declared is not None:
        if declared not in MODEL_KINDS:
            raise ParseError(f"unknown model kind {declared!r}")
        return str(declared)
    if "classes" in obj:
        return "oobn"
    if "cpts" in obj:
        return "bn"
    if "probandum" in obj:
        return "chart"
    if "hard" in obj or "soft" in obj:
        return "evidence"
    if "edges" in obj:
        if "sink" in obj:
            return "ceg"
        heads = [e.get("head") for e in obj["edges"] if isinstance(e, dict)]
        return "ceg" if len(heads) != len(set(heads)) else "staged_tree"
    raise ParseError("cannot determine the model kind of this document")


_LOADERS = {
    "bn": bn_from_payload,
    "oobn": oobn_from_payload,
    "staged_tree": staged_tree_from_payload,
    "ceg": ceg_from_payload,
    "chart": chart_from_payload,
    "evidence": evidence_from_payload,
}

_SAVERS = {
    DiscreteBayesNet: bn_to_payload,
    OobnModel: oobn_to_payload,
    StagedTree: staged_tree_to_payload,
    Ceg: ceg_to_payload,
    WigmoreChart: chart_to_payload,
    EvidenceSet: evidence_to_payload,
}


def model_from_payload(obj: Any, kind: str | None = None):
    kind = kind or sniff_kind(obj)
    try:
        loader = _LOADERS[kind]
    except KeyError:
        raise ParseError(f"unknown model kind {kind!r}") from None
    return loader(obj)


def load_model(path: str | Path, kind: str | None = None):
    """Read any model document; returns the engine object for its kind."""
    return model_from_payload(read_json(path), kind)


def model_to_payload(model: Any) -> dict:
    for klass, saver in _SAVERS.items():
        if isinstance(model, klass):
            return saver(model)
    raise ParseError(f"cannot serialize {type(model).__name__}")


def save_model(model: Any, path: str | Path) -> None:
    write_json(path, model_to_payload(model))


def kind_of(model: Any) -> str:
    """The wire-format kind string for an engine object."""
    for klass, kind in (
        (DiscreteBayesNet, "bn"),
        (OobnModel, "oobn"),
        (StagedTree, "staged_tree"),
        (Ceg, "ceg"),
        (WigmoreChart, "chart"),
        (EvidenceSet, "evidence"),
    ):
        if isinstance(model, klass):
            return kind
    raise ParseError(f"cannot serialize {type(model).__name__}")


def model_to_dot(model: Any, name: str = "graph") -> str:
    """DOT text for any graph-bearing model (OOBNs render flattened)."""
    if isinstance(model, DiscreteBayesNet):
        return dag_to_dot(model.dag, name)
    if isinstance(model, OobnModel):
        return dag_to_dot(flatten(model).dag, name)
    if isinstance(model, StagedTree):
        return staged_tree_to_dot(model, name)
    if isinstance(model, Ceg):
        return ceg_to_dot(model, name)
    if isinstance(model, WigmoreChart):
        return chart_to_dot(model, name)
    raise ParseError(f"no graph rendering for {type(model).__name__}")
