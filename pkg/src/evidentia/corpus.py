"""The Kercher knife-evidence corpus.

A case bundle is a directory with a ``case.json`` manifest naming the
evidence-item list, the physical measurements, the probabilistic models
(BN, OOBN, CEG), the Wigmore charts, and a cross-reference map from
item numbers to model elements.  Loading validates everything: files
must parse, models must pass their own validators, and every crossref
target must exist in the model it points at.

Item numbers are strings: the court list interpolates letters ("25a",
"30a", "37b"), and the analysis adds item "51", which is flagged
``added_by_analysts`` and non-canonical.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from types import MappingProxyType
from typing import Any, Mapping

from . import modelio
from .bn import DiscreteBayesNet, validate as validate_bn
from .ceg import Ceg, StagedTree, validate_staging
from .errors import CrossrefError, ParseError, SubmodelInvalid, UnknownItem
from .oobn import OobnModel, flatten
from .validation import Finding, ValidationReport
from .wigmore import WigmoreChart, validate_chart

ITEM_KINDS = ("evidence", "proposition", "testimony")


@dataclass(frozen=True)
class EvidenceItem:
    """One numbered entry from the trial-record list."""

    number: str
    text: str
    kind: str
    page_ref: str | None = None
    canonical: bool = True
    added_by_analysts: bool = False

    def __post_init__(self) -> None:
        if not self.number:
            raise ParseError("evidence item number must be non-empty")
        if not self.text:
            raise ParseError(f"evidence item {self.number!r} has empty text")
        if self.kind not in ITEM_KINDS:
            raise ParseError(
                f"evidence item {self.number!r} has unknown kind {self.kind!r}"
            )
        if self.added_by_analysts and self.canonical:
            raise ParseError(
                f"item {self.number!r} added by the analysts cannot be canonical"
            )


@dataclass(frozen=True)
class KnifeSpec:
    """Exhibit 36's dimensions."""

    blade_length_cm: float
    width_cm: float
    thickness_mm: float
    striations_cm: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "striations_cm", tuple(float(x) for x in self.striations_cm)
        )
        for name in ("blade_length_cm", "width_cm", "thickness_mm"):
            if getattr(self, name) <= 0:
                raise ParseError(f"knife {name} must be positive")
        for s in self.striations_cm:
            if not 0 < s <= self.blade_length_cm:
                raise ParseError(
                    f"striation at {s} cm falls outside the {self.blade_length_cm} cm blade"
                )


@dataclass(frozen=True)
class WoundSpec:
    side: str
    depth_cm: float
    length_cm: float
    width_cm: float
    fatal: bool

    def __post_init__(self) -> None:
        if self.side not in ("left", "right"):
            raise ParseError(f"wound side must be left or right, got {self.side!r}")
        for name in ("depth_cm", "length_cm", "width_cm"):
            if getattr(self, name) <= 0:
                raise ParseError(f"wound {name} must be positive")


@dataclass(frozen=True)
class CrossReference:
    model: str
    element: str


@dataclass(frozen=True)
class CaseBundle:
    """Everything the workbench needs about one case, immutable."""

    title: str
    items: tuple[EvidenceItem, ...]
    knife: KnifeSpec
    wounds: tuple[WoundSpec, ...]
    models: Mapping[str, Any]
    charts: Mapping[str, WigmoreChart]
    crossref: Mapping[str, tuple[CrossReference, ...]]
    files: Mapping[str, str]
    notes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "items", tuple(self.items))
        object.__setattr__(self, "wounds", tuple(self.wounds))
        object.__setattr__(self, "models", MappingProxyType(dict(self.models)))
        object.__setattr__(self, "charts", MappingProxyType(dict(self.charts)))
        object.__setattr__(
            self,
            "crossref",
            MappingProxyType({k: tuple(v) for k, v in dict(self.crossref).items()}),
        )
        object.__setattr__(self, "files", MappingProxyType(dict(self.files)))
        object.__setattr__(self, "notes", tuple(self.notes))

    @cached_property
    def item_map(self) -> Mapping[str, EvidenceItem]:
        return MappingProxyType({i.number: i for i in self.items})


def get_item(bundle: CaseBundle, number: str | int) -> EvidenceItem:
    key = str(number)
    try:
        return bundle.item_map[key]
    except KeyError:
        raise UnknownItem(f"no evidence item {key!r} in {bundle.title!r}") from None


def cross_reference(bundle: CaseBundle, number: str | int) -> tuple[CrossReference, ...]:
    """Where an item shows up across the case's models; may be empty."""
    item = get_item(bundle, number)
    return bundle.crossref.get(item.number, ())


def default_case_dir() -> Path:
    """The packaged Kercher bundle."""
    return Path(__file__).parent / "data" / "kercher"


# ---------------------------------------------------------------------------
# Loading


def _item_from_payload(entry: Any) -> EvidenceItem:
    entry = modelio._obj(entry, "evidence item")
    modelio._keys(
        entry,
        "evidence item",
        required=("number", "text", "kind", "canonical"),
        optional=("page_ref", "added_by_analysts"),
    )
    page_ref = entry.get("page_ref")
    return EvidenceItem(
        str(entry["number"]),
        str(entry["text"]),
        str(entry["kind"]),
        None if page_ref is None else str(page_ref),
        bool(entry["canonical"]),
        bool(entry.get("added_by_analysts", False)),
    )


def _load_items(path: Path) -> tuple[EvidenceItem, ...]:
    payload = modelio.read_json(path)
    if not isinstance(payload, list):
        raise ParseError(f"{path} must be a JSON array of evidence items")
    items = tuple(_item_from_payload(e) for e in payload)
    seen: set[str] = set()
    for item in items:
        if item.number in seen:
            raise ParseError(f"duplicate evidence item number {item.number!r}")
        seen.add(item.number)
    return items


def _load_measurements(path: Path) -> tuple[KnifeSpec, tuple[WoundSpec, ...]]:
    obj = modelio._obj(modelio.read_json(path), "measurements")
    modelio._keys(
        obj, "measurements", required=("format_version", "knife", "wounds"), optional=("kind",)
    )
    if obj["format_version"] != modelio.FORMAT_VERSION:
        raise ParseError(f"{path} has unsupported format_version {obj['format_version']!r}")
    knife_obj = modelio._obj(obj["knife"], "knife")
    modelio._keys(
        knife_obj,
        "knife",
        required=("blade_length_cm", "width_cm", "thickness_mm", "striations_cm"),
    )
    knife = KnifeSpec(
        float(knife_obj["blade_length_cm"]),
        float(knife_obj["width_cm"]),
        float(knife_obj["thickness_mm"]),
        tuple(float(x) for x in knife_obj["striations_cm"]),
    )
    wounds = []
    for entry in obj["wounds"]:
        entry = modelio._obj(entry, "wound")
        modelio._keys(
            entry, "wound", required=("side", "depth_cm", "length_cm", "width_cm", "fatal")
        )
        wounds.append(
            WoundSpec(
                str(entry["side"]),
                float(entry["depth_cm"]),
                float(entry["length_cm"]),
                float(entry["width_cm"]),
                bool(entry["fatal"]),
            )
        )
    return knife, tuple(wounds)


def _model_findings(model_id: str, model: Any) -> list[Finding]:
    if isinstance(model, DiscreteBayesNet):
        report = validate_bn(model)
    elif isinstance(model, OobnModel):
        report = validate_bn(flatten(model))
    elif isinstance(model, StagedTree):
        report = validate_staging(model)
    elif isinstance(model, WigmoreChart):
        report = validate_chart(model)
    else:
        return []
    return [
        Finding(f.kind, f"{model_id}: {f.message}", subject=f.subject or model_id)
        for f in report.findings
    ]


def _elements_of(model: Any) -> frozenset[str]:
    if isinstance(model, DiscreteBayesNet):
        return frozenset(model.dag.nodes)
    if isinstance(model, OobnModel):
        return frozenset(flatten(model).dag.nodes)
    if isinstance(model, Ceg):
        return frozenset(e.label for e in model.edges) | model.positions
    if isinstance(model, StagedTree):
        return frozenset(e.label for e in model.tree.edges) | model.tree.vertices
    if isinstance(model, WigmoreChart):
        return frozenset(n.id for n in model.nodes)
    return frozenset()


def load_case_bundle(path: str | Path) -> CaseBundle:
    """Load and fully validate a bundle from a manifest or its directory."""
    manifest_path = Path(path)
    if manifest_path.is_dir():
        manifest_path = manifest_path / "case.json"
    if not manifest_path.is_file():
        raise ParseError(f"no case manifest at {manifest_path}")
    root = manifest_path.parent
    obj = modelio._obj(modelio.read_json(manifest_path), "case manifest")
    modelio._keys(
        obj,
        "case manifest",
        required=("format_version", "items_file", "measurements_file", "models", "charts", "crossref"),
        optional=("kind", "title", "notes"),
    )
    if obj["format_version"] != modelio.FORMAT_VERSION:
        raise ParseError(
            f"case manifest has unsupported format_version {obj['format_version']!r}"
        )

    def _resolve(name: str) -> Path:
        target = root / str(name)
        if not target.is_file():
            raise ParseError(f"case manifest names missing file {name!r}")
        return target

    items = _load_items(_resolve(obj["items_file"]))
    knife, wounds = _load_measurements(_resolve(obj["measurements_file"]))

    files = {"items": str(obj["items_file"]), "measurements": str(obj["measurements_file"])}
    models: dict[str, Any] = {}
    charts: dict[str, WigmoreChart] = {}
    findings: list[Finding] = []
    for model_id, name in modelio._obj(obj["models"], "manifest models").items():
        models[str(model_id)] = modelio.load_model(_resolve(name))
        files[str(model_id)] = str(name)
    for chart_id, name in modelio._obj(obj["charts"], "manifest charts").items():
        if chart_id in models:
            raise ParseError(f"model id {chart_id!r} used twice in the manifest")
        chart = modelio.load_model(_resolve(name))
        if not isinstance(chart, WigmoreChart):
            raise ParseError(f"chart file {name!r} does not contain a chart")
        charts[str(chart_id)] = chart
        files[str(chart_id)] = str(name)
    for model_id, model in {**models, **charts}.items():
        findings.extend(_model_findings(model_id, model))
    if findings:
        raise SubmodelInvalid(
            "; ".join(f"[{f.kind}] {f.message}" for f in findings)
        )

    item_numbers = {i.number for i in items}
    targets = {mid: _elements_of(m) for mid, m in {**models, **charts}.items()}
    crossref: dict[str, tuple[CrossReference, ...]] = {}
    for number, refs in modelio._obj(obj["crossref"], "crossref").items():
        if str(number) not in item_numbers:
            raise CrossrefError(f"crossref names unknown item {number!r}")
        parsed = []
        for ref in refs:
            ref = modelio._obj(ref, "crossref entry")
            modelio._keys(ref, "crossref entry", required=("model", "element"))
            model_id, element = str(ref["model"]), str(ref["element"])
            if model_id not in targets:
                raise CrossrefError(
                    f"item {number!r} references unknown model {model_id!r}"
                )
            if element not in targets[model_id]:
                raise CrossrefError(
                    f"item {number!r} references missing element {element!r} of {model_id!r}"
                )
            parsed.append(CrossReference(model_id, element))
        crossref[str(number)] = tuple(parsed)

    return CaseBundle(
        title=str(obj.get("title", root.name)),
        items=items,
        knife=knife,
        wounds=wounds,
        models=models,
        charts=charts,
        crossref=crossref,
        files=files,
        notes=tuple(str(n) for n in obj.get("notes", ())),
    )


# ---------------------------------------------------------------------------
# Saving


def item_to_payload(item: EvidenceItem) -> dict:
    entry: dict[str, Any] = {
        "number": item.number,
        "text": item.text,
        "kind": item.kind,
        "canonical": item.canonical,
    }
    if item.page_ref is not None:
        entry["page_ref"] = item.page_ref
    if item.added_by_analysts:
        entry["added_by_analysts"] = True
    return entry


def measurements_to_payload(knife: KnifeSpec, wounds: tuple[WoundSpec, ...]) -> dict:
    return {
        "format_version": modelio.FORMAT_VERSION,
        "knife": {
            "blade_length_cm": knife.blade_length_cm,
            "width_cm": knife.width_cm,
            "thickness_mm": knife.thickness_mm,
            "striations_cm": list(knife.striations_cm),
        },
        "wounds": [
            {
                "side": w.side,
                "depth_cm": w.depth_cm,
                "length_cm": w.length_cm,
                "width_cm": w.width_cm,
                "fatal": w.fatal,
            }
            for w in wounds
        ],
    }


def manifest_to_payload(bundle: CaseBundle) -> dict:
    return {
        "format_version": modelio.FORMAT_VERSION,
        "kind": "case",
        "title": bundle.title,
        "items_file": bundle.files["items"],
        "measurements_file": bundle.files["measurements"],
        "models": {mid: bundle.files[mid] for mid in sorted(bundle.models)},
        "charts": {cid: bundle.files[cid] for cid in sorted(bundle.charts)},
        "crossref": {
            number: [{"model": r.model, "element": r.element} for r in refs]
            for number, refs in sorted(bundle.crossref.items())
        },
        "notes": list(bundle.notes),
    }


def save_case_bundle(bundle: CaseBundle, directory: str | Path) -> None:
    """Write the bundle out so that loading it back is the identity."""
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    modelio.write_json(root / "case.json", manifest_to_payload(bundle))
    modelio.write_json(
        root / bundle.files["items"], [item_to_payload(i) for i in bundle.items]
    )
    modelio.write_json(
        root / bundle.files["measurements"],
        measurements_to_payload(bundle.knife, bundle.wounds),
    )
    for model_id, model in {**bundle.models, **bundle.charts}.items():
        modelio.save_model(model, root / bundle.files[model_id])
