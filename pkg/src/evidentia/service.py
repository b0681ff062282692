"""HTTP facade over loaded case bundles.

Every endpoint lives under ``/api/v1``.  Requests are self-contained —
evidence and predicates travel in the body — and the server holds only the
immutable models it loaded at startup, so any sequence of requests leaves
it in its startup state.  Domain errors surface as 422 with the engine
error's class name under ``error.kind``; unknown ids are 404.
"""

from __future__ import annotations

from math import fsum
from pathlib import Path
from typing import Any, Mapping

from fastapi import FastAPI
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from . import modelio
from .bn import DiscreteBayesNet, EvidenceSet, posterior_marginals
from .ceg import Ceg, condition, enumerate_paths, path_predicate
from .corpus import CaseBundle, cross_reference, get_item, item_to_payload, load_case_bundle, default_case_dir
from .errors import EvidentiaError, ParseError
from .graphs import CiQuery, query_ci
from .oobn import OobnModel, flatten
from .wigmore import WigmoreChart, argument_chains, relevant_items


class NotFound(EvidentiaError):
    """A path parameter names no resource in its namespace."""


_EXTRA_SUFFIXES = (".bn", ".oobn", ".ceg", ".chart", ".tree")


def _model_id_for_path(path: Path) -> str:
    stem = path.stem
    for suffix in _EXTRA_SUFFIXES:
        if stem.endswith(suffix):
            return stem[: -len(suffix)]
    return stem


class _Registry:
    """Immutable lookup tables built once, before the listener starts."""

    def __init__(self, bundle: CaseBundle, extra_models: Mapping[str, Any]):
        self.bundle = bundle
        self.models: dict[str, Any] = dict(bundle.models)
        self.models.update(bundle.charts)
        for mid, model in extra_models.items():
            if mid in self.models:
                raise ParseError(f"duplicate model id {mid!r}")
            self.models[mid] = model
        self.nets: dict[str, DiscreteBayesNet] = {}
        self.cegs: dict[str, Ceg] = {}
        self.charts: dict[str, WigmoreChart] = {}
        for mid, model in self.models.items():
            if isinstance(model, DiscreteBayesNet):
                self.nets[mid] = model
            elif isinstance(model, OobnModel):
                self.nets[mid] = flatten(model)
            elif isinstance(model, Ceg):
                self.cegs[mid] = model
            elif isinstance(model, WigmoreChart):
                self.charts[mid] = model

    def net(self, mid: str) -> DiscreteBayesNet:
        return self._lookup(self.nets, mid, "Bayesian network")

    def ceg(self, mid: str) -> Ceg:
        return self._lookup(self.cegs, mid, "CEG")

    def chart(self, mid: str) -> WigmoreChart:
        return self._lookup(self.charts, mid, "chart")

    def graph(self, mid: str) -> Any:
        return self._lookup(self.models, mid, "model")

    @staticmethod
    def _lookup(table: Mapping[str, Any], mid: str, what: str):
        if mid not in table:
            raise NotFound(f"no {what} named {mid!r}")
        return table[mid]


def _object(value: Any, what: str) -> dict:
    if not isinstance(value, dict):
        raise ParseError(f"{what} must be a JSON object")
    return value


def _keys(body: Mapping, what: str, required: tuple[str, ...], optional: tuple[str, ...]) -> None:
    for key in required:
        if key not in body:
            raise ParseError(f"{what} is missing {key!r}")
    unknown = set(body) - set(required) - set(optional)
    if unknown:
        raise ParseError(f"{what} has unknown keys {sorted(unknown)}")


def _string_list(value: Any, what: str) -> list[str]:
    if not isinstance(value, list) or not all(isinstance(x, str) for x in value):
        raise ParseError(f"{what} must be a list of strings")
    return value


def _evidence_from_body(body: Mapping) -> EvidenceSet:
    hard = _object(body.get("hard", {}), "'hard'")
    soft = _object(body.get("soft", {}), "'soft'")
    return EvidenceSet(hard=hard, soft=soft)


def _posterior_payload(net: DiscreteBayesNet, body: Mapping) -> dict:
    _keys(body, "infer request", (), ("hard", "soft", "nodes"))
    report = posterior_marginals(net, _evidence_from_body(body))
    marginals = report.marginals
    if "nodes" in body:
        wanted = _string_list(body["nodes"], "'nodes'")
        for v in wanted:
            net.space(v)
        marginals = {v: marginals[v] for v in wanted}
    return {
        "marginals": {v: list(m) for v, m in sorted(marginals.items())},
        "evidence_probability": report.evidence_probability,
    }


def _paths_payload(c: Ceg) -> dict:
    paths = enumerate_paths(c)
    return {
        "paths": [
            {"labels": list(p.labels), "positions": list(p.positions), "probability": p.probability}
            for p in paths
        ],
        "total_probability": fsum(p.probability for p in paths),
    }


def default_ui_dir() -> Path:
    """Built workbench bundle, when the repository checkout carries one."""
    return Path(__file__).resolve().parents[2] / "frontend" / "dist"


def create_app(
    case_dir: str | Path | None = None,
    extra_models: Any = (),
    dev: bool = False,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    """Load bundles (failing fast on invalid ones) and wire the endpoints."""
    bundle = load_case_bundle(case_dir if case_dir is not None else default_case_dir())
    extras: dict[str, Any] = {}
    for path in extra_models:
        path = Path(path)
        model = modelio.load_model(path)
        if modelio.kind_of(model) == "evidence":
            raise ParseError(f"{path} is an evidence document, not a servable model")
        mid = _model_id_for_path(path)
        if mid in extras:
            raise ParseError(f"duplicate model id {mid!r}")
        extras[mid] = model
    registry = _Registry(bundle, extras)

    app = FastAPI(title="evidentia", openapi_url=None)

    if dev:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=["*"],
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(EvidentiaError)
    async def _engine_error(request, exc: EvidentiaError):
        status = 404 if exc.kind in ("NotFound", "UnknownItem") else 422
        return JSONResponse(
            status_code=status,
            content={"error": {"kind": exc.kind, "message": str(exc)}},
        )

    @app.exception_handler(RequestValidationError)
    async def _bad_request(request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422,
            content={"error": {"kind": "ParseError", "message": "request body is not valid JSON of the expected shape"}},
        )

    @app.get("/api/v1/models")
    def list_models() -> dict:
        return {
            "models": [
                {"id": mid, "kind": modelio.kind_of(model)}
                for mid, model in sorted(registry.models.items())
            ]
        }

    @app.get("/api/v1/case/items")
    def case_items() -> dict:
        return {"items": [item_to_payload(i) for i in registry.bundle.items]}

    @app.get("/api/v1/case/items/{number}")
    def case_item(number: str) -> dict:
        return item_to_payload(get_item(registry.bundle, number))

    @app.get("/api/v1/case/crossref/{number}")
    def case_crossref(number: str) -> dict:
        refs = cross_reference(registry.bundle, number)
        return {
            "item": get_item(registry.bundle, number).number,
            "references": [{"model": r.model, "element": r.element} for r in refs],
        }

    @app.post("/api/v1/bn/{model_id}/infer")
    def bn_infer(model_id: str, body: dict) -> dict:
        return _posterior_payload(registry.net(model_id), body)

    @app.post("/api/v1/bn/{model_id}/ci")
    def bn_ci(model_id: str, body: dict) -> dict:
        net = registry.net(model_id)
        _keys(body, "ci request", ("a", "b"), ("given",))
        a = _string_list(body["a"], "'a'")
        b = _string_list(body["b"], "'b'")
        given = _string_list(body.get("given", []), "'given'")
        query = CiQuery(frozenset(a), frozenset(b), frozenset(given))
        return {
            "a": sorted(query.a),
            "b": sorted(query.b),
            "given": sorted(query.c),
            "independent": query_ci(net.dag, query),
        }

    @app.get("/api/v1/ceg/{model_id}/paths")
    def ceg_paths(model_id: str) -> dict:
        return _paths_payload(registry.ceg(model_id))

    @app.post("/api/v1/ceg/{model_id}/condition")
    def ceg_condition(model_id: str, body: dict) -> dict:
        c = registry.ceg(model_id)
        predicate = _object(body, "predicate")
        keep = path_predicate(predicate)
        kept_mass = fsum(p.probability for p in enumerate_paths(c) if keep(p))
        conditioned = condition(c, predicate)
        payload = _paths_payload(conditioned)
        return {
            "kept_mass": kept_mass,
            "paths": payload["paths"],
            "ceg": modelio.ceg_to_payload(conditioned),
        }

    @app.get("/api/v1/wigmore/{model_id}/relevance")
    def wigmore_relevance(model_id: str) -> dict:
        return relevant_items(registry.chart(model_id)).as_dict()

    @app.get("/api/v1/wigmore/{model_id}/chains/{node}")
    def wigmore_chains(model_id: str, node: str) -> dict:
        chart = registry.chart(model_id)
        if all(n.id != node for n in chart.nodes):
            raise NotFound(f"chart {model_id!r} has no node {node!r}")
        chains = argument_chains(chart, node)
        return {"item": node, "chains": [c.as_dict() for c in chains]}

    @app.get("/api/v1/graphs/{model_id}/dot")
    def graph_dot(model_id: str) -> dict:
        model = registry.graph(model_id)
        return {"id": model_id, "dot": modelio.model_to_dot(model, model_id)}

    static_dir = Path(ui_dir) if ui_dir is not None else default_ui_dir()
    if static_dir.is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
