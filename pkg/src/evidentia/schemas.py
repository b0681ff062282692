"""JSON Schemas for every machine-readable output and model document.

These are plain dicts (draft 2020-12).  The engine never validates its
own output against them at runtime; they exist so tests, clients, and
external tooling can hold the interfaces still.
"""

from __future__ import annotations

_NUMBER = {"type": "number"}
_STRING = {"type": "string"}
_BOOL = {"type": "boolean"}


def _obj(properties: dict, required: list[str] | None = None, **extra) -> dict:
    schema = {
        "type": "object",
        "properties": properties,
        "required": sorted(properties) if required is None else required,
        "additionalProperties": False,
    }
    schema.update(extra)
    return schema


def _arr(items: dict) -> dict:
    return {"type": "array", "items": items}


_STRINGS = _arr(_STRING)
_ROW = _arr(_NUMBER)

_HEADER = {"format_version": {"const": "1"}, "kind": _STRING}

_NODE_STATES = _obj({"id": _STRING, "states": _STRINGS})

_CPT = _obj(
    {"node": _STRING, "parents": _STRINGS, "rows": _arr(_ROW)},
    required=["node", "rows"],
)

_PLAIN_EDGE = _obj({"tail": _STRING, "head": _STRING})

BN_MODEL = _obj(
    {
        **_HEADER,
        "nodes": _arr(_NODE_STATES),
        "edges": _arr(_PLAIN_EDGE),
        "cpts": _arr(_CPT),
    },
    required=["format_version", "nodes", "cpts"],
)

EVIDENCE = _obj(
    {
        **_HEADER,
        "hard": {"type": "object", "additionalProperties": _STRING},
        "soft": {"type": "object", "additionalProperties": _ROW},
    },
    required=["format_version"],
)

_INSTANCE = _obj(
    {
        "name": _STRING,
        "of": _STRING,
        "bindings": {"type": "object", "additionalProperties": _STRING},
    },
    required=["name", "of"],
)

_NETWORK_CLASS = _obj(
    {
        "name": _STRING,
        "inputs": _arr(_NODE_STATES),
        "nodes": _arr(_NODE_STATES),
        "outputs": _STRINGS,
        "edges": _arr(_PLAIN_EDGE),
        "cpts": _arr(_CPT),
        "instances": _arr(_INSTANCE),
    },
    required=["name", "nodes", "cpts"],
)

OOBN_MODEL = _obj(
    {**_HEADER, "classes": _arr(_NETWORK_CLASS), "top": _NETWORK_CLASS},
    required=["format_version", "classes", "top"],
)

_LABELLED_EDGE = _obj(
    {
        "tail": _STRING,
        "head": _STRING,
        "label": _STRING,
        "evidence": _BOOL,
        "probability": _NUMBER,
    },
    required=["tail", "head", "label"],
)

_STAGE = _obj(
    {
        "id": _STRING,
        "members": _STRINGS,
        "slots": _STRINGS,
        "labels": {"type": "object", "additionalProperties": _STRINGS},
    },
    required=["id", "members", "slots"],
)

_STAGE_PROBABILITIES = {
    "type": "object",
    "additionalProperties": {
        "anyOf": [_ROW, {"type": "object", "additionalProperties": _NUMBER}]
    },
}

STAGED_TREE_MODEL = _obj(
    {
        **_HEADER,
        "root": _STRING,
        "vertices": _STRINGS,
        "edges": _arr(_LABELLED_EDGE),
        "stages": _arr(_STAGE),
        "stage_probabilities": _STAGE_PROBABILITIES,
    },
    required=["format_version", "edges"],
)

CEG_MODEL = _obj(
    {
        **_HEADER,
        "root": _STRING,
        "sink": _STRING,
        "vertices": _STRINGS,
        "edges": _arr(_LABELLED_EDGE),
        "stages": _arr(_STAGE),
        "stage_probabilities": _STAGE_PROBABILITIES,
    },
    required=["format_version", "edges"],
)

_CHART_NODE = _obj(
    {
        "id": _STRING,
        "kind": {"enum": ["evidence", "inference_step", "probandum", "subprobandum", "testimony"]},
        "text": _STRING,
        "item_ref": _STRING,
        "source": _STRING,
    },
    required=["id", "kind", "text"],
)

_CHART_EDGE = _obj(
    {"from": _STRING, "to": _STRING, "polarity": {"enum": ["opposes", "supports"]}}
)

CHART_MODEL = _obj(
    {
        **_HEADER,
        "nodes": _arr(_CHART_NODE),
        "edges": _arr(_CHART_EDGE),
        "probandum": _STRING,
    },
    required=["format_version", "nodes", "edges", "probandum"],
)

CASE_MANIFEST = _obj(
    {
        **_HEADER,
        "title": _STRING,
        "items_file": _STRING,
        "measurements_file": _STRING,
        "models": {"type": "object", "additionalProperties": _STRING},
        "charts": {"type": "object", "additionalProperties": _STRING},
        "crossref": {"type": "object", "additionalProperties": _arr(_obj({"model": _STRING, "element": _STRING}))},
        "notes": _STRINGS,
    },
    required=["format_version", "items_file", "measurements_file", "models", "charts", "crossref"],
)

EVIDENCE_ITEM = _obj(
    {
        "number": _STRING,
        "text": _STRING,
        "kind": {"enum": ["evidence", "proposition", "testimony"]},
        "page_ref": _STRING,
        "canonical": _BOOL,
        "added_by_analysts": _BOOL,
    },
    required=["number", "text", "kind", "canonical"],
)

ITEMS_FILE = _arr(EVIDENCE_ITEM)

MEASUREMENTS = _obj(
    {
        **_HEADER,
        "knife": _obj(
            {
                "blade_length_cm": _NUMBER,
                "width_cm": _NUMBER,
                "thickness_mm": _NUMBER,
                "striations_cm": _ROW,
            }
        ),
        "wounds": _arr(
            _obj(
                {
                    "side": {"enum": ["left", "right"]},
                    "depth_cm": _NUMBER,
                    "length_cm": _NUMBER,
                    "width_cm": _NUMBER,
                    "fatal": _BOOL,
                }
            )
        ),
    },
    required=["format_version", "knife", "wounds"],
)

# ---------------------------------------------------------------------------
# Operation outputs (CLI --json and HTTP bodies)

VALIDATION_REPORT = _obj(
    {
        "ok": _BOOL,
        "findings": _arr(
            _obj(
                {"kind": _STRING, "message": _STRING, "subject": {"type": ["string", "null"]}},
                required=["kind", "message"],
            )
        ),
    }
)

CI_RESULT = _obj(
    {"a": _STRINGS, "b": _STRINGS, "given": _STRINGS, "independent": _BOOL}
)

POSTERIOR_REPORT = _obj(
    {
        "marginals": {"type": "object", "additionalProperties": _ROW},
        "evidence_probability": _NUMBER,
    }
)

EVIDENCE_PROBABILITY = _obj({"evidence_probability": _NUMBER})

_PATH = _obj(
    {"labels": _STRINGS, "positions": _STRINGS, "probability": _NUMBER}
)

CEG_PATHS = _obj({"paths": _arr(_PATH), "total_probability": _NUMBER})

CONDITION_REPORT = _obj(
    {"kept_mass": _NUMBER, "paths": _arr(_PATH), "ceg": CEG_MODEL},
    required=["kept_mass", "paths"],
)

RELEVANCE = _obj(
    {"probandum": _STRING, "relevant": _STRINGS, "irrelevant": _STRINGS}
)

CHAINS = _obj(
    {
        "item": _STRING,
        "chains": _arr(_obj({"nodes": _STRINGS, "polarities": _STRINGS})),
    }
)

MODELS_LIST = _obj(
    {"models": _arr(_obj({"id": _STRING, "kind": _STRING}))}
)

CASE_ITEMS = _obj({"items": ITEMS_FILE})

CROSSREF = _obj(
    {
        "item": _STRING,
        "references": _arr(_obj({"model": _STRING, "element": _STRING})),
    }
)

DOT_TEXT = _obj({"id": _STRING, "dot": _STRING})

ERROR = _obj(
    {
        "error": _obj({"kind": _STRING, "message": _STRING}),
    }
)

MODEL_FILES = {
    "bn": BN_MODEL,
    "oobn": OOBN_MODEL,
    "staged_tree": STAGED_TREE_MODEL,
    "ceg": CEG_MODEL,
    "chart": CHART_MODEL,
    "evidence": EVIDENCE,
}

OUTPUTS = {
    "validation_report": VALIDATION_REPORT,
    "ci_result": CI_RESULT,
    "posterior_report": POSTERIOR_REPORT,
    "evidence_probability": EVIDENCE_PROBABILITY,
    "ceg_paths": CEG_PATHS,
    "condition_report": CONDITION_REPORT,
    "relevance": RELEVANCE,
    "chains": CHAINS,
    "models_list": MODELS_LIST,
    "case_items": CASE_ITEMS,
    "evidence_item": EVIDENCE_ITEM,
    "crossref": CROSSREF,
    "dot": DOT_TEXT,
    "error": ERROR,
}
