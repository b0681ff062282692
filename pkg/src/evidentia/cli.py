"""Command-line front end over all engines.

One binary with git-style subcommands.  Exit codes: 0 on success, 1 on
domain errors (impossible evidence, unknown nodes, malformed files, ...),
2 on usage errors.  Results go to stdout (or ``--out FILE``), diagnostics
to stderr.  Machine output is gated behind ``--json`` and is byte-stable:
identical invocations print identical bytes.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from math import fsum
from pathlib import Path

from . import modelio
from .bn import DiscreteBayesNet, EvidenceSet, probability_of_evidence, posterior_marginals
from .bn import validate as validate_bn
from .ceg import (
    StagedTree,
    bn_to_ceg,
    condition,
    enumerate_paths,
    path_predicate,
    to_ceg,
    validate_staging,
)
from .corpus import cross_reference, default_case_dir, get_item, item_to_payload, load_case_bundle
from .errors import EvidentiaError, ParseError
from .graphs import CiQuery, query_ci
from .oobn import OobnModel, flatten
from .validation import ValidationReport
from .wigmore import WigmoreChart, argument_chains, relevant_items, validate_chart


def _dumps(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _emit(args, text: str) -> None:
    out = getattr(args, "out", None)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load(path: str, *accept: str):
    model = modelio.load_model(path)
    kind = modelio.kind_of(model)
    if accept and kind not in accept:
        raise ParseError(
            f"{path} holds a {kind} model; this command needs {' or '.join(accept)}"
        )
    return model


def _load_net(path: str) -> DiscreteBayesNet:
    model = _load(path, "bn", "oobn")
    return flatten(model) if isinstance(model, OobnModel) else model


def _load_evidence(path: str) -> EvidenceSet:
    return modelio.load_model(path, kind="evidence")


def _case_dir(args) -> Path:
    if args.case:
        return Path(args.case)
    env = os.environ.get("EVIDENTIA_CASE_DIR")
    return Path(env) if env else default_case_dir()


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_validate(args) -> int:
    model = _load(args.model)
    report = _validation_report(model)
    if args.json:
        _emit(args, _dumps(report.as_dict()))
    elif report.ok:
        _emit(args, "ok\n")
    else:
        lines = [
            f"[{f.kind}] {f.message}" + (f" ({f.subject})" if f.subject else "")
            for f in report.findings
        ]
        _emit(args, "\n".join(lines) + "\n")
    return 0 if report.ok else 1


def _validation_report(model) -> ValidationReport:
    if isinstance(model, DiscreteBayesNet):
        return validate_bn(model)
    if isinstance(model, OobnModel):
        return validate_bn(flatten(model))
    if isinstance(model, StagedTree):
        return validate_staging(model)
    if isinstance(model, WigmoreChart):
        return validate_chart(model)
    # Cegs and evidence sets enforce their invariants on construction, so
    # reaching this point means the file already parsed clean.
    return ValidationReport()


def _cmd_ci(args) -> int:
    net = _load_net(args.model)
    query = CiQuery(frozenset(args.a), frozenset(args.b), frozenset(args.given or ()))
    independent = query_ci(net.dag, query)
    if args.json:
        payload = {
            "a": sorted(query.a),
            "b": sorted(query.b),
            "given": sorted(query.c),
            "independent": independent,
        }
        _emit(args, _dumps(payload))
    else:
        _emit(args, f"independent: {'true' if independent else 'false'}\n")
    return 0


def _cmd_infer(args) -> int:
    net = _load_net(args.model)
    ev = _load_evidence(args.evidence) if args.evidence else EvidenceSet()
    report = posterior_marginals(net, ev)
    marginals = report.marginals
    if args.node:
        for v in args.node:
            net.space(v)  # unknown nodes must fail, not vanish
        marginals = {v: marginals[v] for v in args.node}
    if args.json:
        payload = {
            "marginals": {v: list(m) for v, m in sorted(marginals.items())},
            "evidence_probability": report.evidence_probability,
        }
        _emit(args, _dumps(payload))
    else:
        lines = [f"evidence probability: {report.evidence_probability:g}"]
        for v in sorted(marginals):
            pairs = ", ".join(
                f"{s}={p:g}" for s, p in zip(net.states(v), marginals[v])
            )
            lines.append(f"{v}: {pairs}")
        _emit(args, "\n".join(lines) + "\n")
    return 0


def _cmd_evidence_prob(args) -> int:
    net = _load_net(args.model)
    ev = _load_evidence(args.evidence) if args.evidence else EvidenceSet()
    mass = probability_of_evidence(net, ev)
    if args.json:
        _emit(args, _dumps({"evidence_probability": mass}))
    else:
        _emit(args, f"evidence probability: {mass:g}\n")
    return 0


def _cmd_oobn_flatten(args) -> int:
    model = _load(args.model, "oobn")
    _emit(args, _dumps(modelio.bn_to_payload(flatten(model))))
    return 0


def _cmd_ceg_build(args) -> int:
    st = _load(args.model, "staged_tree")
    _emit(args, _dumps(modelio.ceg_to_payload(to_ceg(st))))
    return 0


def _path_dict(path) -> dict:
    return {
        "labels": list(path.labels),
        "positions": list(path.positions),
        "probability": path.probability,
    }


def _path_lines(paths) -> str:
    return "\n".join(f"{p.probability:g}  " + " / ".join(p.labels) for p in paths) + "\n"


def _cmd_ceg_paths(args) -> int:
    c = _load(args.model, "ceg")
    paths = enumerate_paths(c)
    if args.json:
        payload = {
            "paths": [_path_dict(p) for p in paths],
            "total_probability": fsum(p.probability for p in paths),
        }
        _emit(args, _dumps(payload))
    else:
        _emit(args, _path_lines(paths))
    return 0


def _cmd_ceg_condition(args) -> int:
    c = _load(args.model, "ceg")
    try:
        predicate = json.loads(args.predicate)
    except json.JSONDecodeError as exc:
        raise ParseError(f"--predicate is not valid JSON: {exc}") from exc
    keep = path_predicate(predicate)
    kept_mass = fsum(p.probability for p in enumerate_paths(c) if keep(p))
    conditioned = condition(c, predicate)
    paths = enumerate_paths(conditioned)
    if args.json:
        payload = {
            "kept_mass": kept_mass,
            "paths": [_path_dict(p) for p in paths],
            "ceg": modelio.ceg_to_payload(conditioned),
        }
        _emit(args, _dumps(payload))
    else:
        _emit(args, f"kept mass: {kept_mass:g}\n" + _path_lines(paths))
    return 0


def _cmd_ceg_from_bn(args) -> int:
    net = _load(args.model, "bn")
    st = bn_to_ceg(net, order=args.order or None)
    _emit(args, _dumps(modelio.ceg_to_payload(to_ceg(st))))
    return 0


def _cmd_wigmore_relevance(args) -> int:
    chart = _load(args.model, "chart")
    partition = relevant_items(chart)
    if args.json:
        _emit(args, _dumps(partition.as_dict()))
    else:
        lines = [
            f"probandum: {partition.probandum}",
            "relevant: " + ", ".join(partition.relevant),
            "irrelevant: " + ", ".join(partition.irrelevant),
        ]
        _emit(args, "\n".join(lines) + "\n")
    return 0


def _cmd_wigmore_chains(args) -> int:
    chart = _load(args.model, "chart")
    chains = argument_chains(chart, args.node)
    if args.json:
        payload = {"item": args.node, "chains": [c.as_dict() for c in chains]}
        _emit(args, _dumps(payload))
    else:
        lines = []
        for chain in chains:
            steps = chain.nodes[0]
            for polarity, node in zip(chain.polarities, chain.nodes[1:]):
                steps += f" -[{polarity}]-> {node}"
            lines.append(steps)
        _emit(args, "\n".join(lines) + ("\n" if lines else ""))
    return 0


def _cmd_case_show(args) -> int:
    bundle = load_case_bundle(_case_dir(args))
    if args.item:
        item = get_item(bundle, args.item)
        if args.json:
            _emit(args, _dumps(item_to_payload(item)))
        else:
            page = f" (p. {item.page_ref})" if item.page_ref else ""
            flag = "" if item.canonical else "  [added by analysts]"
            _emit(args, f"{item.number}  [{item.kind}] {item.text}{page}{flag}\n")
        return 0
    if args.json:
        _emit(args, _dumps({"items": [item_to_payload(i) for i in bundle.items]}))
        return 0
    lines = [bundle.title]
    lines.append(
        "models: "
        + ", ".join(f"{mid} ({modelio.kind_of(m)})" for mid, m in sorted(bundle.models.items()))
    )
    lines.append("charts: " + ", ".join(sorted(bundle.charts)))
    lines.append(f"items: {len(bundle.items)}")
    for item in bundle.items:
        page = f" (p. {item.page_ref})" if item.page_ref else ""
        lines.append(f"  {item.number:<4} [{item.kind}] {item.text}{page}")
    _emit(args, "\n".join(lines) + "\n")
    return 0


def _cmd_case_crossref(args) -> int:
    bundle = load_case_bundle(_case_dir(args))
    refs = cross_reference(bundle, args.number)
    if args.json:
        payload = {
            "item": get_item(bundle, args.number).number,
            "references": [{"model": r.model, "element": r.element} for r in refs],
        }
        _emit(args, _dumps(payload))
    else:
        _emit(args, "".join(f"{r.model}: {r.element}\n" for r in refs))
    return 0


def _cmd_export_dot(args) -> int:
    model = _load(args.model)
    name = args.name or Path(args.model).stem.split(".")[0]
    dot = modelio.model_to_dot(model, name)
    if args.json:
        _emit(args, _dumps({"id": name, "dot": dot}))
    else:
        _emit(args, dot)
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    bind = args.bind or os.environ.get("EVIDENTIA_BIND") or "127.0.0.1:8000"
    host, _, port = bind.rpartition(":")
    if not port.isdigit():
        raise ParseError(f"bind address {bind!r} must look like HOST:PORT")
    app = create_app(
        case_dir=_case_dir(args), extra_models=args.model or (), dev=args.dev
    )
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
    return 0


# ---------------------------------------------------------------------------
# Parser


def _add_json(p: argparse.ArgumentParser) -> None:
    p.add_argument("--json", action="store_true", help="machine-readable output")


def _add_out(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", metavar="FILE", help="write output to FILE instead of stdout")


def _add_case(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--case",
        metavar="DIR",
        help="case bundle directory (default: $EVIDENTIA_CASE_DIR or the packaged bundle)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evidentia",
        description="Graphical legal-evidence models: validate, query, transform, serve.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a model file, exit 0 iff clean")
    p.add_argument("--model", required=True)
    _add_json(p)
    _add_out(p)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("ci", help="graphical conditional-independence query")
    p.add_argument("--model", required=True)
    p.add_argument("--a", action="append", required=True, help="first node set (repeatable)")
    p.add_argument("--b", action="append", required=True, help="second node set (repeatable)")
    p.add_argument("--given", action="append", help="conditioning set (repeatable)")
    _add_json(p)
    _add_out(p)
    p.set_defaults(func=_cmd_ci)

    p = sub.add_parser("infer", help="posterior marginals given an evidence file")
    p.add_argument("--model", required=True)
    p.add_argument("--evidence", help="evidence document (omit for priors)")
    p.add_argument("--node", action="append", help="restrict output to these nodes (repeatable)")
    _add_json(p)
    _add_out(p)
    p.set_defaults(func=_cmd_infer)

    p = sub.add_parser("evidence-prob", help="prior probability of an evidence file")
    p.add_argument("--model", required=True)
    p.add_argument("--evidence", help="evidence document (omit for the empty set)")
    _add_json(p)
    _add_out(p)
    p.set_defaults(func=_cmd_evidence_prob)

    oobn = sub.add_parser("oobn", help="object-oriented network operations").add_subparsers(
        dest="subcommand", required=True
    )
    p = oobn.add_parser("flatten", help="expand instances into one plain network document")
    p.add_argument("--model", required=True)
    _add_json(p)
    _add_out(p)
    p.set_defaults(func=_cmd_oobn_flatten)

    ceg = sub.add_parser("ceg", help="chain event graph operations").add_subparsers(
        dest="subcommand", required=True
    )
    p = ceg.add_parser("build", help="collapse a staged tree into a CEG document")
    p.add_argument("--model", required=True)
    _add_json(p)
    _add_out(p)
    p.set_defaults(func=_cmd_ceg_build)

    p = ceg.add_parser("paths", help="list every root-to-sink path with its probability")
    p.add_argument("--model", required=True)
    _add_json(p)
    _add_out(p)
    p.set_defaults(func=_cmd_ceg_paths)

    p = ceg.add_parser("condition", help="keep paths matching a predicate and renormalize")
    p.add_argument("--model", required=True)
    p.add_argument(
        "--predicate",
        required=True,
        help='JSON predicate, e.g. \'{"has_label": "D"}\' or \'{"not": {"through_position": "w1"}}\'',
    )
    _add_json(p)
    _add_out(p)
    p.set_defaults(func=_cmd_ceg_condition)

    p = ceg.add_parser("from-bn", help="unfold a Bayesian network into a CEG document")
    p.add_argument("--model", required=True)
    p.add_argument("--order", action="append", help="unfolding variable order (repeatable)")
    _add_json(p)
    _add_out(p)
    p.set_defaults(func=_cmd_ceg_from_bn)

    wigmore = sub.add_parser("wigmore", help="argument chart operations").add_subparsers(
        dest="subcommand", required=True
    )
    p = wigmore.add_parser("relevance", help="partition chart nodes by reachability")
    p.add_argument("--model", required=True)
    _add_json(p)
    _add_out(p)
    p.set_defaults(func=_cmd_wigmore_relevance)

    p = wigmore.add_parser("chains", help="argument chains from a node to the probandum")
    p.add_argument("--model", required=True)
    p.add_argument("--node", required=True)
    _add_json(p)
    _add_out(p)
    p.set_defaults(func=_cmd_wigmore_chains)

    case = sub.add_parser("case", help="case bundle queries").add_subparsers(
        dest="subcommand", required=True
    )
    p = case.add_parser("show", help="list the case's items and models")
    _add_case(p)
    p.add_argument("--item", help="show a single item by number")
    _add_json(p)
    _add_out(p)
    p.set_defaults(func=_cmd_case_show)

    p = case.add_parser("crossref", help="model elements encoding an evidence item")
    p.add_argument("number", help="evidence item number")
    _add_case(p)
    _add_json(p)
    _add_out(p)
    p.set_defaults(func=_cmd_case_crossref)

    export = sub.add_parser("export", help="export formats").add_subparsers(
        dest="subcommand", required=True
    )
    p = export.add_parser("dot", help="DOT text for any graph-bearing model")
    p.add_argument("--model", required=True)
    p.add_argument("--name", help="graph name (default: model file stem)")
    _add_json(p)
    _add_out(p)
    p.set_defaults(func=_cmd_export_dot)

    p = sub.add_parser("serve", help="start the HTTP query service")
    p.add_argument("--bind", metavar="HOST:PORT", help="default $EVIDENTIA_BIND or 127.0.0.1:8000")
    _add_case(p)
    p.add_argument("--model", action="append", metavar="FILE", help="serve an extra model file (repeatable)")
    p.add_argument("--dev", action="store_true", help="permissive CORS for local UI development")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except EvidentiaError as exc:
        print(f"error [{exc.kind}]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
