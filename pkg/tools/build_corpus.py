#!/usr/bin/env python3
"""Regenerate the shipped Kercher corpus and the small test fixtures.

Run from the repository root:

    python3 tools/build_corpus.py

Writes ``src/evidentia/data/kercher/`` and ``src/evidentia/data/fixtures/``,
then reloads the bundle as a self-check.  Output is deterministic, so a
clean run leaves the working tree unchanged.
"""

from __future__ import annotations

import sys
from collections import defaultdict
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from evidentia import modelio
from evidentia.bn import Cpt, StateSpace
from evidentia.ceg import (
    StagedTree,
    assign_stage,
    build_event_tree,
    enumerate_paths,
    set_stage_probabilities,
    to_ceg,
)
from evidentia.corpus import (
    CaseBundle,
    CrossReference,
    EvidenceItem,
    KnifeSpec,
    WoundSpec,
    load_case_bundle,
    save_case_bundle,
)
from evidentia.oobn import InstanceSpec, NetworkClass, OobnModel, flatten
from evidentia.wigmore import ChartEdge, ChartNode, build_chart, opposition_summary

BOOL = ("true", "false")
COMPAT = ("compatible", "incompatible")

# ---------------------------------------------------------------------------
# Evidence items (number, kind, text, page_ref)

ITEMS = [
    ("1", "proposition", "Knox recognised the knife (exhibit 36)", None),
    ("2", "testimony", "Knox's admission to 1 (in interrogation of 12-13 June 2009)", "63"),
    ("3", "proposition", "Knox had used the knife in Sollecito's house for cooking in his kitchen.", "63"),
    ("4", "testimony", "Knox statement as to item 3.", "63"),
    ("5", "proposition", "Knox had never carried the knife elsewhere.", "63"),
    ("6", "testimony", "Knox statement as to item 5.", "63"),
    ("7", "evidence", "There was blood on a knife found at Sollecito's house.", None),
    ("8", "proposition", "An inspector told Knox about item 7. in prison.", None),
    ("9", "proposition", "Knox was worried about item 7.", None),
    ("10", "testimony", "Knox's statement as to items 8. and 9. in a prison conversation between Knox and her mother.", "66"),
    ("11", "evidence", "Knife in Sollecito's kitchen drawer appeared to be very clean and was put in a clean envelope.", None),
    ("12", "testimony", "Police statement as to item 11.", "99"),
    ("13", "evidence", "Cause of death: from a non-serrated knife wound, together with strangulation, suffocation and haemorrhagic shock.", "106"),
    ("14", "evidence", "The hyoid bone was fractured.", None),
    ("15", "proposition", "Item 14. was compatible both with strangulation and with penetration by a knife.", None),
    ("16", "testimony", "Lalli autopsy report as to item 14.", "113"),
    ("17", "testimony", "Liviero gave a 50% chance that item 14. could have been caused by one or two people.", "113"),
    ("18", "proposition", "Exhibit 36 is compatible with the major wound.", None),
    ("19", "testimony", "Lalli's testimony to item 18.", "113"),
    ("20", "evidence", "The knife had striations on the blade", None),
    ("21", "testimony", "Liviero's testimony to item 20.", "113"),
    ("22", "testimony", "Liviero could not state whether one or more persons committed crime.", "113"),
    ("23", "testimony", "Bacci's testimony to item 18.", "116"),
    ("24", "proposition", "Second wound on right side of neck incompatible with knife as this wound was 1.5 cm long and Exhibit 36 is at least 3 cm wide.", None),
    ("25a", "testimony", "Bacci's testimony to item 24.", "116"),
    ("25b", "testimony", "Torre's testimony to item 24.", "142"),
    ("26", "proposition", "Major left side neck wound, 8 cm long, can be made by a 3 cm wide knife (by rotation)", None),
    ("27", "testimony", "Norelli's testimony to item 26.", "121"),
    ("28", "testimony", "Norelli's testimony to item 24.", "122"),
    ("29", "proposition", "Whole length of knife entered major wound.", None),
    ("30", "proposition", "There was bruising at the major wound.", None),
    ("30a", "testimony", "Liviero's denial of item 30.", "113"),
    ("31", "proposition", "The bruising was caused by the knife handle.", None),
    ("32", "testimony", "Introna's (defence) assertion of items 29., 30. and 31.", "133/136"),
    ("33", "testimony", "Introna's denial of 18, on account of items 29. and 31.", None),
    ("34", "proposition", "Knife penetrated at least 2-3 times in major wound.", None),
    ("35", "testimony", "Torre's (defence) testimony as to item 34.", "141"),
    ("36", "proposition", "A 17 cm knife would have gone right through the victim's neck and not made only an 8cm wound.", None),
    ("37a", "testimony", "Introna (defence) assertion of 36 and consequent denial of 18.", "132"),
    ("37b", "testimony", "Torre (defence) assertion of 36 and consequent denial of 18.", "142"),
    ("38", "evidence", "Traces of blood on mattress cover, made by a knife of maximum width 1.4cm.", None),
    ("39", "testimony", "Vinci's testimony to item 38.", "146"),
    ("40", "proposition", "A single knife was used.", None),
    ("41", "testimony", "Vinci's testimony of compatibility with item 40.", "146"),
    ("42", "testimony", "Ronchi's testimony of compatibility with item 40 (and with exhibit 36).", "148"),
    ("43", "testimony", "Cingolani's testimony to item 24.", "151"),
    ("44", "testimony", "Cingolani testimony to item 18.", "153"),
    ("45", "testimony", "Cingolani not sure about item 31.", "153"),
    ("46", "testimony", "Cingolani could not see striations (cf item 20.).", "153"),
    ("47", "testimony", "Patumi's testimony to item 24.", "156"),
    ("48", "testimony", "Patumi's testimony to item 30.", "156"),
    ("49", "testimony", "Patumi considers item 31. probable.", "156"),
]

ADDED_ITEMS = [
    ("51", "proposition", "The fatal knife is smaller than Sollecito's knife.", None),
]


def build_items() -> tuple[EvidenceItem, ...]:
    items = [
        EvidenceItem(number, text, kind=kind, page_ref=page, canonical=True)
        for number, kind, text, page in ITEMS
    ]
    items += [
        EvidenceItem(number, text, kind=kind, page_ref=page, canonical=False, added_by_analysts=True)
        for number, kind, text, page in ADDED_ITEMS
    ]
    return tuple(items)


# ---------------------------------------------------------------------------
# Object-oriented Bayesian network

S_CAUSED = "S knife caused wound?"
S_CHAR = "Characteristics of S knife"
ALT_CHAR = "Characteristics of alternative knife"
WOUND_CHAR = "Characteristics of knife used on wound"


def whoseknife_class() -> NetworkClass:
    # The knife actually used inherits the characteristics of whichever
    # knife caused the wound: Sollecito's when "caused" is true, the
    # alternative otherwise.
    rows = []
    for caused in (True, False):
        for s_char in range(2):
            for alt_char in range(2):
                picked = s_char if caused else alt_char
                rows.append((1.0, 0.0) if picked == 0 else (0.0, 1.0))
    return NetworkClass(
        "whoseknife",
        nodes=(StateSpace(WOUND_CHAR, COMPAT),),
        cpts=(Cpt(WOUND_CHAR, (S_CAUSED, S_CHAR, ALT_CHAR), tuple(rows)),),
        inputs=(
            StateSpace(S_CAUSED, BOOL),
            StateSpace(S_CHAR, COMPAT),
            StateSpace(ALT_CHAR, COMPAT),
        ),
        outputs=(WOUND_CHAR,),
    )


def testimony_class() -> NetworkClass:
    return NetworkClass(
        "testimony224143",
        nodes=(StateSpace("22", BOOL), StateSpace("41", BOOL), StateSpace("43", BOOL)),
        cpts=(
            Cpt("22", ("40",), ((0.7, 0.3), (0.4, 0.6))),
            Cpt("41", ("40",), ((0.9, 0.1), (0.2, 0.8))),
            Cpt(
                "43",
                ("40", S_CHAR),
                ((0.9, 0.1), (0.5, 0.5), (0.4, 0.6), (0.1, 0.9)),
            ),
        ),
        inputs=(StateSpace("40", BOOL), StateSpace(S_CHAR, COMPAT)),
    )


# Parents in order: S knife used?, S knife caused major wound?, 40.
# TTT -> T, TTF -> F, TFT -> F, TFF -> T, and false on the first
# coordinate forces false.
SMALLER_WOUND_TABLE = (
    (1.0, 0.0),
    (0.0, 1.0),
    (0.0, 1.0),
    (1.0, 0.0),
    (0.0, 1.0),
    (0.0, 1.0),
    (0.0, 1.0),
    (0.0, 1.0),
)


def kercher_oobn() -> OobnModel:
    top = NetworkClass(
        "kercher",
        nodes=(
            StateSpace("S knife used?", BOOL),
            StateSpace("40", BOOL),
            StateSpace(S_CHAR, COMPAT),
            StateSpace("Alternative knife (major wound)", COMPAT),
            StateSpace("Alternative knife (smaller wound)", COMPAT),
            StateSpace("S knife caused major wound?", BOOL),
            StateSpace("S knife caused smaller wound?", BOOL),
        ),
        cpts=(
            Cpt("S knife used?", (), ((0.5, 0.5),)),
            Cpt("40", (), ((0.5, 0.5),)),
            Cpt(S_CHAR, (), ((0.5, 0.5),)),
            Cpt("Alternative knife (major wound)", (), ((0.3, 0.7),)),
            Cpt("Alternative knife (smaller wound)", (), ((0.3, 0.7),)),
            Cpt("S knife caused major wound?", ("S knife used?",), ((0.7, 0.3), (0.0, 1.0))),
            Cpt(
                "S knife caused smaller wound?",
                ("S knife used?", "S knife caused major wound?", "40"),
                SMALLER_WOUND_TABLE,
            ),
        ),
        instances=(
            InstanceSpec(
                "Characteristics of knife used on major wound",
                "whoseknife",
                {
                    S_CAUSED: "S knife caused major wound?",
                    S_CHAR: S_CHAR,
                    ALT_CHAR: "Alternative knife (major wound)",
                },
            ),
            InstanceSpec(
                "Characteristics of knife used on smaller wound",
                "whoseknife",
                {
                    S_CAUSED: "S knife caused smaller wound?",
                    S_CHAR: S_CHAR,
                    ALT_CHAR: "Alternative knife (smaller wound)",
                },
            ),
            InstanceSpec(
                "22, 41 & 43",
                "testimony224143",
                {"40": "40", S_CHAR: S_CHAR},
            ),
        ),
    )
    return OobnModel((whoseknife_class(), testimony_class()), top)


# ---------------------------------------------------------------------------
# Chain event graph
#
# Four opening propositions, then per-branch storylines: major-wound
# mechanics, exit-wound evidence, the agreed wound measurement, the
# mattress imprint, and the washed-or-not blood storyline.

PROPOSITIONS = (
    "Alternative knife used for both wounds",
    "S knife used for both wounds [40]",
    "S knife used for major wound only",
    "S knife used for minor wound only",
)

MECH = (
    "Knife fully inserted and rotated [26, 29, 31]",
    "Knife fully inserted, not rotated [29]",
    "Knife partially inserted [34]",
)
EXIT = ("No exit wound found [36]", "Exit wound found [36]")
W8 = "Major wound measured 8 cm [26]"
IMPRINT = (
    "Mattress imprint at most 1.4 cm wide [38]",
    "Mattress imprint wider than 1.4 cm [38]",
)
WASH = ("Knife washed after the attack", "Knife not washed")
CLEAN = "Knife in drawer appeared very clean [11]"
BLOOD = ("Blood traces found on knife [7]", "No blood traces found on knife [7]")
INSPECTOR = "Inspector told Knox about the blood [8]"

STAGE_PROBABILITIES = {
    "u-props": dict(zip(PROPOSITIONS, (0.25, 0.25, 0.25, 0.25))),
    "u-mech-s": dict(zip(MECH, (0.3, 0.1, 0.6))),
    "u-mech-alt": dict(zip(MECH, (0.3, 0.4, 0.3))),
    "u-exit-s": dict(zip(EXIT, (0.2, 0.8))),
    "u-exit-alt": dict(zip(EXIT, (0.7, 0.3))),
    "u-w8": {W8: 1.0},
    "u-imprint-s": dict(zip(IMPRINT, (0.15, 0.85))),
    "u-imprint-alt": dict(zip(IMPRINT, (0.6, 0.4))),
    "u-wash": dict(zip(WASH, (0.5, 0.5))),
    "u-clean": {CLEAN: 1.0},
    "u-blood-s": dict(zip(BLOOD, (0.8, 0.2))),
    "u-blood-alt": dict(zip(BLOOD, (0.05, 0.95))),
    "u-inspector": {INSPECTOR: 1.0},
}


def kercher_staged_tree() -> StagedTree:
    edges: list[tuple[str, str, str, bool]] = []
    members: dict[str, list[str]] = defaultdict(list)
    counter = 0

    def fresh() -> str:
        nonlocal counter
        counter += 1
        return f"v{counter}"

    def attach(tail: str, stage: str, labels, evidence: bool) -> list[str]:
        members[stage].append(tail)
        heads = []
        for label in labels:
            head = fresh()
            edges.append((tail, head, label, evidence))
            heads.append(head)
        return heads

    root = "v0"
    branch_heads = attach(root, "u-props", PROPOSITIONS, False)
    for index, mech_vertex in enumerate(branch_heads):
        s_made_major = index in (1, 2)
        s_involved = index != 0
        knife = "s" if s_made_major else "alt"
        story = "s" if s_involved else "alt"
        rotated, straight, partial = attach(
            mech_vertex, f"u-mech-{knife}", MECH, False
        )
        continuations = [rotated, partial]
        continuations += attach(straight, f"u-exit-{knife}", EXIT, True)
        for vertex in continuations:
            (measured,) = attach(vertex, "u-w8", (W8,), True)
            for imprint in attach(measured, f"u-imprint-{story}", IMPRINT, True):
                washed, kept = attach(imprint, "u-wash", WASH, False)
                attach(washed, "u-clean", (CLEAN,), True)
                bloody, _clean = attach(kept, f"u-blood-{story}", BLOOD, True)
                attach(bloody, "u-inspector", (INSPECTOR,), True)

    st = StagedTree.discrete(build_event_tree(edges, root=root))
    for stage_id, vertices in members.items():
        st = assign_stage(st, vertices, stage_id=stage_id)
        st = set_stage_probabilities(st, stage_id, STAGE_PROBABILITIES[stage_id])
    return st


# ---------------------------------------------------------------------------
# Wigmore charts

PROBANDUM = "P"
P_TEXT = "The use of Sollecito's knife is consistent with Kercher's wounds"
SUBP1_TEXT = "Sollecito's knife is consistent with Kercher's major wound"
SUBP2_TEXT = "Kercher's minor wound is incompatible with the use of Sollecito's knife"

CHART_KIND = {"testimony": "testimony", "evidence": "evidence", "proposition": "inference_step"}

CHART1_TRAY = (
    "1", "2", "3", "4", "5", "6", "7", "8", "9", "10", "11", "12",
    "14", "15", "16", "17", "20", "21", "22", "46",
)

CHART2_EDGES = (
    ("18", "SubP1", "supports"),
    ("19", "18", "supports"),
    ("23", "18", "supports"),
    ("44", "18", "supports"),
    ("26", "18", "supports"),
    ("27", "26", "supports"),
    ("29", "36", "supports"),
    ("31", "29", "supports"),
    ("30", "31", "supports"),
    ("30a", "30", "opposes"),
    ("32", "29", "supports"),
    ("32", "30", "supports"),
    ("32", "31", "supports"),
    ("48", "30", "supports"),
    ("49", "31", "supports"),
    ("45", "31", "opposes"),
    ("36", "18", "opposes"),
    ("37a", "36", "supports"),
    ("37b", "36", "supports"),
    ("33", "18", "opposes"),
    ("35", "34", "supports"),
    ("34", "51", "supports"),
    ("51", "SubP1", "opposes"),
)

CHART3_EDGES = (
    ("24", "SubP2", "supports"),
    ("25a", "24", "supports"),
    ("25b", "24", "supports"),
    ("28", "24", "supports"),
    ("43", "24", "supports"),
    ("47", "24", "supports"),
)


def _item_node(items: dict[str, EvidenceItem], number: str) -> ChartNode:
    item = items[number]
    return ChartNode(number, CHART_KIND[item.kind], item.text, item_ref=number)


def build_charts(items: tuple[EvidenceItem, ...]):
    by_number = {i.number: i for i in items}
    chart1 = build_chart(
        [
            ChartNode(PROBANDUM, "probandum", P_TEXT),
            ChartNode("SubP1", "subprobandum", SUBP1_TEXT),
            ChartNode("SubP2", "subprobandum", SUBP2_TEXT),
            *(_item_node(by_number, n) for n in CHART1_TRAY),
        ],
        [
            ChartEdge("SubP1", PROBANDUM, "supports"),
            ChartEdge("SubP2", PROBANDUM, "opposes"),
        ],
        PROBANDUM,
    )
    chart2_items = sorted({n for edge in CHART2_EDGES for n in edge[:2]} - {"SubP1"})
    chart2 = build_chart(
        [
            ChartNode("SubP1", "subprobandum", SUBP1_TEXT),
            *(_item_node(by_number, n) for n in chart2_items),
        ],
        [ChartEdge(t, h, p) for t, h, p in CHART2_EDGES],
        "SubP1",
    )
    chart3_items = sorted({n for edge in CHART3_EDGES for n in edge[:2]} - {"SubP2"})
    chart3 = build_chart(
        [
            ChartNode("SubP2", "subprobandum", SUBP2_TEXT),
            *(_item_node(by_number, n) for n in chart3_items),
        ],
        [ChartEdge(t, h, p) for t, h, p in CHART3_EDGES],
        "SubP2",
    )
    return chart1, chart2, chart3


# ---------------------------------------------------------------------------
# Cross-references

CROSSREF = {
    "7": [("kercher-ceg", BLOOD[0])],
    "8": [("kercher-ceg", INSPECTOR)],
    "11": [("kercher-ceg", CLEAN)],
    "18": [("chart2", "18"), ("kercher-bn", S_CHAR)],
    "19": [("chart2", "19")],
    "22": [("kercher-bn", "22, 41 & 43.22")],
    "23": [("chart2", "23")],
    "24": [("chart3", "24")],
    "25a": [("chart3", "25a")],
    "25b": [("chart3", "25b")],
    "26": [("chart2", "26"), ("kercher-ceg", W8)],
    "27": [("chart2", "27")],
    "28": [("chart3", "28")],
    "29": [("chart2", "29"), ("kercher-ceg", MECH[1])],
    "30": [("chart2", "30")],
    "30a": [("chart2", "30a")],
    "31": [("chart2", "31"), ("kercher-ceg", MECH[0])],
    "32": [("chart2", "32")],
    "33": [("chart2", "33")],
    "34": [("chart2", "34"), ("kercher-ceg", MECH[2])],
    "35": [("chart2", "35")],
    "36": [("chart2", "36"), ("kercher-ceg", EXIT[0])],
    "37a": [("chart2", "37a")],
    "37b": [("chart2", "37b")],
    "38": [("kercher-ceg", IMPRINT[0])],
    "40": [("kercher-bn", "40"), ("kercher-ceg", PROPOSITIONS[1])],
    "41": [("kercher-bn", "22, 41 & 43.41")],
    "43": [("kercher-bn", "22, 41 & 43.43"), ("chart3", "43")],
    "44": [("chart2", "44")],
    "45": [("chart2", "45")],
    "47": [("chart3", "47")],
    "48": [("chart2", "48")],
    "49": [("chart2", "49")],
    "51": [("chart2", "51")],
}

NOTES = (
    "Priors and CPT entries other than the testimony-41 values and the smaller-wound truth table are nominal placeholders.",
    "Chart membership and the CEG interior are an interpretation of the trial-record prose; the source figures were not recoverable.",
    "Item 51 was added by the analysts as an explicit inference step; it is not part of the court record.",
)


def build_bundle() -> CaseBundle:
    items = build_items()
    oobn = kercher_oobn()
    ceg = to_ceg(kercher_staged_tree())
    chart1, chart2, chart3 = build_charts(items)
    return CaseBundle(
        title="Kercher knife evidence (first trial)",
        items=items,
        knife=KnifeSpec(17.5, 3.0, 1.5, (2.2, 11.4)),
        wounds=(
            WoundSpec("left", 8.0, 8.0, 0.4, fatal=True),
            WoundSpec("right", 4.0, 1.5, 0.4, fatal=False),
        ),
        models={
            "kercher-bn": flatten(oobn),
            "kercher-oobn": oobn,
            "kercher-ceg": ceg,
        },
        charts={"chart1": chart1, "chart2": chart2, "chart3": chart3},
        crossref={
            number: tuple(CrossReference(m, e) for m, e in refs)
            for number, refs in CROSSREF.items()
        },
        files={
            "items": "items.json",
            "measurements": "measurements.json",
            "kercher-bn": "kercher.bn.json",
            "kercher-oobn": "kercher.oobn.json",
            "kercher-ceg": "kercher.ceg.json",
            "chart1": "chart1.json",
            "chart2": "chart2.json",
            "chart3": "chart3.json",
        },
        notes=NOTES,
    )


# ---------------------------------------------------------------------------
# Fixtures

KNIFE_CEG_FIXTURE = {
    "format_version": "1",
    "kind": "ceg",
    "root": "w0",
    "sink": "w_inf",
    "vertices": ["w0", "w1", "w_inf"],
    "edges": [
        {"tail": "w0", "head": "w1", "label": "S1"},
        {"tail": "w0", "head": "w1", "label": "S2"},
        {"tail": "w1", "head": "w_inf", "label": "D"},
        {"tail": "w1", "head": "w_inf", "label": "C"},
    ],
    "stages": [
        {"id": "u0", "members": ["w0"], "slots": ["S1", "S2"]},
        {"id": "u1", "members": ["w1"], "slots": ["C", "D"]},
    ],
    "stage_probabilities": {
        "u0": {"S1": 0.3, "S2": 0.7},
        "u1": {"D": 0.6, "C": 0.4},
    },
}


def write_fixtures(directory: Path) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    two_node = {
        "format_version": "1",
        "kind": "bn",
        "nodes": [
            {"id": "40", "states": ["true", "false"]},
            {"id": "41", "states": ["true", "false"]},
        ],
        "edges": [{"tail": "40", "head": "41"}],
        "cpts": [
            {"node": "40", "parents": [], "rows": [[0.5, 0.5]]},
            {"node": "41", "parents": ["40"], "rows": [[0.9, 0.1], [0.2, 0.8]]},
        ],
    }
    modelio.write_json(directory / "testimony41.bn.json", two_node)
    modelio.write_json(
        directory / "ev41.json",
        {"format_version": "1", "kind": "evidence", "hard": {"41": "true"}, "soft": {}},
    )
    modelio.write_json(directory / "knife.ceg.json", KNIFE_CEG_FIXTURE)


def main() -> None:
    data = ROOT / "src" / "evidentia" / "data"
    bundle = build_bundle()
    save_case_bundle(bundle, data / "kercher")
    write_fixtures(data / "fixtures")

    reloaded = load_case_bundle(data / "kercher")
    assert reloaded.items == bundle.items
    assert reloaded.knife == bundle.knife
    assert reloaded.wounds == bundle.wounds
    assert dict(reloaded.models) == dict(bundle.models)
    assert dict(reloaded.charts) == dict(bundle.charts)
    assert dict(reloaded.crossref) == dict(bundle.crossref)

    ceg = reloaded.models["kercher-ceg"]
    paths = enumerate_paths(ceg)
    print(f"items: {len(reloaded.items)}")
    print(f"bn nodes: {len(reloaded.models['kercher-bn'].dag.nodes)}")
    print(f"ceg positions: {len(ceg.positions)}, edges: {len(ceg.edges)}, paths: {len(paths)}")
    print(f"ceg path mass: {sum(p.probability for p in paths):.12f}")
    print(f"chart2 tallies: {opposition_summary(reloaded.charts['chart2'])['SubP1']}")


if __name__ == "__main__":
    main()
