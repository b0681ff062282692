"""Tests for the packaged Kercher case bundle and its loader."""

from __future__ import annotations

import re

import pytest

from evidentia import modelio
from evidentia.ceg import enumerate_paths
from evidentia.corpus import (
    CrossReference,
    EvidenceItem,
    cross_reference,
    default_case_dir,
    get_item,
    load_case_bundle,
    save_case_bundle,
)
from evidentia.errors import CrossrefError, ParseError, SubmodelInvalid, UnknownItem
from evidentia.oobn import flatten
from evidentia.wigmore import opposition_summary, relevant_items

TRUTH_TABLE = (
    (1.0, 0.0),
    (0.0, 1.0),
    (0.0, 1.0),
    (1.0, 0.0),
    (0.0, 1.0),
    (0.0, 1.0),
    (0.0, 1.0),
    (0.0, 1.0),
)

ROOT_PROPOSITIONS = {
    "Alternative knife used for both wounds",
    "S knife used for both wounds [40]",
    "S knife used for major wound only",
    "S knife used for minor wound only",
}


@pytest.fixture(scope="module")
def bundle():
    return load_case_bundle(default_case_dir())


class TestItems:
    def test_every_item_loads(self, bundle):
        assert len(bundle.items) == 53
        assert len({i.number for i in bundle.items}) == 53

    def test_lookup_accepts_numbers_and_strings(self, bundle):
        assert get_item(bundle, 13).text == (
            "Cause of death: from a non-serrated knife wound, together with "
            "strangulation, suffocation and haemorrhagic shock."
        )
        assert get_item(bundle, "13") is get_item(bundle, 13)
        assert get_item(bundle, 13).page_ref == "106"

    def test_interpolated_numbers(self, bundle):
        assert get_item(bundle, "25a").text == "Bacci's testimony to item 24."
        assert get_item(bundle, "25a").page_ref == "116"
        assert get_item(bundle, "30a").page_ref == "113"
        assert get_item(bundle, "37b").page_ref == "142"

    def test_unknown_item(self, bundle):
        with pytest.raises(UnknownItem):
            get_item(bundle, 99)

    def test_split_testimony_page_reference_is_preserved(self, bundle):
        assert get_item(bundle, 32).page_ref == "133/136"

    def test_analyst_additions_are_flagged(self, bundle):
        added = [i for i in bundle.items if i.added_by_analysts]
        assert [i.number for i in added] == ["51"]
        assert not added[0].canonical
        assert all(i.canonical for i in bundle.items if not i.added_by_analysts)

    def test_item_kinds_are_constrained(self):
        with pytest.raises(ParseError):
            EvidenceItem("x", "something", kind="rumour")


class TestMeasurements:
    def test_knife(self, bundle):
        assert bundle.knife.blade_length_cm == 17.5
        assert bundle.knife.width_cm == 3.0
        assert bundle.knife.thickness_mm == 1.5
        assert bundle.knife.striations_cm == (2.2, 11.4)

    def test_wounds(self, bundle):
        by_side = {w.side: w for w in bundle.wounds}
        left, right = by_side["left"], by_side["right"]
        assert left.fatal and not right.fatal
        assert (left.depth_cm, left.length_cm, left.width_cm) == (8.0, 8.0, 0.4)
        assert (right.depth_cm, right.length_cm, right.width_cm) == (4.0, 1.5, 0.4)

    def test_smaller_wound_is_narrower_than_the_blade(self, bundle):
        narrow = min(w.length_cm for w in bundle.wounds)
        assert narrow < bundle.knife.width_cm


class TestModels:
    def test_shipped_bn_is_the_flattened_oobn(self, bundle):
        assert bundle.models["kercher-bn"] == flatten(bundle.models["kercher-oobn"])

    def test_testimony_nodes_carry_qualified_names(self, bundle):
        nodes = bundle.models["kercher-bn"].dag.nodes
        assert {"22, 41 & 43.22", "22, 41 & 43.41", "22, 41 & 43.43"} <= nodes
        assert len(nodes) == 12

    def test_single_knife_testimony_table(self, bundle):
        cpt = bundle.models["kercher-bn"].cpt("22, 41 & 43.41")
        assert cpt.parents == ("40",)
        assert cpt.rows == ((0.9, 0.1), (0.2, 0.8))

    def test_smaller_wound_truth_table(self, bundle):
        cpt = bundle.models["kercher-bn"].cpt("S knife caused smaller wound?")
        assert cpt.parents == (
            "S knife used?",
            "S knife caused major wound?",
            "40",
        )
        assert cpt.rows == TRUTH_TABLE

    def test_ceg_opens_on_the_four_root_propositions(self, bundle):
        ceg = bundle.models["kercher-ceg"]
        assert {e.label for e in ceg.outgoing(ceg.root)} == ROOT_PROPOSITIONS
        assert all(e.probability == 0.25 for e in ceg.outgoing(ceg.root))

    def test_ceg_paths_cover_the_full_mass(self, bundle):
        paths = enumerate_paths(bundle.models["kercher-ceg"])
        assert len(paths) == 96
        assert sum(p.probability for p in paths) == pytest.approx(1.0, abs=1e-12)

    def test_ceg_bracket_tags_name_real_items(self, bundle):
        numbers = {i.number for i in bundle.items}
        for edge in bundle.models["kercher-ceg"].edges:
            tag = re.search(r"\[([^\]]+)\]$", edge.label)
            if tag:
                assert set(tag.group(1).split(", ")) <= numbers, edge.label

    def test_ceg_evidence_edges_are_marked(self, bundle):
        ceg = bundle.models["kercher-ceg"]
        by_label = {}
        for e in ceg.edges:
            by_label.setdefault(e.label, set()).add(e.evidence)
        assert by_label["Major wound measured 8 cm [26]"] == {True}
        assert by_label["Knife washed after the attack"] == {False}


class TestCharts:
    def test_chart1_composes_the_two_subprobanda(self, bundle):
        chart = bundle.charts["chart1"]
        assert chart.probandum == "P"
        polarity = {(e.tail, e.head): e.polarity for e in chart.edges}
        assert polarity[("SubP1", "P")] == "supports"
        assert polarity[("SubP2", "P")] == "opposes"

    def test_chart1_tray_items_are_disconnected(self, bundle):
        partition = relevant_items(bundle.charts["chart1"])
        assert set(partition.relevant) == {"SubP1", "SubP2"}
        assert "22" in partition.irrelevant

    def test_chart2_argument_balance(self, bundle):
        tally = opposition_summary(bundle.charts["chart2"])["SubP1"]
        assert (tally.supports, tally.opposes) == (14, 1)

    def test_chart_nodes_cite_their_items(self, bundle):
        for chart_id in ("chart2", "chart3"):
            chart = bundle.charts[chart_id]
            for node in chart.nodes:
                if node.kind not in ("probandum", "subprobandum"):
                    assert node.item_ref == node.id

    def test_chart3_attacks_via_the_minor_wound(self, bundle):
        chart = bundle.charts["chart3"]
        assert chart.probandum == "SubP2"
        tails = {e.tail for e in chart.edges if e.head == "24"}
        assert tails == {"25a", "25b", "28", "43", "47"}


class TestCrossReferences:
    def test_testimony_41_points_into_the_network(self, bundle):
        assert cross_reference(bundle, 41) == (
            CrossReference("kercher-bn", "22, 41 & 43.41"),
        )

    def test_single_knife_proposition_spans_two_models(self, bundle):
        refs = cross_reference(bundle, 40)
        assert set(refs) == {
            CrossReference("kercher-bn", "40"),
            CrossReference("kercher-ceg", "S knife used for both wounds [40]"),
        }

    def test_unreferenced_items_resolve_to_nothing(self, bundle):
        assert cross_reference(bundle, 1) == ()

    def test_lookup_of_unknown_item_still_fails(self, bundle):
        with pytest.raises(UnknownItem):
            cross_reference(bundle, "52")


class TestPersistence:
    def test_round_trip_is_the_identity(self, bundle, tmp_path):
        save_case_bundle(bundle, tmp_path)
        back = load_case_bundle(tmp_path)
        assert back.items == bundle.items
        assert back.knife == bundle.knife
        assert back.wounds == bundle.wounds
        assert dict(back.models) == dict(bundle.models)
        assert dict(back.charts) == dict(bundle.charts)
        assert dict(back.crossref) == dict(bundle.crossref)
        assert back.notes == bundle.notes
        assert back.title == bundle.title

    def test_missing_named_file(self, bundle, tmp_path):
        save_case_bundle(bundle, tmp_path)
        (tmp_path / bundle.files["items"]).unlink()
        with pytest.raises(ParseError, match="missing file"):
            load_case_bundle(tmp_path)

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(ParseError, match="no case manifest"):
            load_case_bundle(tmp_path)

    def test_duplicate_item_numbers_rejected(self, bundle, tmp_path):
        save_case_bundle(bundle, tmp_path)
        path = tmp_path / bundle.files["items"]
        records = modelio.read_json(path)
        records.append(dict(records[0]))
        modelio.write_json(path, records)
        with pytest.raises(ParseError, match="duplicate"):
            load_case_bundle(tmp_path)

    def test_dangling_crossref_target(self, bundle, tmp_path):
        save_case_bundle(bundle, tmp_path)
        manifest = modelio.read_json(tmp_path / "case.json")
        manifest["crossref"]["41"][0]["element"] = "no such node"
        modelio.write_json(tmp_path / "case.json", manifest)
        with pytest.raises(CrossrefError, match="missing element"):
            load_case_bundle(tmp_path)

    def test_crossref_to_unknown_item(self, bundle, tmp_path):
        save_case_bundle(bundle, tmp_path)
        manifest = modelio.read_json(tmp_path / "case.json")
        manifest["crossref"]["99"] = [{"model": "kercher-bn", "element": "40"}]
        modelio.write_json(tmp_path / "case.json", manifest)
        with pytest.raises(CrossrefError, match="unknown item"):
            load_case_bundle(tmp_path)

    def test_invalid_submodel_is_reported_not_loaded(self, bundle, tmp_path):
        save_case_bundle(bundle, tmp_path)
        path = tmp_path / bundle.files["chart3"]
        chart = modelio.read_json(path)
        for node in chart["nodes"]:
            if node["id"] == "25a":
                del node["item_ref"]
        modelio.write_json(path, chart)
        with pytest.raises(SubmodelInvalid, match="unsourced-testimony"):
            load_case_bundle(tmp_path)

    def test_unknown_manifest_keys_rejected(self, bundle, tmp_path):
        save_case_bundle(bundle, tmp_path)
        manifest = modelio.read_json(tmp_path / "case.json")
        manifest["editor"] = "someone"
        modelio.write_json(tmp_path / "case.json", manifest)
        with pytest.raises(ParseError, match="unknown keys"):
            load_case_bundle(tmp_path)
