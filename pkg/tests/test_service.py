"""HTTP service: endpoint contracts, error mapping, statelessness."""

from __future__ import annotations

import json
from pathlib import Path

import jsonschema
import pytest
from fastapi.testclient import TestClient

from evidentia import schemas
from evidentia.service import create_app

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "evidentia" / "data" / "fixtures"


@pytest.fixture(scope="module")
def client() -> TestClient:
    app = create_app(
        extra_models=[FIXTURES / "testimony41.bn.json", FIXTURES / "knife.ceg.json"]
    )
    return TestClient(app)


def check(resp, schema: str, status: int = 200):
    assert resp.status_code == status, resp.text
    payload = resp.json()
    jsonschema.validate(payload, schemas.OUTPUTS[schema])
    return payload


class TestModels:
    def test_listing_includes_bundle_and_extra_models(self, client):
        payload = check(client.get("/api/v1/models"), "models_list")
        kinds = {m["id"]: m["kind"] for m in payload["models"]}
        assert kinds["kercher-bn"] == "bn"
        assert kinds["kercher-oobn"] == "oobn"
        assert kinds["kercher-ceg"] == "ceg"
        assert kinds["chart1"] == "chart"
        assert kinds["testimony41"] == "bn"
        assert kinds["knife"] == "ceg"

    def test_listing_is_sorted_by_id(self, client):
        payload = check(client.get("/api/v1/models"), "models_list")
        ids = [m["id"] for m in payload["models"]]
        assert ids == sorted(ids)


class TestCaseEndpoints:
    def test_items_collection(self, client):
        payload = check(client.get("/api/v1/case/items"), "case_items")
        assert len(payload["items"]) == 53

    def test_single_item(self, client):
        payload = check(client.get("/api/v1/case/items/25a"), "evidence_item")
        assert payload["number"] == "25a"
        assert payload["page_ref"] == "116"

    def test_unknown_item_is_404(self, client):
        payload = check(client.get("/api/v1/case/items/99"), "error", status=404)
        assert payload["error"]["kind"] == "UnknownItem"

    def test_crossref(self, client):
        payload = check(client.get("/api/v1/case/crossref/41"), "crossref")
        assert {"model": "kercher-bn", "element": "22, 41 & 43.41"} in payload["references"]

    def test_crossref_unknown_item_is_404(self, client):
        check(client.get("/api/v1/case/crossref/52"), "error", status=404)


class TestInfer:
    def test_fixture_posterior(self, client):
        payload = check(
            client.post("/api/v1/bn/testimony41/infer", json={"hard": {"41": "true"}}),
            "posterior_report",
        )
        assert payload["marginals"]["40"][0] == pytest.approx(9 / 11, abs=1e-9)
        assert payload["evidence_probability"] == pytest.approx(0.55, abs=1e-12)

    def test_empty_body_means_priors(self, client):
        payload = check(client.post("/api/v1/bn/testimony41/infer", json={}), "posterior_report")
        assert payload["marginals"]["40"] == [0.5, 0.5]
        assert payload["evidence_probability"] == 1.0

    def test_oobn_id_serves_the_flattened_network(self, client):
        payload = check(client.post("/api/v1/bn/kercher-oobn/infer", json={}), "posterior_report")
        assert "22, 41 & 43.41" in payload["marginals"]

    def test_nodes_restriction(self, client):
        payload = check(
            client.post(
                "/api/v1/bn/testimony41/infer",
                json={"hard": {"41": "true"}, "nodes": ["40"]},
            ),
            "posterior_report",
        )
        assert list(payload["marginals"]) == ["40"]

    def test_unknown_restriction_node_is_422(self, client):
        payload = check(
            client.post("/api/v1/bn/testimony41/infer", json={"nodes": ["nope"]}),
            "error",
            status=422,
        )
        assert payload["error"]["kind"] == "UnknownNode"

    def test_impossible_evidence_is_422(self, client):
        body = {"hard": {"S knife used?": "false", "S knife caused major wound?": "true"}}
        payload = check(
            client.post("/api/v1/bn/kercher-bn/infer", json=body), "error", status=422
        )
        assert payload["error"]["kind"] == "ImpossibleEvidence"

    def test_unknown_body_key_is_422(self, client):
        payload = check(
            client.post("/api/v1/bn/testimony41/infer", json={"evidence": {}}),
            "error",
            status=422,
        )
        assert payload["error"]["kind"] == "ParseError"

    def test_unknown_model_is_404(self, client):
        payload = check(client.post("/api/v1/bn/nope/infer", json={}), "error", status=404)
        assert payload["error"]["kind"] == "NotFound"

    def test_chart_id_is_not_in_the_bn_namespace(self, client):
        check(client.post("/api/v1/bn/chart1/infer", json={}), "error", status=404)

    def test_malformed_json_body_is_422(self, client):
        resp = client.post(
            "/api/v1/bn/testimony41/infer",
            content="{oops",
            headers={"content-type": "application/json"},
        )
        payload = check(resp, "error", status=422)
        assert payload["error"]["kind"] == "ParseError"


class TestCi:
    def test_dependent_pair(self, client):
        payload = check(
            client.post("/api/v1/bn/testimony41/ci", json={"a": ["40"], "b": ["41"]}),
            "ci_result",
        )
        assert payload == {"a": ["40"], "b": ["41"], "given": [], "independent": False}

    def test_conditioning_separates_testimonies(self, client):
        payload = check(
            client.post(
                "/api/v1/bn/kercher-bn/ci",
                json={"a": ["22, 41 & 43.22"], "b": ["22, 41 & 43.41"], "given": ["40"]},
            ),
            "ci_result",
        )
        assert payload["independent"] is True

    def test_missing_required_key_is_422(self, client):
        payload = check(
            client.post("/api/v1/bn/testimony41/ci", json={"a": ["40"]}),
            "error",
            status=422,
        )
        assert payload["error"]["kind"] == "ParseError"

    def test_non_string_entries_are_422(self, client):
        check(
            client.post("/api/v1/bn/testimony41/ci", json={"a": [1], "b": ["41"]}),
            "error",
            status=422,
        )


class TestCegEndpoints:
    def test_knife_paths(self, client):
        payload = check(client.get("/api/v1/ceg/knife/paths"), "ceg_paths")
        assert len(payload["paths"]) == 4
        assert payload["total_probability"] == pytest.approx(1.0, abs=1e-12)

    def test_corpus_ceg_paths(self, client):
        payload = check(client.get("/api/v1/ceg/kercher-ceg/paths"), "ceg_paths")
        assert len(payload["paths"]) == 96

    def test_condition_returns_pruned_summary(self, client):
        payload = check(
            client.post("/api/v1/ceg/knife/condition", json={"has_label": "D"}),
            "condition_report",
        )
        assert payload["kept_mass"] == pytest.approx(0.6, abs=1e-12)
        assert len(payload["paths"]) == 2
        assert all("D" in p["labels"] for p in payload["paths"])

    def test_condition_with_no_survivors_is_422(self, client):
        payload = check(
            client.post("/api/v1/ceg/knife/condition", json={"has_label": "Z"}),
            "error",
            status=422,
        )
        assert payload["error"]["kind"] == "NoSurvivingPath"

    def test_bad_predicate_is_422(self, client):
        payload = check(
            client.post("/api/v1/ceg/knife/condition", json={"frobnicate": "D"}),
            "error",
            status=422,
        )
        assert payload["error"]["kind"] in ("InvalidOrder", "ParseError")

    def test_bn_id_is_not_in_the_ceg_namespace(self, client):
        check(client.get("/api/v1/ceg/testimony41/paths"), "error", status=404)


class TestWigmoreEndpoints:
    def test_relevance(self, client):
        payload = check(client.get("/api/v1/wigmore/chart1/relevance"), "relevance")
        assert payload["probandum"] == "P"
        assert payload["relevant"] == ["SubP1", "SubP2"]
        assert "22" in payload["irrelevant"]

    def test_chains(self, client):
        payload = check(client.get("/api/v1/wigmore/chart2/chains/35"), "chains")
        assert payload["chains"] == [
            {"nodes": ["35", "34", "51", "SubP1"], "polarities": ["supports", "supports", "opposes"]}
        ]

    def test_unknown_chain_node_is_404(self, client):
        check(client.get("/api/v1/wigmore/chart2/chains/zz"), "error", status=404)

    def test_probandum_has_no_chains(self, client):
        payload = check(client.get("/api/v1/wigmore/chart1/chains/P"), "chains")
        assert payload["chains"] == []


class TestDotEndpoint:
    def test_every_registered_model_renders(self, client):
        for mid in ("kercher-bn", "kercher-oobn", "kercher-ceg", "chart1", "knife"):
            payload = check(client.get(f"/api/v1/graphs/{mid}/dot"), "dot")
            assert payload["id"] == mid
            assert payload["dot"].startswith(f'digraph "{mid}"')

    def test_unknown_graph_is_404(self, client):
        check(client.get("/api/v1/graphs/zz/dot"), "error", status=404)


class TestStatelessness:
    PROBE = (
        ("GET", "/api/v1/models", None),
        ("POST", "/api/v1/bn/testimony41/infer", {"hard": {"41": "true"}}),
        ("POST", "/api/v1/ceg/knife/condition", {"has_label": "D"}),
        ("GET", "/api/v1/ceg/knife/paths", None),
        ("POST", "/api/v1/bn/kercher-bn/infer", {"hard": {"40": "true"}}),
        ("GET", "/api/v1/wigmore/chart2/relevance", None),
        ("POST", "/api/v1/bn/nope/infer", {}),
    )

    def run_probe(self, client) -> list[bytes]:
        out = []
        for method, url, body in self.PROBE:
            resp = client.get(url) if method == "GET" else client.post(url, json=body)
            out.append(resp.content)
        return out

    def test_repeated_probe_returns_identical_bodies(self, client):
        assert self.run_probe(client) == self.run_probe(client)

    def test_conditioning_does_not_mutate_the_served_ceg(self, client):
        before = client.get("/api/v1/ceg/knife/paths").content
        client.post("/api/v1/ceg/knife/condition", json={"has_label": "D"})
        after = client.get("/api/v1/ceg/knife/paths").content
        assert before == after


class TestAppConfiguration:
    def test_missing_ui_dir_means_404_at_root(self, tmp_path):
        app = create_app(ui_dir=tmp_path / "absent")
        with TestClient(app) as c:
            assert c.get("/").status_code == 404

    def test_static_ui_is_served_when_present(self, tmp_path):
        (tmp_path / "index.html").write_text("<!doctype html><title>workbench</title>")
        app = create_app(ui_dir=tmp_path)
        with TestClient(app) as c:
            resp = c.get("/")
            assert resp.status_code == 200
            assert "workbench" in resp.text
            assert c.get("/api/v1/models").status_code == 200

    def test_cors_header_only_in_dev_mode(self, client, tmp_path):
        preflight = {"Origin": "http://localhost:5173", "Access-Control-Request-Method": "GET"}
        assert "access-control-allow-origin" not in client.options(
            "/api/v1/models", headers=preflight
        ).headers
        dev = TestClient(create_app(dev=True))
        resp = dev.options("/api/v1/models", headers=preflight)
        assert resp.headers.get("access-control-allow-origin") == "*"

    def test_duplicate_extra_model_id_fails_fast(self):
        with pytest.raises(Exception) as exc:
            create_app(
                extra_models=[FIXTURES / "knife.ceg.json", FIXTURES / "knife.ceg.json"]
            )
        assert "duplicate model id" in str(exc.value)

    def test_evidence_file_is_not_servable(self):
        with pytest.raises(Exception) as exc:
            create_app(extra_models=[FIXTURES / "ev41.json"])
        assert "not a servable model" in str(exc.value)
