"""HTTP service tests: endpoint shapes, domain-error mapping, and the
data-source fallback rules of create_app."""

import pytest
from fastapi.testclient import TestClient

from clinsearch.api import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


@pytest.fixture(scope="module")
def client_no_claims():
    return TestClient(create_app(claims_path=""))


class TestHealth:
    def test_reports_loaded_data(self, client):
        payload = client.get("/health").json()
        assert payload == {
            "status": "ok",
            "dataset": "icd_sample",
            "nodes": 832,
            "claims_rows": 60,
        }

    def test_zero_rows_when_claims_disabled(self, client_no_claims):
        payload = client_no_claims.get("/health").json()
        assert payload["claims_rows"] == 0


class TestSearch:
    def test_hybrid_family_for_known_term(self, client):
        response = client.post("/search", json={"query": "sepsis"})
        assert response.status_code == 200
        payload = response.json()
        assert payload["status"] == "found"
        assert payload["best_score"] > 0
        codes = [m["code"] for g in payload["groups"] for m in g["matches"]]
        assert codes[0] == "D89"
        assert all(code.startswith("D89") for code in codes)
        kinds = {m["kind"] for g in payload["groups"] for m in g["matches"]}
        assert kinds == {"exact"}

    def test_divergent_node_reachable_by_hybrid(self, client):
        payload = client.post(
            "/search", json={"query": "barrett crohn syndrome"}
        ).json()
        codes = [m["code"] for g in payload["groups"] for m in g["matches"]]
        assert "A00.3" in codes

    def test_seed_does_not_change_the_answer(self, client):
        results = [
            client.post(
                "/search",
                json={"query": "barrett crohn syndrome", "seed": seed},
            ).json()
            for seed in (0, 1, 7)
        ]
        assert results[0] == results[1] == results[2]

    def test_default_predictor_misses_divergent_node(self, client):
        payload = client.post(
            "/search",
            json={"query": "barrett crohn syndrome", "predictor": "default"},
        ).json()
        codes = [m["code"] for g in payload["groups"] for m in g["matches"]]
        assert "A00.3" not in codes

    def test_scan_predictor_finds_it(self, client):
        payload = client.post(
            "/search",
            json={"query": "barrett crohn syndrome", "predictor": "scan"},
        ).json()
        codes = [m["code"] for g in payload["groups"] for m in g["matches"]]
        assert "A00.3" in codes

    def test_not_found_shape(self, client):
        payload = client.post("/search", json={"query": "zzzqqq xxyyzz"}).json()
        assert payload == {"status": "not_found", "best_score": None, "groups": []}

    def test_empty_query_maps_to_400(self, client):
        response = client.post("/search", json={"query": "   "})
        assert response.status_code == 400
        assert "detail" in response.json()

    def test_unknown_predictor_rejected_by_validation(self, client):
        response = client.post(
            "/search", json={"query": "sepsis", "predictor": "psychic"}
        )
        assert response.status_code == 422


class TestQuery:
    def test_demographic_question(self, client):
        response = client.post(
            "/query", json={"question": "patients under 50 in Washington"}
        )
        assert response.status_code == 200
        payload = response.json()
        assert payload["question"] == "patients under 50 in Washington"
        assert payload["expression"] == "AND(age<50, state=washington)"
        assert payload["families"] == {}
        assert payload["row_count"] == 5
        assert [row["patient_id"] for row in payload["rows"]] == [
            "P0001", "P0011", "P0021", "P0031", "P0051",
        ]
        assert payload["elapsed_ms"] >= 0.0

    def test_disease_question_reports_family(self, client):
        payload = client.post(
            "/query", json={"question": "show patients with sepsis"}
        ).json()
        assert payload["families"] == {
            "sepsis": ["D89", "D89.0", "D89.1", "D89.2", "D89.3"]
        }
        assert payload["row_count"] == len(payload["rows"])

    def test_without_claims_is_400(self, client_no_claims):
        response = client_no_claims.post(
            "/query", json={"question": "patients under 50"}
        )
        assert response.status_code == 400
        assert response.json() == {"detail": "no claims table loaded"}

    def test_empty_question_maps_to_400(self, client):
        response = client.post("/query", json={"question": "?!"})
        assert response.status_code == 400


class TestCodes:
    def test_family_lookup(self, client):
        payload = client.get("/codes/D89").json()
        assert payload["code"] == "D89"
        assert payload["depth"] == 0
        assert payload["parent"] is None
        assert set(payload["children"]) <= set(payload["descendants"])
        assert len(payload["descendants"]) == 4

    def test_unknown_code_is_404(self, client):
        response = client.get("/codes/ZZZ99")
        assert response.status_code == 404
        assert "detail" in response.json()


class TestCreateAppFallbacks:
    def test_env_ontology_override(self, tmp_path, monkeypatch):
        custom = tmp_path / "tiny.tsv"
        custom.write_text("A00\t0\tcholera\nA00.0\t1\tclassical cholera\n")
        monkeypatch.setenv("CLINSEARCH_ONTOLOGY", str(custom))
        monkeypatch.setenv("CLINSEARCH_CLAIMS", "")
        monkeypatch.setenv("CLINSEARCH_RANGES", "")
        with TestClient(create_app()) as test_client:
            payload = test_client.get("/health").json()
        assert payload["dataset"] == "tiny"
        assert payload["nodes"] == 2
        assert payload["claims_rows"] == 0

    def test_missing_explicit_path_fails_fast(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            create_app(claims_path=str(tmp_path / "missing.csv"))
