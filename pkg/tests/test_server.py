import hashlib
import json
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from polyrec.pipeline import PipelineConfig, run_pipeline
from polyrec.records import write_records
from polyrec.server import create_app
from polyrec.store import QueryFilter, RecordStore

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="module")
def records_path(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("server")
    config = PipelineConfig(
        corpus=str(DATA / "golden_corpus.jsonl"),
        predictions=str(DATA / "golden_predictions.jsonl"),
        output=str(tmp / "records.jsonl"),
    )
    run = run_pipeline(config)
    write_records(run.records, config.output)
    return Path(config.output)


@pytest.fixture(scope="module")
def client(records_path):
    app = create_app(str(records_path), corpus_path=str(DATA / "golden_corpus.jsonl"))
    with TestClient(app) as client:
        yield client


class TestHealth:
    def test_healthz(self, client):
        response = client.get("/healthz")
        assert response.status_code == 200
        payload = response.json()
        assert payload["status"] == "ok"
        assert payload["records"] == 22


class TestRecords:
    def test_default_page(self, client):
        payload = client.get("/records").json()
        assert payload["total"] == 22
        assert len(payload["records"]) == 22
        years = [r["year"] for r in payload["records"]]
        assert years == sorted(years, reverse=True)

    def test_property_and_value_filter(self, client):
        payload = client.get(
            "/records",
            params={
                "property": "glass transition temperature",
                "min": 100, "max": 200,
            },
        ).json()
        assert payload["total"] == 2  # g01 (100) and g04 (110)
        ids = {r["doc_id"] for r in payload["records"]}
        assert ids == {"g01", "g04"}

    def test_material_filter(self, client):
        payload = client.get("/records", params={"material": "PVA"}).json()
        assert {r["doc_id"] for r in payload["records"]} == {"g03", "g20"}

    def test_keyword_filter_uses_corpus_text(self, client):
        payload = client.get("/records", params={"keyword": "fuel cell"}).json()
        assert {r["doc_id"] for r in payload["records"]} == {"g13"}

    def test_composition_filter(self, client):
        payload = client.get("/records", params={"composition": "blend"}).json()
        assert payload["total"] == 2

    def test_pagination(self, client):
        first = client.get("/records", params={"page_size": 10, "page": 1}).json()
        second = client.get("/records", params={"page_size": 10, "page": 2}).json()
        third = client.get("/records", params={"page_size": 10, "page": 3}).json()
        assert [len(p["records"]) for p in (first, second, third)] == [10, 10, 2]
        assert first["total"] == 22

    def test_page_size_zero_is_400(self, client):
        response = client.get("/records", params={"page_size": 0})
        assert response.status_code == 400
        payload = response.json()
        assert set(payload) == {"error", "detail"}

    def test_unknown_property_is_404(self, client):
        response = client.get("/records", params={"property": "zork"})
        assert response.status_code == 404
        assert response.json()["error"] == "not_found"

    def test_malformed_range_is_400(self, client):
        response = client.get("/records", params={"min": 10, "max": 5})
        assert response.status_code == 400

    def test_non_numeric_param_is_400(self, client):
        response = client.get("/records", params={"min": "abc"})
        assert response.status_code == 400


class TestAggregates:
    def test_properties_histogram(self, client):
        payload = client.get("/properties").json()
        names = [p["name"] for p in payload["properties"]]
        counts = [p["count"] for p in payload["properties"]]
        assert counts == sorted(counts, reverse=True)
        assert "glass transition temperature" in names

    def test_stats_match_store(self, client, records_path):
        payload = client.get("/stats").json()
        store = RecordStore.from_file(records_path)
        assert payload["total"] == len(store)
        assert payload["composition"] == store.composition_counts()
        assert payload["unique_neat_polymers"] == store.count_unique_polymers()
        assert payload["yearly_counts"] == {
            str(k): v for k, v in store.yearly_counts().items()
        }

    def test_stats_with_filter(self, client):
        payload = client.get(
            "/stats", params={"property": "melting temperature"}
        ).json()
        assert payload["total"] == 3  # g08, g15, g19
        assert payload["yearly_counts"] == {"2014": 1, "2016": 1, "2020": 1}


class TestScatter:
    def test_delegates_to_store(self, client, records_path):
        response = client.get(
            "/scatter",
            params={
                "x": "power conversion efficiency",
                "y": "short circuit current",
                "scope": "SAME_DOCUMENT",
            },
        )
        assert response.status_code == 200
        payload = response.json()
        store = RecordStore.from_file(records_path)
        pairs = store.scatter_pairs(
            "power conversion efficiency", "short circuit current",
            "SAME_DOCUMENT",
        )
        assert len(payload["pairs"]) == len(pairs) == 1
        assert payload["pairs"][0]["doc_id"] == "g12"
        assert payload["x_unit"] == "%"
        assert payload["y_unit"] == "mA/cm^{2}"

    def test_unknown_property_404(self, client):
        response = client.get("/scatter", params={"x": "zork", "y": "fill factor"})
        assert response.status_code == 404

    def test_bad_scope_400(self, client):
        response = client.get(
            "/scatter",
            params={"x": "fill factor", "y": "fill factor", "scope": "NOPE"},
        )
        assert response.status_code == 400


class TestReadOnly:
    def test_requests_do_not_mutate_records_file(self, records_path):
        app = create_app(str(records_path))
        before = hashlib.sha256(records_path.read_bytes()).hexdigest()
        with TestClient(app) as client:
            client.get("/records")
            client.get("/stats")
            client.get("/properties")
            client.post("/admin/reload")
        after = hashlib.sha256(records_path.read_bytes()).hexdigest()
        assert before == after

    def test_reload_swaps_snapshot(self, tmp_path, records_path):
        target = tmp_path / "records.jsonl"
        target.write_text(records_path.read_text("utf-8"), encoding="utf-8")
        app = create_app(str(target))
        with TestClient(app) as client:
            assert client.get("/healthz").json()["records"] == 22
            lines = target.read_text("utf-8").strip().splitlines()
            target.write_text("\n".join(lines[:5]) + "\n", encoding="utf-8")
            payload = client.post("/admin/reload").json()
            assert payload["records"] == 5
            assert client.get("/healthz").json()["records"] == 5
