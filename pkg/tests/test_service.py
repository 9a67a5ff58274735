"""Registry service endpoints, store persistence, and error mapping."""

import hashlib
import json

import pytest
from fastapi.testclient import TestClient

from ivyengine import canonical
from ivyengine.config import EngineConfig
from ivyengine.formats import serialize_template, template_from_document
from ivyengine.service import TemplateStore, create_app


@pytest.fixture()
def store_dir(tmp_path):
    return tmp_path / "store"


@pytest.fixture()
def client(store_dir):
    app = create_app(EngineConfig(store_dir=str(store_dir)))
    with TestClient(app, raise_server_exceptions=False) as c:
        yield c


@pytest.fixture(scope="module")
def template_docs(fixtures_dir):
    docs = {}
    for path in sorted((fixtures_dir / "templates").glob("*.ivy.json")):
        doc = canonical.loads(path.read_bytes())
        docs[doc["name"]] = doc
    return docs


@pytest.fixture()
def published(client, template_docs):
    for doc in template_docs.values():
        assert client.post("/templates", content=json.dumps(doc)).status_code == 201
    return client


def get_error(response):
    body = response.json()
    assert "error" in body
    return body["error"]


class TestHealth:
    def test_health(self, client):
        response = client.get("/health")
        assert response.status_code == 200
        assert response.json() == {"status": "ok"}


class TestPublishAndFetch:
    def test_publish_returns_summary(self, client, template_docs):
        response = client.post(
            "/templates",
            content=json.dumps(template_docs["aggregate-bar-chart"]),
            headers={"X-Ivy-Owner": "mary"},
        )
        assert response.status_code == 201
        summary = response.json()
        assert summary["name"] == "aggregate-bar-chart"
        assert summary["version"] == 1
        assert summary["owner"] == "mary"

    def test_fetch_serves_stored_bytes_verbatim(self, client, template_docs):
        doc = template_docs["aggregate-bar-chart"]
        client.post("/templates", content=json.dumps(doc))
        fetched = client.get("/templates/aggregate-bar-chart")
        assert fetched.status_code == 200
        expected = serialize_template(template_from_document(doc).with_version(1))
        assert fetched.content == expected

    def test_republish_bumps_version(self, client, template_docs):
        doc = template_docs["aggregate-bar-chart"]
        client.post("/templates", content=json.dumps(doc))
        second = client.post("/templates", content=json.dumps(doc))
        assert second.json()["version"] == 2

    def test_stale_if_match_conflicts(self, client, template_docs):
        doc = template_docs["aggregate-bar-chart"]
        client.post("/templates", content=json.dumps(doc))
        client.post("/templates", content=json.dumps(doc), headers={"If-Match": "1"})
        stale = client.post(
            "/templates", content=json.dumps(doc), headers={"If-Match": "1"}
        )
        assert stale.status_code == 409
        assert get_error(stale)["error"] == "VersionConflict"

    def test_if_match_on_first_publish_expects_zero(self, client, template_docs):
        doc = template_docs["scatterplot"]
        ok = client.post(
            "/templates", content=json.dumps(doc), headers={"If-Match": "0"}
        )
        assert ok.status_code == 201

    def test_non_integer_if_match(self, client, template_docs):
        doc = template_docs["scatterplot"]
        response = client.post(
            "/templates", content=json.dumps(doc), headers={"If-Match": "abc"}
        )
        assert response.status_code == 400

    def test_invalid_template_name_rejected(self, client, template_docs):
        doc = dict(template_docs["scatterplot"])
        doc["name"] = "bad name!"
        response = client.post("/templates", content=json.dumps(doc))
        assert response.status_code == 400

    def test_unknown_template_404(self, client):
        response = client.get("/templates/ghost")
        assert response.status_code == 404
        assert get_error(response)["error"] == "UnknownTemplate"

    def test_malformed_json_400(self, client):
        response = client.post("/templates", content="{not json")
        assert response.status_code == 400
        assert get_error(response)["error"] == "JsonSyntax"


class TestListing:
    def test_list_is_sorted_by_name(self, published):
        body = published.get("/templates").json()
        names = [t["name"] for t in body["templates"]]
        assert names == ["aggregate-bar-chart", "data-table", "scatterplot"]

    def test_roles_query_ranks_matches(self, published):
        body = published.get("/templates", params={"roles": "Measure,Dimension"}).json()
        entries = body["templates"]
        assert entries[0]["name"] == "aggregate-bar-chart"
        assert entries[0]["match"]["kind"] == "Complete"
        kinds = [e["match"]["kind"] for e in entries]
        assert kinds == sorted(kinds, key=["Complete", "Partial"].index)

    def test_single_measure_keeps_table_and_scatter(self, published):
        body = published.get("/templates", params={"roles": "Measure"}).json()
        assert {e["name"] for e in body["templates"]} >= {
            "aggregate-bar-chart",
            "data-table",
        }

    def test_unknown_role_rejected(self, published):
        response = published.get("/templates", params={"roles": "Metric"})
        assert response.status_code == 400


class TestFork:
    def test_fork_records_provenance(self, published):
        response = published.post(
            "/templates/aggregate-bar-chart/fork",
            content=json.dumps({"name": "my-bar"}),
            headers={"X-Ivy-Owner": "alex"},
        )
        assert response.status_code == 201
        summary = response.json()
        assert summary["name"] == "my-bar"
        assert summary["version"] == 1
        assert summary["owner"] == "alex"
        assert summary["forkOf"] == {"name": "aggregate-bar-chart", "version": 1}

    def test_forked_template_is_fetchable(self, published):
        published.post(
            "/templates/aggregate-bar-chart/fork",
            content=json.dumps({"name": "my-bar"}),
        )
        fetched = published.get("/templates/my-bar")
        assert fetched.status_code == 200
        assert canonical.loads(fetched.content)["name"] == "my-bar"

    def test_fork_of_unknown_template(self, published):
        response = published.post(
            "/templates/ghost/fork", content=json.dumps({"name": "x"})
        )
        assert response.status_code == 404

    def test_fork_body_must_name_the_copy(self, published):
        response = published.post(
            "/templates/aggregate-bar-chart/fork", content=json.dumps({})
        )
        assert response.status_code == 400


class TestApply:
    SETTINGS = {"xDim": "age", "yDim": "people", "year": 2000, "sort": False}

    def test_apply_published_template(self, published, fixtures_dir):
        response = published.post(
            "/apply",
            content=json.dumps(
                {"template": "aggregate-bar-chart", "settings": self.SETTINGS}
            ),
        )
        assert response.status_code == 200
        expected = (fixtures_dir / "specs" / "population-by-age.vl.json").read_bytes()
        assert response.content == expected

    def test_apply_inline_template_document(self, client, template_docs):
        response = client.post(
            "/apply",
            content=json.dumps(
                {
                    "template": template_docs["aggregate-bar-chart"],
                    "settings": self.SETTINGS,
                }
            ),
        )
        assert response.status_code == 200

    def test_settings_violation_names_the_parameter(self, published):
        response = published.post(
            "/apply",
            content=json.dumps(
                {
                    "template": "aggregate-bar-chart",
                    "settings": {**self.SETTINGS, "year": 2200},
                }
            ),
        )
        assert response.status_code == 422
        error = get_error(response)
        assert error["error"] == "SettingsViolation"
        assert error["detail"]["violations"][0]["parameter"] == "year"

    def test_unknown_setting_name_is_a_violation(self, published):
        response = published.post(
            "/apply",
            content=json.dumps(
                {
                    "template": "aggregate-bar-chart",
                    "settings": {**self.SETTINGS, "ghost": 1},
                }
            ),
        )
        assert response.status_code == 422

    def test_unknown_dataset_reference(self, published):
        response = published.post(
            "/apply",
            content=json.dumps(
                {
                    "template": "aggregate-bar-chart",
                    "settings": self.SETTINGS,
                    "dataset": "d000000000000",
                }
            ),
        )
        assert response.status_code == 400

    def test_body_must_carry_template(self, client):
        response = client.post("/apply", content=json.dumps({"settings": {}}))
        assert response.status_code == 400


class TestVisibleParams:
    SORTABLE = {
        "name": "sortable",
        "description": "",
        "language": "table",
        "params": [
            {"name": "sort", "type": "Boolean", "defaultValue": False},
            {
                "name": "sortDirection",
                "type": "Enum",
                "config": {"allowedValues": ["asc", "desc"]},
                "displayPredicate": "sort == true",
                "defaultValue": "asc",
            },
        ],
        "symbols": [],
        "body": {"sorted": "[sort]", "direction": "[sortDirection]"},
    }

    def test_hidden_until_enabled(self, client):
        client.post("/templates", content=json.dumps(self.SORTABLE))

        def visible(settings):
            response = client.post(
                "/visible-params",
                content=json.dumps({"template": "sortable", "settings": settings}),
            )
            assert response.status_code == 200
            return response.json()["visible"]

        assert visible({}) == ["sort"]
        assert visible({"sort": True}) == ["sort", "sortDirection"]


class TestFanOut:
    def test_fanout_cells(self, published):
        response = published.post(
            "/fanout",
            content=json.dumps(
                {
                    "template": "aggregate-bar-chart",
                    "settings": {"xDim": "age", "yDim": "people"},
                    "optionSets": {"year": [1990, 2000], "sort": [True, False]},
                }
            ),
        )
        assert response.status_code == 200
        cells = response.json()["cells"]
        assert len(cells) == 4
        assert [c["settings"]["year"] for c in cells] == [1990, 1990, 2000, 2000]
        assert all("spec" in c and "error" not in c for c in cells)

    def test_fanout_requires_option_sets(self, published):
        response = published.post(
            "/fanout",
            content=json.dumps({"template": "aggregate-bar-chart", "optionSets": {}}),
        )
        assert response.status_code == 400

    def test_invalid_option_is_a_violation(self, published):
        response = published.post(
            "/fanout",
            content=json.dumps(
                {
                    "template": "aggregate-bar-chart",
                    "settings": {"xDim": "age", "yDim": "people"},
                    "optionSets": {"year": [2200]},
                }
            ),
        )
        assert response.status_code == 422


class TestSuggest:
    def test_suggestions_for_raw_body(self, client):
        response = client.post(
            "/suggest",
            content=json.dumps(
                {
                    "body": {"encoding": {"x": {"field": "age"}}, "width": 300},
                    "language": "vega-lite",
                    "columns": [{"name": "age", "role": "Measure"}],
                }
            ),
        )
        assert response.status_code == 200
        suggestions = response.json()["suggestions"]
        assert [s["path"] for s in suggestions] == ["/encoding/x/field", "/width"]
        assert suggestions[0]["kind"] == "AbstractDataField"
        assert suggestions[0]["replacement"] == "[field]"
        assert suggestions[0]["original"] == "age"
        assert suggestions[1]["param"]["type"] == "Number"

    def test_bad_column_entry(self, client):
        response = client.post(
            "/suggest",
            content=json.dumps(
                {"body": {}, "language": "vega-lite", "columns": [{"name": 1}]}
            ),
        )
        assert response.status_code == 400

    def test_unknown_language(self, client):
        response = client.post(
            "/suggest", content=json.dumps({"body": {}, "language": "nope"})
        )
        assert response.status_code == 400
        assert get_error(response)["error"] == "UnknownLanguage"


class TestTranslate:
    def test_translate_between_published_templates(self, published):
        response = published.post(
            "/translate",
            content=json.dumps(
                {
                    "from": "aggregate-bar-chart",
                    "to": "scatterplot",
                    "settings": {"xDim": "year", "yDim": "people"},
                    "roles": {"year": "Measure", "people": "Measure"},
                }
            ),
        )
        assert response.status_code == 200
        body = response.json()
        assert body["settings"] == {"x": "year", "y": "people"}
        assert body["flag"] == "Complete"
        assert body["dropped"] == []

    def test_untranslatable_bindings_conflict(self, published):
        response = published.post(
            "/translate",
            content=json.dumps(
                {
                    "from": "aggregate-bar-chart",
                    "to": "scatterplot",
                    "settings": {"xDim": "sex"},
                    "roles": {"sex": "Time"},
                }
            ),
        )
        assert response.status_code == 422
        assert get_error(response)["error"] == "NoMatch"

    def test_unknown_role_name(self, published):
        response = published.post(
            "/translate",
            content=json.dumps(
                {
                    "from": "aggregate-bar-chart",
                    "to": "scatterplot",
                    "settings": {"xDim": "sex"},
                    "roles": {"sex": "Category"},
                }
            ),
        )
        assert response.status_code == 400


class TestDatasets:
    def test_upload_csv(self, client, fixtures_dir):
        raw = (fixtures_dir / "data" / "population.csv").read_bytes()
        response = client.post(
            "/datasets", files={"file": ("population.csv", raw, "text/csv")}
        )
        assert response.status_code == 201
        body = response.json()
        assert body["id"] == "d" + hashlib.sha256(raw).hexdigest()[:12]
        assert body["rowCount"] > 0
        roles = {c["name"]: c["role"] for c in body["columns"]}
        assert roles == {
            "year": "Measure",
            "age": "Measure",
            "sex": "Dimension",
            "people": "Measure",
        }

    def test_apply_injects_uploaded_rows(self, client, fixtures_dir):
        injectable = {
            "name": "bare-bar",
            "description": "",
            "language": "vega-lite",
            "params": [],
            "symbols": [],
            "body": {"mark": "bar"},
        }
        client.post("/templates", content=json.dumps(injectable))
        raw = (fixtures_dir / "data" / "population.csv").read_bytes()
        dataset_id = client.post(
            "/datasets", files={"file": ("population.csv", raw, "text/csv")}
        ).json()["id"]
        response = client.post(
            "/apply",
            content=json.dumps({"template": "bare-bar", "dataset": dataset_id}),
        )
        assert response.status_code == 200
        spec = response.json()
        assert len(spec["data"]["values"]) > 0

    def test_template_data_binding_beats_injection(self, published, fixtures_dir):
        # aggregate-bar-chart carries its own data url; rows stay out.
        raw = (fixtures_dir / "data" / "population.csv").read_bytes()
        dataset_id = published.post(
            "/datasets", files={"file": ("population.csv", raw, "text/csv")}
        ).json()["id"]
        response = published.post(
            "/apply",
            content=json.dumps(
                {
                    "template": "aggregate-bar-chart",
                    "settings": {"xDim": "age", "yDim": "people"},
                    "dataset": dataset_id,
                }
            ),
        )
        assert response.status_code == 200
        expected = (fixtures_dir / "specs" / "population-by-age.vl.json").read_bytes()
        assert response.content == expected

    def test_unsupported_extension(self, client):
        response = client.post("/datasets", files={"file": ("rows.xml", b"<x/>")})
        assert response.status_code == 400

    def test_oversized_dataset_rejected(self, store_dir, fixtures_dir):
        app = create_app(
            EngineConfig(store_dir=str(store_dir), max_dataset_bytes=64)
        )
        with TestClient(app, raise_server_exceptions=False) as client:
            raw = (fixtures_dir / "data" / "population.csv").read_bytes()
            response = client.post(
                "/datasets", files={"file": ("population.csv", raw, "text/csv")}
            )
            assert response.status_code == 400
            assert get_error(response)["error"] == "DatasetTooLarge"

    def test_missing_file_field(self, client):
        response = client.post("/datasets")
        assert response.status_code == 400


class TestPersistence:
    def test_log_replay_reconstructs_the_store(
        self, published, store_dir, template_docs
    ):
        published.post(
            "/templates/aggregate-bar-chart/fork",
            content=json.dumps({"name": "my-bar"}),
        )
        before = {
            name: published.get(f"/templates/{name}").content
            for name in ("aggregate-bar-chart", "scatterplot", "data-table", "my-bar")
        }
        replayed = TemplateStore(store_dir)
        assert replayed.names() == sorted(before)
        for name, document in before.items():
            assert replayed.latest(name).document == document

    def test_fork_provenance_survives_replay(self, published, store_dir):
        published.post(
            "/templates/aggregate-bar-chart/fork",
            content=json.dumps({"name": "my-bar"}),
        )
        replayed = TemplateStore(store_dir)
        assert replayed.latest("my-bar").fork_of == ("aggregate-bar-chart", 1)

    def test_fresh_app_on_same_dir_serves_same_bytes(
        self, published, store_dir, template_docs
    ):
        content = published.get("/templates/aggregate-bar-chart").content
        second = create_app(EngineConfig(store_dir=str(store_dir)))
        with TestClient(second) as again:
            assert again.get("/templates/aggregate-bar-chart").content == content
