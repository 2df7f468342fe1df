"""Session service: the interactive iterate/assign/iterate loop over HTTP."""

import json
import threading

import pytest
from fastapi.testclient import TestClient

from codecat.service import create_app

from conftest import fixture_doc


@pytest.fixture()
def client():
    return TestClient(create_app())


@pytest.fixture()
def inputs():
    return {
        "categories": fixture_doc("cookbook_categories.json"),
        "graph": fixture_doc("cookbook_graph.json"),
        "seeds": fixture_doc("cookbook_seeds.json"),
    }


def create_session(client, inputs):
    response = client.post("/sessions", json=inputs)
    assert response.status_code == 201, response.text
    return response.json()["id"]


class TestCreate:
    def test_cookbook_inputs(self, client, inputs):
        response = client.post("/sessions", json=inputs)
        assert response.status_code == 201
        state = response.json()["state"]
        assert state["iteration"] == 0
        resolved = [u for u, view in state["units"].items() if view["resolved"]]
        assert sorted(resolved) == ["AbstractPanel", "Book", "CookBook", "JPanel"]
        full = [u for u, view in state["units"].items() if len(view["candidates"]) == 5]
        assert len(full) == 6

    def test_invalid_lattice_400(self, client, inputs):
        inputs["categories"]["refinements"].append({"child": "0'", "parent": "DT"})
        response = client.post("/sessions", json=inputs)
        assert response.status_code == 400
        assert response.json()["error"] == "CycleDetected"

    def test_empty_graph(self, client, inputs):
        inputs["graph"] = {"units": [], "edges": []}
        inputs["seeds"] = {"assignments": []}
        response = client.post("/sessions", json=inputs)
        assert response.status_code == 201
        assert response.json()["state"]["units"] == {}


class TestState:
    def test_initial_iteration_zero(self, client, inputs):
        sid = create_session(client, inputs)
        response = client.get(f"/sessions/{sid}/state")
        assert response.status_code == 200
        assert response.json()["iteration"] == 0

    def test_after_propagate_panel_resolved(self, client, inputs):
        sid = create_session(client, inputs)
        client.post(f"/sessions/{sid}/propagate")
        state = client.get(f"/sessions/{sid}/state").json()
        assert state["units"]["CookBookPanel"]["category"] == "DT"
        assert state["units"]["CookBookPanel"]["tier"] == "definite"

    def test_unknown_session_404(self, client):
        response = client.get("/sessions/nope/state")
        assert response.status_code == 404
        assert response.json()["error"] == "UnknownSession"


class TestPropagate:
    def test_diff_lists_author(self, client, inputs):
        sid = create_session(client, inputs)
        response = client.post(f"/sessions/{sid}/propagate")
        assert response.status_code == 200
        body = response.json()
        diff = body["report"]["diff"]
        assert diff["Author"]["before"] == ["0'", "D", "DG", "DT", "T"]
        assert diff["Author"]["after"] == ["DG"]
        assert body["state"]["iteration"] == 1

    def test_rerun_at_fixpoint_empty_diff(self, client, inputs):
        sid = create_session(client, inputs)
        client.post(f"/sessions/{sid}/propagate")
        response = client.post(f"/sessions/{sid}/propagate")
        body = response.json()
        assert body["report"]["fixpoint_already_reached"] is True
        assert body["report"]["diff"] == {}

    def test_unknown_session(self, client):
        assert client.post("/sessions/nope/propagate").status_code == 404


class TestAssign:
    def test_reader_t_then_propagate(self, client, inputs):
        sid = create_session(client, inputs)
        client.post(f"/sessions/{sid}/propagate")
        response = client.post(
            f"/sessions/{sid}/assign", json={"unit": "Reader", "category": "T"}
        )
        assert response.status_code == 200
        client.post(f"/sessions/{sid}/propagate")
        state = client.get(f"/sessions/{sid}/state").json()
        assert state["units"]["CookBookReader"]["category"] == "DT"

    def test_excluded_category_409_with_candidates(self, client, inputs):
        sid = create_session(client, inputs)
        client.post(f"/sessions/{sid}/propagate")
        response = client.post(
            f"/sessions/{sid}/assign", json={"unit": "Reader", "category": "0'"}
        )
        assert response.status_code == 409
        body = response.json()
        assert body["error"] == "CategoryNotInCandidates"
        assert body["candidates"] == ["D", "DG", "DT", "T"]

    def test_identical_reassign_is_noop(self, client, inputs):
        sid = create_session(client, inputs)
        before = client.get(f"/sessions/{sid}/export").json()
        response = client.post(
            f"/sessions/{sid}/assign", json={"unit": "CookBook", "category": "D"}
        )
        assert response.status_code == 200
        after = client.get(f"/sessions/{sid}/export").json()
        assert before == after

    def test_force_rebuild_and_repropagate(self, client, inputs):
        sid = create_session(client, inputs)
        client.post(f"/sessions/{sid}/propagate")
        response = client.post(
            f"/sessions/{sid}/assign",
            json={"unit": "Reader", "category": "0'", "force": True},
        )
        assert response.status_code == 200
        state = response.json()
        # the forced seed took effect, and re-propagation then surfaced the
        # contradiction: Reader:0' cannot use Book (DG)
        assert state["iteration"] == 1
        assert "Reader" in state["conflicts"]
        assert state["units"]["Reader"]["conflict"] is True

    def test_bad_body_400(self, client, inputs):
        sid = create_session(client, inputs)
        response = client.post(f"/sessions/{sid}/assign", json={"unit": "Reader"})
        assert response.status_code == 400


class TestUndo:
    def test_assign_undo_restores_exactly(self, client, inputs):
        sid = create_session(client, inputs)
        client.post(f"/sessions/{sid}/propagate")
        before = client.get(f"/sessions/{sid}/export").text
        client.post(f"/sessions/{sid}/assign", json={"unit": "Reader", "category": "T"})
        client.post(f"/sessions/{sid}/undo")
        after = client.get(f"/sessions/{sid}/export").text
        assert before == after

    def test_undo_at_depth_one_409(self, client, inputs):
        sid = create_session(client, inputs)
        response = client.post(f"/sessions/{sid}/undo")
        assert response.status_code == 409
        assert response.json()["error"] == "NothingToUndo"

    def test_propagate_undo_widens_back(self, client, inputs):
        sid = create_session(client, inputs)
        before = client.get(f"/sessions/{sid}/export").text
        client.post(f"/sessions/{sid}/propagate")
        response = client.post(f"/sessions/{sid}/undo")
        assert response.status_code == 200
        assert response.json()["iteration"] == 0
        after = client.get(f"/sessions/{sid}/export").text
        assert before == after


class TestReports:
    def test_candidates_payload(self, client, inputs):
        sid = create_session(client, inputs)
        client.post(f"/sessions/{sid}/propagate")
        response = client.get(f"/sessions/{sid}/candidates")
        assert response.status_code == 200
        doc = response.json()
        assert [e["unit"] for e in doc["definite"]] == [
            "CookBook", "CookBookPanel", "CookBookReader", "PanelClientOne", "PanelClientTwo",
        ]

    def test_violations_on_partial_state_409(self, client, inputs):
        sid = create_session(client, inputs)
        client.post(f"/sessions/{sid}/propagate")
        response = client.get(f"/sessions/{sid}/violations")
        assert response.status_code == 409
        assert response.json()["error"] == "IncompleteAssignment"

    def test_violations_on_total_state(self, client, inputs):
        sid = create_session(client, inputs)
        client.post(f"/sessions/{sid}/propagate")
        client.post(f"/sessions/{sid}/assign", json={"unit": "Reader", "category": "T"})
        client.post(f"/sessions/{sid}/propagate")
        response = client.get(f"/sessions/{sid}/violations")
        assert response.status_code == 200
        assert response.json()["violations"] == []

    def test_export_reimportable(self, client, inputs, tmp_path):
        from codecat.reports import state_from_export, state_export_doc, dump_doc

        sid = create_session(client, inputs)
        client.post(f"/sessions/{sid}/propagate")
        exported = client.get(f"/sessions/{sid}/export")
        doc = exported.json()
        state = state_from_export(doc)
        assert dump_doc(state_export_doc(state)) == exported.text


class TestCliParity:
    def test_candidates_byte_identical_with_cli(self, client, inputs, tmp_path, capsys):
        from codecat.cli import main

        sid = create_session(client, inputs)
        client.post(f"/sessions/{sid}/propagate")
        service_bytes = client.get(f"/sessions/{sid}/candidates").content

        categories = tmp_path / "cats.json"
        graph = tmp_path / "graph.json"
        seeds = tmp_path / "seeds.json"
        state = tmp_path / "state.json"
        categories.write_text(json.dumps(inputs["categories"]))
        graph.write_text(json.dumps(inputs["graph"]))
        seeds.write_text(json.dumps(inputs["seeds"]))
        main([
            "infer", "--categories", str(categories), "--graph", str(graph),
            "--seeds", str(seeds), "--out", str(state), "--no-timestamp",
        ])
        capsys.readouterr()
        code = main(["candidates", "--state", str(state), "--format", "json", "--no-timestamp"])
        cli_out = capsys.readouterr().out
        assert code == 0
        assert service_bytes == cli_out.encode()


class TestConcurrency:
    def test_mutations_serialized(self, client, inputs):
        sid = create_session(client, inputs)
        errors = []

        def worker():
            try:
                for _ in range(5):
                    client.post(f"/sessions/{sid}/propagate")
            except Exception as exc:  # noqa: BLE001
                errors.append(exc)

        threads = [threading.Thread(target=worker) for _ in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert not errors
        state = client.get(f"/sessions/{sid}/state").json()
        assert state["iteration"] == 20
        assert state["units"]["CookBookPanel"]["category"] == "DT"


class TestPersistence:
    def test_snapshot_written(self, inputs, tmp_path):
        app = create_app(persist_dir=str(tmp_path / "sessions"))
        client = TestClient(app)
        sid = create_session(client, inputs)
        client.post(f"/sessions/{sid}/propagate")
        snapshot = (tmp_path / "sessions" / f"{sid}.json").read_text()
        assert snapshot == client.get(f"/sessions/{sid}/export").text
