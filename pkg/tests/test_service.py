"""HTTP API behavior, error mapping and undo law."""

import json

import pytest
from fastapi.testclient import TestClient

from sheetstruct.service import create_app


@pytest.fixture
def client():
    return TestClient(create_app())


@pytest.fixture
def session(client, carloan_bytes):
    response = client.post("/sessions", content=carloan_bytes,
                           headers={"content-type": "application/json"})
    assert response.status_code == 201
    return response.json()["sessionId"]


def model_of(client, session):
    return client.get(f"/sessions/{session}/structure",
                      params={"perspective": "model"}).json()


class TestSessions:
    def test_create_from_workbook_json(self, client, session):
        assert session

    def test_create_from_csv(self, client):
        r = client.post("/sessions", content=b"1,=A1*2\n",
                        headers={"content-type": "text/csv"})
        assert r.status_code == 201
        sid = r.json()["sessionId"]
        values = client.get(f"/sessions/{sid}/workbook").json()["values"]
        assert values["Sheet1!B1"] == {"kind": "number", "value": 2.0}

    def test_bad_workbook_is_422(self, client):
        r = client.post("/sessions", content=b'{"version": "9"}',
                        headers={"content-type": "application/json"})
        assert r.status_code == 422
        assert r.json()["error"]["code"] == "SchemaError"

    def test_unknown_session_is_404(self, client):
        assert client.get("/sessions/nope/workbook").status_code == 404

    def test_workbook_round_trips_canonical_bytes(self, client, session,
                                                  carloan_bytes):
        doc = client.get(f"/sessions/{session}/workbook").json()["workbook"]
        assert (json.dumps(doc, indent=2) + "\n").encode() == carloan_bytes


class TestStructureRoutes:
    def test_formula_groups_renderset(self, client, session):
        rs = client.get(f"/sessions/{session}/structure",
                        params={"perspective": "formula-groups"}).json()
        assert {i["range"] for i in rs["items"]} == {"C2:C9", "D2:D8", "B3:B9"}

    def test_reference_groups_renderset(self, client, session):
        gid = next(g["id"] for g in model_of(client, session)["groups"]
                   if g["range"] == "D2:D8")
        rs = client.get(f"/sessions/{session}/structure",
                        params={"perspective": "reference-groups",
                                "group": gid}).json()
        ranges = [i["range"] for i in rs["items"]]
        assert ranges == ["D2:D8", "B2:B8", "C2:C8"]

    def test_graph_perspective(self, client, session):
        rs = client.get(f"/sessions/{session}/structure",
                        params={"perspective": "graph"}).json()
        assert rs["perspective"] == "group-graph"
        assert len(rs["edges"]) >= 3

    def test_unknown_group_404(self, client, session):
        r = client.get(f"/sessions/{session}/structure",
                       params={"perspective": "reference-groups",
                               "group": "missing"})
        assert r.status_code == 404


class TestEditRepairUndo:
    def test_edit_reports_deviant_with_candidates(self, client, session):
        r = client.post(f"/sessions/{session}/edits",
                        json=[{"addr": "C6", "input": "=B6*0.05"}])
        report = r.json()["report"]
        deviant = next(v for v in report["violations"]
                       if v["kind"] == "DeviantCell")
        assert deviant["new"] is True
        assert len(report["candidates"][deviant["id"]]) >= 2

    def test_edit_changed_values_are_chain_suffix(self, client, session):
        r = client.post(f"/sessions/{session}/edits",
                        json=[{"addr": "C6", "input": "=B6*0.05"}])
        changed = set(r.json()["changedValues"])
        assert "Loan!D8" in changed and "Loan!C6" in changed
        assert "Loan!D5" not in changed

    def test_repair_roundtrip_and_undo_law(self, client, session,
                                           carloan_bytes):
        r = client.post(f"/sessions/{session}/edits",
                        json=[{"addr": "C6", "input": "=B6*0.05"}])
        report = r.json()["report"]
        deviant = next(v for v in report["violations"]
                       if v["kind"] == "DeviantCell")
        outward = next(c for c in report["candidates"][deviant["id"]]
                       if "remainder" in c["description"])
        r = client.post(f"/sessions/{session}/repairs/{outward['id']}")
        assert r.json()["report"]["clean"] is True
        client.post(f"/sessions/{session}/undo")
        client.post(f"/sessions/{session}/undo")
        doc = client.get(f"/sessions/{session}/workbook").json()["workbook"]
        assert (json.dumps(doc, indent=2) + "\n").encode() == carloan_bytes

    def test_unknown_candidate_404(self, client, session):
        assert client.post(
            f"/sessions/{session}/repairs/none").status_code == 404

    def test_invalid_edit_422_and_state_unchanged(self, client, session):
        before = client.get(f"/sessions/{session}/workbook").json()
        r = client.post(f"/sessions/{session}/edits",
                        json=[{"addr": "C6", "input": "=B6*)"}])
        assert r.status_code == 422
        assert r.json()["error"]["code"] == "FormulaParseError"
        assert client.get(f"/sessions/{session}/workbook").json() == before

    def test_undo_empty_stack_422(self, client, session):
        r = client.post(f"/sessions/{session}/undo")
        assert r.status_code == 422
        assert r.json()["error"]["code"] == "NothingToUndo"


class TestRefactorings:
    def test_dry_run_leaves_state(self, client, session):
        gid = next(g["id"] for g in model_of(client, session)["groups"]
                   if g["range"] == "D2:D8")
        r = client.post(f"/sessions/{session}/refactorings",
                        json={"op": "split", "params": {"group": gid,
                                                        "at": "B+C"}})
        assert r.json()["plan"]["valueImpact"] == "preserving"
        ranges = {g["range"] for g in model_of(client, session)["groups"]}
        assert "E2:E8" not in ranges

    def test_apply_returns_new_structure(self, client, session):
        gid = next(g["id"] for g in model_of(client, session)["groups"]
                   if g["range"] == "D2:D8")
        r = client.post(f"/sessions/{session}/refactorings",
                        json={"op": "split",
                              "params": {"group": gid, "at": "B+C"},
                              "dryRun": False})
        ranges = {g["range"] for g in r.json()["structure"]["groups"]}
        assert "E2:E8" in ranges

    def test_split_errors_are_422(self, client, session):
        gid = next(g["id"] for g in model_of(client, session)["groups"]
                   if g["range"] == "D2:D8")
        r = client.post(f"/sessions/{session}/refactorings",
                        json={"op": "split",
                              "params": {"group": gid, "at": "B+C",
                                         "target": "C"}})
        assert r.status_code == 422
        assert r.json()["error"]["code"] == "NoSpace"


class TestSettings:
    def test_toggle_soundness(self, client, session):
        r = client.put(f"/sessions/{session}/settings",
                       json={"soundnessEnabled": False})
        assert r.json() == {"soundnessEnabled": False}
        r = client.post(f"/sessions/{session}/edits",
                        json=[{"addr": "C6", "input": "=B6*0.05"}])
        assert r.json()["report"] == {"clean": True, "violations": [],
                                      "candidates": {}}
        client.put(f"/sessions/{session}/settings",
                   json={"soundnessEnabled": True})
        report = client.get(f"/sessions/{session}/violations").json()
        assert not report["clean"]

    def test_save_endpoint(self, client, session, tmp_path, carloan_bytes):
        target = tmp_path / "out.wbk.json"
        r = client.put(f"/sessions/{session}/save",
                       json={"path": str(target)})
        assert r.status_code == 200
        assert target.read_bytes() == carloan_bytes
