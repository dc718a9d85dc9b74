# tests/test_api.py
import json

import pytest
from fastapi.testclient import TestClient

from backend.api.main import app
from backend.services.fixtures import BUILDERS

# tipos (0,0), (-1,-1), (-2,-2) cindidos: Λ^{-1,-1} não abeliano
TOWER = {
    "schema_version": 1,
    "dim": 3,
    "filtrations": {
        "W": {
            "kind": "increasing",
            "steps": {"-4": [["0", "0", "1"]], "-2": [["0", "1", "0"], ["0", "0", "1"]], "0": [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]},
        },
        "F": {
            "kind": "decreasing",
            "steps": {"-2": [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]], "-1": [["1", "0", "0"], ["0", "1", "0"]], "0": [["1", "0", "0"]]},
        },
    },
}


@pytest.fixture
def client():
    return TestClient(app)


def test_health(client):
    assert client.get("/health").json() == {"status": "ok"}


def test_fixture_routes(client):
    names = [item["name"] for item in client.get("/fixtures").json()]
    assert names == sorted(BUILDERS)
    assert client.get("/fixtures/fix4").json()["name"] == "fix4"
    assert client.get("/fixtures/fix99").status_code == 404


def test_compute_ok(client):
    resp = client.post("/compute/mhs/delta", json=BUILDERS["fix1"]())
    assert resp.status_code == 200
    assert resp.json()["result"]["delta"] == [["0", "0"], ["1", "0"]]


def test_negative_verdict_is_200(client):
    resp = client.post("/compute/orbit/check", json=BUILDERS["fix5"]())
    assert resp.status_code == 200
    assert resp.json()["status"] == "negative"


def test_input_error_is_400(client):
    resp = client.post("/compute/mhs/delta", json={"schema_version": 1})
    assert resp.status_code == 400
    assert resp.json()["error"]["details"]["position"] == "$.dim"
    assert client.post("/compute/mhs/nada", json=BUILDERS["fix1"]()).status_code == 400


def test_unsupported_regime_is_501(client):
    resp = client.post("/compute/mhs/sl2split", json=TOWER)
    assert resp.status_code == 501
    assert resp.json()["error"]["kind"] == "unsupported"


def test_upload(client):
    body = json.dumps(BUILDERS["fix6"]()).encode("utf-8")
    resp = client.post(
        "/compute/upload",
        data={"group": "ih", "action": "dims"},
        files={"file": ("fix6.json", body, "application/json")},
    )
    assert resp.status_code == 200
    assert resp.json()["status"] == "ok"
