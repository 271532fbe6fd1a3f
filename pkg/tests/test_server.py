"""JSON protocol: every mutation persists, every rejection leaves no trace."""
import os

import pytest
from fastapi.testclient import TestClient

from conftest import SMALL_ENERGIES, fresh_outputs
from regge_ics.pipeline import load_session
from regge_ics.server import create_app


@pytest.fixture()
def client(small, tmp_path):
    config = fresh_outputs(small, tmp_path)
    with TestClient(create_app(config)) as c:
        c.config = config
        yield c


def test_get_session_shape(client):
    body = client.get("/api/session").json()
    assert body["energies"] == SMALL_ENERGIES
    assert body["current_energy_index"] == 0
    assert len(body["poles_by_energy"]) == len(SMALL_ENERGIES)
    assert all(body["poles_by_energy"])
    assert body["trajectories"] == []
    assert set(body["series"]) == {"exact", "int"}  # no smooth yet
    assert body["config"]["region"] == [0.0, 20.0, 0.0025, 1.0]
    assert body["config"]["first_run"] is False


def test_seed_step_finish_cycle(client):
    body = client.post("/api/trajectory/seed",
                       json={"energy_index": 0, "pole_index": 0}).json()
    trajs = body["trajectories"]
    assert len(trajs) == 1 and trajs[0]["active"] is True
    assert trajs[0]["id"] == "t1"
    assert trajs[0]["energies"] == [30.0]

    body = client.post("/api/trajectory/step", json={"choice": "auto"}).json()
    assert body["trajectories"][0]["energies"] == [30.0, 35.0]
    body = client.post("/api/trajectory/step", json={"choice": 0}).json()
    assert body["trajectories"][0]["energies"] == [30.0, 35.0, 40.0]
    body = client.post("/api/trajectory/step", json={"choice": "skip"}).json()
    assert body["trajectories"][0]["gaps"] == [45.0]
    body = client.post("/api/trajectory/step", json={"choice": "auto"}).json()
    assert body["trajectories"][0]["energies"] == [30.0, 35.0, 40.0, 50.0]

    resp = client.post("/api/trajectory/finish").json()
    assert resp["finished"] == "t1"
    trajs = resp["session"]["trajectories"]
    assert trajs[0]["active"] is False
    assert "smooth" in resp["session"]["series"]

    out = client.config.output_dir
    for name in ("ics.traj.t1", "ics.mull.t1", "ics.smooth"):
        assert os.path.exists(os.path.join(out, name))
    # the session file now carries the finished trajectory
    session = load_session(client.config)
    assert [t["id"] for t in session["completed_trajectories"]] == ["t1"]


def test_mutations_survive_a_server_restart(client):
    client.post("/api/trajectory/seed",
                json={"energy_index": 1, "pole_index": 0})
    client.post("/api/trajectory/step", json={"choice": "auto"})
    with TestClient(create_app(client.config)) as again:
        body = again.get("/api/session").json()
        assert body["trajectories"][0]["energies"] == [35.0, 40.0]
        assert body["trajectories"][0]["active"] is True
        assert body["current_energy_index"] == 2


def _unchanged_after(client, call):
    before = client.get("/api/session").json()
    resp = call()
    assert resp.status_code == 400
    assert client.get("/api/session").json() == before
    return resp.json()["detail"]


def test_bad_requests_leave_state_unchanged(client):
    detail = _unchanged_after(client, lambda: client.post(
        "/api/trajectory/seed", json={"energy_index": 99, "pole_index": 0}))
    assert "out of range" in detail
    detail = _unchanged_after(client, lambda: client.post(
        "/api/trajectory/seed", json={"energy_index": 0, "pole_index": 42}))
    assert "out of range" in detail
    detail = _unchanged_after(client, lambda: client.post(
        "/api/trajectory/step", json={"choice": "auto"}))
    assert "seed one first" in detail
    detail = _unchanged_after(client, lambda: client.post(
        "/api/trajectory/finish"))
    assert "no active trajectory" in detail

    client.post("/api/trajectory/seed",
                json={"energy_index": 0, "pole_index": 0})
    detail = _unchanged_after(client, lambda: client.post(
        "/api/trajectory/seed", json={"energy_index": 1, "pole_index": 0}))
    assert "already active" in detail
    detail = _unchanged_after(client, lambda: client.post(
        "/api/trajectory/step", json={"choice": "1"}))
    assert "unrecognized choice" in detail
    detail = _unchanged_after(client, lambda: client.post(
        "/api/trajectory/step", json={"choice": 7}))
    assert "out of range" in detail


def test_step_past_the_last_energy_is_rejected(client):
    client.post("/api/trajectory/seed",
                json={"energy_index": len(SMALL_ENERGIES) - 1, "pole_index": 0})
    detail = _unchanged_after(client, lambda: client.post(
        "/api/trajectory/step", json={"choice": "auto"}))
    assert "last energy" in detail


def test_decomposition_endpoint(client):
    rows = client.get("/api/decomposition").json()
    assert [r["energy"] for r in rows] == SMALL_ENERGIES
    for r in rows:
        assert r["mull_terms"] == {}
        assert r["sigma_smooth"] == r["sigma_exact"]

    client.post("/api/trajectory/seed",
                json={"energy_index": 0, "pole_index": 0})
    for _ in range(len(SMALL_ENERGIES) - 1):
        client.post("/api/trajectory/step", json={"choice": "auto"})
    client.post("/api/trajectory/finish")

    rows = client.get("/api/decomposition").json()
    for r in rows:
        assert set(r["mull_terms"]) == {"t1"}
        assert r["sigma_smooth"] == pytest.approx(
            r["sigma_exact"] - r["mull_terms"]["t1"], rel=1e-12)
        assert r["sigma_pade"] == pytest.approx(r["sigma_exact"], abs=1e-6)


def test_static_ui_mount(small, tmp_path):
    config = fresh_outputs(small, tmp_path)
    with TestClient(create_app(config)) as bare:
        assert bare.get("/").status_code == 404
    ui = tmp_path / "ui"
    ui.mkdir()
    (ui / "index.html").write_text("<!doctype html><title>regge</title>")
    with TestClient(create_app(config, ui_dir=str(ui))) as c:
        resp = c.get("/")
        assert resp.status_code == 200
        assert "regge" in resp.text
        # the API keeps priority over the static mount
        assert c.get("/api/session").status_code == 200
