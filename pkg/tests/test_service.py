import json
import math

import pytest
from starlette.testclient import TestClient

from twophaselab.service import app


@pytest.fixture(scope="module")
def client():
    with TestClient(app) as c:
        yield c


def model_section(u_plus, u_minus):
    return {"A1": 1.0, "A2": 1.0, "gamma": 1.0, "alpha": 1.0, "mu": 1.0,
            "rho_minus": u_plus / u_minus, "n_minus": u_plus / u_minus,
            "u_minus": u_minus, "u_plus": u_plus}


def test_health(client):
    resp = client.get("/health")
    assert resp.status_code == 200
    assert resp.json()["status"] == "ok"


def test_classify_sonic(client):
    cfg = {"schema": 1, "model": model_section(1.0, 1.0), "scenario": "classify"}
    resp = client.post("/classify", json={"config": cfg})
    assert resp.status_code == 200
    body = resp.json()
    assert body["summary"]["regime"] == "Sonic"
    spec = json.loads(body["files"]["spectrum.json"])
    assert spec["lambda1"]["re"] == pytest.approx(math.sqrt(2.0), abs=1e-12)
    assert spec["lambda3"]["re"] == 0.0
    assert "config_sha256" in spec


def test_classify_supersonic_label(client):
    cfg = {"schema": 1, "model": model_section(2.0, 2.0), "scenario": "classify"}
    resp = client.post("/classify", json={"config": cfg})
    assert resp.json()["summary"]["regime"] == "Supersonic"


def test_invalid_config_is_422(client):
    cfg = {"schema": 1, "model": {"A1": 1.0}, "scenario": "classify"}
    resp = client.post("/classify", json={"config": cfg})
    assert resp.status_code == 422
    assert resp.json()["code"] == "invalid-config"


def test_stationary_constant_profile(client):
    cfg = {"schema": 1, "model": model_section(2.0, 2.0),
           "scenario": "stationary", "grid": {"n_nodes": 64}}
    resp = client.post("/stationary", json={"config": cfg})
    assert resp.status_code == 200
    body = resp.json()
    lines = body["files"]["profile.csv"].strip().split("\n")
    assert lines[0] == "x,rho,u,n,v"
    first = lines[1].split(",")
    assert float(first[2]) == 2.0 and float(first[4]) == 2.0
    assert body["summary"]["residual_norm"] == 0.0


def test_stationary_subsonic(client):
    cfg = {"schema": 1, "model": model_section(0.5, 0.499),
           "scenario": "stationary", "grid": {"n_nodes": 512}}
    resp = client.post("/stationary", json={"config": cfg})
    assert resp.status_code == 200
    body = resp.json()
    assert body["summary"]["model_selected"] == "exponential"
    assert max(body["summary"]["boundary_mismatch"]) <= 1e-8


def test_stationary_supersonic_no_profile(client):
    cfg = {"schema": 1, "model": model_section(2.0, 1.999),
           "scenario": "stationary", "grid": {"n_nodes": 256}}
    resp = client.post("/stationary", json={"config": cfg})
    assert resp.status_code == 409
    assert resp.json()["code"] == "no-profile"


def test_sweep(client):
    cfg = {"schema": 1, "model": model_section(0.5, 0.5), "scenario": "sweep",
           "grid": {"n_nodes": 256}, "sweep": {"delta_list": [0.0, 1e-3, 5e-4]}}
    resp = client.post("/sweep", json={"config": cfg})
    assert resp.status_code == 200
    body = resp.json()
    assert 0.9 <= body["summary"]["exponent"] <= 1.1
    lines = body["files"]["sweep.csv"].strip().split("\n")
    assert lines[0] == "delta,ux0,vx0,errors"
    assert lines[1].split(",")[1] == "0"  # delta = 0 row has exact zero slope


def test_evolve_small_run(client):
    cfg = {"schema": 1, "model": model_section(0.5, 0.499), "scenario": "evolve",
           "grid": {"n_nodes": 256, "L": 50.0},
           "evolve": {"t_end": 1.0, "report_every": 0.5,
                      "perturbation": {"kind": "gaussian", "center": 20.0,
                                       "width": 2.0, "h1_target": 1e-3}}}
    resp = client.post("/evolve", json={"config": cfg})
    assert resp.status_code == 200
    body = resp.json()
    assert body["summary"]["sup_initial"] > 0
    series = body["files"]["series.csv"].strip().split("\n")
    assert series[0] == "t,e_total,dissipation,l2,h1,sup"
    assert len(series) == 4  # t = 0, 0.5, 1.0
    snap = body["files"]["snapshot.csv"].strip().split("\n")
    assert snap[0] == "t,x,rho,u,n,v"


def test_seed_override_changes_hash(client):
    cfg = {"schema": 1, "model": model_section(1.0, 1.0), "scenario": "classify"}
    r1 = client.post("/classify", json={"config": cfg})
    r2 = client.post("/classify", json={"config": cfg, "seed": 3})
    s1 = json.loads(r1.json()["files"]["spectrum.json"])
    s2 = json.loads(r2.json()["files"]["spectrum.json"])
    assert s1["config_sha256"] != s2["config_sha256"]
    assert s1["lambda1"] == s2["lambda1"]


def test_repeat_calls_byte_identical(client):
    cfg = {"schema": 1, "model": model_section(0.5, 0.499),
           "scenario": "stationary", "grid": {"n_nodes": 256}}
    r1 = client.post("/stationary", json={"config": cfg})
    r2 = client.post("/stationary", json={"config": cfg})
    assert r1.json()["files"] == r2.json()["files"]
