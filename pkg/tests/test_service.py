import math

import pytest
from fastapi.testclient import TestClient

from l2plus.service.app import app

from conftest import fixture_path

client = TestClient(app)

FAST_OPTIONS = {
    "alphas": [-1.0],
    "max_degree": 1,
    "max_harmonics": 8,
    "grid_per_decade": 40,
}

FIRST_ORDER = {"name": "lowpass1", "A": [[-1.0]], "B": [[1.0]], "C": [[1.0]], "D": [[0.0]]}
STATIC = {"name": "static", "A": [], "B": [], "C": [], "D": [[1.0, -1.0]]}
UNSTABLE = {"A": [[1.0]], "B": [[1.0]], "C": [[1.0]], "D": [[0.0]]}


def test_health():
    reply = client.get("/health")
    assert reply.status_code == 200
    assert reply.json()["status"] == "ok"


def test_hinf_endpoint():
    reply = client.post("/hinf", json={"system": FIRST_ORDER})
    assert reply.status_code == 200
    body = reply.json()
    assert body["l2_norm"] == pytest.approx(1.0, abs=1e-6)
    assert body["peak"]["kind"] == "at_zero"


def test_hinf_unstable_is_422():
    reply = client.post("/hinf", json={"system": UNSTABLE})
    assert reply.status_code == 422
    assert reply.json()["detail"]["kind"] == "UnstableSystem"


def test_hinf_bad_shapes_is_400():
    bad = {"A": [[1.0, 0.0], [0.0, -1.0]], "B": [[1.0], [1.0], [1.0]], "C": [[1.0, 0.0]], "D": [[0.0]]}
    reply = client.post("/hinf", json={"system": bad})
    assert reply.status_code == 400
    assert reply.json()["detail"]["kind"] == "DimensionMismatch"


def test_certify_endpoint():
    reply = client.post("/certify", json={"system": FIRST_ORDER, "options": FAST_OPTIONS})
    assert reply.status_code == 200
    body = reply.json()
    assert body["best_upper"] == pytest.approx(1.0, abs=1e-3)
    assert body["best_lower"] <= body["best_upper"] + 1e-6
    assert body["exceeds_uniform_floor"] is True
    assert len(body["upper_bounds"]) == 2


def test_certify_static():
    reply = client.post("/certify", json={"system": STATIC, "options": FAST_OPTIONS})
    body = reply.json()
    assert body["l2_norm"] == pytest.approx(math.sqrt(2.0), abs=1e-9)
    assert body["best_upper"] == pytest.approx(1.0, abs=1e-3)


def test_diff_endpoint():
    reply = client.post(
        "/diff",
        json={"system1": FIRST_ORDER, "system2": FIRST_ORDER, "options": FAST_OPTIONS},
    )
    assert reply.status_code == 200
    assert reply.json()["l2_norm"] <= 1e-8


def test_upper_endpoint():
    reply = client.post("/upper", json={"system": FIRST_ORDER, "options": FAST_OPTIONS})
    body = reply.json()
    assert body["best_upper"] == pytest.approx(1.0, abs=1e-3)
    assert [cell["degree"] for cell in body["upper_bounds"]] == [0, 1]


def test_lower_endpoint():
    reply = client.post("/lower", json={"system": FIRST_ORDER, "options": FAST_OPTIONS})
    body = reply.json()
    assert body["best_lower"] == pytest.approx(1.0, abs=1e-2)
    assert body["lower_bounds"][0]["order"] == 1


def test_matrix_endpoint():
    reply = client.post("/matrix", json={"matrix": [[1.0, -1.0]]})
    body = reply.json()
    assert body["sigma_max"] == pytest.approx(math.sqrt(2.0), abs=1e-9)
    assert body["lower_bound"] == pytest.approx(1.0, abs=1e-9)
    assert body["bruteforce"] == pytest.approx(1.0, abs=1e-6)


def test_uniform_demo_endpoint():
    reply = client.post("/uniform-demo", json={"p": "inf", "delay": 0.5})
    body = reply.json()
    assert body["ratio"] == pytest.approx(0.5, rel=0.02)
    assert body["expected_ratio"] == 0.5


def test_positivity_endpoint():
    with open(fixture_path("pos_g2.json")) as fh:
        import json

        g2 = json.load(fh)
    reply = client.post("/positivity", json={"system": g2, "horizon": 20.0, "step": 0.02})
    body = reply.json()
    assert body == {
        "stable": True,
        "metzler": True,
        "internally_positive": True,
        "externally_positive_sampled": True,
    }


def test_validation_error_is_422():
    reply = client.post("/hinf", json={"system": {"A": [[0.0]]}})  # missing D
    assert reply.status_code == 422
