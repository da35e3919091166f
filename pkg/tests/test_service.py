"""HTTP endpoints: happy paths and error mapping."""

import hashlib

import pytest
from fastapi.testclient import TestClient

import mebudget
from mebudget.service import app
from mebudget.video_io import load_y4m


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def synth_config(**overrides):
    config = {
        "input": {
            "format": "synth",
            "synth": {"width": 64, "height": 48, "frames": 3,
                      "layers": [{"texture": "noise", "x": 0, "y": 0,
                                  "w": 64, "h": 48, "amplitude": 40}]},
        },
        "seed": 1,
    }
    config.update(overrides)
    return config


class TestHealth:
    def test_reports_version(self, client):
        resp = client.get("/health")
        assert resp.status_code == 200
        assert resp.json() == {"status": "ok",
                               "version": mebudget.__version__}


class TestCalibrate:
    def test_reference_for_synth_clip(self, client):
        resp = client.post("/calibrate", json={"config": synth_config()})
        assert resp.status_code == 200
        body = resp.json()
        assert body["kind"] == "calibration"
        assert body["coded_frames"] == 2
        assert body["mb_per_frame"] == 12
        assert body["reference_sp_frame"] > 0
        assert len(body["per_frame_sp"]) == 2


class TestRun:
    def test_budgeted_sequence(self, client):
        config = synth_config(method="ccme", budget_scale=100.0)
        resp = client.post("/run", json={"config": config})
        assert resp.status_code == 200
        body = resp.json()
        assert body["kind"] == "sequence"
        assert body["method"] == "ccme"
        assert body["budget_scale"] == 100.0
        assert len(body["frames"]) == 2
        seed, coded = body["frames"]
        assert seed["seed"] is True and seed["budget_sp"] is None
        assert coded["budget_sp"] == body["budget_sp"]
        agg = body["aggregates"]
        assert agg["coded_frames"] == 2 and agg["budgeted_frames"] == 1

    def test_unbudgeted_run_has_no_reference(self, client):
        config = synth_config(method="shs")
        body = client.post("/run", json={"config": config}).json()
        assert body["budget_sp"] is None
        assert body["reference_sp_frame"] is None
        assert body["budget_scale"] is None

    def test_inconsistent_thresholds_rejected(self, client):
        config = synth_config(th1=6000, th2=5000)
        resp = client.post("/run", json={"config": config})
        assert resp.status_code == 422

    def test_unknown_method_rejected(self, client):
        resp = client.post("/run",
                           json={"config": synth_config(method="best")})
        assert resp.status_code == 422

    def test_missing_clip_is_an_input_error(self, client):
        config = {"input": {"format": "y4m", "path": "/no/such/clip.y4m"}}
        resp = client.post("/run", json={"config": config})
        assert resp.status_code == 400
        assert "input error" in resp.json()["detail"]


class TestSweep:
    def test_two_scale_sweep(self, client):
        payload = {"config": synth_config(), "scales": [100.0, 60.0],
                   "methods": ["ccme"]}
        resp = client.post("/sweep", json=payload)
        assert resp.status_code == 200
        body = resp.json()
        assert body["scales"] == [100.0, 60.0]
        assert [c["scale"] for c in body["cells"]] == [100.0, 60.0]
        at100 = body["cells"][0]
        assert at100["cost_inflation_pct"] == 0.0

    def test_scales_must_include_hundred(self, client):
        payload = {"config": synth_config(), "scales": [60.0, 40.0],
                   "methods": ["ccme"]}
        resp = client.post("/sweep", json=payload)
        assert resp.status_code == 422
        assert "include 100" in resp.json()["detail"]


class TestDetection:
    def test_confusion_counts_consistent(self, client):
        resp = client.post("/detection", json={"config": synth_config()})
        assert resp.status_code == 200
        body = resp.json()
        assert body["total_mbs"] == body["class1_mbs"] \
            + body["lower_path_mbs"]
        assert body["truth_class2"] == body["pred2_truth2"] \
            + body["pred3_truth2"]
        assert body["truth_class3"] == body["pred2_truth3"] \
            + body["pred3_truth3"]
        assert body["scored_frames"] == 1


class TestClassDistribution:
    def test_rows_per_margin(self, client):
        resp = client.post("/class-distribution",
                           json={"config": synth_config()})
        assert resp.status_code == 200
        body = resp.json()
        assert [r["c_value"] for r in body["rows"]] == [0.0, 0.02, 0.04]
        for row in body["rows"]:
            counts = (row["count_class1"] + row["count_class2"]
                      + row["count_class3"])
            assert counts == body["total_mbs"]
            pct = row["pct_class1"] + row["pct_class2"] + row["pct_class3"]
            assert pct == pytest.approx(100.0, abs=1e-3)


class TestSynth:
    def test_writes_clip_and_digest(self, client, tmp_path):
        out = tmp_path / "clip.y4m"
        payload = {"synth": {"width": 64, "height": 48, "frames": 2,
                             "seed": 3},
                   "path": str(out), "format": "y4m"}
        resp = client.post("/synth", json=payload)
        assert resp.status_code == 200
        body = resp.json()
        assert out.exists()
        assert body["sha256"] \
            == hashlib.sha256(out.read_bytes()).hexdigest()
        frames = load_y4m(out)
        assert len(frames) == 2
        assert frames[0].width == 64 and frames[0].height == 48

    def test_unwritable_path_is_an_input_error(self, client, tmp_path):
        payload = {"synth": {"width": 64, "height": 48, "frames": 2},
                   "path": str(tmp_path / "missing" / "clip.y4m"),
                   "format": "y4m"}
        resp = client.post("/synth", json=payload)
        assert resp.status_code == 400
