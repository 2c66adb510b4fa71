import io
import json

import numpy as np
import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient
from PIL import Image as PilImage

import segal.cli as cli_mod
from segal.cli import main
from segal.dataset_io import load_dataset
from segal.learner import LearnerConfig
from segal.loop import ExperimentConfig
from segal.service import AnnotationService, create_app
from segal.synth import SynthConfig, generate
from segal.dataset_io import write_dataset


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture(scope="module")
def synth_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("cli") / "ds"
    runner = CliRunner()
    result = runner.invoke(main, [
        "synth", "--out", str(out), "--num-samples", "24", "--height", "8", "--width", "8",
        "--seed", "4",
    ])
    assert result.exit_code == 0, result.output
    return out


@pytest.fixture(scope="module")
def exp_config(tmp_path_factory):
    path = tmp_path_factory.mktemp("cfg") / "exp.json"
    cfg = {
        "strategy": "random",
        "per_cycle_k": 2,
        "cycles": 2,
        "initial_labeled": 3,
        "eval_split": [0.7, 0.3, 0.0],
        "learning_rate": 1.0,
        "epochs": 3,
        "batch_pixels": 4096,
    }
    path.write_text(json.dumps(cfg))
    return path


class TestSynthCommand:
    def test_writes_dataset_with_config_echo(self, synth_dir):
        ds = load_dataset(synth_dir)
        assert len(ds) == 24
        manifest = json.loads((synth_dir / "manifest.json").read_text())
        assert manifest["synth_config"]["num_samples"] == 24
        assert manifest["synth_config"]["seed"] == 4

    def test_custom_priors(self, runner, tmp_path):
        out = tmp_path / "ds"
        result = runner.invoke(main, [
            "synth", "--out", str(out), "--num-samples", "4", "--height", "6", "--width", "6",
            "--classes", "3", "--priors", "0.5,0.3,0.2", "--seed", "1",
        ])
        assert result.exit_code == 0, result.output
        assert load_dataset(out).num_classes == 3

    def test_bad_priors_fail(self, runner, tmp_path):
        result = runner.invoke(main, [
            "synth", "--out", str(tmp_path / "x"), "--classes", "3", "--priors", "0.5,0.3",
        ])
        assert result.exit_code != 0


class TestRunCommand:
    def test_outputs(self, runner, synth_dir, exp_config, tmp_path):
        out = tmp_path / "run"
        result = runner.invoke(main, [
            "run", "--dataset", str(synth_dir), "--config", str(exp_config), "--out", str(out),
        ])
        assert result.exit_code == 0, result.output
        assert (out / "cycles.csv").is_file()
        summary = json.loads((out / "summary.json").read_text())
        assert summary["cycles_run"] == 2
        assert summary["config"]["strategy"] == "random"

    def test_flag_overrides(self, runner, synth_dir, exp_config, tmp_path):
        out = tmp_path / "run"
        result = runner.invoke(main, [
            "run", "--dataset", str(synth_dir), "--config", str(exp_config),
            "--cycles", "1", "--strategy", "entropy", "--out", str(out),
        ])
        assert result.exit_code == 0, result.output
        summary = json.loads((out / "summary.json").read_text())
        assert summary["cycles_run"] == 1
        assert summary["config"]["strategy"] == "entropy"


class TestSweepCommand:
    def test_sweep_outputs(self, runner, synth_dir, exp_config, tmp_path):
        out = tmp_path / "sweep"
        result = runner.invoke(main, [
            "sweep", "--dataset", str(synth_dir), "--config", str(exp_config),
            "--axis", "per_cycle_k", "--values", "1,2", "--out", str(out),
        ])
        assert result.exit_code == 0, result.output
        payload = json.loads((out / "sweep.json").read_text())
        assert payload["axis"] == "per_cycle_k"
        assert [row["value"] for row in payload["rows"]] == [1.0, 2.0]
        assert (out / "cycles_per_cycle_k_1.csv").is_file()


class TestCompareCommand:
    def test_comparison_with_upper_bound(self, runner, synth_dir, exp_config, tmp_path):
        out = tmp_path / "cmp.json"
        result = runner.invoke(main, [
            "compare", "--dataset", str(synth_dir), "--config", str(exp_config),
            "--strategies", "random,entropy", "--with-upper-bound", "--out", str(out),
        ])
        assert result.exit_code == 0, result.output
        payload = json.loads(out.read_text())
        assert set(payload["strategies"]) == {"random", "entropy"}
        assert "upper_bound" in payload


class TestClientCommands:
    @pytest.fixture
    def live(self, tmp_path, monkeypatch):
        root = tmp_path / "data"
        write_dataset(generate(SynthConfig(num_samples=20, height=8, width=8, seed=9)), root)
        cfg = ExperimentConfig(
            strategy="dcau", per_cycle_k=2, cycles=2, initial_labeled=3,
            learner=LearnerConfig(learning_rate=1.0, epochs=3, batch_pixels=4096),
            eval_split=(0.7, 0.3, 0.0), annotation_mode="human",
        )
        service = AnnotationService(root, cfg, tmp_path / "state")
        test_client = TestClient(create_app(service))

        class FakeResponse:
            def __init__(self, response):
                self._r = response
                self.status_code = response.status_code
                self.text = response.text

            def json(self):
                return self._r.json()

            def raise_for_status(self):
                self._r.raise_for_status()

        monkeypatch.setattr(
            cli_mod.httpx, "get", lambda url, **kw: FakeResponse(test_client.get(url))
        )
        monkeypatch.setattr(
            cli_mod.httpx, "post", lambda url, json=None, **kw: FakeResponse(test_client.post(url, json=json))
        )
        return test_client

    def test_status_queue_metrics(self, runner, live):
        result = runner.invoke(main, ["client", "--url", "http://t", "status"])
        assert result.exit_code == 0, result.output
        assert json.loads(result.output)["pending"] == 2

        result = runner.invoke(main, ["client", "--url", "http://t", "queue"])
        items = json.loads(result.output)["items"]
        assert len(items) == 2

        result = runner.invoke(main, ["client", "--url", "http://t", "metrics"])
        assert json.loads(result.output)["records"] == []

    def test_submit_and_advance(self, runner, live, tmp_path):
        items = live.get("/queue").json()["items"]
        for item in items:
            png = live.get(f"/sample/{item['sample_id']}/prediction").content
            mask_path = tmp_path / f"{item['sample_id']}.png"
            mask_path.write_bytes(png)
            result = runner.invoke(main, [
                "client", "--url", "http://t", "submit",
                "--id", item["sample_id"], "--mask", str(mask_path),
            ])
            assert result.exit_code == 0, result.output
        result = runner.invoke(main, ["client", "--url", "http://t", "advance"])
        assert result.exit_code == 0, result.output
        assert json.loads(result.output)["advancing"] is True

    def test_submit_error_surfaces(self, runner, live, tmp_path):
        arr = np.zeros((4, 4), dtype=np.uint8)
        buf = io.BytesIO()
        PilImage.fromarray(arr, mode="L").save(buf, format="PNG")
        bad = tmp_path / "bad.png"
        bad.write_bytes(buf.getvalue())
        sample_id = live.get("/queue").json()["items"][0]["sample_id"]
        result = runner.invoke(main, [
            "client", "--url", "http://t", "submit", "--id", sample_id, "--mask", str(bad),
        ])
        assert result.exit_code == 1
        assert "422" in result.output
