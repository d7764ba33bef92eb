"""Command-line interface tests.

Everything runs in-process through ``run(argv)`` with stdout captured,
exercising the full pipeline once on a 16-record corpus and then each
command against the resulting bundle.  Exit-code conventions: 0 success,
1 validation problems, 2 unexpected runtime failures.
"""

from __future__ import annotations

import contextlib
import io
import json

import numpy as np
import pytest

from gcskit.cli import BUNDLE_DIR_ENV, run
from gcskit.curves import write_curve_csv
from gcskit.dataset import DESIGN_CSV_COLUMNS
from gcskit.geometry import GcsDesign, check_printability, parse_stl
from gcskit.synthetic import synthetic_dataset

LIGHT = ["--epochs", "15", "--patience", "15", "--weight-decay", "0"]

SCALAR_FIELDS = (
    "c4_base",
    "c4_top",
    "c8_base",
    "c8_top",
    "linear_twist",
    "osc_twist_amplitude",
    "osc_twist_cycles",
    "perimeter_ratio",
)


def invoke(argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = run(argv)
    return code, buf.getvalue()


def invoke_json(argv):
    code, out = invoke(argv)
    assert code == 0, out
    return json.loads(out)


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli-corpus")
    (root / "curves").mkdir()
    dataset = synthetic_dataset(16, seed=3)
    rows = [",".join(DESIGN_CSV_COLUMNS)]
    records = []
    for i, rec in enumerate(dataset.records):
        d = rec.design
        cells = [rec.record_id]
        cells += [repr(getattr(d, f)) for f in SCALAR_FIELDS]
        cells += [repr(d.mass), repr(d.height), repr(d.thickness), d.material.value]
        rows.append(",".join(cells))
        curve_path = f"curves/{rec.record_id}.csv"
        write_curve_csv(root / curve_path, rec.curve)
        records.append(
            {"id": rec.record_id, "design_row": i, "curve_path": curve_path}
        )
    (root / "designs.csv").write_text("\n".join(rows) + "\n")
    (root / "manifest.json").write_text(
        json.dumps(
            {"designs_csv": "designs.csv", "records": records, "notes": "cli demo"}
        )
    )
    (root / "design0.json").write_text(json.dumps(dataset.records[0].design.as_dict()))
    return root


@pytest.fixture(scope="module")
def pipeline(corpus, tmp_path_factory):
    root = tmp_path_factory.mktemp("cli-run")
    data = root / "data"
    filtered = root / "filtered"
    bundle = root / "bundle"
    payloads = {}
    payloads["ingest"] = invoke_json(
        ["ingest", "--manifest", str(corpus / "manifest.json"), "--out", str(data), "--json"]
    )
    payloads["filter"] = invoke_json(
        ["filter", "--data", str(data), "--out", str(filtered), "--min-count", "1", "--json"]
    )
    payloads["pca"] = invoke_json(
        ["pca-fit", "--data", str(filtered), "--bundle", str(bundle), "--json"]
    )
    payloads["forward"] = invoke_json(
        ["train-forward", "--data", str(filtered), "--bundle", str(bundle), *LIGHT, "--json"]
    )
    payloads["inverse"] = invoke_json(
        ["train-inverse", "--data", str(filtered), "--bundle", str(bundle),
         "--alpha", "0.5", *LIGHT, "--json"]
    )
    return {
        "corpus": corpus,
        "data": filtered,
        "bundle": bundle,
        "root": root,
        "payloads": payloads,
    }


class TestPipelineStages:
    def test_ingest_accepts_all_records(self, pipeline):
        payload = pipeline["payloads"]["ingest"]
        assert payload["accepted"] == 16
        assert payload["rejected"] == []

    def test_filter_keeps_everything_at_min_count_one(self, pipeline):
        payload = pipeline["payloads"]["filter"]
        assert payload["kept"] == 16
        assert payload["dropped"] == 0

    def test_pca_reports_explained_variance(self, pipeline):
        payload = pipeline["payloads"]["pca"]
        fractions = payload["explained_variance"]
        assert len(fractions) == 10
        assert sum(fractions) == pytest.approx(1.0, abs=1e-9)

    def test_training_payloads_track_history(self, pipeline):
        fwd = pipeline["payloads"]["forward"]
        assert 1 <= fwd["epochs_run"] <= 15
        assert 0 <= fwd["best_epoch"] < fwd["epochs_run"]
        assert fwd["best_val_loss"] > 0.0
        inv = pipeline["payloads"]["inverse"]
        assert inv["alpha"] == 0.5


class TestPredict:
    def test_json_payload_shape(self, pipeline):
        payload = invoke_json(
            ["predict", "--design", str(pipeline["corpus"] / "design0.json"),
             "--bundle", str(pipeline["bundle"]), "--json"]
        )
        assert len(payload["performance"]) == 11
        assert len(payload["curve"]["forces"]) == 100
        assert set(payload["metrics"]) == {
            "stiffness_n_mm", "work_j", "max_displacement_mm",
        }

    def test_byte_identical_repeats(self, pipeline):
        argv = ["predict", "--design", str(pipeline["corpus"] / "design0.json"),
                "--bundle", str(pipeline["bundle"]), "--json"]
        _, first = invoke(argv)
        _, second = invoke(argv)
        assert first == second

    def test_inline_design_json_matches_file(self, pipeline):
        inline = (pipeline["corpus"] / "design0.json").read_text()
        _, from_file = invoke(
            ["predict", "--design", str(pipeline["corpus"] / "design0.json"),
             "--bundle", str(pipeline["bundle"]), "--json"]
        )
        _, from_inline = invoke(
            ["predict", "--design", inline, "--bundle", str(pipeline["bundle"]), "--json"]
        )
        assert from_file == from_inline

    def test_human_output_without_json_flag(self, pipeline):
        code, out = invoke(
            ["predict", "--design", str(pipeline["corpus"] / "design0.json"),
             "--bundle", str(pipeline["bundle"])]
        )
        assert code == 0
        assert out.startswith("predicted metrics:")

    def test_env_var_supplies_bundle_dir(self, pipeline, monkeypatch):
        monkeypatch.setenv(BUNDLE_DIR_ENV, str(pipeline["bundle"]))
        payload = invoke_json(
            ["predict", "--design", str(pipeline["corpus"] / "design0.json"), "--json"]
        )
        assert len(payload["performance"]) == 11


class TestInvert:
    def test_generates_valid_design(self, pipeline, tmp_path):
        curve_path = pipeline["corpus"] / "curves"
        target = next(curve_path.glob("*.csv"))
        payload = invoke_json(
            ["invert", "--curve", str(target), "--alpha", "0.5",
             "--bundle", str(pipeline["bundle"]), "--json"]
        )
        design = GcsDesign.from_dict(payload["design"])
        design.validate()
        assert len(payload["predicted_curve"]["forces"]) == 100
        assert "printable" in payload["printability"]
        assert set(payload["metrics_delta"]) == {
            "stiffness_n_mm", "work_j", "max_displacement_mm",
        }

    def test_unknown_alpha_is_validation_error(self, pipeline, capsys):
        target = next((pipeline["corpus"] / "curves").glob("*.csv"))
        code, _ = invoke(
            ["invert", "--curve", str(target), "--alpha", "0.25",
             "--bundle", str(pipeline["bundle"]), "--json"]
        )
        assert code == 1
        assert "alpha=0.25" in capsys.readouterr().err


class TestMeshCommand:
    def test_writes_stl_with_expected_triangle_count(self, pipeline, tmp_path):
        out = tmp_path / "shell.stl"
        payload = invoke_json(
            ["mesh", "--design", str(pipeline["corpus"] / "design0.json"),
             "--stl", str(out), "--z-slices", "16", "--phi-samples", "32", "--json"]
        )
        expected_triangles = 2 * (16 - 1) * 32
        assert payload["triangles"] == expected_triangles
        assert payload["bytes"] == 84 + 50 * expected_triangles
        data = out.read_bytes()
        assert len(data) == payload["bytes"]
        mesh = parse_stl(data)
        assert np.isfinite(mesh.vertices).all()


class TestPrintabilityCommand:
    def test_payload_matches_library(self, pipeline):
        payload = invoke_json(
            ["printability", "--design", str(pipeline["corpus"] / "design0.json"), "--json"]
        )
        design = GcsDesign.from_dict(
            json.loads((pipeline["corpus"] / "design0.json").read_text())
        )
        assert payload == check_printability(design).as_dict()


class TestEvalAndSweep:
    def test_eval_writes_tables_and_figure(self, pipeline, tmp_path):
        out = tmp_path / "reports"
        payload = invoke_json(
            ["eval", "--data", str(pipeline["data"]), "--runs", "2",
             "--predictor", "knn", "--out", str(out), "--json"]
        )
        assert payload["runs"] == 2
        suffixes = set()
        for name in payload["files"]:
            path = tmp_path / "reports" / name.split("/")[-1]
            assert path.exists()
            suffixes.add(path.suffix)
        assert suffixes == {".json", ".csv", ".png"}

    def test_sweep_alpha_writes_reports(self, pipeline, tmp_path):
        out = tmp_path / "sweeps"
        payload = invoke_json(
            ["sweep-alpha", "--data", str(pipeline["data"]), "--alphas", "0,1",
             "--runs", "1", *LIGHT, "--out", str(out), "--json"]
        )
        assert payload["alphas"] == [0.0, 1.0]
        assert len(payload["rate_mean"]) == 2
        for name in payload["files"]:
            assert (tmp_path / "sweeps" / name.split("/")[-1]).exists()


class TestOptimizeImpactCommand:
    def test_writes_stl_and_result_json(self, pipeline, tmp_path):
        spec_path = tmp_path / "impact.json"
        spec_path.write_text(
            json.dumps(
                {
                    "force_threshold_n": 12.0,
                    "target_energy_j": 0.05,
                    "ramp_stiffness_n_mm": [1.0, 3.0],
                    "plateau_fractions": [0.8],
                    "max_displacements_mm": [8.0],
                }
            )
        )
        stl = tmp_path / "winner.stl"
        out = tmp_path / "result.json"
        payload = invoke_json(
            ["optimize-impact", "--spec", str(spec_path), "--alpha", "0.5",
             "--bundle", str(pipeline["bundle"]), "--stl", str(stl),
             "--out", str(out), "--json"]
        )
        assert isinstance(payload["feasible"], bool)
        assert len(payload["candidate_log"]) == 2
        assert stl.exists() and stl.stat().st_size > 84
        assert json.loads(out.read_text()) == payload


class TestEmulateCommand:
    def test_writes_comparison_figure(self, pipeline, tmp_path):
        target = next((pipeline["corpus"] / "curves").glob("*.csv"))
        figure = tmp_path / "comparison.png"
        payload = invoke_json(
            ["emulate", "--curve", str(target), "--alpha", "0.5",
             "--bundle", str(pipeline["bundle"]), "--figure", str(figure), "--json"]
        )
        assert figure.exists() and figure.stat().st_size > 0
        GcsDesign.from_dict(payload["design"]).validate()
        assert "deltas" in payload["report"]


class TestConfigFile:
    def test_config_supplies_training_defaults_and_bundle(self, pipeline, tmp_path):
        bundle2 = tmp_path / "bundle2"
        config = tmp_path / "config.json"
        config.write_text(
            json.dumps(
                {
                    "max_epochs": 4,
                    "patience": 4,
                    "weight_decay": 0.0,
                    "bundle_dir": str(bundle2),
                }
            )
        )
        invoke_json(
            ["pca-fit", "--data", str(pipeline["data"]), "--config", str(config), "--json"]
        )
        payload = invoke_json(
            ["train-forward", "--data", str(pipeline["data"]),
             "--config", str(config), "--json"]
        )
        assert payload["bundle_dir"] == str(bundle2)
        assert payload["epochs_run"] <= 4

    def test_unknown_config_key_is_validation_error(self, pipeline, tmp_path, capsys):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"max_epoch": 4}))
        code, _ = invoke(
            ["train-forward", "--data", str(pipeline["data"]), "--config", str(config)]
        )
        assert code == 1
        assert "unknown config keys" in capsys.readouterr().err


class TestExitCodes:
    def test_help_exits_zero(self):
        with pytest.raises(SystemExit) as excinfo:
            invoke(["--help"])
        assert excinfo.value.code == 0

    def test_missing_required_flag_exits_one(self):
        with pytest.raises(SystemExit) as excinfo:
            invoke(["predict"])
        assert excinfo.value.code == 1

    def test_unknown_command_exits_one(self):
        with pytest.raises(SystemExit) as excinfo:
            invoke(["transmogrify"])
        assert excinfo.value.code == 1

    def test_out_of_range_design_exits_one(self, pipeline, capsys):
        design = json.loads((pipeline["corpus"] / "design0.json").read_text())
        design["mass_g" if "mass_g" in design else "mass"] = 9.0
        code, _ = invoke(
            ["predict", "--design", json.dumps(design),
             "--bundle", str(pipeline["bundle"])]
        )
        assert code == 1
        assert "mass" in capsys.readouterr().err

    def test_missing_bundle_exits_one(self, pipeline, tmp_path, capsys):
        code, _ = invoke(
            ["train-forward", "--data", str(pipeline["data"]),
             "--bundle", str(tmp_path / "nowhere")]
        )
        assert code == 1
        assert "pca-fit first" in capsys.readouterr().err

    def test_missing_curve_file_exits_one(self, pipeline):
        code, _ = invoke(
            ["invert", "--curve", "/nonexistent/curve.csv",
             "--bundle", str(pipeline["bundle"])]
        )
        assert code == 1

    def test_malformed_manifest_exits_one(self, tmp_path):
        bad = tmp_path / "manifest.json"
        bad.write_text("{not json")
        code, _ = invoke(["ingest", "--manifest", str(bad)])
        assert code == 1

    def test_unexpected_failure_exits_two(self, pipeline, monkeypatch, capsys):
        import gcskit.cli as cli_module

        def boom(design):
            raise RuntimeError("synthetic failure")

        monkeypatch.setattr(cli_module, "check_printability", boom)
        code, _ = invoke(
            ["printability", "--design", str(pipeline["corpus"] / "design0.json")]
        )
        assert code == 2
        assert "runtime failure" in capsys.readouterr().err
