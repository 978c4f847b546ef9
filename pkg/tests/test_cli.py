"""End-to-end tests for the ppe-sizer command line"""

import json

import pytest
import yaml

from cli import main, read_manifest
from formats import list_scan_ids, read_latents, read_pcf, read_report, read_training_log
from nn import debug_checks_enabled, set_debug_checks

SYNTH_POINTS = "25000"


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "settings.yaml"
    path.write_text(yaml.safe_dump({'analysis': {'restarts': 2}, 'vae': {'workers': 1}}))
    return str(path)


def _run(capsys, config_file, *argv):
    code = main(["--config", config_file, *argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def faces(tmp_path, capsys, config_file):
    raw, out = tmp_path / "raw", tmp_path / "faces"
    code, _, _ = _run(capsys, config_file, "synth", "--count", "8", "--points", SYNTH_POINTS,
                      "--seed", "0", "--out", str(raw))
    assert code == 0
    code, stdout, _ = _run(capsys, config_file, "preprocess", "--in", str(raw), "--out", str(out),
                           "--points", "40", "--seed", "0")
    assert code == 0
    assert "processed=8 skipped=0" in stdout
    return out


class TestCommands:
    def test_synth_writes_scans_and_manifest(self, tmp_path, capsys, config_file):
        out = tmp_path / "raw"
        code, stdout, _ = _run(capsys, config_file, "synth", "--count", "3", "--points", SYNTH_POINTS,
                               "--out", str(out))
        assert code == 0
        assert stdout.startswith("scans=3")
        assert list_scan_ids(out) == ["synth_00000", "synth_00001", "synth_00002"]
        manifest = read_manifest(out / "run_manifest.yaml")
        assert manifest.command == "synth"
        assert manifest.parameters['count'] == 3
        assert manifest.parameters['noise'] == 0.001
        assert "synth_00001.pcf" in manifest.outputs

    def test_preprocess_fixed_size(self, faces):
        assert len(list_scan_ids(faces)) == 8
        assert read_pcf(faces / "synth_00003.pcf").shape == (40, 3)
        assert (faces / "run_manifest.yaml").exists()

    def test_emd_of_identical_clouds(self, faces, capsys, config_file):
        path = str(faces / "synth_00000.pcf")
        code, stdout, _ = _run(capsys, config_file, "emd", "--a", path, "--b", path)
        assert code == 0
        assert stdout.startswith("emd=0 n=40")

    def test_emd_positive_and_manifest(self, faces, tmp_path, capsys, config_file):
        manifest = tmp_path / "emd.manifest.yaml"
        code, stdout, _ = _run(capsys, config_file, "emd", "--a", str(faces / "synth_00000.pcf"),
                               "--b", str(faces / "synth_00001.pcf"), "--manifest", str(manifest))
        assert code == 0
        assert float(stdout.split()[0].split("=")[1]) > 0.0
        assert read_manifest(manifest).command == "emd"

    def test_config_show(self, capsys, config_file):
        code, stdout, _ = _run(capsys, config_file, "config", "show")
        assert code == 0
        assert stdout.startswith(f"config_file={config_file}")

    def test_debug_mode_enables_finite_checks(self, tmp_path, capsys):
        path = tmp_path / "debug.yaml"
        path.write_text(yaml.safe_dump({'core': {'debug_mode': True}}))
        try:
            code, _, _ = _run(capsys, str(path), "config", "show")
            assert code == 0
            assert debug_checks_enabled()
        finally:
            set_debug_checks(False)

    def test_empty_dataset_is_reported(self, tmp_path, capsys, config_file):
        (tmp_path / "empty").mkdir()
        code, _, stderr = _run(capsys, config_file, "train", "--data", str(tmp_path / "empty"),
                               "--out", str(tmp_path / "model.ckpt"))
        assert code == 1
        assert stderr.strip().splitlines()[-1].startswith("error:dataset:")

    def test_missing_config_file(self, tmp_path, capsys):
        code = main(["--config", str(tmp_path / "nope.yaml"), "config", "show"])
        assert code == 1
        assert capsys.readouterr().err.strip().splitlines()[-1].startswith("error:config:")

    @pytest.mark.parametrize("argv", [
        ["train", "--out", "model.ckpt"],
        ["synth", "--count", "three", "--out", "raw"],
        ["unknown-command"],
    ])
    def test_usage_errors_are_one_line(self, capsys, config_file, argv):
        code, stdout, stderr = _run(capsys, config_file, *argv)
        assert code == 1
        assert stdout == ""
        lines = stderr.strip().splitlines()
        assert len(lines) == 1
        assert lines[0].startswith("error:config:")

    def test_missing_required_flag_is_named(self, capsys, config_file):
        _, _, stderr = _run(capsys, config_file, "train", "--out", "model.ckpt")
        assert "--data" in stderr

    def test_yaml_error_is_one_line(self, tmp_path, capsys):
        path = tmp_path / "broken.yaml"
        path.write_text("vae:\n  lr: [1e-4\n  batch_size: 4\n")
        code = main(["--config", str(path), "config", "show"])
        lines = capsys.readouterr().err.strip().splitlines()
        assert code == 1
        assert len(lines) == 1
        assert lines[0].startswith("error:config:")

    def test_unsupported_grouping(self, tmp_path, capsys, config_file):
        latents = tmp_path / "z.csv"
        latents.write_text("id,z0,gender,race\na,0.0,Female,Asian\n")
        code, _, stderr = _run(capsys, config_file, "cluster", "--latents", str(latents), "--k", "1",
                               "--group-by", "gender", "--out", str(tmp_path / "report.json"))
        assert code == 1
        assert "error:config:" in stderr


def test_full_pipeline(faces, tmp_path, capsys, config_file):
    model = tmp_path / "model.ckpt"
    code, stdout, _ = _run(capsys, config_file, "train", "--data", str(faces), "--latent", "3",
                           "--width-mult", "0.015625", "--batch", "2", "--max-epochs", "1",
                           "--seed", "0", "--out", str(model))
    assert code == 0
    assert stdout.startswith("best_epoch=")
    assert [row['epoch'] for row in read_training_log(tmp_path / "model_log.csv").rows] == [0, 1]
    assert (tmp_path / "model.ckpt.manifest.yaml").exists()

    latents = tmp_path / "latents.csv"
    code, stdout, _ = _run(capsys, config_file, "encode", "--model", str(model), "--data", str(faces),
                           "--out", str(latents))
    assert code == 0
    assert "rows=8 dim=3" in stdout
    table = read_latents(latents)
    assert table.ids == list_scan_ids(faces)

    explored = tmp_path / "explore"
    code, stdout, _ = _run(capsys, config_file, "explore", "--latents", str(latents), "--data", str(faces),
                           "--model", str(model), "--out", str(explored))
    assert code == 0
    probes = json.loads((explored / "probes.json").read_text())
    assert len(probes['probes']) == 6
    assert probes['mean_id'] in table.ids
    assert read_pcf(explored / "dim0_p5_decoded.pcf").shape == (40, 3)
    assert (explored / "dim2_p95_distances.csv").exists()

    report = tmp_path / "report.json"
    code, stdout, _ = _run(capsys, config_file, "cluster", "--latents", str(latents), "--k", "1",
                           "--out", str(report))
    assert code == 0
    assert "groups=8 skipped=0 k=1" in stdout
    groups = read_report(report)
    assert all(len(g.clusters) == 1 and g.clusters[0].distance == 0.0 for g in groups)
    assert (tmp_path / "report_all.svg").exists()

    code, stdout, _ = _run(capsys, config_file, "size", "--model", str(model),
                           "--scan", str(faces / "synth_00004.pcf"), "--report", str(report))
    assert code == 0
    assert stdout.startswith("cluster=0 group=")
    assert stdout.split()[2] == "distance=0"


def test_replay_reproduces_outputs(tmp_path, capsys, config_file):
    out = tmp_path / "raw"
    code, _, _ = _run(capsys, config_file, "synth", "--count", "2", "--points", SYNTH_POINTS,
                      "--seed", "5", "--out", str(out))
    assert code == 0
    before = {p.name: p.read_bytes() for p in sorted(out.glob("*.pcf"))}

    for p in out.glob("*.pcf"):
        p.unlink()
    code, _, _ = _run(capsys, config_file, "replay", str(out / "run_manifest.yaml"))
    assert code == 0
    assert {p.name: p.read_bytes() for p in sorted(out.glob("*.pcf"))} == before


@pytest.mark.slow
def test_training_replay_is_bit_exact(faces, tmp_path, capsys, config_file):
    model = tmp_path / "model.ckpt"
    args = ["train", "--data", str(faces), "--width-mult", "0.015625", "--batch", "2",
            "--max-epochs", "3", "--seed", "1", "--out", str(model)]
    assert _run(capsys, config_file, *args)[0] == 0
    first = model.read_bytes()
    log = (tmp_path / "model_log.csv").read_bytes()

    assert _run(capsys, config_file, "replay", str(tmp_path / "model.ckpt.manifest.yaml"))[0] == 0
    assert model.read_bytes() == first
    assert (tmp_path / "model_log.csv").read_bytes() == log
