"""Tests for configuration loading and run manifests"""

import pytest
import yaml

from core.config import Config
from core.errors import ConfigError, FormatError
from cli.manifest import (
    MANIFEST_NAME,
    RunManifest,
    manifest_path_for,
    read_manifest,
    write_manifest,
)
from vae import VaeConfig


def _config(tmp_path, overrides=None):
    path = tmp_path / "config.yaml"
    if overrides is not None:
        path.write_text(yaml.safe_dump(overrides))
    return Config(config_dir=str(tmp_path), config_file=str(path))


class TestConfig:
    def test_defaults_without_file(self, tmp_path):
        settings = _config(tmp_path)
        assert settings.get('preprocess.target_points') == 10000
        assert settings.get('preprocess.chin_margin') == 0.04
        assert settings.get('vae.n_points') == 250
        assert settings.get('analysis.percentiles') == [5.0, 95.0]
        assert settings.get('missing.key', 'fallback') == 'fallback'

    def test_yaml_overrides_merge(self, tmp_path):
        settings = _config(tmp_path, {'vae': {'latent_dim': 5}, 'analysis': {'k': 4}})
        assert settings.get('vae.latent_dim') == 5
        assert settings.get('vae.batch_size') == 16
        assert settings.get('analysis.k') == 4

    @pytest.mark.parametrize("overrides", [
        {'vae': {'n_points': 256}},
        {'vae': {'width_mult': 2.0}},
        {'analysis': {'percentiles': [5, 150]}},
        {'assignment': {'eps_scale_divisor': 1.0}},
        {'core': {'log_level': 'LOUD'}},
    ])
    def test_invalid_values_rejected(self, tmp_path, overrides):
        with pytest.raises(ConfigError):
            _config(tmp_path, overrides)

    def test_unreadable_yaml(self, tmp_path):
        (tmp_path / "config.yaml").write_text("vae: [unclosed\n")
        with pytest.raises(ConfigError):
            Config(config_dir=str(tmp_path), config_file=str(tmp_path / "config.yaml"))

    def test_section_is_a_copy(self, tmp_path):
        settings = _config(tmp_path)
        section = settings.section('vae')
        section['latent_dim'] = 99
        assert settings.get('vae.latent_dim') == 3
        assert settings.section('nonexistent') == {}

    def test_set_and_save(self, tmp_path):
        settings = _config(tmp_path)
        settings.set('analysis.k', 6, save_immediately=True)
        assert _config(tmp_path).get('analysis.k') == 6

    def test_summary_is_flat(self, tmp_path):
        summary = _config(tmp_path).get_config_summary()
        assert summary['vae.width_mult'] == pytest.approx(1.0 / 16.0)
        assert summary['config_file'].endswith("config.yaml")

    def test_training_config_from_settings(self, tmp_path):
        settings = _config(tmp_path, {'assignment': {'train_eps_rel': 0.05}})
        cfg = VaeConfig.from_settings(settings, n_points=40, lr=None, seed=3)
        assert cfg.n_points == 40
        assert cfg.lr == 1e-4
        assert cfg.train_eps_rel == 0.05
        assert cfg.width_mult == pytest.approx(1.0 / 16.0)
        assert cfg.seed == 3


class TestManifest:
    def test_round_trip(self, tmp_path):
        manifest = RunManifest(command="cluster", parameters={'k': 3, 'latents': "z.csv"}, seed=4,
                               inputs=["z.csv"], outputs=["report.json"])
        path = write_manifest(manifest, tmp_path / "m.yaml")
        assert read_manifest(path) == manifest

    def test_keys_sorted_on_disk(self, tmp_path):
        path = write_manifest(RunManifest(command="synth", parameters={'b': 1, 'a': 2}), tmp_path / "m.yaml")
        keys = [line.split(":")[0] for line in path.read_text().splitlines() if not line.startswith(" ")]
        assert keys == sorted(keys)

    def test_location(self, tmp_path):
        assert manifest_path_for(tmp_path) == tmp_path / MANIFEST_NAME
        assert manifest_path_for(tmp_path / "model.ckpt") == tmp_path / "model.ckpt.manifest.yaml"

    def test_missing_command(self, tmp_path):
        path = tmp_path / "m.yaml"
        path.write_text("parameters: {}\n")
        with pytest.raises(FormatError):
            read_manifest(path)

    def test_not_a_mapping(self, tmp_path):
        path = tmp_path / "m.yaml"
        path.write_text("- 1\n- 2\n")
        with pytest.raises(FormatError):
            read_manifest(path)
