"""Tests for face extraction and the synthetic head generator"""

import numpy as np
import pytest

from core.errors import ConfigError, DatasetError, MissingLandmarksError
from formats import Gender, Race, ScanRecord, list_scan_ids, read_pcf, write_scan
from geometry import LandmarkSet, align_tragions, yaw_matrix
from pipeline import (
    DEMOGRAPHIC_GROUPS,
    PreprocessConfig,
    SynthFactors,
    extract_face,
    extract_face_detailed,
    preprocess_directory,
    synth_dataset,
    synth_scan,
)


def _lexsorted(cloud):
    return cloud[np.lexsort(cloud.T)]


def _lateral_extent(cloud):
    return cloud[:, 1].max() - cloud[:, 1].min()


class TestSynthScan:
    def test_noise_free_scan_is_symmetric(self):
        scan = synth_scan(SynthFactors(1.0, 1.0, 0.0), noise_sigma=0.0, seed=0)
        mirrored = scan.cloud * np.array([1.0, -1.0, 1.0])
        np.testing.assert_allclose(_lexsorted(scan.cloud), _lexsorted(mirrored), atol=1e-9)

    def test_width_scales_lateral_extent(self):
        wide = synth_scan(SynthFactors(width=1.3), noise_sigma=0.0, seed=1)
        narrow = synth_scan(SynthFactors(width=0.7), noise_sigma=0.0, seed=1)
        ratio = _lateral_extent(wide.cloud) / _lateral_extent(narrow.cloud)
        assert ratio == pytest.approx(1.3 / 0.7, rel=0.02)

    def test_size_increases_spread(self):
        spreads = []
        for size in (0.8, 1.0, 1.2):
            cloud = synth_scan(SynthFactors(size=size), noise_sigma=0.0, seed=2).cloud
            spreads.append(np.linalg.norm(cloud - cloud.mean(axis=0), axis=1).mean())
        assert spreads[0] < spreads[1] < spreads[2]

    def test_deterministic(self):
        a = synth_scan(SynthFactors(1.1, 0.9, 0.02), seed=5)
        b = synth_scan(SynthFactors(1.1, 0.9, 0.02), seed=5)
        np.testing.assert_array_equal(a.cloud, b.cloud)
        assert a.landmarks == b.landmarks
        assert a.factors == b.factors

    def test_factor_ranges(self):
        with pytest.raises(ConfigError):
            SynthFactors(width=2.0)
        with pytest.raises(ConfigError):
            SynthFactors(protrusion=-0.01)

    def test_too_few_points(self):
        with pytest.raises(ConfigError):
            synth_scan(SynthFactors(), n_points=100)


class TestSynthDataset:
    def test_one_record_per_group(self):
        records = synth_dataset(8, seed=0)
        assert sorted(r.group for r in records) == sorted((g.value, r.value) for g, r in DEMOGRAPHIC_GROUPS)
        assert len({r.id for r in records}) == 8

    def test_empty(self):
        assert synth_dataset(0) == []

    def test_same_seed_same_dataset(self):
        a = synth_dataset(3, seed=4)
        b = synth_dataset(3, seed=4, workers=2)
        for x, y in zip(a, b):
            assert x.id == y.id
            np.testing.assert_array_equal(x.cloud, y.cloud)
            assert x.factors == y.factors

    def test_groups_cover_enums(self):
        assert len(DEMOGRAPHIC_GROUPS) == len(Gender) * len(Race)


class TestExtractFace:
    def test_fixed_size_and_centered(self, head_scan):
        face = extract_face(head_scan, PreprocessConfig(target_points=10000, seed=0))
        assert face.shape == (10000, 3)
        np.testing.assert_allclose(face.mean(axis=0), 0.0, atol=1e-6)

    def test_points_satisfy_crop_predicates(self, head_scan):
        cfg = PreprocessConfig(target_points=2000, seed=1)
        result = extract_face_detailed(head_scan, cfg)
        original = result.uncentered()
        midpoint = result.landmarks.tragion_midpoint
        assert np.all(original[:, 0] > midpoint[0] - 1e-9)
        assert np.all(original[:, 2] > result.landmarks.cervicale[2] - cfg.chin_margin - 1e-9)

    def test_invariant_to_yaw_and_translation(self, head_scan):
        cfg = PreprocessConfig(target_points=3000, seed=2)
        rot = yaw_matrix(np.deg2rad(45.0))
        shift = np.array([0.3, -1.2, 0.05])

        moved = head_scan.metadata()
        lm = LandmarkSet.from_array(head_scan.landmarks.as_array() @ rot.T + shift)
        moved.landmarks = lm
        moved_scan = ScanRecord.from_parts(moved, head_scan.cloud @ rot.T + shift)

        np.testing.assert_allclose(extract_face(moved_scan, cfg), extract_face(head_scan, cfg), atol=1e-6)

    def test_missing_landmarks(self, head_scan):
        meta = head_scan.metadata()
        meta.landmarks = None
        with pytest.raises(MissingLandmarksError):
            extract_face(ScanRecord.from_parts(meta, head_scan.cloud), PreprocessConfig())

    def test_invalid_config(self):
        with pytest.raises(ConfigError):
            PreprocessConfig(target_points=0)
        with pytest.raises(ConfigError):
            PreprocessConfig(chin_margin=-0.1)


class TestPreprocessDirectory:
    def test_skips_scans_without_landmarks(self, tmp_path, head_scan):
        raw = tmp_path / "raw"
        write_scan(head_scan, raw)
        meta = head_scan.metadata()
        meta.id = "no_landmarks"
        meta.landmarks = None
        write_scan(ScanRecord.from_parts(meta, head_scan.cloud), raw)

        out = tmp_path / "faces"
        summary = preprocess_directory(raw, out, PreprocessConfig(target_points=500))
        assert summary.processed == [head_scan.id]
        assert [scan_id for scan_id, _ in summary.skipped] == ["no_landmarks"]
        assert summary.skipped[0][1].startswith("error:pipeline:")
        assert list_scan_ids(out) == [head_scan.id]
        assert read_pcf(out / f"{head_scan.id}.pcf").shape == (500, 3)

    def test_empty_directory(self, tmp_path):
        with pytest.raises(DatasetError):
            preprocess_directory(tmp_path, tmp_path / "out", PreprocessConfig())


@pytest.mark.slow
class TestExtractFaceOnManyScans:
    @pytest.fixture(scope="class")
    def scans(self):
        return synth_dataset(100, seed=21, workers=4)

    def test_fixed_size_and_centered(self, scans):
        for i, scan in enumerate(scans):
            face = extract_face(scan, PreprocessConfig(target_points=10000, seed=i))
            assert face.shape == (10000, 3), scan.id
            np.testing.assert_allclose(face.mean(axis=0), 0.0, atol=1e-6, err_msg=scan.id)

    def test_tragions_aligned_before_crop(self, scans):
        for scan in scans:
            _, lm = align_tragions(scan.cloud, scan.landmarks)
            vx, vy = lm.tragion_vector[:2]
            assert abs(np.arctan2(vx, abs(vy))) < 1e-9, scan.id

    def test_invariant_to_random_yaw_and_translation(self, scans):
        gen = np.random.default_rng(5)
        for i, scan in enumerate(scans):
            cfg = PreprocessConfig(target_points=10000, seed=i)
            rot = yaw_matrix(gen.uniform(-np.pi, np.pi))
            shift = gen.uniform(-2.0, 2.0, 3)

            moved = scan.metadata()
            moved.landmarks = LandmarkSet.from_array(scan.landmarks.as_array() @ rot.T + shift)
            moved_scan = ScanRecord.from_parts(moved, scan.cloud @ rot.T + shift)

            np.testing.assert_allclose(extract_face(moved_scan, cfg), extract_face(scan, cfg),
                                       atol=1e-6, err_msg=scan.id)
