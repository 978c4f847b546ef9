"""Tests for point cloud geometry"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays
from scipy.spatial.distance import pdist

from core.errors import DegenerateLandmarksError, EmptyCropError, ShapeError
from geometry import (
    LandmarkSet,
    align_tragions,
    as_cloud,
    center,
    crop_face,
    nearest_distances,
    orient_forward,
    resample,
    rotate_about_vertical,
    yaw_matrix,
)

coords = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False, allow_infinity=False)


def _head_like(gen, n=400):
    """Points in front of and behind the ears, more mass in front"""
    front = gen.uniform([0.0, -0.07, 1.45], [0.1, 0.07, 1.7], (n, 3))
    back = gen.uniform([-0.05, -0.07, 1.45], [0.0, 0.07, 1.7], (n // 4, 3))
    return np.concatenate([front, back])


class TestAsCloud:
    def test_rejects_wrong_shape(self):
        with pytest.raises(ShapeError):
            as_cloud(np.zeros((4, 2)))

    def test_rejects_empty(self):
        with pytest.raises(ShapeError):
            as_cloud(np.zeros((0, 3)))

    def test_rejects_non_finite(self):
        with pytest.raises(ShapeError):
            as_cloud([[0.0, np.nan, 1.0]])


class TestLandmarks:
    def test_coincident_tragions(self):
        with pytest.raises(DegenerateLandmarksError):
            LandmarkSet(cervicale=[0, 0, 1], tragion_left=[0, 1, 2], tragion_right=[0, 1, 2])

    def test_dict_round_trip(self, landmarks):
        assert LandmarkSet.from_dict(landmarks.to_dict()) == landmarks


class TestAlignTragions:
    def test_already_aligned_is_identity(self, landmarks):
        cloud = _head_like(np.random.default_rng(0))
        out, lm = align_tragions(cloud, landmarks)
        np.testing.assert_allclose(out, cloud, atol=1e-12)
        np.testing.assert_allclose(lm.as_array(), landmarks.as_array(), atol=1e-12)

    def test_undoes_known_rotation(self):
        lm = LandmarkSet(cervicale=[-0.5, 0, 1.4], tragion_left=[0, 1, 1.6], tragion_right=[0, -1, 1.6])
        cloud = _head_like(np.random.default_rng(1))
        rotated, rotated_lm = rotate_about_vertical(cloud, lm, np.deg2rad(30.0), lm.tragion_midpoint)

        _, aligned_lm = align_tragions(rotated, rotated_lm)
        v = aligned_lm.tragion_vector
        assert abs(np.arctan2(v[0], abs(v[1]))) < 1e-9
        assert v[2] == pytest.approx(0.0, abs=1e-12)

    def test_preserves_pairwise_distances(self):
        gen = np.random.default_rng(2)
        cloud = gen.normal(size=(60, 3))
        lm = LandmarkSet(cervicale=[0, 0, 0], tragion_left=[0.3, 0.9, 0.1], tragion_right=[-0.2, -0.4, 0.0])
        out, _ = align_tragions(cloud, lm)
        np.testing.assert_allclose(pdist(out), pdist(cloud), rtol=1e-9)
        np.testing.assert_allclose(out[:, 2], cloud[:, 2], atol=1e-12)

    def test_vertical_tragion_pair(self):
        lm = LandmarkSet(cervicale=[0, 0, 0], tragion_left=[0, 0, 2], tragion_right=[0, 0, 1])
        with pytest.raises(DegenerateLandmarksError):
            align_tragions(np.zeros((3, 3)), lm)


class TestOrientForward:
    def test_forward_face_unchanged(self, landmarks):
        cloud = _head_like(np.random.default_rng(3))
        out, _ = orient_forward(cloud, landmarks)
        np.testing.assert_array_equal(out, cloud)

    def test_backward_face_turned_around(self, landmarks):
        cloud = _head_like(np.random.default_rng(4))
        turned, turned_lm = rotate_about_vertical(cloud, landmarks, np.pi, landmarks.tragion_midpoint)
        out, _ = orient_forward(turned, turned_lm)
        np.testing.assert_allclose(out, cloud, atol=1e-9)

    def test_nothing_above_cervicale(self, landmarks):
        cloud = np.array([[0.1, 0.0, 0.5], [-0.1, 0.0, 0.6]])
        out, lm = orient_forward(cloud, landmarks)
        np.testing.assert_array_equal(out, cloud)
        assert lm == landmarks


class TestCropFace:
    def test_tragion_plane_is_excluded(self, landmarks):
        cloud = np.array([[0.0, 0.0, 1.6], [0.01, 0.0, 1.6]])
        out = crop_face(cloud, landmarks)
        np.testing.assert_array_equal(out, cloud[1:])

    def test_chin_margin_included(self, landmarks):
        z = landmarks.cervicale[2] - 0.03
        out = crop_face(np.array([[0.05, 0.0, z]]), landmarks, chin_margin=0.04)
        assert out.shape == (1, 3)

    def test_below_chin_excluded(self, landmarks):
        cloud = np.array([[0.05, 0.0, landmarks.cervicale[2] - 0.05], [0.05, 0.0, 1.6]])
        assert crop_face(cloud, landmarks).shape == (1, 3)

    def test_all_behind_plane(self, landmarks):
        with pytest.raises(EmptyCropError):
            crop_face(np.array([[-0.1, 0.0, 1.6], [-0.2, 0.0, 1.6]]), landmarks)


class TestCenter:
    def test_single_point(self):
        np.testing.assert_array_equal(center([[3.0, 4.0, 5.0]]), [[0.0, 0.0, 0.0]])

    def test_two_points(self):
        np.testing.assert_array_equal(center([[0, 0, 0], [2, 0, 0]]), [[-1, 0, 0], [1, 0, 0]])

    @given(arrays(np.float64, st.tuples(st.integers(1, 30), st.just(3)), elements=coords))
    @settings(max_examples=50, deadline=None)
    def test_idempotent(self, cloud):
        once = center(cloud)
        np.testing.assert_allclose(center(once), once, atol=1e-12)


class TestResample:
    def test_without_replacement(self):
        cloud = np.random.default_rng(5).normal(size=(30000, 3))
        out = resample(cloud, 10000, seed=0)
        assert out.shape == (10000, 3)
        assert np.unique(out, axis=0).shape[0] == 10000

    def test_same_size_is_permutation(self):
        cloud = np.random.default_rng(6).normal(size=(50, 3))
        out = resample(cloud, 50, seed=1)
        order_in = np.lexsort(cloud.T)
        order_out = np.lexsort(out.T)
        np.testing.assert_array_equal(out[order_out], cloud[order_in])

    def test_upsamples_with_replacement(self):
        out = resample(np.eye(3), 10, seed=2)
        assert out.shape == (10, 3)

    def test_deterministic(self):
        cloud = np.random.default_rng(7).normal(size=(100, 3))
        np.testing.assert_array_equal(resample(cloud, 40, 11), resample(cloud, 40, 11))

    def test_invalid_size(self):
        with pytest.raises(ShapeError):
            resample(np.eye(3), 0, seed=0)


class TestNearestDistances:
    def test_self_distances_zero(self):
        cloud = np.random.default_rng(8).normal(size=(25, 3))
        np.testing.assert_array_equal(nearest_distances(cloud, cloud), np.zeros(25))

    def test_hand_example(self):
        out = nearest_distances([[0, 0, 0]], [[3, 4, 0], [10, 0, 0]])
        np.testing.assert_allclose(out, [5.0])


def test_yaw_matrix_is_rotation():
    rot = yaw_matrix(0.7)
    np.testing.assert_allclose(rot @ rot.T, np.eye(3), atol=1e-15)
    assert np.linalg.det(rot) == pytest.approx(1.0)
