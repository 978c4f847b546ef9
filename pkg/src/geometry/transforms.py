#!/usr/bin/env python3
"""
Point cloud geometry for face extraction
Rigid yaw alignment, forward orientation, half-space cropping, centering,
resampling and nearest-point distance fields.

Coordinate convention: z is vertical (floor at z=0), y is the left-right
tragion axis after alignment, +x points forward out of the face.
"""

from dataclasses import dataclass
from typing import Any, Dict, Tuple
import logging

import numpy as np
from scipy.spatial.distance import cdist

from core.errors import DegenerateLandmarksError, EmptyCropError, ShapeError

logger = logging.getLogger(__name__)

# Clouds are (N, 3) float arrays; order carries no meaning.
PointCloud = np.ndarray

DEFAULT_CHIN_MARGIN = 0.04
_NEAREST_CHUNK = 2048


def as_cloud(points: Any, dtype=np.float64) -> PointCloud:
    """Validate and convert to an (N, 3) array of finite coordinates"""
    cloud = np.asarray(points, dtype=dtype)
    if cloud.ndim != 2 or cloud.shape[1] != 3:
        raise ShapeError(f"point cloud must have shape (N, 3), got {cloud.shape}")
    if cloud.shape[0] < 1:
        raise ShapeError("point cloud must contain at least one point")
    if not np.all(np.isfinite(cloud)):
        raise ShapeError("point cloud contains non-finite coordinates")
    return cloud


def _as_point(value: Any) -> np.ndarray:
    point = np.asarray(value, dtype=np.float64).reshape(-1)
    if point.shape != (3,):
        raise ShapeError(f"landmark must have 3 coordinates, got {point.shape}")
    if not np.all(np.isfinite(point)):
        raise ShapeError("landmark contains non-finite coordinates")
    return point


@dataclass(frozen=True)
class LandmarkSet:
    """The three anthropometric landmarks used to isolate the face"""
    cervicale: np.ndarray
    tragion_left: np.ndarray
    tragion_right: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'cervicale', _as_point(self.cervicale))
        object.__setattr__(self, 'tragion_left', _as_point(self.tragion_left))
        object.__setattr__(self, 'tragion_right', _as_point(self.tragion_right))
        if np.array_equal(self.tragion_left, self.tragion_right):
            raise DegenerateLandmarksError("tragion_left and tragion_right coincide")

    @property
    def tragion_midpoint(self) -> np.ndarray:
        return 0.5 * (self.tragion_left + self.tragion_right)

    @property
    def tragion_vector(self) -> np.ndarray:
        """Right-to-left tragion direction"""
        return self.tragion_left - self.tragion_right

    def as_array(self) -> np.ndarray:
        return np.stack([self.cervicale, self.tragion_left, self.tragion_right])

    @classmethod
    def from_array(cls, array: np.ndarray) -> 'LandmarkSet':
        return cls(cervicale=array[0], tragion_left=array[1], tragion_right=array[2])

    def to_dict(self) -> Dict[str, list]:
        return {
            'cervicale': [float(v) for v in self.cervicale],
            'tragion_left': [float(v) for v in self.tragion_left],
            'tragion_right': [float(v) for v in self.tragion_right],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'LandmarkSet':
        return cls(
            cervicale=data['cervicale'],
            tragion_left=data['tragion_left'],
            tragion_right=data['tragion_right'],
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LandmarkSet):
            return NotImplemented
        return bool(np.array_equal(self.as_array(), other.as_array()))

    def __hash__(self) -> int:
        return hash(self.as_array().tobytes())


def yaw_matrix(angle: float) -> np.ndarray:
    """Rotation about the vertical z-axis"""
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rotate_about_vertical(cloud: PointCloud, lm: LandmarkSet, angle: float,
                          pivot: np.ndarray) -> Tuple[PointCloud, LandmarkSet]:
    """Yaw cloud and landmarks by `angle` about the vertical line through `pivot`"""
    rot = yaw_matrix(angle)
    pivot = np.asarray(pivot, dtype=np.float64)
    rotated = (cloud - pivot) @ rot.T + pivot
    rotated_lm = LandmarkSet.from_array((lm.as_array() - pivot) @ rot.T + pivot)
    return rotated, rotated_lm


def align_tragions(cloud: PointCloud, lm: LandmarkSet) -> Tuple[PointCloud, LandmarkSet]:
    """Yaw the scan so the tragion vector's horizontal projection lies along the y-axis"""
    cloud = as_cloud(cloud)
    vx, vy = lm.tragion_vector[:2]
    if np.hypot(vx, vy) <= 1e-12:
        raise DegenerateLandmarksError("tragion xy-projections coincide; yaw alignment undefined")

    # smallest yaw making the projection parallel to y; the sign ambiguity
    # is resolved later by orient_forward
    angle = np.pi / 2.0 - np.arctan2(vy, vx)
    angle = float(angle - np.pi * np.round(angle / np.pi))
    if angle == 0.0:
        return cloud.copy(), lm
    return rotate_about_vertical(cloud, lm, angle, lm.tragion_midpoint)


def orient_forward(cloud: PointCloud, lm: LandmarkSet) -> Tuple[PointCloud, LandmarkSet]:
    """Turn the scan 180 degrees if the head mass above the cervicale lies behind the ears"""
    cloud = as_cloud(cloud)
    above = cloud[cloud[:, 2] > lm.cervicale[2]]
    if above.shape[0] == 0:
        return cloud, lm

    midpoint = lm.tragion_midpoint
    if above[:, 0].mean() < midpoint[0]:
        logger.debug("Scan faces -x; rotating 180 degrees")
        return rotate_about_vertical(cloud, lm, np.pi, midpoint)
    return cloud, lm


def crop_face(cloud: PointCloud, lm: LandmarkSet,
              chin_margin: float = DEFAULT_CHIN_MARGIN) -> PointCloud:
    """Keep points forward of the tragion plane and above cervicale minus the chin margin"""
    cloud = as_cloud(cloud)
    midpoint = lm.tragion_midpoint
    mask = (cloud[:, 0] > midpoint[0]) & (cloud[:, 2] > lm.cervicale[2] - chin_margin)
    if not np.any(mask):
        raise EmptyCropError("no points forward of the tragion plane and above the chin limit")
    return cloud[mask]


def center(cloud: PointCloud) -> PointCloud:
    cloud = as_cloud(cloud)
    return cloud - cloud.mean(axis=0)


def resample(cloud: PointCloud, n: int, seed: int) -> PointCloud:
    """Draw exactly n points; without replacement when the cloud is large enough"""
    cloud = as_cloud(cloud)
    if n < 1:
        raise ShapeError(f"resample size must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    replace = cloud.shape[0] < n
    index = rng.choice(cloud.shape[0], size=n, replace=replace)
    return cloud[index]


def nearest_distances(a: PointCloud, b: PointCloud) -> np.ndarray:
    """Distance from each point of `a` to its nearest neighbour in `b` (brute force)"""
    a = as_cloud(a)
    b = as_cloud(b)
    out = np.empty(a.shape[0], dtype=np.float64)
    for start in range(0, a.shape[0], _NEAREST_CHUNK):
        block = cdist(a[start:start + _NEAREST_CHUNK], b, 'sqeuclidean')
        out[start:start + _NEAREST_CHUNK] = np.sqrt(block.min(axis=1))
    return out
