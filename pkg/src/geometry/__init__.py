"""
PPE Sizer - Geometry

Pure point cloud operations used by the face extraction pipeline.
"""

from .transforms import (
    PointCloud,
    LandmarkSet,
    DEFAULT_CHIN_MARGIN,
    as_cloud,
    yaw_matrix,
    rotate_about_vertical,
    align_tragions,
    orient_forward,
    crop_face,
    center,
    resample,
    nearest_distances,
)

__all__ = [
    'PointCloud',
    'LandmarkSet',
    'DEFAULT_CHIN_MARGIN',
    'as_cloud',
    'yaw_matrix',
    'rotate_about_vertical',
    'align_tragions',
    'orient_forward',
    'crop_face',
    'center',
    'resample',
    'nearest_distances',
]
