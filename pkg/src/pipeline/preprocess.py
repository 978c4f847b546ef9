#!/usr/bin/env python3
"""
Face extraction pipeline
Landmark alignment, forward orientation, half-space crop, centering and
fixed-size resampling of raw head scans.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Tuple, Union
import logging

import numpy as np

from core.errors import (
    ConfigError,
    DatasetError,
    DegenerateLandmarksError,
    EmptyCropError,
    MissingLandmarksError,
)
from geometry import (
    DEFAULT_CHIN_MARGIN,
    LandmarkSet,
    PointCloud,
    align_tragions,
    center,
    crop_face,
    orient_forward,
    resample,
)
from formats import ScanRecord, ensure_dir, list_scan_ids, read_scan, write_metadata, write_pcf

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


@dataclass
class PreprocessConfig:
    target_points: int = 10000
    chin_margin: float = DEFAULT_CHIN_MARGIN
    seed: int = 0

    def __post_init__(self):
        if int(self.target_points) < 1:
            raise ConfigError(f"target_points must be >= 1, got {self.target_points}")
        if float(self.chin_margin) < 0:
            raise ConfigError(f"chin_margin must be >= 0, got {self.chin_margin}")
        self.target_points = int(self.target_points)
        self.chin_margin = float(self.chin_margin)


@dataclass
class FaceExtraction:
    """Extracted face plus what is needed to map it back to the aligned scan"""
    cloud: PointCloud
    offset: np.ndarray
    landmarks: LandmarkSet
    crop_size: int

    def uncentered(self) -> PointCloud:
        return self.cloud + self.offset


def extract_face_detailed(scan: ScanRecord, cfg: PreprocessConfig) -> FaceExtraction:
    if scan.landmarks is None:
        raise MissingLandmarksError(f"scan {scan.id} has no landmarks")

    cloud, lm = align_tragions(scan.cloud, scan.landmarks)
    cloud, lm = orient_forward(cloud, lm)
    face = crop_face(cloud, lm, cfg.chin_margin)
    crop_size = face.shape[0]

    first_offset = face.mean(axis=0)
    face = center(face)
    face = resample(face, cfg.target_points, cfg.seed)
    # the subset's own centroid drifts from the crop's; re-center the sample
    second_offset = face.mean(axis=0)
    face = face - second_offset

    return FaceExtraction(
        cloud=face,
        offset=first_offset + second_offset,
        landmarks=lm,
        crop_size=crop_size,
    )


def extract_face(scan: ScanRecord, cfg: PreprocessConfig) -> PointCloud:
    """align -> orient -> crop -> center -> resample; exactly cfg.target_points points"""
    return extract_face_detailed(scan, cfg).cloud


@dataclass
class PreprocessSummary:
    processed: List[str] = field(default_factory=list)
    skipped: List[Tuple[str, str]] = field(default_factory=list)


def preprocess_directory(in_dir: PathLike, out_dir: PathLike, cfg: PreprocessConfig) -> PreprocessSummary:
    """Extract faces for every scan in a dataset directory

    Scans without landmarks (or whose crop is empty) are skipped and reported.
    Each scan uses the sub-seed cfg.seed + its index in sorted-id order.
    """
    ids = list_scan_ids(in_dir)
    if not ids:
        raise DatasetError(f"no scans found in {in_dir}")
    out_dir = ensure_dir(out_dir)

    summary = PreprocessSummary()
    for index, scan_id in enumerate(ids):
        scan = read_scan(in_dir, scan_id)
        scan_cfg = PreprocessConfig(cfg.target_points, cfg.chin_margin, cfg.seed + index)
        try:
            face = extract_face(scan, scan_cfg)
        except (MissingLandmarksError, EmptyCropError, DegenerateLandmarksError) as e:
            logger.warning(f"Skipping {scan_id}: {e.message}")
            summary.skipped.append((scan_id, e.cli_line()))
            continue

        write_pcf(face, out_dir / f"{scan_id}.pcf")
        write_metadata(scan.metadata(), out_dir / f"{scan_id}.json")
        summary.processed.append(scan_id)

    logger.info(f"Preprocessed {len(summary.processed)} scans, skipped {len(summary.skipped)}")
    return summary
