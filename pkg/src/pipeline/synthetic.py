#!/usr/bin/env python3
"""
Synthetic head generator
Stands in for proprietary body-scan data: a parametric half-ellipsoid head on a
neck, with three generative factors (face width, overall size, chin/nose
protrusion) and synthesized landmarks.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from itertools import product
from typing import Dict, List
import logging

import numpy as np

from core.errors import ConfigError
from geometry import LandmarkSet
from formats import Gender, Race, ScanRecord

logger = logging.getLogger(__name__)

WIDTH_RANGE = (0.7, 1.3)
SIZE_RANGE = (0.8, 1.2)
PROTRUSION_RANGE = (0.0, 0.03)

DEFAULT_NOISE_SIGMA = 0.001
DEFAULT_SURFACE_POINTS = 30000
MIN_SURFACE_POINTS = 25000

# base semi-axes in meters: lateral, vertical, forward
HEAD_LATERAL = 0.075
HEAD_VERTICAL = 0.12
HEAD_FORWARD = 0.10
# the back of the head is flatter than the face; this fixes which way is forward
HEAD_BACK_FRACTION = 0.8
HEAD_BASE_Z = 1.50
NECK_RADIUS = 0.05
NECK_LENGTH = 0.12
TRAGION_HEIGHT_FRACTION = 0.55
NECK_FRACTION = 0.2
# protrusion bump centre and Gaussian spread, as fractions of the head semi-axes
BUMP_HEIGHT_FRACTION = 0.25
BUMP_LATERAL_FRACTION = 0.6
BUMP_VERTICAL_FRACTION = 0.4

# demographic combinations in round-robin order
DEMOGRAPHIC_GROUPS = list(product(Gender, Race))


@dataclass(frozen=True)
class SynthFactors:
    width: float = 1.0
    size: float = 1.0
    protrusion: float = 0.0

    def __post_init__(self):
        for name, (low, high) in (('width', WIDTH_RANGE), ('size', SIZE_RANGE),
                                  ('protrusion', PROTRUSION_RANGE)):
            value = getattr(self, name)
            if not low <= value <= high:
                raise ConfigError(f"{name}={value} outside [{low}, {high}]")

    def to_dict(self) -> Dict[str, float]:
        return {k: float(v) for k, v in asdict(self).items()}

    @classmethod
    def sample(cls, rng: np.random.Generator) -> 'SynthFactors':
        return cls(
            width=float(rng.uniform(*WIDTH_RANGE)),
            size=float(rng.uniform(*SIZE_RANGE)),
            protrusion=float(rng.uniform(*PROTRUSION_RANGE)),
        )


def _half_surface(factors: SynthFactors, n_head: int, n_neck: int,
                  rng: np.random.Generator) -> np.ndarray:
    """Points on the y >= 0 half of the head and neck"""
    lateral = HEAD_LATERAL * factors.width * factors.size
    vertical = HEAD_VERTICAL * factors.size
    forward = HEAD_FORWARD * factors.size

    # cos(theta) uniform gives area-uniform directions on the unit hemisphere
    cos_t = rng.uniform(0.0, 1.0, n_head)
    sin_t = np.sqrt(1.0 - cos_t ** 2)
    phi = rng.uniform(0.0, np.pi, n_head)
    depth = np.where(np.cos(phi) >= 0.0, forward, HEAD_BACK_FRACTION * forward)
    head = np.stack([
        depth * sin_t * np.cos(phi),
        lateral * sin_t * np.sin(phi),
        HEAD_BASE_Z + vertical * cos_t,
    ], axis=1)

    # chin/nose bump: forward offset over the lower face
    if factors.protrusion > 0.0:
        z_center = HEAD_BASE_Z + BUMP_HEIGHT_FRACTION * vertical
        weight = np.exp(-((head[:, 1] / (BUMP_LATERAL_FRACTION * lateral)) ** 2
                          + ((head[:, 2] - z_center) / (BUMP_VERTICAL_FRACTION * vertical)) ** 2))
        weight[head[:, 0] <= 0.0] = 0.0
        head[:, 0] += factors.protrusion * weight

    neck_radius = NECK_RADIUS * factors.size
    angle = rng.uniform(0.0, np.pi, n_neck)
    height = rng.uniform(HEAD_BASE_Z - NECK_LENGTH * factors.size, HEAD_BASE_Z, n_neck)
    neck = np.stack([
        neck_radius * np.cos(angle),
        neck_radius * np.sin(angle),
        height,
    ], axis=1)

    return np.concatenate([head, neck])


def synth_landmarks(factors: SynthFactors) -> LandmarkSet:
    lateral = HEAD_LATERAL * factors.width * factors.size
    vertical = HEAD_VERTICAL * factors.size
    forward = HEAD_FORWARD * factors.size
    z_ear = HEAD_BASE_Z + TRAGION_HEIGHT_FRACTION * vertical
    y_ear = lateral * np.sqrt(1.0 - TRAGION_HEIGHT_FRACTION ** 2)
    return LandmarkSet(
        cervicale=[-0.5 * forward, 0.0, HEAD_BASE_Z - 0.03 * factors.size],
        tragion_left=[0.0, y_ear, z_ear],
        tragion_right=[0.0, -y_ear, z_ear],
    )


def synth_scan(factors: SynthFactors, noise_sigma: float = DEFAULT_NOISE_SIGMA, seed: int = 0,
               n_points: int = DEFAULT_SURFACE_POINTS, scan_id: str = None,
               gender: Gender = Gender.FEMALE, race: Race = Race.WHITE) -> ScanRecord:
    """Generate one noisy head scan; bilaterally symmetric when noise_sigma is 0"""
    if n_points < MIN_SURFACE_POINTS:
        raise ConfigError(f"synthetic scans need at least {MIN_SURFACE_POINTS} points, got {n_points}")
    if noise_sigma < 0:
        raise ConfigError(f"noise_sigma must be >= 0, got {noise_sigma}")

    rng = np.random.default_rng(seed)
    half = (n_points + 1) // 2
    n_neck = int(half * NECK_FRACTION)
    points = _half_surface(factors, half - n_neck, n_neck, rng)
    mirrored = points * np.array([1.0, -1.0, 1.0])
    cloud = np.concatenate([points, mirrored])

    if noise_sigma > 0:
        cloud = cloud + rng.normal(0.0, noise_sigma, cloud.shape)

    return ScanRecord(
        id=scan_id or f"synth_seed{seed}",
        cloud=cloud,
        gender=gender,
        race=race,
        landmarks=synth_landmarks(factors),
        factors=factors.to_dict(),
    )


def synth_dataset(count: int, seed: int = 0, noise_sigma: float = DEFAULT_NOISE_SIGMA,
                  n_points: int = DEFAULT_SURFACE_POINTS, workers: int = 1) -> List[ScanRecord]:
    """Generate `count` scans with uniform factors and round-robin demographic labels

    Record i uses seed + i, so the dataset is identical for any worker count.
    """
    if count < 0:
        raise ConfigError(f"count must be >= 0, got {count}")
    rng = np.random.default_rng(seed)
    factors = [SynthFactors.sample(rng) for _ in range(count)]

    def build(index: int) -> ScanRecord:
        gender, race = DEMOGRAPHIC_GROUPS[index % len(DEMOGRAPHIC_GROUPS)]
        return synth_scan(factors[index], noise_sigma, seed + index, n_points,
                          scan_id=f"synth_{index:05d}", gender=gender, race=race)

    if workers > 1 and count > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            records = list(executor.map(build, range(count)))
    else:
        records = [build(i) for i in range(count)]

    logger.info(f"Generated {len(records)} synthetic scans (seed {seed})")
    return records
