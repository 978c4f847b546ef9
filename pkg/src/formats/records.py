#!/usr/bin/env python3
"""
Scan records and demographic labels
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional

import numpy as np

from core.errors import MetadataError
from geometry import LandmarkSet, PointCloud, as_cloud


class Gender(Enum):
    FEMALE = "Female"
    MALE = "Male"


class Race(Enum):
    AFRICAN_AMERICAN = "AfricanAmerican"
    ASIAN = "Asian"
    SPANISH = "Spanish"
    WHITE = "White"


def parse_gender(value: Any) -> Gender:
    try:
        return value if isinstance(value, Gender) else Gender(value)
    except ValueError:
        raise MetadataError(f"gender {value!r} is not one of {[g.value for g in Gender]}")


def parse_race(value: Any) -> Race:
    try:
        return value if isinstance(value, Race) else Race(value)
    except ValueError:
        raise MetadataError(f"race {value!r} is not one of {[r.value for r in Race]}")


@dataclass
class ScanMetadata:
    """Everything about a scan except its points (the JSON sidecar)"""
    id: str
    gender: Gender
    race: Race
    landmarks: Optional[LandmarkSet] = None
    factors: Optional[Dict[str, float]] = None
    extra: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id:
            raise MetadataError("scan id must be a non-empty string")
        self.gender = parse_gender(self.gender)
        self.race = parse_race(self.race)

    @property
    def group(self) -> tuple:
        return (self.gender.value, self.race.value)


@dataclass
class ScanRecord:
    """A point cloud with its landmarks, demographic labels and optional ground truth"""
    id: str
    cloud: PointCloud
    gender: Gender
    race: Race
    landmarks: Optional[LandmarkSet] = None
    factors: Optional[Dict[str, float]] = None
    extra: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id:
            raise MetadataError("scan id must be a non-empty string")
        dtype = np.float32 if np.asarray(self.cloud).dtype == np.float32 else np.float64
        self.cloud = as_cloud(self.cloud, dtype=dtype)
        self.gender = parse_gender(self.gender)
        self.race = parse_race(self.race)

    @property
    def group(self) -> tuple:
        return (self.gender.value, self.race.value)

    def metadata(self) -> ScanMetadata:
        return ScanMetadata(
            id=self.id,
            gender=self.gender,
            race=self.race,
            landmarks=self.landmarks,
            factors=dict(self.factors) if self.factors is not None else None,
            extra=dict(self.extra),
        )

    @classmethod
    def from_parts(cls, meta: ScanMetadata, cloud: PointCloud) -> 'ScanRecord':
        return cls(
            id=meta.id,
            cloud=cloud,
            gender=meta.gender,
            race=meta.race,
            landmarks=meta.landmarks,
            factors=meta.factors,
            extra=dict(meta.extra),
        )
