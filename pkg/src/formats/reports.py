#!/usr/bin/env python3
"""
Exemplar reports (JSON), per-point distance tables and latent scatter tables (CSV)
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union
import json

import numpy as np
import pandas as pd

from core.errors import FormatError
from .records import parse_gender, parse_race
from .tables import FLOAT_FORMAT

PathLike = Union[str, Path]

REPORT_VERSION = 1
DISTANCE_COLUMNS = ['id', 'x', 'y', 'z', 'distance_to_mean_face']


@dataclass
class ExemplarEntry:
    """One cluster of a demographic group and its nearest real scan"""
    cluster: int
    centroid: np.ndarray
    exemplar_id: str
    exemplar_z: np.ndarray
    distance: float
    members: int = 0

    def __post_init__(self):
        self.centroid = np.asarray(self.centroid, dtype=np.float64)
        self.exemplar_z = np.asarray(self.exemplar_z, dtype=np.float64)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'cluster': int(self.cluster),
            'centroid': [float(v) for v in self.centroid],
            'exemplar_id': self.exemplar_id,
            'exemplar_z': [float(v) for v in self.exemplar_z],
            'distance': float(self.distance),
            'members': int(self.members),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ExemplarEntry':
        return cls(
            cluster=int(data['cluster']),
            centroid=data['centroid'],
            exemplar_id=str(data['exemplar_id']),
            exemplar_z=data['exemplar_z'],
            distance=float(data['distance']),
            members=int(data.get('members', 0)),
        )


@dataclass
class ExemplarReport:
    """Clusters and exemplars for one (gender, race) group, or the reason it was skipped"""
    gender: str
    race: str
    rows: int
    clusters: List[ExemplarEntry] = field(default_factory=list)
    inertia: Optional[float] = None
    silhouette: Optional[float] = None
    skipped: Optional[str] = None

    @property
    def group(self) -> Tuple[str, str]:
        return (self.gender, self.race)

    @property
    def is_skipped(self) -> bool:
        return self.skipped is not None

    def centroids(self) -> np.ndarray:
        return np.array([entry.centroid for entry in self.clusters])

    def to_dict(self) -> Dict[str, Any]:
        return {
            'gender': self.gender,
            'race': self.race,
            'rows': int(self.rows),
            'inertia': None if self.inertia is None else float(self.inertia),
            'silhouette': None if self.silhouette is None else float(self.silhouette),
            'skipped': self.skipped,
            'clusters': [entry.to_dict() for entry in self.clusters],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ExemplarReport':
        return cls(
            gender=parse_gender(data['gender']).value,
            race=parse_race(data['race']).value,
            rows=int(data['rows']),
            clusters=[ExemplarEntry.from_dict(c) for c in data.get('clusters', [])],
            inertia=data.get('inertia'),
            silhouette=data.get('silhouette'),
            skipped=data.get('skipped'),
        )


def write_report(reports: Sequence[ExemplarReport], path: PathLike, k: int, seed: int,
                 extra: Optional[Dict[str, Any]] = None):
    document = {
        'version': REPORT_VERSION,
        'k': int(k),
        'seed': int(seed),
        'groups': [report.to_dict() for report in reports],
    }
    if extra:
        document.update(extra)
    Path(path).write_text(json.dumps(document, indent=2, sort_keys=True) + "\n")


def read_report(path: PathLike) -> List[ExemplarReport]:
    text = Path(path).read_text()
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"invalid report JSON in {path}: {e.msg}", line=e.lineno)
    if not isinstance(document, dict) or 'groups' not in document:
        raise FormatError(f"report {path} has no 'groups' list")
    try:
        return [ExemplarReport.from_dict(group) for group in document['groups']]
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f"malformed report entry in {path}: {e}")


def write_distance_csv(scan_id: str, cloud: np.ndarray, distances: np.ndarray, path: PathLike):
    """id,x,y,z,distance_to_mean_face"""
    cloud = np.asarray(cloud, dtype=np.float64)
    frame = pd.DataFrame({
        'id': [scan_id] * cloud.shape[0],
        'x': cloud[:, 0],
        'y': cloud[:, 1],
        'z': cloud[:, 2],
        'distance_to_mean_face': np.asarray(distances, dtype=np.float64),
    }, columns=DISTANCE_COLUMNS)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')


def write_scatter_csv(ids: Sequence[str], points: np.ndarray, labels: Sequence[int],
                      dims: Tuple[int, int], path: PathLike):
    """Two latent dimensions per row with the cluster label"""
    points = np.asarray(points, dtype=np.float64)
    frame = pd.DataFrame({
        'id': list(ids),
        f'z{dims[0]}': points[:, 0],
        f'z{dims[1]}': points[:, 1],
        'cluster': [int(c) for c in labels],
    })
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
