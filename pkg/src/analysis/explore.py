#!/usr/bin/env python3
"""
Latent space exploration
Mean face and per-dimension percentile probes, each resolved to the nearest
real scan.
"""

from dataclasses import dataclass, field
from typing import List, Sequence, Tuple
import math

import numpy as np

from core.errors import AnalysisError
from formats import LatentTable

DEFAULT_PERCENTILES = (5.0, 95.0)


@dataclass
class Probe:
    dim: int
    pct: float
    point: np.ndarray
    nearest_id: str

    @property
    def label(self) -> str:
        return f"dim{self.dim}_p{self.pct:g}"


@dataclass
class Exploration:
    mean_z: np.ndarray
    mean_id: str
    probes: List[Probe] = field(default_factory=list)


def _require_rows(table: LatentTable):
    if len(table) == 0:
        raise AnalysisError("latent table is empty")


def latent_mean(table: LatentTable) -> np.ndarray:
    """Column means with correctly rounded sums, independent of row order"""
    _require_rows(table)
    return np.array([math.fsum(table.z[:, j]) / len(table) for j in range(table.dim)])


def nearest_row(table: LatentTable, point: np.ndarray) -> str:
    """Id of the row closest to point; smallest id on ties"""
    _require_rows(table)
    distances = np.linalg.norm(table.z - np.asarray(point, dtype=np.float64), axis=1)
    best = min(range(len(table)), key=lambda i: (distances[i], table.ids[i]))
    return table.ids[best]


def mean_face(table: LatentTable) -> str:
    return nearest_row(table, latent_mean(table))


def percentile_probe(table: LatentTable, dim: int, pct: float) -> Tuple[np.ndarray, str]:
    """Mean latent with one coordinate moved to its pct-th percentile (linear interpolation)"""
    _require_rows(table)
    if not 0 <= dim < table.dim:
        raise AnalysisError(f"dimension {dim} outside [0, {table.dim})")
    if not 0.0 <= pct <= 100.0:
        raise AnalysisError(f"percentile {pct} outside [0, 100]")
    probe = latent_mean(table)
    probe[dim] = np.percentile(table.z[:, dim], pct, method='linear')
    return probe, nearest_row(table, probe)


def explore(table: LatentTable, percentiles: Sequence[float] = DEFAULT_PERCENTILES) -> Exploration:
    """Mean face plus one probe per (dimension, percentile)"""
    mean_z = latent_mean(table)
    result = Exploration(mean_z=mean_z, mean_id=nearest_row(table, mean_z))
    for dim in range(table.dim):
        for pct in percentiles:
            point, nearest_id = percentile_probe(table, dim, float(pct))
            result.probes.append(Probe(dim=dim, pct=float(pct), point=point, nearest_id=nearest_id))
    return result
