#!/usr/bin/env python3
"""
Demographically stratified sizing groups
k-means per (gender, race) group, the nearest real scan to each centroid, and
assignment of new latents to the nearest size.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np
from scipy.spatial.distance import cdist
from sklearn.metrics import silhouette_score

from core.errors import AnalysisError
from formats import ExemplarEntry, ExemplarReport, LatentTable
from .clustering import DEFAULT_MAX_ITER, DEFAULT_RESTARTS, ClusterResult, kmeans

logger = logging.getLogger(__name__)


def group_rows(table: LatentTable) -> Dict[Tuple[str, str], List[int]]:
    """Row indices per (gender, race), groups in sorted order"""
    rows: Dict[Tuple[str, str], List[int]] = {}
    for i, group in enumerate(table.groups()):
        rows.setdefault(group, []).append(i)
    return {group: rows[group] for group in sorted(rows)}


def exemplar_for(table: LatentTable, centroid: np.ndarray) -> Tuple[int, float]:
    """Row nearest to a centroid (smallest id on ties) and its distance"""
    distances = np.linalg.norm(table.z - centroid, axis=1)
    best = min(range(len(table)), key=lambda i: (distances[i], table.ids[i]))
    return best, float(distances[best])


def _silhouette(z: np.ndarray, labels: np.ndarray) -> Optional[float]:
    """Mean silhouette, or None when it is undefined for this labelling"""
    n_labels = len(np.unique(labels))
    if not 2 <= n_labels <= len(labels) - 1:
        return None
    return float(silhouette_score(z, labels))


def _group_report(group: Tuple[str, str], sub: LatentTable, k: int, seed: int,
                  restarts: int, max_iter: int) -> Tuple[ExemplarReport, Optional[ClusterResult]]:
    gender, race = group
    if len(sub) < k:
        reason = f"{len(sub)} rows, fewer than k={k}"
        logger.warning(f"Skipping group {gender}/{race}: {reason}")
        return ExemplarReport(gender=gender, race=race, rows=len(sub), skipped=reason), None

    result = kmeans(sub.z, k, seed=seed, restarts=restarts, max_iter=max_iter)
    sizes = result.sizes()
    entries = []
    for c in range(k):
        row, distance = exemplar_for(sub, result.centroids[c])
        entries.append(ExemplarEntry(
            cluster=c,
            centroid=result.centroids[c],
            exemplar_id=sub.ids[row],
            exemplar_z=sub.z[row],
            distance=distance,
            members=int(sizes[c]),
        ))
    report = ExemplarReport(gender=gender, race=race, rows=len(sub), clusters=entries,
                            inertia=result.inertia, silhouette=_silhouette(sub.z, result.labels))
    logger.info(f"Group {gender}/{race}: {len(sub)} rows, inertia {result.inertia:.6g}")
    return report, result


def stratified_exemplars_detailed(table: LatentTable, k: int, seed: int = 0,
                                  restarts: int = DEFAULT_RESTARTS, max_iter: int = DEFAULT_MAX_ITER,
                                  workers: int = 1):
    """Reports plus each group's ClusterResult (None when skipped) and row indices"""
    if k < 1:
        raise AnalysisError(f"k must be >= 1, got {k}")
    groups = list(group_rows(table).items())

    def run(item):
        index, (group, rows) = item
        report, result = _group_report(group, table.subset(rows), k, seed + index, restarts, max_iter)
        return report, result, rows

    if workers > 1 and len(groups) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            return list(executor.map(run, enumerate(groups)))
    return [run(item) for item in enumerate(groups)]


def stratified_exemplars(table: LatentTable, k: int, seed: int = 0,
                         restarts: int = DEFAULT_RESTARTS, max_iter: int = DEFAULT_MAX_ITER,
                         workers: int = 1) -> List[ExemplarReport]:
    """One report per (gender, race) group; groups with fewer than k rows are marked skipped

    Group i (in sorted group order) clusters with seed + i.
    """
    return [report for report, _, _ in
            stratified_exemplars_detailed(table, k, seed, restarts, max_iter, workers)]


def size_distances(z: Sequence[float], report: ExemplarReport) -> np.ndarray:
    if report.is_skipped or not report.clusters:
        raise AnalysisError(f"no clusters for group {report.gender}/{report.race}")
    z = np.asarray(z, dtype=np.float64).reshape(1, -1)
    centroids = report.centroids()
    if z.shape[1] != centroids.shape[1]:
        raise AnalysisError(f"latent has {z.shape[1]} dims, report centroids have {centroids.shape[1]}")
    return cdist(z, centroids, 'sqeuclidean')[0]


def assign_size(z: Sequence[float], report: ExemplarReport) -> int:
    """Cluster with the nearest centroid; lowest cluster id on ties"""
    distances = size_distances(z, report)
    order = np.argsort([entry.cluster for entry in report.clusters], kind='stable')
    best = min(order, key=lambda i: distances[i])
    return int(report.clusters[best].cluster)


def find_report(reports: Sequence[ExemplarReport], gender: str, race: str) -> ExemplarReport:
    for report in reports:
        if report.group == (gender, race) and not report.is_skipped:
            return report
    raise AnalysisError(f"group {gender}/{race} has no clusters in the report")
