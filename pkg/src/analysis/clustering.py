#!/usr/bin/env python3
"""
k-means clustering
k-means++ seeding, Lloyd iterations and the best of several seeded restarts.
"""

from dataclasses import dataclass
from typing import Optional
import logging

import numpy as np
from scipy.spatial.distance import cdist

from core.errors import AnalysisError

logger = logging.getLogger(__name__)

DEFAULT_RESTARTS = 10
DEFAULT_MAX_ITER = 300
# relative slack for rounding when checking that inertia never increases
INERTIA_SLACK = 1e-9


@dataclass
class ClusterResult:
    centroids: np.ndarray
    labels: np.ndarray
    inertia: float
    iterations: int = 0
    converged: bool = True

    @property
    def k(self) -> int:
        return int(self.centroids.shape[0])

    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.k)


def kmeans_plusplus(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n_samples = X.shape[0]
    centroids = np.empty((k, X.shape[1]), dtype=np.float64)
    centroids[0] = X[rng.integers(0, n_samples)]
    for i in range(1, k):
        dist_sq = cdist(X, centroids[:i], 'sqeuclidean').min(axis=1)
        total = dist_sq.sum()
        if total > 0:
            centroids[i] = X[rng.choice(n_samples, p=dist_sq / total)]
        else:
            centroids[i] = X[rng.integers(0, n_samples)]
    return centroids


def _assign(X: np.ndarray, centroids: np.ndarray):
    distances = cdist(X, centroids, 'sqeuclidean')
    labels = np.argmin(distances, axis=1)
    return labels, distances


def _update(X: np.ndarray, labels: np.ndarray, distances: np.ndarray, k: int) -> np.ndarray:
    centroids = np.empty((k, X.shape[1]), dtype=np.float64)
    own = distances[np.arange(X.shape[0]), labels]
    taken = set()
    for j in range(k):
        mask = labels == j
        if np.any(mask):
            centroids[j] = X[mask].mean(axis=0)
            continue
        # empty cluster: restart it at the point farthest from its own centroid
        order = np.argsort(-own, kind='stable')
        farthest = next(int(i) for i in order if int(i) not in taken)
        taken.add(farthest)
        centroids[j] = X[farthest]
        logger.debug(f"k-means: cluster {j} empty, reseeded at row {farthest}")
    return centroids


def lloyd(X: np.ndarray, centroids: np.ndarray, max_iter: int = DEFAULT_MAX_ITER) -> ClusterResult:
    """Iterate assignment/update until assignments stop changing"""
    k = centroids.shape[0]
    previous_labels = None
    previous_inertia = np.inf
    converged = False
    iterations = 0

    while iterations < max_iter:
        iterations += 1
        labels, distances = _assign(X, centroids)
        inertia = float(distances[np.arange(X.shape[0]), labels].sum())
        if inertia > previous_inertia * (1.0 + INERTIA_SLACK) + INERTIA_SLACK:
            raise AnalysisError(f"k-means inertia increased: {previous_inertia} -> {inertia}")
        logger.debug(f"k-means iteration {iterations}: inertia={inertia:.6g}")
        previous_inertia = inertia
        if previous_labels is not None and np.array_equal(labels, previous_labels):
            converged = True
            break
        previous_labels = labels
        centroids = _update(X, labels, distances, k)

    if not converged:
        labels, distances = _assign(X, centroids)
    inertia = float(distances[np.arange(X.shape[0]), labels].sum())
    return ClusterResult(centroids=centroids, labels=labels, inertia=inertia,
                         iterations=iterations, converged=converged)


def kmeans(X: np.ndarray, k: int, seed: int = 0, restarts: int = DEFAULT_RESTARTS,
           max_iter: int = DEFAULT_MAX_ITER) -> ClusterResult:
    """Best-inertia result over `restarts` seeded k-means++ runs; first run wins ties"""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or not np.all(np.isfinite(X)):
        raise AnalysisError("k-means needs a finite 2-D array of rows")
    if k < 1:
        raise AnalysisError(f"k must be >= 1, got {k}")
    if X.shape[0] < k:
        raise AnalysisError(f"k-means with k={k} needs at least {k} rows, got {X.shape[0]}")
    if restarts < 1:
        raise AnalysisError(f"restarts must be >= 1, got {restarts}")

    best: Optional[ClusterResult] = None
    for child in np.random.SeedSequence(seed).spawn(restarts):
        rng = np.random.default_rng(child)
        result = lloyd(X, kmeans_plusplus(X, k, rng), max_iter)
        if best is None or result.inertia < best.inertia:
            best = result
    logger.debug(f"k-means k={k}: best inertia {best.inertia:.6g} after {best.iterations} iterations")
    return best
