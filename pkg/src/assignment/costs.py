#!/usr/bin/env python3
"""
Square, non-negative assignment cost matrices
Either materialized n x n, or evaluated lazily as squared Euclidean distances
between two equal-size point sets.
"""

from typing import Optional
import numpy as np
from scipy.spatial.distance import cdist

from core.errors import SizeMismatchError, SolverError, ShapeError
from geometry import PointCloud, as_cloud

# above this size point costs are evaluated on demand
LAZY_THRESHOLD = 2048


class CostMatrix:
    """cost(i, j) >= 0 for i, j in [0, n)"""

    def __init__(self, matrix: Optional[np.ndarray] = None,
                 a: Optional[np.ndarray] = None, b: Optional[np.ndarray] = None):
        if (matrix is None) == (a is None or b is None):
            raise ShapeError("provide either a matrix or two point sets")
        self._matrix = None
        self._a = None
        self._b = None
        if matrix is not None:
            matrix = np.asarray(matrix, dtype=np.float64)
            if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] < 1:
                raise ShapeError(f"cost matrix must be square and non-empty, got {matrix.shape}")
            if not np.all(np.isfinite(matrix)):
                raise SolverError("cost matrix contains non-finite entries")
            if np.any(matrix < 0):
                raise SolverError("cost matrix contains negative entries")
            self._matrix = np.ascontiguousarray(matrix)
            self.n = matrix.shape[0]
        else:
            self._a = np.ascontiguousarray(a, dtype=np.float64)
            self._b = np.ascontiguousarray(b, dtype=np.float64)
            if not (np.all(np.isfinite(self._a)) and np.all(np.isfinite(self._b))):
                raise SolverError("point costs from non-finite coordinates")
            self.n = self._a.shape[0]

    @property
    def is_lazy(self) -> bool:
        return self._matrix is None

    @property
    def points(self):
        return self._a, self._b

    def cost(self, i: int, j: int) -> float:
        if self._matrix is not None:
            return float(self._matrix[i, j])
        d = self._a[i] - self._b[j]
        return float(d @ d)

    def materialize(self) -> np.ndarray:
        if self._matrix is not None:
            return self._matrix
        return cdist(self._a, self._b, "sqeuclidean")

    def row_costs(self, i: int) -> np.ndarray:
        if self._matrix is not None:
            return self._matrix[i]
        d = self._b - self._a[i]
        return np.einsum('ij,ij->i', d, d)

    def max_cost(self) -> float:
        """Exact maximum when materialized; an upper bound when lazy"""
        if self._matrix is not None:
            return float(self._matrix.max())
        both = np.concatenate([self._a, self._b])
        extent = both.max(axis=0) - both.min(axis=0)
        return float(extent @ extent)

    def mean_cost(self) -> float:
        if self._matrix is not None:
            return float(self._matrix.mean())
        a2 = np.einsum('ij,ij->i', self._a, self._a).mean()
        b2 = np.einsum('ij,ij->i', self._b, self._b).mean()
        return float(max(a2 + b2 - 2.0 * self._a.mean(axis=0) @ self._b.mean(axis=0), 0.0))

    def transpose(self) -> 'CostMatrix':
        if self._matrix is not None:
            return CostMatrix(matrix=self._matrix.T.copy())
        return CostMatrix(a=self._b, b=self._a)

    def total(self, sigma: np.ndarray) -> float:
        """sum_i cost(i, sigma[i]) accumulated in float64"""
        sigma = np.asarray(sigma)
        if self._matrix is not None:
            return float(self._matrix[np.arange(self.n), sigma].sum())
        d = self._a - self._b[sigma]
        return float(np.einsum('ij,ij->', d, d))


def point_cost(a: PointCloud, b: PointCloud) -> CostMatrix:
    """Squared Euclidean point-to-point costs; lazy above LAZY_THRESHOLD points"""
    a = as_cloud(a)
    b = as_cloud(b)
    if a.shape[0] != b.shape[0]:
        raise SizeMismatchError(f"point sets differ in size: {a.shape[0]} vs {b.shape[0]}")
    if a.shape[0] > LAZY_THRESHOLD:
        return CostMatrix(a=a, b=b)
    return CostMatrix(matrix=cdist(a, b, "sqeuclidean"))
