#!/usr/bin/env python3
"""
Figure exports
Latent scatter plots (SVG, colored by cluster) and per-point distance maps of
probe scans against the mean face.
"""

from pathlib import Path
from typing import Optional, Sequence, Tuple, Union
import logging

import numpy as np

from core.errors import AnalysisError
from geometry import PointCloud, nearest_distances

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

# fixed so repeated exports are byte-identical
SVG_HASH_SALT = "ppe-sizer"


def scatter_svg(points: np.ndarray, labels: Sequence[int], path: PathLike,
                dims: Tuple[int, int] = (0, 1), title: Optional[str] = None,
                centroids: Optional[np.ndarray] = None, exemplars: Optional[np.ndarray] = None):
    """Two latent dimensions of every row, colored by cluster label"""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or max(dims) >= points.shape[1] or min(dims) < 0:
        raise AnalysisError(f"cannot plot dims {dims} of a {points.shape} latent array")
    labels = np.asarray(labels, dtype=int)

    with matplotlib.rc_context({'svg.hashsalt': SVG_HASH_SALT}):
        fig, ax = plt.subplots(figsize=(6, 5))
        scatter = ax.scatter(points[:, dims[0]], points[:, dims[1]], c=labels, cmap="tab10",
                             vmin=0, vmax=9, s=14)
        if centroids is not None and len(centroids):
            centroids = np.asarray(centroids)
            ax.scatter(centroids[:, dims[0]], centroids[:, dims[1]], marker="x", c="black",
                       s=60, label="centroid")
        if exemplars is not None and len(exemplars):
            exemplars = np.asarray(exemplars)
            ax.scatter(exemplars[:, dims[0]], exemplars[:, dims[1]], facecolors="none",
                       edgecolors="black", s=90, label="exemplar")
        ax.set_xlabel(f"z{dims[0]}")
        ax.set_ylabel(f"z{dims[1]}")
        if title:
            ax.set_title(title)
        if len(labels):
            ax.legend(*scatter.legend_elements(), title="cluster", loc="best", fontsize=7)
        fig.savefig(path, format="svg", metadata={'Date': None})
        plt.close(fig)
    logger.info(f"Wrote scatter {path}")


def distance_to_mean_face(cloud: PointCloud, mean_cloud: PointCloud) -> np.ndarray:
    """Per-point distance from cloud to the nearest point of the mean face"""
    return nearest_distances(cloud, mean_cloud)
