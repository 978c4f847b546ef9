"""
PPE Sizer - Latent Analysis

Mean face and percentile probes, k-means sizing groups with stratified
exemplars, size assignment and figure exports.
"""

from .explore import (
    DEFAULT_PERCENTILES,
    Probe,
    Exploration,
    latent_mean,
    nearest_row,
    mean_face,
    percentile_probe,
    explore,
)
from .clustering import ClusterResult, kmeans, kmeans_plusplus, lloyd
from .exemplars import (
    group_rows,
    exemplar_for,
    stratified_exemplars,
    stratified_exemplars_detailed,
    size_distances,
    assign_size,
    find_report,
)
from .export import scatter_svg, distance_to_mean_face

__all__ = [
    'DEFAULT_PERCENTILES',
    'Probe',
    'Exploration',
    'latent_mean',
    'nearest_row',
    'mean_face',
    'percentile_probe',
    'explore',
    'ClusterResult',
    'kmeans',
    'kmeans_plusplus',
    'lloyd',
    'group_rows',
    'exemplar_for',
    'stratified_exemplars',
    'stratified_exemplars_detailed',
    'size_distances',
    'assign_size',
    'find_report',
    'scatter_svg',
    'distance_to_mean_face',
]
