#!/usr/bin/env python3
"""
Training objectives
Earth mover reconstruction loss over an auction matching, and the maximum mean
discrepancy between encoder outputs and a uniform target.
"""

from typing import Optional, Tuple
import math

import numpy as np
from scipy.spatial.distance import cdist

from core.errors import ShapeError, SizeMismatchError
from assignment import AuctionParams, DEFAULT_FLOAT_TOLERANCE, auction_solve, point_cost
from geometry import PointCloud
from .config import LatentBatch

KERNEL_BANDWIDTH = 1.0


def gaussian_kernel(x: np.ndarray, y: np.ndarray, bw: float = KERNEL_BANDWIDTH) -> np.ndarray:
    """k(x, y) = exp(-|x - y|^2 / (2 bw^2))"""
    return np.exp(-0.5 * cdist(x, y, 'sqeuclidean') / bw ** 2)


def _exact_mean(values: np.ndarray) -> float:
    # correctly rounded, so equal multisets give equal means
    return math.fsum(values.ravel()) / values.size


def _canonical_order(cloud: np.ndarray) -> np.ndarray:
    return np.lexsort((cloud[:, 2], cloud[:, 1], cloud[:, 0]))


def emd_matching(recon: PointCloud, target: PointCloud, tolerance: float = DEFAULT_FLOAT_TOLERANCE,
                 params: Optional[AuctionParams] = None, **auction_kwargs):
    """Auction matching sigma with recon[i] <-> target[sigma[i]]"""
    recon = np.asarray(recon, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if recon.shape != target.shape:
        raise SizeMismatchError(f"clouds differ in shape: {recon.shape} vs {target.shape}")

    # identical point multisets match at zero cost
    recon_order = _canonical_order(recon)
    target_order = _canonical_order(target)
    if np.array_equal(recon[recon_order], target[target_order]):
        sigma = np.empty_like(recon_order)
        sigma[recon_order] = target_order
        return sigma, None

    costs = point_cost(recon, target)
    if params is None:
        params = AuctionParams.for_float_costs(costs, tolerance, **auction_kwargs)
    result = auction_solve(costs, params)
    return result.sigma, result


def emd_details(recon: PointCloud, target: PointCloud, tolerance: float = DEFAULT_FLOAT_TOLERANCE,
                params: Optional[AuctionParams] = None, **auction_kwargs):
    """Loss, gradient and the auction result (None for identical point sets)"""
    sigma, result = emd_matching(recon, target, tolerance, params, **auction_kwargs)
    recon = np.asarray(recon, dtype=np.float64)
    diff = recon - np.asarray(target, dtype=np.float64)[sigma]
    loss = float(np.einsum('ij,ij->', diff, diff))
    return loss, 2.0 * diff, result


def emd_loss(recon: PointCloud, target: PointCloud, tolerance: float = DEFAULT_FLOAT_TOLERANCE,
             params: Optional[AuctionParams] = None, **auction_kwargs) -> Tuple[float, np.ndarray]:
    """sum_i |r_i - t_sigma(i)|^2 and its gradient 2 (r_i - t_sigma(i)) with sigma held fixed"""
    loss, grad, _ = emd_details(recon, target, tolerance, params, **auction_kwargs)
    return loss, grad


def mmd_loss(batch: LatentBatch, bw: float = KERNEL_BANDWIDTH) -> Tuple[float, np.ndarray]:
    """V-statistic MMD^2 between batch.z and batch.q_samples, with gradient w.r.t. z

    E[k(z, z')] - 2 E[k(q, z)] + E[k(q, q')] including the diagonal terms.
    """
    z = batch.z
    q = batch.q_samples
    m = z.shape[0]
    m_q = q.shape[0]
    if m < 2 or m_q < 2:
        raise ShapeError(f"MMD needs at least 2 latents and 2 target samples, got {m} and {m_q}")

    k_zz = gaussian_kernel(z, z, bw)
    k_zq = gaussian_kernel(z, q, bw)
    k_qq = gaussian_kernel(q, q, bw)
    loss = _exact_mean(k_zz) - 2.0 * _exact_mean(k_zq) + _exact_mean(k_qq)

    # d k(z_i, y) / d z_i = -k (z_i - y) / bw^2
    grad_zz = -(2.0 / (m * m)) * (k_zz.sum(axis=1)[:, None] * z - k_zz @ z)
    grad_zq = (2.0 / (m * m_q)) * (k_zq.sum(axis=1)[:, None] * z - k_zq @ q)
    grad = (grad_zz + grad_zq) / bw ** 2
    return float(loss), grad
