"""
PPE Sizer - Point Cloud Autoencoder

Encoder/decoder network, earth mover and MMD objectives, and training with
early stopping.
"""

from .config import VaeConfig, LatentBatch, scaled_channels
from .model import (
    PointCloudVAE,
    build_model,
    encode,
    encode_many,
    decode,
    reconstruct,
)
from .losses import KERNEL_BANDWIDTH, gaussian_kernel, emd_matching, emd_details, emd_loss, mmd_loss
from .training import TrainingResult, split_indices, evaluate, train_step, train
from .factors import FactorMatch, factor_correlations

__all__ = [
    'VaeConfig',
    'LatentBatch',
    'scaled_channels',
    'PointCloudVAE',
    'build_model',
    'encode',
    'encode_many',
    'decode',
    'reconstruct',
    'KERNEL_BANDWIDTH',
    'gaussian_kernel',
    'emd_matching',
    'emd_details',
    'emd_loss',
    'mmd_loss',
    'TrainingResult',
    'split_indices',
    'evaluate',
    'train_step',
    'train',
    'FactorMatch',
    'factor_correlations',
]
