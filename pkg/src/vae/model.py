#!/usr/bin/env python3
"""
Point cloud autoencoder
Encoder: three pointwise convolutions with PReLU, global max pool, dense
latent head. Decoder: two dense PReLU layers, a dense layer to a coarse
cloud, then repeat-upsampling with same-padded convolutions back to
n_points x 3.
"""

from typing import Dict, List, Optional, Tuple
import logging

import numpy as np

from core.errors import ShapeError
from formats import ModelCheckpoint
from geometry import PointCloud
from nn import (
    Tensor,
    conv1d,
    dense,
    global_max_pool,
    he_normal,
    prelu,
    prelu_slopes,
    reshape,
    upsample_repeat,
    zeros,
)
from .config import (
    FIRST_UPSAMPLE,
    NARROW_KERNEL,
    SECOND_UPSAMPLE,
    WIDE_KERNEL,
    VaeConfig,
)

logger = logging.getLogger(__name__)

Trace = Optional[List[Tuple[str, Tuple[int, ...]]]]

ENCODER_CONVS = 3
DECODER_NARROW_CONVS = 3


def _conv_params(rng, prefix: str, k: int, c_in: int, c_out: int, activation: bool) -> Dict[str, np.ndarray]:
    params = {
        f"{prefix}.kernel": he_normal(rng, (k, c_in, c_out), fan_in=k * c_in),
        f"{prefix}.bias": zeros((c_out,)),
    }
    if activation:
        params[f"{prefix}.slope"] = prelu_slopes(c_out)
    return params


def _dense_params(rng, prefix: str, n_in: int, n_out: int, activation: bool) -> Dict[str, np.ndarray]:
    params = {
        f"{prefix}.weight": he_normal(rng, (n_in, n_out), fan_in=n_in),
        f"{prefix}.bias": zeros((n_out,)),
    }
    if activation:
        params[f"{prefix}.slope"] = prelu_slopes(n_out)
    return params


def build_model(cfg: VaeConfig) -> ModelCheckpoint:
    """Freshly initialized parameters; identical for identical seeds"""
    rng = np.random.default_rng(cfg.seed)
    ch = cfg.channels()
    d = cfg.latent_dim
    tensors: Dict[str, np.ndarray] = {}

    c_in = 3
    for i in range(1, ENCODER_CONVS + 1):
        tensors.update(_conv_params(rng, f"enc.conv{i}", 1, c_in, ch['encoder'], True))
        c_in = ch['encoder']
    tensors.update(_dense_params(rng, "enc.latent", ch['encoder'], d, False))

    tensors.update(_dense_params(rng, "dec.dense1", d, ch['hidden'], True))
    tensors.update(_dense_params(rng, "dec.dense2", ch['hidden'], ch['hidden'], True))
    tensors.update(_dense_params(rng, "dec.dense3", ch['hidden'], 3 * cfg.base_rows, False))
    tensors.update(_conv_params(rng, "dec.conv1", WIDE_KERNEL, 3, ch['wide'], True))
    c_in = ch['wide']
    for i in range(2, DECODER_NARROW_CONVS + 2):
        tensors.update(_conv_params(rng, f"dec.conv{i}", NARROW_KERNEL, c_in, ch['narrow'], True))
        c_in = ch['narrow']
    tensors.update(_conv_params(rng, "dec.out", NARROW_KERNEL, c_in, 3, False))

    n_params = sum(t.size for t in tensors.values())
    logger.info(f"Built model: {len(tensors)} tensors, {n_params} parameters, channels {ch}")
    return ModelCheckpoint(tensors=tensors, config=cfg.architecture())


class PointCloudVAE:
    """Differentiable view over a checkpoint's parameters"""

    def __init__(self, checkpoint: ModelCheckpoint, dtype=np.float32):
        self.cfg = VaeConfig.from_dict(checkpoint.config)
        self.params: Dict[str, Tensor] = {
            name: Tensor.parameter(np.array(value, dtype=dtype), name=name)
            for name, value in checkpoint.tensors.items()
        }
        self.dtype = dtype

    @property
    def n_points(self) -> int:
        return self.cfg.n_points

    @property
    def latent_dim(self) -> int:
        return self.cfg.latent_dim

    def to_checkpoint(self) -> ModelCheckpoint:
        return ModelCheckpoint(
            tensors={name: t.data.copy() for name, t in self.params.items()},
            config=dict(self.cfg.architecture()),
        )

    def zero_grad(self):
        for t in self.params.values():
            t.zero_grad()

    def arrays(self) -> Dict[str, np.ndarray]:
        return {name: t.data for name, t in self.params.items()}

    def grads(self) -> Dict[str, np.ndarray]:
        return {name: t.grad for name, t in self.params.items() if t.grad is not None}

    def _p(self, name: str) -> Tensor:
        return self.params[name]

    def _layer(self, x: Tensor, prefix: str, conv: bool, trace: Trace) -> Tensor:
        if conv:
            y = conv1d(x, self._p(f"{prefix}.kernel"), self._p(f"{prefix}.bias"))
        else:
            y = dense(x, self._p(f"{prefix}.weight"), self._p(f"{prefix}.bias"))
        if f"{prefix}.slope" in self.params:
            y = prelu(y, self._p(f"{prefix}.slope"))
        if trace is not None:
            trace.append((prefix, y.shape[1:]))
        return y

    def encode_batch(self, clouds: np.ndarray, trace: Trace = None) -> Tensor:
        """(B, n_points, 3) -> (B, d)"""
        clouds = np.asarray(clouds, dtype=self.dtype)
        if clouds.ndim != 3 or clouds.shape[1:] != (self.n_points, 3):
            raise ShapeError(f"expected clouds of shape (B, {self.n_points}, 3), got {clouds.shape}")
        # canonical row order keeps the output bit-identical under input permutation
        order = np.lexsort((clouds[..., 2], clouds[..., 1], clouds[..., 0]), axis=-1)
        x = Tensor(np.take_along_axis(clouds, order[..., None], axis=1))
        for i in range(1, ENCODER_CONVS + 1):
            x = self._layer(x, f"enc.conv{i}", True, trace)
        x = global_max_pool(x)
        if trace is not None:
            trace.append(("enc.pool", x.shape[1:]))
        return self._layer(x, "enc.latent", False, trace)

    def decode_batch(self, z, trace: Trace = None) -> Tensor:
        """(B, d) -> (B, n_points, 3)"""
        if not isinstance(z, Tensor):
            z = Tensor(np.asarray(z, dtype=self.dtype))
        if z.data.ndim != 2 or z.shape[1] != self.latent_dim:
            raise ShapeError(f"expected latents of shape (B, {self.latent_dim}), got {z.shape}")
        batch = z.shape[0]
        x = self._layer(z, "dec.dense1", False, trace)
        x = self._layer(x, "dec.dense2", False, trace)
        x = self._layer(x, "dec.dense3", False, trace)
        x = reshape(x, (batch, self.cfg.base_rows, 3))
        if trace is not None:
            trace.append(("dec.reshape", x.shape[1:]))
        x = upsample_repeat(x, FIRST_UPSAMPLE)
        if trace is not None:
            trace.append(("dec.upsample1", x.shape[1:]))
        x = self._layer(x, "dec.conv1", True, trace)
        x = upsample_repeat(x, SECOND_UPSAMPLE)
        if trace is not None:
            trace.append(("dec.upsample2", x.shape[1:]))
        for i in range(2, DECODER_NARROW_CONVS + 2):
            x = self._layer(x, f"dec.conv{i}", True, trace)
        return self._layer(x, "dec.out", True, trace)


def _as_model(model) -> PointCloudVAE:
    return model if isinstance(model, PointCloudVAE) else PointCloudVAE(model)


def encode(model, cloud: PointCloud) -> np.ndarray:
    """Latent vector (length d) of one cloud"""
    model = _as_model(model)
    cloud = np.asarray(cloud)
    if cloud.ndim != 2 or cloud.shape != (model.n_points, 3):
        raise ShapeError(f"model expects {model.n_points} x 3 points, got {cloud.shape}")
    return model.encode_batch(cloud[None]).data[0].astype(np.float64)


def decode(model, z) -> PointCloud:
    """n_points x 3 cloud for one latent vector"""
    model = _as_model(model)
    z = np.asarray(z, dtype=np.float64).reshape(-1)
    if z.shape[0] != model.latent_dim:
        raise ShapeError(f"model expects a {model.latent_dim}-d latent, got {z.shape[0]}")
    return model.decode_batch(z[None]).data[0].astype(np.float64)


def encode_many(model, clouds: List[PointCloud]) -> np.ndarray:
    """One latent row per cloud, each encoded exactly as encode() does"""
    model = _as_model(model)
    if not clouds:
        return np.zeros((0, model.latent_dim))
    return np.stack([encode(model, cloud) for cloud in clouds])


def reconstruct(model, cloud: PointCloud) -> PointCloud:
    """decode(encode(cloud))"""
    model = _as_model(model)
    return decode(model, encode(model, cloud))
