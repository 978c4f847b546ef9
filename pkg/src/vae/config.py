#!/usr/bin/env python3
"""
Autoencoder configuration and latent batch types
"""

from dataclasses import asdict, dataclass, fields
from typing import Any, Dict, Optional
import numpy as np

from core.errors import ConfigError, ShapeError

# base channel counts of the full-size network
ENCODER_CHANNELS = 1024
DECODER_HIDDEN = 1000
DECODER_WIDE_CHANNELS = 1024
DECODER_NARROW_CHANNELS = 200
DECODER_BASE_DIVISOR = 10
FIRST_UPSAMPLE = 2
SECOND_UPSAMPLE = 5
WIDE_KERNEL = 10
NARROW_KERNEL = 50

# keys that fix the parameter shapes; stored inside checkpoints
ARCHITECTURE_KEYS = ('n_points', 'latent_dim', 'width_mult', 'seed')


def scaled_channels(base: int, width_mult: float) -> int:
    """Channel count after width scaling, rounded half up, at least 1"""
    return max(1, int(base * width_mult + 0.5))


@dataclass
class VaeConfig:
    n_points: int = 10000
    latent_dim: int = 3
    width_mult: float = 1.0
    batch_size: int = 16
    lr: float = 1e-4
    max_epochs: int = 50
    patience: int = 10
    seed: int = 0
    uniform_bound: float = 1.0
    val_frac: float = 0.1
    train_eps_rel: float = 0.01
    eval_eps_rel: float = 1e-4
    eps_scale_divisor: float = 4.0
    parallel_bids: bool = False
    workers: int = 1

    def __post_init__(self):
        self.n_points = int(self.n_points)
        self.latent_dim = int(self.latent_dim)
        self.width_mult = float(self.width_mult)
        if self.n_points < DECODER_BASE_DIVISOR or self.n_points % DECODER_BASE_DIVISOR != 0:
            raise ConfigError(f"n_points must be a positive multiple of {DECODER_BASE_DIVISOR}, "
                              f"got {self.n_points}")
        if self.latent_dim < 1:
            raise ConfigError(f"latent_dim must be >= 1, got {self.latent_dim}")
        if not 0.0 < self.width_mult <= 1.0:
            raise ConfigError(f"width_mult must be in (0, 1], got {self.width_mult}")
        if int(self.batch_size) < 2:
            raise ConfigError(f"batch_size must be >= 2, got {self.batch_size}")
        if not self.lr > 0:
            raise ConfigError(f"lr must be > 0, got {self.lr}")
        if int(self.max_epochs) < 0 or int(self.patience) < 0:
            raise ConfigError("max_epochs and patience must be >= 0")
        if not self.uniform_bound > 0:
            raise ConfigError(f"uniform_bound must be > 0, got {self.uniform_bound}")
        if not 0.0 < self.val_frac < 1.0:
            raise ConfigError(f"val_frac must be in (0, 1), got {self.val_frac}")
        if not (self.train_eps_rel > 0 and self.eval_eps_rel > 0):
            raise ConfigError("auction tolerances must be > 0")
        if int(self.workers) < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        self.batch_size = int(self.batch_size)
        self.max_epochs = int(self.max_epochs)
        self.patience = int(self.patience)
        self.workers = int(self.workers)

    @property
    def base_rows(self) -> int:
        return self.n_points // DECODER_BASE_DIVISOR

    def channels(self) -> Dict[str, int]:
        return {
            'encoder': scaled_channels(ENCODER_CHANNELS, self.width_mult),
            'hidden': scaled_channels(DECODER_HIDDEN, self.width_mult),
            'wide': scaled_channels(DECODER_WIDE_CHANNELS, self.width_mult),
            'narrow': scaled_channels(DECODER_NARROW_CHANNELS, self.width_mult),
        }

    def architecture(self) -> Dict[str, Any]:
        return {key: getattr(self, key) for key in ARCHITECTURE_KEYS}

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'VaeConfig':
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in known})

    @classmethod
    def from_settings(cls, settings, **overrides) -> 'VaeConfig':
        """Build from the `vae` and `assignment` sections of a core Config"""
        vae = dict(settings.section('vae'))
        assignment = settings.section('assignment')
        vae.setdefault('train_eps_rel', assignment.get('train_eps_rel', 0.01))
        vae.setdefault('eval_eps_rel', assignment.get('eval_eps_rel', 1e-4))
        vae.setdefault('eps_scale_divisor', assignment.get('eps_scale_divisor', 4.0))
        vae.setdefault('parallel_bids', assignment.get('parallel_bids', False))
        vae.update({k: v for k, v in overrides.items() if v is not None})
        return cls.from_dict(vae)


@dataclass
class LatentBatch:
    """Encoder outputs and matching draws from the uniform target distribution"""
    z: np.ndarray
    q_samples: np.ndarray
    bound: Optional[float] = None

    def __post_init__(self):
        self.z = np.asarray(self.z, dtype=np.float64)
        self.q_samples = np.asarray(self.q_samples, dtype=np.float64)
        if self.z.ndim != 2 or self.q_samples.ndim != 2 or self.z.shape[1] != self.q_samples.shape[1]:
            raise ShapeError(f"latent batch shapes disagree: z{self.z.shape} q{self.q_samples.shape}")
        if not (np.all(np.isfinite(self.z)) and np.all(np.isfinite(self.q_samples))):
            raise ShapeError("latent batch contains non-finite values")
        if self.bound is not None and np.any(np.abs(self.q_samples) > self.bound):
            raise ShapeError(f"target samples outside [-{self.bound}, {self.bound}]")

    @classmethod
    def sample(cls, z: np.ndarray, rng: np.random.Generator, bound: float = 1.0) -> 'LatentBatch':
        z = np.asarray(z, dtype=np.float64)
        return cls(z=z, q_samples=rng.uniform(-bound, bound, z.shape), bound=bound)
