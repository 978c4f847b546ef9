"""Parameter initialization"""

from typing import Tuple
import numpy as np

PRELU_INITIAL_SLOPE = 0.25


def he_normal(rng: np.random.Generator, shape: Tuple[int, ...], fan_in: int,
              dtype=np.float32) -> np.ndarray:
    """Zero-mean normal with std sqrt(2 / fan_in)"""
    return (rng.standard_normal(shape) * np.sqrt(2.0 / fan_in)).astype(dtype)


def zeros(shape: Tuple[int, ...], dtype=np.float32) -> np.ndarray:
    return np.zeros(shape, dtype=dtype)


def prelu_slopes(channels: int, dtype=np.float32) -> np.ndarray:
    return np.full(channels, PRELU_INITIAL_SLOPE, dtype=dtype)
