"""Shared fixtures for the PPE Sizer test suite"""

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from geometry import LandmarkSet  # noqa: E402
from pipeline import SynthFactors, synth_scan  # noqa: E402
from vae import VaeConfig  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def landmarks():
    return LandmarkSet(
        cervicale=[-0.05, 0.0, 1.47],
        tragion_left=[0.0, 0.07, 1.566],
        tragion_right=[0.0, -0.07, 1.566],
    )


@pytest.fixture(scope="session")
def head_scan():
    """Noise-free synthetic head with default factors"""
    return synth_scan(SynthFactors(), noise_sigma=0.0, seed=7)


@pytest.fixture
def tiny_cfg():
    """Smallest useful network: 20 points, width 1/64"""
    return VaeConfig(n_points=20, latent_dim=3, width_mult=1.0 / 64.0, batch_size=2,
                     lr=1e-3, max_epochs=2, patience=5, seed=3)


@pytest.fixture
def tiny_clouds():
    gen = np.random.default_rng(99)
    return [gen.normal(0.0, 0.05, (20, 3)).astype(np.float32) for _ in range(8)]
