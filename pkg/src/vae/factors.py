#!/usr/bin/env python3
"""
Latent factor diagnostics
Which latent dimension tracks each known generative factor.
"""

from dataclasses import dataclass
from typing import Dict, Sequence
import logging

import numpy as np
from scipy.stats import spearmanr

from core.errors import AnalysisError

logger = logging.getLogger(__name__)


@dataclass
class FactorMatch:
    factor: str
    dim: int
    rho: float

    @property
    def strength(self) -> float:
        return abs(self.rho)


def factor_correlations(latents: np.ndarray, factors: Dict[str, Sequence[float]]) -> Dict[str, FactorMatch]:
    """Per factor, the latent dimension with the largest |Spearman rho|; lowest dimension on ties"""
    latents = np.asarray(latents, dtype=np.float64)
    if latents.ndim != 2 or latents.shape[0] < 3:
        raise AnalysisError(f"need at least 3 latent rows, got shape {latents.shape}")

    matches = {}
    for name, values in factors.items():
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (latents.shape[0],):
            raise AnalysisError(f"factor {name} has {values.shape[0]} values for {latents.shape[0]} rows")
        best = None
        for dim in range(latents.shape[1]):
            rho = spearmanr(latents[:, dim], values)[0]
            rho = 0.0 if not np.isfinite(rho) else float(rho)
            if best is None or abs(rho) > best.strength:
                best = FactorMatch(factor=name, dim=dim, rho=rho)
        matches[name] = best
        logger.info(f"Factor {name}: latent dim {best.dim} rho={best.rho:.3f}")
    return matches
