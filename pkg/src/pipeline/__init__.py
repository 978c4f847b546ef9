"""
PPE Sizer - Dataset Preparation

Face extraction from raw head scans and the synthetic head generator.
"""

from .preprocess import (
    PreprocessConfig,
    FaceExtraction,
    PreprocessSummary,
    extract_face,
    extract_face_detailed,
    preprocess_directory,
)
from .synthetic import (
    SynthFactors,
    DEMOGRAPHIC_GROUPS,
    DEFAULT_NOISE_SIGMA,
    DEFAULT_SURFACE_POINTS,
    MIN_SURFACE_POINTS,
    synth_landmarks,
    synth_scan,
    synth_dataset,
)

__all__ = [
    'PreprocessConfig',
    'FaceExtraction',
    'PreprocessSummary',
    'extract_face',
    'extract_face_detailed',
    'preprocess_directory',
    'SynthFactors',
    'DEMOGRAPHIC_GROUPS',
    'DEFAULT_NOISE_SIGMA',
    'DEFAULT_SURFACE_POINTS',
    'MIN_SURFACE_POINTS',
    'synth_landmarks',
    'synth_scan',
    'synth_dataset',
]
