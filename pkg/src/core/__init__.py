"""
PPE Sizer - Core Components

Configuration management and the shared error hierarchy.
"""

__version__ = "1.0.0"

from .config import config, Config
from .errors import (
    ErrorCategory,
    PPESizerError,
    DegenerateLandmarksError,
    EmptyCropError,
    MissingLandmarksError,
    FormatError,
    MagicMismatchError,
    TruncatedPayloadError,
    UnsupportedFormatError,
    MetadataError,
    ShapeError,
    SizeMismatchError,
    SolverError,
    ConfigError,
    TrainingError,
    AnalysisError,
    DatasetError,
    IOFailure,
)

__all__ = [
    'config',
    'Config',
    'ErrorCategory',
    'PPESizerError',
    'DegenerateLandmarksError',
    'EmptyCropError',
    'MissingLandmarksError',
    'FormatError',
    'MagicMismatchError',
    'TruncatedPayloadError',
    'UnsupportedFormatError',
    'MetadataError',
    'ShapeError',
    'SizeMismatchError',
    'SolverError',
    'ConfigError',
    'TrainingError',
    'AnalysisError',
    'DatasetError',
    'IOFailure',
]
