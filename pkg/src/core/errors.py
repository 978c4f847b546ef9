#!/usr/bin/env python3
"""
Error hierarchy for PPE Sizer
Every failure raised by the library carries a stable category used by the CLI
to print `error:<category>:<message>` lines
"""

from enum import Enum
from typing import Optional
import re


class ErrorCategory(Enum):
    """Stable error categories (machine-parseable CLI prefix)"""
    GEOMETRY = "geometry"
    PIPELINE = "pipeline"
    FORMAT = "format"
    METADATA = "metadata"
    SHAPE = "shape"
    SOLVER = "solver"
    CONFIG = "config"
    TRAINING = "training"
    ANALYSIS = "analysis"
    DATASET = "dataset"
    IO = "io"
    INTERNAL = "internal"


class PPESizerError(Exception):
    """Base class for all library errors"""

    category: ErrorCategory = ErrorCategory.INTERNAL

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message

    def cli_line(self) -> str:
        """One-line form printed by the CLI"""
        return f"error:{self.category.value}:{single_line(self.message)}"


class DegenerateLandmarksError(PPESizerError):
    """Tragion pair does not define a horizontal direction"""
    category = ErrorCategory.GEOMETRY


class EmptyCropError(PPESizerError):
    """No points survived the face crop"""
    category = ErrorCategory.GEOMETRY


class MissingLandmarksError(PPESizerError):
    category = ErrorCategory.PIPELINE


class FormatError(PPESizerError):
    """Malformed file; carries the line or byte offset where parsing failed"""
    category = ErrorCategory.FORMAT

    def __init__(self, message: str, line: Optional[int] = None, offset: Optional[int] = None):
        location = ""
        if line is not None:
            location = f" (line {line})"
        elif offset is not None:
            location = f" (byte {offset})"
        super().__init__(message + location)
        self.line = line
        self.offset = offset


class MagicMismatchError(FormatError):
    pass


class TruncatedPayloadError(FormatError):
    pass


class UnsupportedFormatError(FormatError):
    pass


class MetadataError(PPESizerError):
    """Missing key or out-of-enum value in a metadata sidecar"""
    category = ErrorCategory.METADATA


class ShapeError(PPESizerError):
    category = ErrorCategory.SHAPE


class SizeMismatchError(ShapeError):
    pass


class SolverError(PPESizerError):
    category = ErrorCategory.SOLVER


class ConfigError(PPESizerError):
    category = ErrorCategory.CONFIG


class TrainingError(PPESizerError):
    category = ErrorCategory.TRAINING


class AnalysisError(PPESizerError):
    category = ErrorCategory.ANALYSIS


class DatasetError(PPESizerError):
    category = ErrorCategory.DATASET


class IOFailure(PPESizerError):
    category = ErrorCategory.IO


def single_line(message: str) -> str:
    """Fold wrapped messages (YAML loader errors, library tracebacks) onto one line"""
    return re.sub(r'\s*\n\s*', ' ', str(message)).strip()
