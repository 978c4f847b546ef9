#!/usr/bin/env python3
"""
JSON metadata sidecars: id, demographic labels, landmarks and synthetic factors
"""

from pathlib import Path
from typing import Any, Dict, Union
import json

from core.errors import FormatError, MetadataError
from geometry import LandmarkSet
from .records import ScanMetadata, ScanRecord

PathLike = Union[str, Path]

REQUIRED_KEYS = ('id', 'gender', 'race')
OPTIONAL_KEYS = ('landmarks', 'factors')


def metadata_to_dict(meta: ScanMetadata) -> Dict[str, Any]:
    data: Dict[str, Any] = dict(meta.extra)
    data['id'] = meta.id
    data['gender'] = meta.gender.value
    data['race'] = meta.race.value
    data['landmarks'] = meta.landmarks.to_dict() if meta.landmarks is not None else None
    data['factors'] = {k: float(v) for k, v in meta.factors.items()} if meta.factors is not None else None
    return data


def metadata_from_dict(data: Dict[str, Any], strict: bool = False) -> ScanMetadata:
    if not isinstance(data, dict):
        raise MetadataError("metadata must be a JSON object")
    for key in REQUIRED_KEYS:
        if key not in data:
            raise MetadataError(f"missing required key {key!r}")

    extra = {k: v for k, v in data.items() if k not in REQUIRED_KEYS + OPTIONAL_KEYS}
    if strict and extra:
        raise MetadataError(f"unknown keys in strict mode: {sorted(extra)}")

    landmarks = None
    if data.get('landmarks') is not None:
        try:
            landmarks = LandmarkSet.from_dict(data['landmarks'])
        except KeyError as e:
            raise MetadataError(f"landmarks missing {e}")

    factors = None
    if data.get('factors') is not None:
        try:
            factors = {str(k): float(v) for k, v in data['factors'].items()}
        except (TypeError, ValueError, AttributeError):
            raise MetadataError("factors must map names to numbers")

    return ScanMetadata(
        id=data['id'],
        gender=data['gender'],
        race=data['race'],
        landmarks=landmarks,
        factors=factors,
        extra=extra,
    )


def write_metadata(meta: Union[ScanMetadata, ScanRecord], path: PathLike):
    if isinstance(meta, ScanRecord):
        meta = meta.metadata()
    text = json.dumps(metadata_to_dict(meta), indent=2, sort_keys=True)
    Path(path).write_text(text + "\n")


def read_metadata(path: PathLike, strict: bool = False) -> ScanMetadata:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise FormatError(f"invalid JSON in {path}: {e.msg}", line=e.lineno)
    return metadata_from_dict(data, strict=strict)
