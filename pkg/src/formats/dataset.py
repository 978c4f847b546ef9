#!/usr/bin/env python3
"""
Dataset directories: one `<id>.pcf` cloud plus one `<id>.json` sidecar per scan.
Raw scans may carry their vertices as `<id>.ply` instead.
"""

from pathlib import Path
from typing import List, Optional, Union
import logging

from core.errors import DatasetError, IOFailure
from .metadata import read_metadata, write_metadata
from .pcf import read_pcf, write_pcf
from .ply import read_ply
from .records import ScanRecord

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def ensure_dir(path: PathLike) -> Path:
    path = Path(path)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise IOFailure(f"cannot create directory {path}: {e}")
    return path


def write_scan(record: ScanRecord, directory: PathLike):
    directory = ensure_dir(directory)
    try:
        write_pcf(record.cloud, directory / f"{record.id}.pcf")
        write_metadata(record, directory / f"{record.id}.json")
    except OSError as e:
        raise IOFailure(f"cannot write scan {record.id} to {directory}: {e}")


# cloud file extensions, in lookup order
CLOUD_SUFFIXES = ('.pcf', '.ply')


def _cloud_path(directory: Path, scan_id: str) -> Optional[Path]:
    for suffix in CLOUD_SUFFIXES:
        path = directory / f"{scan_id}{suffix}"
        if path.exists():
            return path
    return None


def list_scan_ids(directory: PathLike) -> List[str]:
    """Ids with both a cloud (PCF, or PLY for raw scans) and a sidecar, sorted"""
    directory = Path(directory)
    if not directory.is_dir():
        raise DatasetError(f"{directory} is not a directory")
    stems = sorted({p.stem for suffix in CLOUD_SUFFIXES for p in directory.glob(f"*{suffix}")})
    ids = [stem for stem in stems if (directory / f"{stem}.json").exists()]
    orphans = len(stems) - len(ids)
    if orphans:
        logger.warning(f"Ignoring {orphans} clouds without metadata in {directory}")
    return ids


def read_scan(directory: PathLike, scan_id: str) -> ScanRecord:
    directory = Path(directory)
    meta = read_metadata(directory / f"{scan_id}.json")
    path = _cloud_path(directory, scan_id)
    if path is None:
        raise DatasetError(f"scan {scan_id} has no cloud in {directory}")
    cloud = read_pcf(path) if path.suffix == '.pcf' else read_ply(path)
    return ScanRecord.from_parts(meta, cloud)


def load_dataset(directory: PathLike, ids: Optional[List[str]] = None) -> List[ScanRecord]:
    ids = list_scan_ids(directory) if ids is None else ids
    return [read_scan(directory, scan_id) for scan_id in ids]
