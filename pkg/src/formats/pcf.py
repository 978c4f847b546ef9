#!/usr/bin/env python3
"""
PCF processed point cloud format

    magic   4 bytes  b"PCF1"
    count   u32 LE   number of points N
    payload N x 3    float32 LE (x, y, z) in meters
"""

from pathlib import Path
from typing import Union
import struct

import numpy as np

from core.errors import FormatError, MagicMismatchError, TruncatedPayloadError
from geometry import PointCloud, as_cloud

PathLike = Union[str, Path]

PCF_MAGIC = b"PCF1"
_HEADER = struct.Struct('<4sI')


def encode_pcf(cloud: PointCloud) -> bytes:
    points = np.ascontiguousarray(as_cloud(cloud, dtype=np.float32), dtype='<f4')
    return _HEADER.pack(PCF_MAGIC, points.shape[0]) + points.tobytes()


def decode_pcf(raw: bytes) -> PointCloud:
    if len(raw) < 4 or raw[:4] != PCF_MAGIC:
        raise MagicMismatchError(f"expected magic {PCF_MAGIC!r}, found {raw[:4]!r}", offset=0)
    if len(raw) < _HEADER.size:
        raise TruncatedPayloadError("header shorter than 8 bytes", offset=len(raw))
    _, count = _HEADER.unpack_from(raw, 0)

    expected = count * 12
    available = len(raw) - _HEADER.size
    if available < expected:
        raise TruncatedPayloadError(
            f"header declares {count} points but payload holds {available // 12}",
            offset=len(raw))
    if available > expected:
        raise FormatError(
            f"point count mismatch: header declares {count} points, payload has {available} bytes",
            offset=_HEADER.size + expected)
    if count == 0:
        raise FormatError("PCF declares zero points", offset=4)

    points = np.frombuffer(raw, dtype='<f4', count=count * 3, offset=_HEADER.size)
    return points.reshape(count, 3).astype(np.float32)


def write_pcf(cloud: PointCloud, path: PathLike):
    Path(path).write_bytes(encode_pcf(cloud))


def read_pcf(path: PathLike) -> PointCloud:
    return decode_pcf(Path(path).read_bytes())
