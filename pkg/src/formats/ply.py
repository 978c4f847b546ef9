#!/usr/bin/env python3
"""
PLY point cloud reader/writer
Vertex positions are decoded by trimesh; faces, normals and colours are
dropped. The header is checked first so malformed files fail with the line
or byte where they break.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Tuple, Union
import io
import logging

import numpy as np

try:
    import trimesh
    TRIMESH_AVAILABLE = True
except ImportError:
    TRIMESH_AVAILABLE = False

from core.errors import FormatError, TruncatedPayloadError, UnsupportedFormatError
from geometry import PointCloud, as_cloud

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

_TYPE_SIZES = {
    'char': 1, 'int8': 1, 'uchar': 1, 'uint8': 1,
    'short': 2, 'int16': 2, 'ushort': 2, 'uint16': 2,
    'int': 4, 'int32': 4, 'uint': 4, 'uint32': 4,
    'float': 4, 'float32': 4, 'double': 8, 'float64': 8,
}


@dataclass
class PlyHeader:
    format: str
    body_offset: int
    line_count: int
    # (name, count, row size in bytes or None when the element carries lists)
    elements: List[Tuple[str, int, Union[int, None]]] = field(default_factory=list)

    def vertex_count(self) -> int:
        for name, count, _ in self.elements:
            if name == 'vertex':
                return count
        raise FormatError("PLY has no vertex element")


def read_ply_header(raw: bytes) -> PlyHeader:
    """Parse the header lines up to end_header"""
    position = 0
    line_no = 0
    fmt = None
    elements: List[list] = []

    while True:
        end = raw.find(b'\n', position)
        if end < 0:
            raise FormatError("header not terminated by end_header", line=line_no + 1)
        tokens = raw[position:end].decode('ascii', errors='replace').split()
        position = end + 1
        line_no += 1

        if line_no == 1:
            if tokens != ['ply']:
                raise FormatError("missing 'ply' magic", line=1)
            continue
        if not tokens or tokens[0] in ('comment', 'obj_info'):
            continue

        keyword = tokens[0]
        if keyword == 'end_header':
            break
        if keyword == 'format' and len(tokens) == 3:
            fmt = tokens[1]
            if fmt == 'binary_big_endian':
                raise UnsupportedFormatError("binary_big_endian PLY is not supported", line=line_no)
            if fmt not in ('ascii', 'binary_little_endian'):
                raise FormatError(f"unknown PLY format {fmt!r}", line=line_no)
        elif keyword == 'element' and len(tokens) == 3:
            try:
                count = int(tokens[2])
            except ValueError:
                raise FormatError(f"element count {tokens[2]!r} is not an integer", line=line_no)
            if count < 0:
                raise FormatError("negative element count", line=line_no)
            elements.append([tokens[1], count, 0])
        elif keyword == 'property' and elements:
            if tokens[1:2] == ['list']:
                elements[-1][2] = None
            elif len(tokens) == 3 and tokens[1] in _TYPE_SIZES:
                if elements[-1][2] is not None:
                    elements[-1][2] += _TYPE_SIZES[tokens[1]]
            else:
                raise FormatError("malformed property line", line=line_no)
        else:
            raise FormatError(f"unexpected header line {' '.join(tokens)!r}", line=line_no)

    if fmt is None:
        raise FormatError("missing format line")
    return PlyHeader(fmt, position, line_no, [tuple(e) for e in elements])


def _check_body(raw: bytes, header: PlyHeader):
    """Reject bodies too short for the declared vertices"""
    if header.format == 'ascii':
        rows = raw[header.body_offset:].decode('ascii', errors='replace').split('\n')
        available = sum(1 for row in rows if row.strip())
        needed = 0
        for name, count, _ in header.elements:
            needed += count
            if name == 'vertex':
                break
        if available < needed:
            raise TruncatedPayloadError(
                f"expected {needed} data rows, found {available}",
                line=header.line_count + available + 1)
        return

    offset = header.body_offset
    for name, count, row_size in header.elements:
        if row_size is None:
            # variable-length rows; trimesh reports these
            return
        offset += count * row_size
        if name == 'vertex':
            break
    if offset > len(raw):
        raise TruncatedPayloadError(
            f"vertex block ends at byte {offset}, file holds {len(raw)}", offset=len(raw))


def _vertices(loaded) -> np.ndarray:
    if isinstance(loaded, trimesh.Scene):
        parts = [np.asarray(g.vertices) for g in loaded.geometry.values()]
        return np.vstack(parts) if parts else np.empty((0, 3))
    return np.asarray(loaded.vertices)


def read_ply(path: PathLike) -> PointCloud:
    """Read vertex positions from an ASCII or binary little-endian PLY file (float32)"""
    raw = Path(path).read_bytes()
    header = read_ply_header(raw)
    if header.vertex_count() == 0:
        raise FormatError("PLY declares zero vertices")
    _check_body(raw, header)
    if not TRIMESH_AVAILABLE:
        raise UnsupportedFormatError("reading PLY requires trimesh")

    try:
        loaded = trimesh.load(io.BytesIO(raw), file_type='ply', process=False)
    except Exception as e:
        raise FormatError(f"PLY body could not be decoded: {e}")

    points = _vertices(loaded)
    if points.shape != (header.vertex_count(), 3):
        raise FormatError(f"decoded {points.shape[0]} vertices, header declares {header.vertex_count()}")
    cloud = as_cloud(points.astype(np.float32), dtype=np.float32)
    logger.debug(f"Read {cloud.shape[0]} vertices from {path} ({header.format})")
    return cloud


def write_ply(cloud: PointCloud, path: PathLike, binary: bool = True):
    """Write a vertex-only PLY with float32 x, y, z"""
    points = np.ascontiguousarray(as_cloud(cloud), dtype='<f4')
    header = (
        "ply\n"
        f"format {'binary_little_endian' if binary else 'ascii'} 1.0\n"
        f"element vertex {points.shape[0]}\n"
        "property float x\n"
        "property float y\n"
        "property float z\n"
        "end_header\n"
    )
    with open(path, 'wb') as f:
        f.write(header.encode('ascii'))
        if binary:
            f.write(points.tobytes())
        else:
            for p in points:
                # repr of the float32 value round-trips exactly through float32
                f.write(f"{repr(float(p[0]))} {repr(float(p[1]))} {repr(float(p[2]))}\n".encode('ascii'))
