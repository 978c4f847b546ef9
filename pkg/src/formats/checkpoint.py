#!/usr/bin/env python3
"""
Model checkpoint format

    magic    4 bytes  b"VAE1" (the trailing digit is the format version)
    count    u32 LE   number of tensors
    per tensor:
        u16 LE name length, UTF-8 name
        u8 rank, rank x u32 LE dims
        row-major float32 LE payload
    u32 LE config length, UTF-8 JSON config
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Union
import json
import struct

import numpy as np

from core.errors import FormatError, MagicMismatchError, TruncatedPayloadError

PathLike = Union[str, Path]

CHECKPOINT_MAGIC = b"VAE1"


@dataclass
class ModelCheckpoint:
    """Named parameter tensors plus the architecture config they were built with"""
    tensors: Dict[str, np.ndarray] = field(default_factory=dict)
    config: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.tensors = {
            name: np.ascontiguousarray(value, dtype=np.float32)
            for name, value in self.tensors.items()
        }

    def names(self):
        return list(self.tensors)

    def equals(self, other: 'ModelCheckpoint') -> bool:
        """Bit-exact comparison of tensors and config"""
        if list(self.tensors) != list(other.tensors) or self.config != other.config:
            return False
        return all(
            self.tensors[name].shape == other.tensors[name].shape
            and self.tensors[name].tobytes() == other.tensors[name].tobytes()
            for name in self.tensors
        )


def encode_checkpoint(ckpt: ModelCheckpoint) -> bytes:
    parts = [CHECKPOINT_MAGIC, struct.pack('<I', len(ckpt.tensors))]
    for name, tensor in ckpt.tensors.items():
        encoded = name.encode('utf-8')
        parts.append(struct.pack('<H', len(encoded)))
        parts.append(encoded)
        parts.append(struct.pack('<B', tensor.ndim))
        parts.append(struct.pack(f'<{tensor.ndim}I', *tensor.shape))
        parts.append(np.ascontiguousarray(tensor, dtype='<f4').tobytes())
    config_blob = json.dumps(ckpt.config, sort_keys=True).encode('utf-8')
    parts.append(struct.pack('<I', len(config_blob)))
    parts.append(config_blob)
    return b''.join(parts)


class _Reader:
    def __init__(self, raw: bytes):
        self.raw = raw
        self.offset = 0

    def take(self, size: int, what: str) -> bytes:
        if self.offset + size > len(self.raw):
            raise TruncatedPayloadError(f"checkpoint truncated while reading {what}", offset=self.offset)
        chunk = self.raw[self.offset:self.offset + size]
        self.offset += size
        return chunk

    def unpack(self, fmt: str, what: str):
        size = struct.calcsize(fmt)
        return struct.unpack(fmt, self.take(size, what))


def decode_checkpoint(raw: bytes) -> ModelCheckpoint:
    if raw[:3] == CHECKPOINT_MAGIC[:3] and raw[:4] != CHECKPOINT_MAGIC:
        raise MagicMismatchError(f"unsupported checkpoint version {raw[3:4]!r}", offset=3)
    if raw[:4] != CHECKPOINT_MAGIC:
        raise MagicMismatchError(f"expected magic {CHECKPOINT_MAGIC!r}, found {raw[:4]!r}", offset=0)

    reader = _Reader(raw)
    reader.take(4, "magic")
    (count,) = reader.unpack('<I', "tensor count")

    tensors: Dict[str, np.ndarray] = {}
    for index in range(count):
        (name_len,) = reader.unpack('<H', f"name length of tensor {index}")
        try:
            name = reader.take(name_len, f"name of tensor {index}").decode('utf-8')
        except UnicodeDecodeError:
            raise FormatError(f"tensor {index} name is not valid UTF-8", offset=reader.offset)
        if name in tensors:
            raise FormatError(f"tensor {name!r} appears twice", offset=reader.offset)
        (rank,) = reader.unpack('<B', f"rank of {name}")
        dims = reader.unpack(f'<{rank}I', f"dims of {name}") if rank else ()
        size = int(np.prod(dims, dtype=np.int64)) if rank else 1
        payload = reader.take(size * 4, f"payload of {name} with shape {tuple(dims)}")
        tensors[name] = np.frombuffer(payload, dtype='<f4').reshape(dims).astype(np.float32)

    (config_len,) = reader.unpack('<I', "config length")
    blob = reader.take(config_len, "config blob")
    if reader.offset != len(raw):
        raise FormatError(
            f"{len(raw) - reader.offset} trailing bytes after config; shape headers inconsistent",
            offset=reader.offset)
    try:
        config = json.loads(blob.decode('utf-8')) if config_len else {}
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise FormatError(f"config blob is not valid JSON: {e}", offset=reader.offset - config_len)

    return ModelCheckpoint(tensors=tensors, config=config)


def write_checkpoint(ckpt: ModelCheckpoint, path: PathLike):
    Path(path).write_bytes(encode_checkpoint(ckpt))


def read_checkpoint(path: PathLike) -> ModelCheckpoint:
    return decode_checkpoint(Path(path).read_bytes())
