#!/usr/bin/env python3
"""
Run manifests
Every command records what it ran with next to its outputs; `replay` reads one
back and runs the command again.
"""

from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Union

import yaml

from core import __version__
from core.errors import FormatError, IOFailure

PathLike = Union[str, Path]

MANIFEST_NAME = "run_manifest.yaml"
MANIFEST_SUFFIX = ".manifest.yaml"


@dataclass
class RunManifest:
    command: str
    parameters: Dict[str, Any]
    seed: int = 0
    inputs: List[str] = field(default_factory=list)
    outputs: List[str] = field(default_factory=list)
    tool_version: str = __version__
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'RunManifest':
        missing = [key for key in ('command', 'parameters') if key not in data]
        if missing:
            raise FormatError(f"manifest is missing {missing}")
        return cls(
            command=str(data['command']),
            parameters=dict(data['parameters'] or {}),
            seed=int(data.get('seed', 0) or 0),
            inputs=list(data.get('inputs') or []),
            outputs=list(data.get('outputs') or []),
            tool_version=str(data.get('tool_version', '')),
            timestamp=str(data.get('timestamp', '')),
        )


def manifest_path_for(output: PathLike) -> Path:
    """Manifest location: inside an output directory, or beside a single output file"""
    output = Path(output)
    if output.is_dir():
        return output / MANIFEST_NAME
    return output.with_name(output.name + MANIFEST_SUFFIX)


def write_manifest(manifest: RunManifest, path: PathLike) -> Path:
    path = Path(path)
    try:
        with open(path, 'w') as f:
            yaml.safe_dump(manifest.to_dict(), f, sort_keys=True, default_flow_style=False)
    except OSError as e:
        raise IOFailure(f"cannot write manifest {path}: {e}")
    return path


def read_manifest(path: PathLike) -> RunManifest:
    path = Path(path)
    try:
        with open(path, 'r') as f:
            data = yaml.safe_load(f)
    except OSError as e:
        raise IOFailure(f"cannot read manifest {path}: {e}")
    except yaml.YAMLError as e:
        mark = getattr(e, 'problem_mark', None)
        raise FormatError(f"invalid manifest YAML in {path}", line=mark.line + 1 if mark else None)
    if not isinstance(data, dict):
        raise FormatError(f"manifest {path} is not a mapping")
    return RunManifest.from_dict(data)
