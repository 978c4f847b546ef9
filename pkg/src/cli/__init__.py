"""
PPE Sizer - Command Line Interface
"""

from .commands import main, build_parser, setup_logging, COMMANDS
from .manifest import RunManifest, manifest_path_for, read_manifest, write_manifest

__all__ = [
    'main',
    'build_parser',
    'setup_logging',
    'COMMANDS',
    'RunManifest',
    'manifest_path_for',
    'read_manifest',
    'write_manifest',
]
