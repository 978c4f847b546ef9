"""
PPE Sizer - File Formats

PLY ingestion, the PCF processed-cloud format, JSON metadata sidecars,
latent and training-log CSV tables, exemplar reports and model checkpoints.
"""

from .records import Gender, Race, ScanMetadata, ScanRecord, parse_gender, parse_race
from .ply import PlyHeader, read_ply, read_ply_header, write_ply
from .pcf import PCF_MAGIC, encode_pcf, decode_pcf, read_pcf, write_pcf
from .metadata import metadata_to_dict, metadata_from_dict, read_metadata, write_metadata
from .tables import (
    LatentTable,
    TrainingLog,
    TRAINING_LOG_COLUMNS,
    read_latents,
    write_latents,
    read_training_log,
    write_training_log,
)
from .checkpoint import (
    CHECKPOINT_MAGIC,
    ModelCheckpoint,
    encode_checkpoint,
    decode_checkpoint,
    read_checkpoint,
    write_checkpoint,
)
from .reports import (
    ExemplarEntry,
    ExemplarReport,
    DISTANCE_COLUMNS,
    write_report,
    read_report,
    write_distance_csv,
    write_scatter_csv,
)
from .dataset import (
    ensure_dir,
    write_scan,
    read_scan,
    list_scan_ids,
    load_dataset,
)

__all__ = [
    'Gender',
    'Race',
    'ScanMetadata',
    'ScanRecord',
    'parse_gender',
    'parse_race',
    'PlyHeader',
    'read_ply',
    'read_ply_header',
    'write_ply',
    'PCF_MAGIC',
    'encode_pcf',
    'decode_pcf',
    'read_pcf',
    'write_pcf',
    'metadata_to_dict',
    'metadata_from_dict',
    'read_metadata',
    'write_metadata',
    'LatentTable',
    'TrainingLog',
    'TRAINING_LOG_COLUMNS',
    'read_latents',
    'write_latents',
    'read_training_log',
    'write_training_log',
    'CHECKPOINT_MAGIC',
    'ModelCheckpoint',
    'encode_checkpoint',
    'decode_checkpoint',
    'read_checkpoint',
    'write_checkpoint',
    'ExemplarEntry',
    'ExemplarReport',
    'DISTANCE_COLUMNS',
    'write_report',
    'read_report',
    'write_distance_csv',
    'write_scatter_csv',
    'ensure_dir',
    'write_scan',
    'read_scan',
    'list_scan_ids',
    'load_dataset',
]
