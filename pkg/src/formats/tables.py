#!/usr/bin/env python3
"""
CSV tables: latent codes with demographic columns, and training logs
Floats are written with 17 significant digits so every value round-trips.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Union
import math

import numpy as np
import pandas as pd

from core.errors import FormatError, ShapeError
from .records import parse_gender, parse_race

PathLike = Union[str, Path]

FLOAT_FORMAT = '%.17g'
TRAINING_LOG_COLUMNS = ['epoch', 'train_Lr', 'train_Ll', 'val_Lr', 'val_Ll']


@dataclass
class LatentTable:
    """Rows of (scan id, latent vector, gender, race)"""
    ids: List[str]
    z: np.ndarray
    gender: List[str]
    race: List[str]

    def __post_init__(self):
        self.ids = [str(i) for i in self.ids]
        self.z = np.asarray(self.z, dtype=np.float64)
        if self.z.ndim != 2:
            raise ShapeError(f"latent matrix must be 2-D, got shape {self.z.shape}")
        m = self.z.shape[0]
        if not (len(self.ids) == len(self.gender) == len(self.race) == m):
            raise ShapeError("latent table columns have different lengths")
        if len(set(self.ids)) != m:
            raise ShapeError("latent table ids must be unique")
        if not np.all(np.isfinite(self.z)):
            raise ShapeError("latent table contains non-finite values")
        self.gender = [parse_gender(g).value for g in self.gender]
        self.race = [parse_race(r).value for r in self.race]

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def dim(self) -> int:
        return self.z.shape[1]

    def groups(self) -> List[tuple]:
        return list(zip(self.gender, self.race))

    def subset(self, index: Sequence[int]) -> 'LatentTable':
        index = list(index)
        return LatentTable(
            ids=[self.ids[i] for i in index],
            z=self.z[index] if index else np.zeros((0, self.dim)),
            gender=[self.gender[i] for i in index],
            race=[self.race[i] for i in index],
        )

    def row(self, scan_id: str) -> np.ndarray:
        return self.z[self.ids.index(scan_id)]

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame({'id': self.ids})
        for j in range(self.dim):
            frame[f'z{j}'] = self.z[:, j]
        frame['gender'] = self.gender
        frame['race'] = self.race
        return frame


def write_latents(table: LatentTable, path: PathLike):
    table.to_frame().to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')


def _read_str_frame(path: PathLike) -> pd.DataFrame:
    try:
        return pd.read_csv(path, dtype=str, keep_default_na=False, na_filter=False)
    except pd.errors.ParserError as e:
        raise FormatError(f"ragged CSV in {path}: {e}")
    except pd.errors.EmptyDataError:
        raise FormatError(f"{path} is empty; header row is mandatory", line=1)


def _parse_float(cell: str, line: int, column: str) -> float:
    if cell is None or cell == '' or (isinstance(cell, float) and math.isnan(cell)):
        raise FormatError(f"missing value in column {column!r} (ragged row)", line=line)
    try:
        return float(cell)
    except ValueError:
        raise FormatError(f"non-numeric value {cell!r} in column {column!r}", line=line)


def read_latents(path: PathLike) -> LatentTable:
    frame = _read_str_frame(path)
    columns = list(frame.columns)
    if len(columns) < 4 or columns[0] != 'id' or columns[-2:] != ['gender', 'race']:
        raise FormatError("latent CSV header must be id,z0,...,z{d-1},gender,race", line=1)
    z_columns = columns[1:-2]
    if z_columns != [f'z{j}' for j in range(len(z_columns))]:
        raise FormatError("latent columns must be named z0..z{d-1}", line=1)

    z = np.empty((len(frame), len(z_columns)), dtype=np.float64)
    for i, row in enumerate(frame.itertuples(index=False)):
        line = i + 2
        for j, column in enumerate(z_columns):
            z[i, j] = _parse_float(row[j + 1], line, column)
        if any(not isinstance(cell, str) or cell == '' for cell in (row[0], row[-2], row[-1])):
            raise FormatError("missing demographic label (ragged row)", line=line)

    return LatentTable(
        ids=list(frame['id']),
        z=z,
        gender=list(frame['gender']),
        race=list(frame['race']),
    )


@dataclass
class TrainingLog:
    """Per-epoch reconstruction and latent losses for both splits"""
    rows: List[dict] = field(default_factory=list)

    def append(self, epoch: int, train_lr: float, train_ll: float, val_lr: float, val_ll: float):
        self.rows.append({
            'epoch': int(epoch),
            'train_Lr': float(train_lr),
            'train_Ll': float(train_ll),
            'val_Lr': float(val_lr),
            'val_Ll': float(val_ll),
        })

    def column(self, name: str) -> List[float]:
        return [row[name] for row in self.rows]

    def best_epoch(self) -> Optional[int]:
        if not self.rows:
            return None
        totals = [row['val_Lr'] + row['val_Ll'] for row in self.rows]
        return self.rows[int(np.argmin(totals))]['epoch']

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=TRAINING_LOG_COLUMNS)


def write_training_log(log: TrainingLog, path: PathLike):
    log.to_frame().to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')


def read_training_log(path: PathLike) -> TrainingLog:
    frame = _read_str_frame(path)
    if list(frame.columns) != TRAINING_LOG_COLUMNS:
        raise FormatError(f"training log header must be {','.join(TRAINING_LOG_COLUMNS)}", line=1)
    log = TrainingLog()
    for i, row in enumerate(frame.itertuples(index=False)):
        line = i + 2
        try:
            epoch = int(row[0])
        except ValueError:
            raise FormatError(f"epoch {row[0]!r} is not an integer", line=line)
        values = [_parse_float(row[j], line, TRAINING_LOG_COLUMNS[j]) for j in range(1, 5)]
        log.append(epoch, *values)
    return log
