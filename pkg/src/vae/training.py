#!/usr/bin/env python3
"""
Autoencoder training
Minimizes L = L_l + L_r with ADAM, evaluates the withheld split every epoch and
keeps the parameters with the best validation loss.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple
import logging
import math

import numpy as np

try:
    import psutil
    PSUTIL_AVAILABLE = True
except ImportError:
    PSUTIL_AVAILABLE = False

try:
    from rich.progress import Progress, SpinnerColumn, TextColumn, BarColumn
    RICH_AVAILABLE = True
except ImportError:
    RICH_AVAILABLE = False

from core.errors import DatasetError, TrainingError
from formats import ModelCheckpoint, TrainingLog
from geometry import PointCloud
from nn import AdamState, add, adam_step, attach_loss
from .config import LatentBatch, VaeConfig
from .losses import emd_loss, mmd_loss
from .model import PointCloudVAE, build_model

logger = logging.getLogger(__name__)

# sub-seed offsets from VaeConfig.seed
SPLIT_SEED_OFFSET = 1
SHUFFLE_SEED_OFFSET = 2
EVAL_SEED_OFFSET = 3


@dataclass
class TrainingResult:
    checkpoint: ModelCheckpoint
    log: TrainingLog
    best_epoch: int
    stopped_early: bool
    train_ids: List[int]
    val_ids: List[int]


def _memory_mb() -> float:
    if not PSUTIL_AVAILABLE:
        return float('nan')
    return psutil.Process().memory_info().rss / 1024 / 1024


def split_indices(count: int, cfg: VaeConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Seeded train/validation split; the validation side has at least 2 clouds"""
    if count < 2 * cfg.batch_size:
        raise DatasetError(f"need at least {2 * cfg.batch_size} clouds for batch size "
                           f"{cfg.batch_size}, got {count}")
    n_val = max(2, int(round(cfg.val_frac * count)))
    if count - n_val < 2:
        raise DatasetError(f"validation fraction {cfg.val_frac} leaves fewer than 2 training clouds")
    order = np.random.default_rng(cfg.seed + SPLIT_SEED_OFFSET).permutation(count)
    return np.sort(order[n_val:]), np.sort(order[:n_val])


def _batches(indices: np.ndarray, batch_size: int) -> List[np.ndarray]:
    chunks = [indices[i:i + batch_size] for i in range(0, len(indices), batch_size)]
    # the MMD estimator needs two latents per batch
    if len(chunks) > 1 and len(chunks[-1]) < 2:
        tail = chunks.pop()
        chunks[-1] = np.concatenate([chunks[-1], tail])
    return chunks


class _EmdPool:
    """Per-example reconstruction losses, in input order"""

    def __init__(self, cfg: VaeConfig, tolerance: float):
        self.tolerance = tolerance
        self.kwargs = {'eps_scale_divisor': cfg.eps_scale_divisor, 'parallel': cfg.parallel_bids}
        self.workers = cfg.workers

    def __call__(self, recon: np.ndarray, target: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        def one(b: int):
            return emd_loss(recon[b], target[b], self.tolerance, **self.kwargs)

        if self.workers > 1 and recon.shape[0] > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as executor:
                results = list(executor.map(one, range(recon.shape[0])))
        else:
            results = [one(b) for b in range(recon.shape[0])]
        losses = np.array([loss for loss, _ in results])
        grads = np.stack([grad for _, grad in results])
        return losses, grads


def _stack(clouds: Sequence[PointCloud], index: np.ndarray, dtype) -> np.ndarray:
    return np.stack([np.asarray(clouds[i], dtype=dtype) for i in index])


def evaluate(model, clouds: Sequence[PointCloud], cfg: VaeConfig,
             index: Optional[np.ndarray] = None, seed: Optional[int] = None) -> Tuple[float, float]:
    """Mean L_r and L_l over a set of clouds without updating weights"""
    if not isinstance(model, PointCloudVAE):
        model = PointCloudVAE(model)
    if index is None:
        index = np.arange(len(clouds))
    if len(index) < 2:
        raise DatasetError(f"evaluation needs at least 2 clouds, got {len(index)}")
    rng = np.random.default_rng(cfg.seed + EVAL_SEED_OFFSET if seed is None else seed)
    emd = _EmdPool(cfg, cfg.eval_eps_rel)

    lr_total = 0.0
    ll_total = 0.0
    weight = 0
    for chunk in _batches(np.asarray(index), cfg.batch_size):
        x = _stack(clouds, chunk, model.dtype)
        z = model.encode_batch(x)
        ll, _ = mmd_loss(LatentBatch.sample(z.data, rng, cfg.uniform_bound))
        recon = model.decode_batch(z).data.astype(np.float64)
        losses, _ = emd(recon, x.astype(np.float64))
        lr_total += float(losses.sum())
        ll_total += ll * len(chunk)
        weight += len(chunk)
    return lr_total / weight, ll_total / weight


def train_step(model: PointCloudVAE, x: np.ndarray, state: AdamState, rng: np.random.Generator,
               cfg: VaeConfig, emd: _EmdPool) -> Tuple[float, float]:
    """One ADAM step on a batch; returns (L_r, L_l) before the update"""
    model.zero_grad()
    z = model.encode_batch(x)
    batch = LatentBatch.sample(z.data, rng, cfg.uniform_bound)
    ll, grad_z = mmd_loss(batch)

    recon = model.decode_batch(z)
    losses, grads = emd(recon.data.astype(np.float64), x.astype(np.float64))
    lr = float(losses.mean())
    if not (math.isfinite(lr) and math.isfinite(ll)):
        raise TrainingError(f"non-finite loss: L_r={lr} L_l={ll}")

    total = add(attach_loss(z, ll, grad_z), attach_loss(recon, lr, grads / x.shape[0]))
    total.backward()
    adam_step(model.arrays(), model.grads(), state)
    return lr, ll


def train(dataset: Sequence[PointCloud], cfg: VaeConfig, progress: bool = False,
          init: Optional[ModelCheckpoint] = None) -> TrainingResult:
    """Train from a fresh (or given) initialization with early stopping on validation L"""
    for i, cloud in enumerate(dataset):
        if np.shape(cloud) != (cfg.n_points, 3):
            raise DatasetError(f"cloud {i} has shape {np.shape(cloud)}, expected ({cfg.n_points}, 3)")
    train_idx, val_idx = split_indices(len(dataset), cfg)
    logger.info(f"Training on {len(train_idx)} clouds, validating on {len(val_idx)}")

    model = PointCloudVAE(init if init is not None else build_model(cfg))
    state = AdamState(lr=cfg.lr)
    rng = np.random.default_rng(cfg.seed + SHUFFLE_SEED_OFFSET)
    emd = _EmdPool(cfg, cfg.train_eps_rel)
    log = TrainingLog()

    train_lr, train_ll = evaluate(model, dataset, cfg, train_idx)
    val_lr, val_ll = evaluate(model, dataset, cfg, val_idx)
    log.append(0, train_lr, train_ll, val_lr, val_ll)
    best = val_lr + val_ll
    best_epoch = 0
    best_checkpoint = model.to_checkpoint()
    logger.info(f"Epoch 0: val L_r={val_lr:.6g} L_l={val_ll:.6g}")

    waited = 0
    stopped_early = False
    task_progress = None
    if progress and RICH_AVAILABLE:
        task_progress = Progress(SpinnerColumn(), TextColumn("[bold blue]{task.description}"),
                                 BarColumn(), TextColumn("{task.completed}/{task.total}"))
        task_progress.start()
        task = task_progress.add_task("Training", total=cfg.max_epochs)

    try:
        for epoch in range(1, cfg.max_epochs + 1):
            order = rng.permutation(train_idx)
            lr_sum = 0.0
            ll_sum = 0.0
            weight = 0
            for step, chunk in enumerate(_batches(order, cfg.batch_size)):
                x = _stack(dataset, chunk, model.dtype)
                try:
                    lr, ll = train_step(model, x, state, rng, cfg, emd)
                except TrainingError as e:
                    raise TrainingError(f"epoch {epoch} batch {step}: {e.message}")
                lr_sum += lr * len(chunk)
                ll_sum += ll * len(chunk)
                weight += len(chunk)

            val_lr, val_ll = evaluate(model, dataset, cfg, val_idx)
            if not (math.isfinite(val_lr) and math.isfinite(val_ll)):
                raise TrainingError(f"epoch {epoch}: non-finite validation loss")
            log.append(epoch, lr_sum / weight, ll_sum / weight, val_lr, val_ll)
            logger.info(f"Epoch {epoch}: train L_r={lr_sum / weight:.6g} L_l={ll_sum / weight:.6g} "
                        f"val L_r={val_lr:.6g} L_l={val_ll:.6g} rss={_memory_mb():.0f}MB")
            if task_progress is not None:
                task_progress.update(task, advance=1)

            if val_lr + val_ll < best:
                best = val_lr + val_ll
                best_epoch = epoch
                best_checkpoint = model.to_checkpoint()
                waited = 0
            else:
                waited += 1
                if waited >= max(cfg.patience, 1):
                    stopped_early = True
                    logger.info(f"Stopping after epoch {epoch}: no improvement for {waited} epochs")
                    break
    finally:
        if task_progress is not None:
            task_progress.stop()

    logger.info(f"Best epoch {best_epoch} with validation L={best:.6g}")
    return TrainingResult(
        checkpoint=best_checkpoint,
        log=log,
        best_epoch=best_epoch,
        stopped_early=stopped_early,
        train_ids=[int(i) for i in train_idx],
        val_ids=[int(i) for i in val_idx],
    )
