#!/usr/bin/env python3
"""
Differentiable layer operations
All ops accept optional leading batch dimensions: sequences are (..., L, C).
"""

from typing import Sequence
import numpy as np

from core.errors import ShapeError
from .tensor import Tensor


def _as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def dense(x: Tensor, W: Tensor, b: Tensor) -> Tensor:
    """y = x W + b over the last axis"""
    x, W, b = _as_tensor(x), _as_tensor(W), _as_tensor(b)
    if W.data.ndim != 2 or x.shape[-1] != W.shape[0] or b.shape != (W.shape[1],):
        raise ShapeError(f"dense: x{x.shape} W{W.shape} b{b.shape}")
    n_in, n_out = W.shape
    out = x.data @ W.data + b.data

    def backward(g):
        x.accumulate(g @ W.data.T)
        W.accumulate(x.data.reshape(-1, n_in).T @ g.reshape(-1, n_out))
        b.accumulate(g.reshape(-1, n_out).sum(axis=0))

    return Tensor(out, (x, W, b), backward, name="dense")


def _same_padding(k: int):
    return (k - 1) // 2, k // 2


def conv1d(x: Tensor, kernels: Tensor, b: Tensor) -> Tensor:
    """Stride-1 convolution with zero same-padding; kernels are (k, Cin, Cout)"""
    x, kernels, b = _as_tensor(x), _as_tensor(kernels), _as_tensor(b)
    if kernels.data.ndim != 3 or x.data.ndim < 2:
        raise ShapeError(f"conv1d: x{x.shape} kernels{kernels.shape}")
    k, c_in, c_out = kernels.shape
    if x.shape[-1] != c_in or b.shape != (c_out,):
        raise ShapeError(f"conv1d: x{x.shape} kernels{kernels.shape} b{b.shape}")

    length = x.shape[-2]
    left, right = _same_padding(k)
    pad = [(0, 0)] * (x.data.ndim - 2) + [(left, right), (0, 0)]
    padded = np.pad(x.data, pad)

    out = np.broadcast_to(b.data, x.shape[:-1] + (c_out,)).copy()
    for t in range(k):
        out += padded[..., t:t + length, :] @ kernels.data[t]

    def backward(g):
        g_padded = np.zeros_like(padded)
        g_kernels = np.zeros_like(kernels.data)
        g_rows = g.reshape(-1, c_out)
        for t in range(k):
            g_padded[..., t:t + length, :] += g @ kernels.data[t].T
            g_kernels[t] = padded[..., t:t + length, :].reshape(-1, c_in).T @ g_rows
        x.accumulate(g_padded[..., left:left + length, :])
        kernels.accumulate(g_kernels)
        b.accumulate(g_rows.sum(axis=0))

    return Tensor(out, (x, kernels, b), backward, name="conv1d")


def prelu(x: Tensor, a: Tensor) -> Tensor:
    """x where positive, else a_c * x with one learnable slope per channel"""
    x, a = _as_tensor(x), _as_tensor(a)
    if a.data.ndim != 1 or x.shape[-1] != a.shape[0]:
        raise ShapeError(f"prelu: x{x.shape} slopes{a.shape}")
    positive = x.data > 0
    out = np.where(positive, x.data, a.data * x.data)

    def backward(g):
        x.accumulate(g * np.where(positive, 1.0, a.data).astype(x.dtype))
        a.accumulate((g * np.where(positive, 0.0, x.data)).reshape(-1, a.shape[0]).sum(axis=0))

    return Tensor(out, (x, a), backward, name="prelu")


def global_max_pool(x: Tensor) -> Tensor:
    """(..., L, C) -> (..., C); gradient goes to the first maximum of each channel"""
    x = _as_tensor(x)
    if x.data.ndim < 2 or x.shape[-2] == 0:
        raise ShapeError(f"global_max_pool needs at least one row, got {x.shape}")
    index = np.expand_dims(np.argmax(x.data, axis=-2), -2)
    out = np.take_along_axis(x.data, index, axis=-2).squeeze(-2)

    def backward(g):
        g_x = np.zeros_like(x.data)
        np.put_along_axis(g_x, index, np.expand_dims(g, -2), axis=-2)
        x.accumulate(g_x)

    return Tensor(out, (x,), backward, name="global_max_pool")


def upsample_repeat(x: Tensor, factor: int) -> Tensor:
    """Repeat each row `factor` times consecutively"""
    x = _as_tensor(x)
    factor = int(factor)
    if factor < 1:
        raise ShapeError(f"upsample factor must be >= 1, got {factor}")
    if x.data.ndim < 2:
        raise ShapeError(f"upsample_repeat needs (..., L, C), got {x.shape}")
    out = np.repeat(x.data, factor, axis=-2)

    def backward(g):
        shape = x.shape[:-2] + (x.shape[-2], factor, x.shape[-1])
        x.accumulate(g.reshape(shape).sum(axis=-2))

    return Tensor(out, (x,), backward, name="upsample")


def reshape(x: Tensor, new_shape: Sequence[int]) -> Tensor:
    x = _as_tensor(x)
    new_shape = tuple(int(s) for s in new_shape)
    if int(np.prod(new_shape)) != x.data.size:
        raise ShapeError(f"cannot reshape {x.shape} to {new_shape}")
    out = x.data.reshape(new_shape)

    def backward(g):
        x.accumulate(g.reshape(x.shape))

    return Tensor(out, (x,), backward, name="reshape")


def attach_loss(x: Tensor, loss: float, grad: np.ndarray) -> Tensor:
    """Scalar node for an externally computed loss with known gradient w.r.t. x"""
    x = _as_tensor(x)
    grad = np.asarray(grad)
    if grad.shape != x.shape:
        raise ShapeError(f"loss gradient {grad.shape} does not match {x.shape}")

    def backward(g):
        x.accumulate(g * grad)

    return Tensor(np.asarray(loss, dtype=np.float64), (x,), backward, name="loss")


def add(*terms: Tensor) -> Tensor:
    """Elementwise sum of same-shape tensors"""
    terms = [_as_tensor(t) for t in terms]
    if not terms:
        raise ShapeError("add needs at least one term")
    shape = terms[0].shape
    if any(t.shape != shape for t in terms):
        raise ShapeError(f"add: mismatched shapes {[t.shape for t in terms]}")
    out = terms[0].data.copy()
    for t in terms[1:]:
        out = out + t.data

    def backward(g):
        for t in terms:
            t.accumulate(g)

    return Tensor(out, terms, backward, name="add")
