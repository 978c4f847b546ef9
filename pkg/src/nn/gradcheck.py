#!/usr/bin/env python3
"""
Finite-difference gradient checking
"""

from typing import Callable, Dict
import numpy as np

from .tensor import Tensor


def numerical_gradient(f: Callable[[], float], x: np.ndarray, h: float = 1e-6) -> np.ndarray:
    """Central differences of scalar f() w.r.t. every entry of x (modified in place, then restored)"""
    grad = np.zeros_like(x, dtype=np.float64)
    flat = x.reshape(-1)
    out = grad.reshape(-1)
    for i in range(flat.size):
        original = flat[i]
        flat[i] = original + h
        plus = f()
        flat[i] = original - h
        minus = f()
        flat[i] = original
        out[i] = (plus - minus) / (2.0 * h)
    return grad


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    scale = max(np.abs(analytic).max(), np.abs(numeric).max(), 1e-12)
    return float(np.abs(analytic - numeric).max() / scale)


def check_gradients(build: Callable[[Dict[str, Tensor]], Tensor],
                    inputs: Dict[str, np.ndarray], h: float = 1e-6,
                    seed: int = 0) -> Dict[str, float]:
    """Relative error per input for a random projection of build(inputs)

    `inputs` should be float64; build receives fresh leaf tensors each call.
    """
    leaves = {name: Tensor.parameter(value, name=name) for name, value in inputs.items()}
    out = build(leaves)
    projection = np.random.default_rng(seed).standard_normal(out.shape)
    out.backward(projection)

    def value() -> float:
        fresh = {name: Tensor(v) for name, v in inputs.items()}
        return float(np.sum(projection * build(fresh).data))

    errors = {}
    for name, leaf in leaves.items():
        numeric = numerical_gradient(value, inputs[name], h)
        analytic = leaf.grad if leaf.grad is not None else np.zeros_like(numeric)
        errors[name] = relative_error(analytic, numeric)
    return errors
