#!/usr/bin/env python3
"""
Reverse-mode autodiff tensor
A dense array plus the closure that pushes its gradient to its parents.
"""

from typing import Callable, Iterable, List, Optional, Tuple
import numpy as np

from core.errors import ShapeError, TrainingError

_debug_checks = False


def set_debug_checks(enabled: bool):
    """Assert every forward value and gradient is finite"""
    global _debug_checks
    _debug_checks = bool(enabled)


def debug_checks_enabled() -> bool:
    return _debug_checks


class Tensor:
    def __init__(self, data, parents: Iterable['Tensor'] = (),
                 backward_fn: Optional[Callable[[np.ndarray], None]] = None,
                 requires_grad: bool = False, name: str = None, dtype=None):
        self.data = np.asarray(data, dtype=dtype) if dtype is not None else np.asarray(data)
        if not np.issubdtype(self.data.dtype, np.floating):
            self.data = self.data.astype(np.float64)
        self.grad: Optional[np.ndarray] = None
        self.name = name
        self._parents: Tuple['Tensor', ...] = tuple(parents)
        self._backward_fn = backward_fn
        self.requires_grad = requires_grad or any(p.requires_grad for p in self._parents)
        if _debug_checks and not np.all(np.isfinite(self.data)):
            raise TrainingError(f"non-finite values in forward pass ({name or 'tensor'})")

    @classmethod
    def parameter(cls, data, name: str = None) -> 'Tensor':
        return cls(data, requires_grad=True, name=name)

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def dtype(self):
        return self.data.dtype

    def __repr__(self) -> str:
        label = f" {self.name}" if self.name else ""
        return f"Tensor{label}(shape={self.shape}, dtype={self.dtype})"

    def zero_grad(self):
        self.grad = None

    def accumulate(self, grad: np.ndarray):
        if not self.requires_grad:
            return
        grad = np.asarray(grad, dtype=self.data.dtype)
        if grad.shape != self.data.shape:
            raise ShapeError(f"gradient shape {grad.shape} does not match {self.data.shape}")
        if self.grad is None:
            self.grad = grad.copy()
        else:
            self.grad += grad

    def _topological_order(self) -> List['Tensor']:
        order: List[Tensor] = []
        visited = set()
        stack = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for parent in reversed(node._parents):
                if id(parent) not in visited and parent.requires_grad:
                    stack.append((parent, False))
        return order

    def backward(self, grad: Optional[np.ndarray] = None):
        """Accumulate d(self)/d(leaf) into every leaf that requires a gradient"""
        if grad is None:
            if self.data.size != 1:
                raise ShapeError("backward() without a gradient needs a scalar tensor")
            grad = np.ones_like(self.data)
        self.accumulate(grad)

        for node in reversed(self._topological_order()):
            if node._backward_fn is None or node.grad is None:
                continue
            if _debug_checks and not np.all(np.isfinite(node.grad)):
                raise TrainingError(f"non-finite gradient ({node.name or 'tensor'})")
            node._backward_fn(node.grad)
            # interior gradients are not needed once propagated
            if node._parents:
                node.grad = None
