"""
PPE Sizer - Neural Network Primitives

Reverse-mode autodiff over dense numpy arrays with the layer set the point
cloud autoencoder needs, and the ADAM optimizer.
"""

from .tensor import Tensor, set_debug_checks, debug_checks_enabled
from .ops import (
    dense,
    conv1d,
    prelu,
    global_max_pool,
    upsample_repeat,
    reshape,
    attach_loss,
    add,
)
from .init import PRELU_INITIAL_SLOPE, he_normal, zeros, prelu_slopes
from .optim import AdamState, adam_step
from .gradcheck import numerical_gradient, relative_error, check_gradients

__all__ = [
    'Tensor',
    'set_debug_checks',
    'debug_checks_enabled',
    'dense',
    'conv1d',
    'prelu',
    'global_max_pool',
    'upsample_repeat',
    'reshape',
    'attach_loss',
    'add',
    'PRELU_INITIAL_SLOPE',
    'he_normal',
    'zeros',
    'prelu_slopes',
    'AdamState',
    'adam_step',
    'numerical_gradient',
    'relative_error',
    'check_gradients',
]
