from .core import Tensor, Tape, backward, no_grad, is_grad_enabled, as_tensor
from .nn import Module, ModuleList, Parameter, ModelParams, Linear, LayerNorm
from . import ops

__all__ = [
    'Tensor', 'Tape', 'backward', 'no_grad', 'is_grad_enabled', 'as_tensor',
    'Module', 'ModuleList', 'Parameter', 'ModelParams', 'Linear', 'LayerNorm',
    'ops',
]
