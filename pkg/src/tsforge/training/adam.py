"""Adam with bias correction"""

from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Dict, Mapping

import numpy as np

from ..errors import ParameterError
from ..tensor import ModelParams


@dataclass
class AdamState:
    """First/second moment estimates per parameter name plus the step count"""
    m: "OrderedDict[str, np.ndarray]" = field(default_factory=OrderedDict)
    v: "OrderedDict[str, np.ndarray]" = field(default_factory=OrderedDict)
    t: int = 0

    @classmethod
    def zeros_like(cls, params: Mapping[str, np.ndarray]) -> "AdamState":
        return cls(
            OrderedDict((k, np.zeros_like(p)) for k, p in params.items()),
            OrderedDict((k, np.zeros_like(p)) for k, p in params.items()),
        )


def adam_step(
    params: Dict[str, np.ndarray],
    grads: Mapping[str, np.ndarray],
    state: AdamState,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> AdamState:
    """Update ``params`` in place and advance ``state`` by one step"""
    if eps <= 0:
        raise ParameterError(f"adam eps must be > 0, got {eps}")
    state.t += 1
    bc1 = 1.0 - beta1 ** state.t
    bc2 = 1.0 - beta2 ** state.t
    step_size = lr / bc1

    for k in params:
        g = grads[k]
        if k not in state.m:
            state.m[k] = np.zeros_like(params[k])
            state.v[k] = np.zeros_like(params[k])

        state.m[k] *= beta1
        state.m[k] += (1.0 - beta1) * g
        state.v[k] *= beta2
        state.v[k] += (1.0 - beta2) * (g * g)

        denom = np.sqrt(state.v[k] / bc2) + eps
        params[k] -= step_size * state.m[k] / denom
    return state


class Adam:
    """Adam over a model's named parameters; missing gradients count as zero"""

    def __init__(
        self,
        params: ModelParams,
        lr: float,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ):
        if lr <= 0:
            raise ParameterError(f"learning rate must be > 0, got {lr}")
        if not 0.0 <= beta1 < beta2 < 1.0:
            raise ParameterError(f"need 0 <= beta1 < beta2 < 1, got ({beta1}, {beta2})")
        self.params = OrderedDict(params)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.state = AdamState.zeros_like({k: p.data for k, p in self.params.items()})

    def step(self) -> None:
        data = OrderedDict((k, p.data) for k, p in self.params.items())
        grads = {
            k: p.grad if p.grad is not None else np.zeros_like(p.data)
            for k, p in self.params.items()
        }
        adam_step(data, grads, self.state, self.lr, self.beta1, self.beta2, self.eps)

    def zero_grad(self) -> None:
        for p in self.params.values():
            p.zero_grad()
