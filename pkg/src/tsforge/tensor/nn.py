"""Parameter containers and basic layers"""

from collections import OrderedDict
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from ..errors import DimensionError
from . import ops
from .core import Tensor


class Parameter(Tensor):
    """Trainable leaf tensor"""

    def __init__(self, data, name: Optional[str] = None):
        super().__init__(data, requires_grad=True, name=name)


# Named trainable tensors of one network, in registration order
ModelParams = Dict[str, Parameter]


class Module:
    """
    Base class for layers and networks.

    Parameters and sub-modules assigned as attributes are registered in
    assignment order, which fixes the order of ``named_parameters()`` and of
    checkpoint records.
    """

    def __init__(self):
        object.__setattr__(self, "_params", OrderedDict())
        object.__setattr__(self, "_modules", OrderedDict())
        object.__setattr__(self, "training", True)

    def __setattr__(self, name, value):
        if isinstance(value, Parameter):
            self._params[name] = value
        elif isinstance(value, Module):
            self._modules[name] = value
        object.__setattr__(self, name, value)

    def __call__(self, *args, **kwargs):
        return self.forward(*args, **kwargs)

    def forward(self, *args, **kwargs):
        raise NotImplementedError

    def named_parameters(self, prefix: str = "") -> Iterator[Tuple[str, Parameter]]:
        for name, param in self._params.items():
            yield prefix + name, param
        for name, module in self._modules.items():
            yield from module.named_parameters(prefix + name + ".")

    def params(self) -> ModelParams:
        """Ordered name -> parameter mapping"""
        return OrderedDict(self.named_parameters())

    def parameters(self) -> List[Parameter]:
        return [p for _, p in self.named_parameters()]

    def num_parameters(self) -> int:
        return sum(p.size for p in self.parameters())

    def zero_grad(self) -> None:
        for p in self.parameters():
            p.zero_grad()

    def train(self, mode: bool = True) -> "Module":
        object.__setattr__(self, "training", mode)
        for module in self._modules.values():
            module.train(mode)
        return self

    def eval(self) -> "Module":
        return self.train(False)

    def state_dict(self) -> "OrderedDict[str, np.ndarray]":
        return OrderedDict((name, p.data.copy()) for name, p in self.named_parameters())

    def load_state_dict(self, state: Dict[str, np.ndarray]) -> None:
        params = self.params()
        missing = [name for name in params if name not in state]
        unexpected = [name for name in state if name not in params]
        if missing or unexpected:
            raise DimensionError(
                f"parameter names do not match: missing={missing}, unexpected={unexpected}"
            )
        for name, param in params.items():
            value = np.asarray(state[name], dtype=np.float64)
            if value.shape != param.shape:
                raise DimensionError(
                    f"parameter {name}: stored shape {value.shape} vs model shape {param.shape}"
                )
            param.data = value.copy()
            param.grad = None


class ModuleList(Module):
    """Sequence of modules registered under their index"""

    def __init__(self, modules):
        super().__init__()
        self._items: List[Module] = []
        for i, module in enumerate(modules):
            setattr(self, str(i), module)
            self._items.append(module)

    def __iter__(self):
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __getitem__(self, index: int) -> Module:
        return self._items[index]


def normal_init(rng: np.random.Generator, shape, std: float) -> np.ndarray:
    return rng.normal(0.0, std, size=shape)


class Linear(Module):
    """``x @ weight + bias`` over the last axis; weight is stored (in, out)"""

    def __init__(
        self,
        in_features: int,
        out_features: int,
        rng: np.random.Generator,
        init_std: float = 0.02,
    ):
        super().__init__()
        self.in_features = in_features
        self.out_features = out_features
        self.weight = Parameter(normal_init(rng, (in_features, out_features), init_std))
        self.bias = Parameter(np.zeros(out_features))

    def forward(self, x: Tensor) -> Tensor:
        if x.shape[-1] != self.in_features:
            raise DimensionError(
                f"linear: input {x.shape} does not match weight {self.weight.shape}"
            )
        return ops.add(ops.matmul(x, self.weight), self.bias)


class LayerNorm(Module):
    def __init__(self, dim: int, eps: float = 1e-5):
        super().__init__()
        self.eps = eps
        self.gamma = Parameter(np.ones(dim))
        self.beta = Parameter(np.zeros(dim))

    def forward(self, x: Tensor) -> Tensor:
        return ops.layer_norm(x, self.gamma, self.beta, self.eps)
