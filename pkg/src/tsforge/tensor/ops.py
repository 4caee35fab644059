"""Differentiable tensor operations"""

from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.special import erf

from ..errors import DimensionError, ParameterError
from .core import Tensor, as_tensor

_SQRT2 = np.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)


def _check_broadcast(a: Tuple[int, ...], b: Tuple[int, ...], op: str) -> None:
    """Allow equal shapes, scalar-with-tensor, and trailing-suffix rows (bias, tables)"""
    if a == b or int(np.prod(a)) == 1 or int(np.prod(b)) == 1:
        return
    short, long = (a, b) if len(a) <= len(b) else (b, a)
    if len(short) < len(long) and long[len(long) - len(short):] == short:
        return
    raise DimensionError(f"{op}: cannot broadcast shapes {a} and {b}")


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """Sum ``grad`` down to ``shape`` after numpy broadcasting"""
    if grad.shape == shape:
        return grad
    if int(np.prod(shape)) == 1:
        return np.full(shape, grad.sum())
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


# ---------------------------------------------------------------------------
# Elementwise
# ---------------------------------------------------------------------------

def add(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast(a.shape, b.shape, "add")

    def backward(g):
        return _unbroadcast(g, a.shape), _unbroadcast(g, b.shape)

    return Tensor.from_op(a.data + b.data, (a, b), backward)


def sub(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast(a.shape, b.shape, "sub")

    def backward(g):
        return _unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)

    return Tensor.from_op(a.data - b.data, (a, b), backward)


def mul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast(a.shape, b.shape, "mul")

    def backward(g):
        return _unbroadcast(g * b.data, a.shape), _unbroadcast(g * a.data, b.shape)

    return Tensor.from_op(a.data * b.data, (a, b), backward)


def scale(x, factor: float) -> Tensor:
    x = as_tensor(x)
    factor = float(factor)
    return Tensor.from_op(x.data * factor, (x,), lambda g: (g * factor,))


def square(x) -> Tensor:
    x = as_tensor(x)
    return Tensor.from_op(x.data * x.data, (x,), lambda g: (2.0 * x.data * g,))


def _expand_reduced(g: np.ndarray, shape: Tuple[int, ...], axis, keepdims: bool) -> np.ndarray:
    if axis is not None and not keepdims:
        g = np.expand_dims(g, axis)
    return np.broadcast_to(g, shape)


def sum(x, axis=None, keepdims: bool = False) -> Tensor:
    x = as_tensor(x)
    out = x.data.sum(axis=axis, keepdims=keepdims)

    def backward(g):
        return (np.array(_expand_reduced(g, x.shape, axis, keepdims)),)

    return Tensor.from_op(out, (x,), backward)


def mean(x, axis=None, keepdims: bool = False) -> Tensor:
    x = as_tensor(x)
    out = x.data.mean(axis=axis, keepdims=keepdims)
    count = x.size // max(out.size, 1)

    def backward(g):
        return (np.array(_expand_reduced(g, x.shape, axis, keepdims)) / count,)

    return Tensor.from_op(out, (x,), backward)


def elementwise(op: str, *operands, factor: Optional[float] = None) -> Tensor:
    """Dispatch by name over add, sub, mul, scale, mean and square"""
    if op == "add":
        return add(*operands)
    if op == "sub":
        return sub(*operands)
    if op == "mul":
        return mul(*operands)
    if op == "scale":
        return scale(operands[0], factor if factor is not None else operands[1])
    if op == "mean":
        return mean(operands[0])
    if op == "square":
        return square(operands[0])
    raise ParameterError(f"unknown elementwise op: {op}")


# ---------------------------------------------------------------------------
# Linear algebra
# ---------------------------------------------------------------------------

def matmul(a, b) -> Tensor:
    """Matrix product; leading (batch) dims broadcast as in numpy.matmul"""
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:
        raise DimensionError(f"matmul: incompatible shapes {a.shape} and {b.shape}")
    try:
        out = np.matmul(a.data, b.data)
    except ValueError as e:
        raise DimensionError(f"matmul: incompatible shapes {a.shape} and {b.shape}") from e

    def backward(g):
        ga = np.matmul(g, np.swapaxes(b.data, -1, -2))
        gb = np.matmul(np.swapaxes(a.data, -1, -2), g)
        return _unbroadcast(ga, a.shape), _unbroadcast(gb, b.shape)

    return Tensor.from_op(out, (a, b), backward)


def pointwise_channel_projection(x, weight, bias) -> Tensor:
    """
    1x1 convolution over (B, H, 1, W): maps H input channels to C outputs
    independently at every timestep.

    Args:
        x: Tensor of shape (B, H, 1, W)
        weight: Tensor of shape (C, H)
        bias: Tensor of shape (C,)
    """
    x, weight, bias = as_tensor(x), as_tensor(weight), as_tensor(bias)
    if x.ndim != 4 or weight.ndim != 2 or x.shape[1] != weight.shape[1]:
        raise DimensionError(
            f"channel projection: input {x.shape} does not match weight {weight.shape}"
        )
    if bias.shape != (weight.shape[0],):
        raise DimensionError(
            f"channel projection: bias {bias.shape} does not match weight {weight.shape}"
        )

    out = np.einsum("ch,bhxw->bcxw", weight.data, x.data) + bias.data[None, :, None, None]

    def backward(g):
        gx = np.einsum("ch,bcxw->bhxw", weight.data, g)
        gw = np.einsum("bcxw,bhxw->ch", g, x.data)
        gb = g.sum(axis=(0, 2, 3))
        return gx, gw, gb

    return Tensor.from_op(out, (x, weight, bias), backward)


# ---------------------------------------------------------------------------
# Structural
# ---------------------------------------------------------------------------

def reshape(x, shape: Sequence[int]) -> Tensor:
    x = as_tensor(x)
    try:
        out = x.data.reshape(shape)
    except ValueError as e:
        raise DimensionError(f"reshape: cannot reshape {x.shape} to {tuple(shape)}") from e
    return Tensor.from_op(out, (x,), lambda g: (g.reshape(x.shape),))


def transpose(x, axes: Optional[Sequence[int]] = None) -> Tensor:
    x = as_tensor(x)
    axes = tuple(axes) if axes is not None else tuple(reversed(range(x.ndim)))
    inverse = tuple(np.argsort(axes))
    return Tensor.from_op(x.data.transpose(axes), (x,), lambda g: (g.transpose(inverse),))


def swapaxes(x, axis1: int, axis2: int) -> Tensor:
    x = as_tensor(x)
    axes = list(range(x.ndim))
    axes[axis1], axes[axis2] = axes[axis2], axes[axis1]
    return transpose(x, axes)


def concat(tensors: Sequence, axis: int = 0) -> Tensor:
    tensors = [as_tensor(t) for t in tensors]
    try:
        out = np.concatenate([t.data for t in tensors], axis=axis)
    except ValueError as e:
        shapes = [t.shape for t in tensors]
        raise DimensionError(f"concat: incompatible shapes {shapes} on axis {axis}") from e
    bounds = np.cumsum([t.shape[axis] for t in tensors])[:-1]

    def backward(g):
        return tuple(np.split(g, bounds, axis=axis))

    return Tensor.from_op(out, tensors, backward)


def getitem(x, index) -> Tensor:
    x = as_tensor(x)

    def backward(g):
        full = np.zeros_like(x.data)
        np.add.at(full, index, g)
        return (full,)

    return Tensor.from_op(x.data[index], (x,), backward)


def broadcast_to(x, shape: Sequence[int]) -> Tensor:
    x = as_tensor(x)
    shape = tuple(shape)
    try:
        out = np.broadcast_to(x.data, shape).copy()
    except ValueError as e:
        raise DimensionError(f"broadcast_to: cannot broadcast {x.shape} to {shape}") from e
    return Tensor.from_op(out, (x,), lambda g: (_unbroadcast(g, x.shape),))


# ---------------------------------------------------------------------------
# Neural-network primitives
# ---------------------------------------------------------------------------

def softmax(x, axis: int = -1) -> Tensor:
    x = as_tensor(x)
    if not -x.ndim <= axis < x.ndim:
        raise ParameterError(f"softmax: axis {axis} out of range for shape {x.shape}")
    shifted = x.data - x.data.max(axis=axis, keepdims=True)
    exps = np.exp(shifted)
    y = exps / exps.sum(axis=axis, keepdims=True)

    def backward(g):
        return (y * (g - (g * y).sum(axis=axis, keepdims=True)),)

    return Tensor.from_op(y, (x,), backward)


def layer_norm(x, gamma, beta, eps: float = 1e-5) -> Tensor:
    """Normalize over the last axis, then apply ``gamma * x_hat + beta``"""
    x, gamma, beta = as_tensor(x), as_tensor(gamma), as_tensor(beta)
    if gamma.shape != x.shape[-1:] or beta.shape != x.shape[-1:]:
        raise DimensionError(
            f"layer_norm: gamma {gamma.shape} / beta {beta.shape} do not match input {x.shape}"
        )
    if eps < 0:
        raise ParameterError(f"layer_norm: eps must be >= 0, got {eps}")

    centered = x.data - x.data.mean(axis=-1, keepdims=True)
    var = (centered * centered).mean(axis=-1, keepdims=True)
    denom = np.sqrt(var + eps)
    # Zero-variance rows with eps=0 normalize to zero instead of NaN.
    inv_std = np.divide(1.0, denom, out=np.zeros_like(denom), where=denom > 0)
    x_hat = centered * inv_std
    out = gamma.data * x_hat + beta.data

    def backward(g):
        reduce_axes = tuple(range(g.ndim - 1))
        g_beta = g.sum(axis=reduce_axes)
        g_gamma = (g * x_hat).sum(axis=reduce_axes)
        g_hat = g * gamma.data
        g_x = inv_std * (
            g_hat
            - g_hat.mean(axis=-1, keepdims=True)
            - x_hat * (g_hat * x_hat).mean(axis=-1, keepdims=True)
        )
        return g_x, g_gamma, g_beta

    return Tensor.from_op(out, (x, gamma, beta), backward)


def gelu(x) -> Tensor:
    """Exact GELU, x * Phi(x)"""
    x = as_tensor(x)
    cdf = 0.5 * (1.0 + erf(x.data / _SQRT2))
    pdf = _INV_SQRT_2PI * np.exp(-0.5 * x.data * x.data)
    return Tensor.from_op(x.data * cdf, (x,), lambda g: (g * (cdf + x.data * pdf),))


def dropout(x, p: float, training: bool, rng: Optional[np.random.Generator] = None) -> Tensor:
    """Inverted dropout: survivors are scaled by 1 / (1 - p) at train time"""
    if not 0.0 <= p < 1.0:
        raise ParameterError(f"dropout probability must be in [0, 1), got {p}")
    x = as_tensor(x)
    if not training or p == 0.0:
        return x
    if rng is None:
        raise ParameterError("dropout in training mode needs a random generator")
    mask = (rng.random(x.shape) >= p) / (1.0 - p)
    return Tensor.from_op(x.data * mask, (x,), lambda g: (g * mask,))


def mse_loss(pred, target) -> Tensor:
    """Mean squared error against a tensor or a scalar target"""
    pred = as_tensor(pred)
    target = as_tensor(target)
    if target.size != 1 and target.shape != pred.shape:
        raise DimensionError(f"mse_loss: prediction {pred.shape} vs target {target.shape}")
    return mean(square(sub(pred, target)))


__all__ = [
    "add", "sub", "mul", "scale", "square", "sum", "mean", "elementwise",
    "matmul", "pointwise_channel_projection",
    "reshape", "transpose", "swapaxes", "concat", "getitem", "broadcast_to",
    "softmax", "layer_norm", "gelu", "dropout", "mse_loss",
]
