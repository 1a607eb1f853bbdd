"""Differentiable primitives. Every function accepts TapeValues or plain arrays."""
from __future__ import annotations

from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from mapsed.tensor.exceptions import DimensionError
from mapsed.tensor.tape import ArrayLike, TapeValue, Tensor, lift

Axis = Optional[Union[int, Tuple[int, ...]]]


def _unbroadcast(grad: Tensor, shape: Tuple[int, ...]) -> Tensor:
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    squeezed = tuple(
        axis for axis, size in enumerate(shape) if size == 1 and grad.shape[axis] != 1
    )
    if squeezed:
        grad = grad.sum(axis=squeezed, keepdims=True)
    return grad.reshape(shape)


def _check_broadcastable(a: TapeValue, b: TapeValue, operation: str) -> None:
    try:
        np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise DimensionError('shape', a.shape, b.shape, operation=operation) from None


def add(a: ArrayLike, b: ArrayLike) -> TapeValue:
    x, y = lift(a), lift(b)
    _check_broadcastable(x, y, 'add')

    def backward_fn(grad: Tensor) -> List[Optional[Tensor]]:
        return [_unbroadcast(grad, x.shape), _unbroadcast(grad, y.shape)]

    return TapeValue.from_op(x.value + y.value, (x, y), backward_fn)


def sub(a: ArrayLike, b: ArrayLike) -> TapeValue:
    x, y = lift(a), lift(b)
    _check_broadcastable(x, y, 'sub')

    def backward_fn(grad: Tensor) -> List[Optional[Tensor]]:
        return [_unbroadcast(grad, x.shape), _unbroadcast(-grad, y.shape)]

    return TapeValue.from_op(x.value - y.value, (x, y), backward_fn)


def mul(a: ArrayLike, b: ArrayLike) -> TapeValue:
    x, y = lift(a), lift(b)
    _check_broadcastable(x, y, 'mul')

    def backward_fn(grad: Tensor) -> List[Optional[Tensor]]:
        return [_unbroadcast(grad * y.value, x.shape), _unbroadcast(grad * x.value, y.shape)]

    return TapeValue.from_op(x.value * y.value, (x, y), backward_fn)


def neg(a: ArrayLike) -> TapeValue:
    return scale(a, -1.0)


def scale(a: ArrayLike, factor: float) -> TapeValue:
    x = lift(a)

    def backward_fn(grad: Tensor) -> List[Optional[Tensor]]:
        return [grad * factor]

    return TapeValue.from_op(x.value * factor, (x,), backward_fn)


def relu(a: ArrayLike) -> TapeValue:
    x = lift(a)
    mask = x.value > 0

    def backward_fn(grad: Tensor) -> List[Optional[Tensor]]:
        return [grad * mask]

    return TapeValue.from_op(np.where(mask, x.value, 0.0), (x,), backward_fn)


def exp(a: ArrayLike) -> TapeValue:
    x = lift(a)
    out = np.exp(x.value)

    def backward_fn(grad: Tensor) -> List[Optional[Tensor]]:
        return [grad * out]

    return TapeValue.from_op(out, (x,), backward_fn)


def log(a: ArrayLike) -> TapeValue:
    x = lift(a)

    def backward_fn(grad: Tensor) -> List[Optional[Tensor]]:
        return [grad / x.value]

    return TapeValue.from_op(np.log(x.value), (x,), backward_fn)


def absolute(a: ArrayLike) -> TapeValue:
    x = lift(a)

    def backward_fn(grad: Tensor) -> List[Optional[Tensor]]:
        return [grad * np.sign(x.value)]

    return TapeValue.from_op(np.abs(x.value), (x,), backward_fn)


def square(a: ArrayLike) -> TapeValue:
    x = lift(a)

    def backward_fn(grad: Tensor) -> List[Optional[Tensor]]:
        return [2.0 * grad * x.value]

    return TapeValue.from_op(x.value * x.value, (x,), backward_fn)


def reduce_sum(a: ArrayLike, axis: Axis = None, keepdims: bool = False) -> TapeValue:
    x = lift(a)

    def backward_fn(grad: Tensor) -> List[Optional[Tensor]]:
        if axis is not None and not keepdims:
            grad = np.expand_dims(grad, axis)
        return [np.broadcast_to(grad, x.shape).copy()]

    return TapeValue.from_op(
        np.asarray(x.value.sum(axis=axis, keepdims=keepdims), dtype=np.float64),
        (x,),
        backward_fn,
    )


def mean(a: ArrayLike) -> TapeValue:
    x = lift(a)
    return scale(reduce_sum(x), 1.0 / max(x.value.size, 1))


def reshape(a: ArrayLike, shape: Sequence[int]) -> TapeValue:
    x = lift(a)
    target = tuple(shape)
    if int(np.prod(target)) != x.value.size:
        raise DimensionError('size', x.value.size, target, operation='reshape')

    def backward_fn(grad: Tensor) -> List[Optional[Tensor]]:
        return [grad.reshape(x.shape)]

    return TapeValue.from_op(x.value.reshape(target), (x,), backward_fn)


def transpose(a: ArrayLike, axes: Sequence[int]) -> TapeValue:
    x = lift(a)
    perm = tuple(axes)
    inverse = tuple(int(i) for i in np.argsort(perm))

    def backward_fn(grad: Tensor) -> List[Optional[Tensor]]:
        return [grad.transpose(inverse)]

    return TapeValue.from_op(np.ascontiguousarray(x.value.transpose(perm)), (x,), backward_fn)


def concat(values: Sequence[ArrayLike], axis: int = 0) -> TapeValue:
    parts = [lift(v) for v in values]
    if not parts:
        raise DimensionError('count', '>= 1', 0, operation='concat')
    reference = parts[0].shape
    axis_index = axis % len(reference)
    expected = [size for i, size in enumerate(reference) if i != axis_index]
    for part in parts[1:]:
        actual = [size for i, size in enumerate(part.shape) if i != axis_index]
        if part.ndim != len(reference) or actual != expected:
            raise DimensionError('shape', reference, part.shape, operation='concat')
    sizes = [part.shape[axis] for part in parts]
    boundaries = np.cumsum(sizes)[:-1]

    def backward_fn(grad: Tensor) -> List[Optional[Tensor]]:
        return list(np.split(grad, boundaries, axis=axis))

    return TapeValue.from_op(
        np.concatenate([part.value for part in parts], axis=axis), parts, backward_fn
    )


def stack(values: Sequence[ArrayLike], axis: int = 0) -> TapeValue:
    parts = [lift(v) for v in values]
    expanded = [reshape(part, part.shape[:axis] + (1,) + part.shape[axis:]) for part in parts]
    return concat(expanded, axis=axis)


def matmul(a: ArrayLike, b: ArrayLike) -> TapeValue:
    x, y = lift(a), lift(b)
    if x.ndim != 2:
        raise DimensionError('rank', 2, x.ndim, operation='matmul')
    if y.ndim != 2:
        raise DimensionError('rank', 2, y.ndim, operation='matmul')
    if x.shape[1] != y.shape[0]:
        raise DimensionError('inner', x.shape[1], y.shape[0], operation='matmul')

    def backward_fn(grad: Tensor) -> List[Optional[Tensor]]:
        return [grad @ y.value.T, x.value.T @ grad]

    return TapeValue.from_op(x.value @ y.value, (x, y), backward_fn)


def softmax(a: ArrayLike, axis: int = -1) -> TapeValue:
    x = lift(a)
    shifted = x.value - x.value.max(axis=axis, keepdims=True)
    weights = np.exp(shifted)
    out = weights / weights.sum(axis=axis, keepdims=True)

    def backward_fn(grad: Tensor) -> List[Optional[Tensor]]:
        inner = (grad * out).sum(axis=axis, keepdims=True)
        return [out * (grad - inner)]

    return TapeValue.from_op(out, (x,), backward_fn)


def logsumexp(a: ArrayLike) -> TapeValue:
    """log(sum(exp(a))) over every entry."""
    x = lift(a)
    peak = x.value.max()
    weights = np.exp(x.value - peak)
    total = weights.sum()
    out = np.asarray(peak + np.log(total), dtype=np.float64)

    def backward_fn(grad: Tensor) -> List[Optional[Tensor]]:
        return [grad * weights / total]

    return TapeValue.from_op(out, (x,), backward_fn)


def minimum(values: Sequence[ArrayLike]) -> TapeValue:
    """Smallest of several scalars; the gradient goes to the first minimiser."""
    parts = [lift(v) for v in values]
    if not parts:
        raise DimensionError('count', '>= 1', 0, operation='minimum')
    for part in parts:
        if part.shape != ():
            raise DimensionError('shape', (), part.shape, operation='minimum')
    scalars = np.array([part.value for part in parts], dtype=np.float64)
    winner = int(np.argmin(scalars))

    def backward_fn(grad: Tensor) -> List[Optional[Tensor]]:
        return [grad if index == winner else None for index in range(len(parts))]

    return TapeValue.from_op(np.asarray(scalars[winner]), parts, backward_fn)


def avg_pool2(a: ArrayLike) -> TapeValue:
    """2x2 mean pooling over the last two axes."""
    x = lift(a)
    *lead, h, w = x.shape
    if h % 2:
        raise DimensionError('height', 'even', h, operation='avg_pool2')
    if w % 2:
        raise DimensionError('width', 'even', w, operation='avg_pool2')
    blocks = x.value.reshape(*lead, h // 2, 2, w // 2, 2)
    out = blocks.mean(axis=(-3, -1))

    def backward_fn(grad: Tensor) -> List[Optional[Tensor]]:
        spread = np.repeat(np.repeat(grad, 2, axis=-2), 2, axis=-1)
        return [spread / 4.0]

    return TapeValue.from_op(out, (x,), backward_fn)


def upsample2(a: ArrayLike) -> TapeValue:
    """Nearest-neighbour 2x upsampling over the last two axes."""
    x = lift(a)
    *lead, h, w = x.shape
    out = np.repeat(np.repeat(x.value, 2, axis=-2), 2, axis=-1)

    def backward_fn(grad: Tensor) -> List[Optional[Tensor]]:
        return [grad.reshape(*lead, h, 2, w, 2).sum(axis=(-3, -1))]

    return TapeValue.from_op(out, (x,), backward_fn)


def select(a: ArrayLike, index: int) -> TapeValue:
    """Entry ``index`` along the first axis."""
    x = lift(a)

    def backward_fn(grad: Tensor) -> List[Optional[Tensor]]:
        full = np.zeros_like(x.value)
        full[index] = grad
        return [full]

    return TapeValue.from_op(x.value[index].copy(), (x,), backward_fn)
