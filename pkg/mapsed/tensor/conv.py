from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from mapsed.tensor.exceptions import DimensionError
from mapsed.tensor.tape import ArrayLike, TapeValue, Tensor, lift

ALLOWED_KERNEL_SIZES = (1, 3)


@dataclass(frozen=True)
class ConvParams:
    """Kernel of shape ``out_ch x in_ch x k...`` (2D or 3D) and a per-channel bias."""

    kernel: TapeValue
    bias: TapeValue

    @classmethod
    def of(cls, kernel: ArrayLike, bias: ArrayLike) -> ConvParams:
        return cls(kernel=lift(kernel), bias=lift(bias))

    @property
    def out_channels(self) -> int:
        return self.kernel.shape[0]

    @property
    def in_channels(self) -> int:
        return self.kernel.shape[1]

    @property
    def kernel_size(self) -> Tuple[int, ...]:
        return self.kernel.shape[2:]


def conv2d_same(input: ArrayLike, params: ConvParams) -> TapeValue:
    """Zero same-padded 2D convolution of a ``c_in x h x w`` tensor."""
    return _conv_same(lift(input), params, spatial_rank=2, operation='conv2d_same')


def conv3d_same(input: ArrayLike, params: ConvParams) -> TapeValue:
    """Zero same-padded 3D convolution of a ``c_in x d x h x w`` tensor."""
    return _conv_same(lift(input), params, spatial_rank=3, operation='conv3d_same')


def _validate(x: TapeValue, params: ConvParams, spatial_rank: int, operation: str) -> None:
    if x.ndim != spatial_rank + 1:
        raise DimensionError('rank', spatial_rank + 1, x.ndim, operation=operation)
    if params.kernel.ndim != spatial_rank + 2:
        raise DimensionError(
            'kernel_rank', spatial_rank + 2, params.kernel.ndim, operation=operation
        )
    for index, size in enumerate(params.kernel_size):
        if size not in ALLOWED_KERNEL_SIZES:
            raise DimensionError(
                f'kernel_spatial_{index}', ALLOWED_KERNEL_SIZES, size, operation=operation
            )
    if params.in_channels != x.shape[0]:
        raise DimensionError('channel', params.in_channels, x.shape[0], operation=operation)
    if params.bias.shape != (params.out_channels,):
        raise DimensionError(
            'bias', (params.out_channels,), params.bias.shape, operation=operation
        )


def _conv_same(x: TapeValue, params: ConvParams, spatial_rank: int, operation: str) -> TapeValue:
    _validate(x, params, spatial_rank, operation)
    kernel, bias = params.kernel, params.bias
    spatial = x.shape[1:]
    sizes = params.kernel_size
    padding = [(0, 0)] + [(k // 2, k // 2) for k in sizes]
    padded = np.pad(x.value, padding)
    offsets = list(itertools.product(*[range(k) for k in sizes]))

    def window(offset: Tuple[int, ...]) -> Tuple[slice, ...]:
        return (slice(None),) + tuple(slice(o, o + s) for o, s in zip(offset, spatial))

    out = np.zeros((params.out_channels,) + spatial, dtype=np.float64)
    for offset in offsets:
        tap = kernel.value[(slice(None), slice(None)) + offset]
        out += np.tensordot(tap, padded[window(offset)], axes=([1], [0]))
    out += bias.value.reshape((-1,) + (1,) * spatial_rank)

    spatial_axes = tuple(range(1, spatial_rank + 1))

    def backward_fn(grad: Tensor) -> List[Optional[Tensor]]:
        grad_padded = np.zeros_like(padded)
        grad_kernel = np.zeros_like(kernel.value)
        for offset in offsets:
            index = window(offset)
            tap = kernel.value[(slice(None), slice(None)) + offset]
            grad_kernel[(slice(None), slice(None)) + offset] = np.tensordot(
                grad, padded[index], axes=(spatial_axes, spatial_axes)
            )
            grad_padded[index] += np.tensordot(tap, grad, axes=([0], [0]))
        crop = (slice(None),) + tuple(slice(k // 2, k // 2 + s) for k, s in zip(sizes, spatial))
        return [grad_padded[crop], grad_kernel, grad.sum(axis=spatial_axes)]

    return TapeValue.from_op(out, (x, kernel, bias), backward_fn)
