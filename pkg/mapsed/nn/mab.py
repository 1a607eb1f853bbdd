"""
Multi-axis attention block.

A block attends over spatial positions and over channels in parallel, fuses both
results with a 2D convolutional bottleneck and adds the input back. Attention logits
are not scaled.
"""
from __future__ import annotations

from typing import Tuple

from mapsed.nn.params import BottleneckParams, MABParams
from mapsed.tensor import ops
from mapsed.tensor.conv import ConvParams, conv2d_same, conv3d_same
from mapsed.tensor.exceptions import DimensionError
from mapsed.tensor.tape import ArrayLike, TapeValue, lift


def bottleneck(input: ArrayLike, params: BottleneckParams) -> TapeValue:
    """
    Three convolutions (1, 3, 1 kernels) with an optional rectifier after the first two.

    The kernel rank selects 2D or 3D convolution.
    """
    x = lift(input)
    conv = conv3d_same if params.reduce.kernel.ndim == 5 else conv2d_same
    hidden = conv(x, params.reduce)
    if params.activation == 'relu':
        hidden = ops.relu(hidden)
    hidden = conv(hidden, params.mix)
    if params.activation == 'relu':
        hidden = ops.relu(hidden)
    return conv(hidden, params.expand)


def _flatten_projection(z: TapeValue, projection: ConvParams) -> TapeValue:
    c, h, w = z.shape
    return ops.reshape(conv2d_same(z, projection), (c, h * w))


def _check_block_input(z: TapeValue, operation: str) -> None:
    if z.ndim != 3:
        raise DimensionError('rank', 3, z.ndim, operation=operation)


def spatial_attention(input: ArrayLike, params: MABParams) -> Tuple[TapeValue, TapeValue]:
    """
    Returns the attended tensor and the ``u x u`` weights (``u = h * w``).

    Row ``i`` of the weights is the softmax over key positions ``j`` of
    ``q[:, i] . k[:, j]``; output position ``i`` is ``sum_j a[i, j] * v[:, j]``.
    """
    z = lift(input)
    _check_block_input(z, 'spatial_attention')
    c, h, w = z.shape
    query = _flatten_projection(z, params.phi_q)
    key = _flatten_projection(z, params.phi_k)
    value = _flatten_projection(z, params.phi_v)
    weights = ops.softmax(ops.matmul(ops.transpose(query, (1, 0)), key), axis=1)
    attended = ops.matmul(value, ops.transpose(weights, (1, 0)))
    return ops.reshape(attended, (c, h, w)), weights


def channel_attention(input: ArrayLike, params: MABParams) -> Tuple[TapeValue, TapeValue]:
    """Query, key and value are one shared projection; weights are ``c x c``."""
    z = lift(input)
    _check_block_input(z, 'channel_attention')
    c, h, w = z.shape
    shared = _flatten_projection(z, params.phi_c)
    weights = ops.softmax(ops.matmul(shared, ops.transpose(shared, (1, 0))), axis=1)
    return ops.reshape(ops.matmul(weights, shared), (c, h, w)), weights


def mab_forward(input: ArrayLike, params: MABParams) -> TapeValue:
    z = lift(input)
    spatial, _ = spatial_attention(z, params)
    channel, _ = channel_attention(z, params)
    fused = bottleneck(ops.concat([spatial, channel], axis=0), params.fusion)
    return ops.add(fused, z)
