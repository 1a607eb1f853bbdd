"""
Encoder and decoder of the forecaster.

Shapes: an observation is ``m x c x h x w``; the depth view stacks frames into the
channel axis (``(c*m) x h x w``, channel ``t*c + k``), the breadth view stacks them
along the height axis (``c x (m*h) x w``, rows ``[t*h, (t+1)*h)`` hold frame ``t``).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

from mapsed.nn.adapter import Adapter, IdentityAdapter
from mapsed.nn.config import ModelConfig
from mapsed.nn.mab import bottleneck, mab_forward
from mapsed.nn.params import DecoderParams, EncoderLayerParams, ModelParams, NetworkParams
from mapsed.tensor import ops
from mapsed.tensor.exceptions import DimensionError
from mapsed.tensor.tape import ArrayLike, TapeValue, Tensor, lift

_SWAP_TIME_AND_CATEGORY = (1, 0, 2, 3)


@dataclass(frozen=True)
class LatentBundle:
    dynamics: TapeValue
    """D', ``(c*m) x h x w``"""

    semantics: TapeValue
    """S', ``c x (m*h) x w``"""

    merged: TapeValue
    """U, ``m x c x h x w``"""


def _check_sequence(x: TapeValue, operation: str) -> None:
    if x.ndim != 4:
        raise DimensionError('rank', 4, x.ndim, operation=operation)


def concat_depth(input: ArrayLike) -> TapeValue:
    x = lift(input)
    _check_sequence(x, 'concat_depth')
    m, c, h, w = x.shape
    return ops.reshape(x, (m * c, h, w))


def concat_depth_inverse(input: ArrayLike, m: int) -> TapeValue:
    d = lift(input)
    channels, h, w = d.shape
    if channels % m:
        raise DimensionError('channel', f'multiple of {m}', channels, operation='concat_depth')
    return ops.reshape(d, (m, channels // m, h, w))


def concat_breadth(input: ArrayLike) -> TapeValue:
    x = lift(input)
    _check_sequence(x, 'concat_breadth')
    m, c, h, w = x.shape
    return ops.reshape(ops.transpose(x, _SWAP_TIME_AND_CATEGORY), (c, m * h, w))


def concat_breadth_inverse(input: ArrayLike, m: int) -> TapeValue:
    s = lift(input)
    c, rows, w = s.shape
    if rows % m:
        raise DimensionError('height', f'multiple of {m}', rows, operation='concat_breadth')
    return ops.transpose(ops.reshape(s, (c, m, rows // m, w)), _SWAP_TIME_AND_CATEGORY)


def encoder_layer(input: ArrayLike, params: EncoderLayerParams) -> LatentBundle:
    x = lift(input)
    _check_sequence(x, 'encoder_layer')
    m = x.shape[0]
    dynamics = mab_forward(concat_depth(x), params.dynamics)
    semantics = mab_forward(concat_breadth(x), params.semantics)
    merged_input = ops.concat(
        [concat_depth_inverse(dynamics, m), concat_breadth_inverse(semantics, m)], axis=1
    )
    # categories act as convolution channels; the 3D kernel slides over (time, h, w)
    merged = ops.add(
        bottleneck(ops.transpose(merged_input, _SWAP_TIME_AND_CATEGORY), params.merge),
        bottleneck(ops.transpose(x, _SWAP_TIME_AND_CATEGORY), params.residual),
    )
    return LatentBundle(
        dynamics=dynamics,
        semantics=semantics,
        merged=ops.transpose(merged, _SWAP_TIME_AND_CATEGORY),
    )


def encode(input: ArrayLike, layers: Tuple[EncoderLayerParams, ...]) -> LatentBundle:
    """
    Stacked encoder layers, each consuming the previous merged latent.

    The returned semantics come from the first layer, the only one that sees the raw
    frame order; dynamics and the merged latent come from the last layer.
    """
    if not layers:
        raise DimensionError('layers', '>= 1', 0, operation='encode')
    first = encoder_layer(input, layers[0])
    bundle = first
    for params in layers[1:]:
        bundle = encoder_layer(bundle.merged, params)
    return LatentBundle(
        dynamics=bundle.dynamics, semantics=first.semantics, merged=bundle.merged
    )


def decode(input: ArrayLike, params: DecoderParams) -> TapeValue:
    """``m x c x h x w`` latent to an ``n x c x h x w`` forecast; time is the channel axis."""
    u = lift(input)
    _check_sequence(u, 'decode')
    predicted = bottleneck(bottleneck(u, params.first), params.second)
    n = predicted.shape[0]
    dynamics = concat_depth_inverse(mab_forward(concat_depth(predicted), params.dynamics), n)
    return concat_breadth_inverse(mab_forward(concat_breadth(dynamics), params.semantics), n)


def forward(input: ArrayLike, network: NetworkParams) -> Tuple[LatentBundle, TapeValue]:
    bundle = encode(input, network.encoder)
    return bundle, decode(bundle.merged, network.decoder)


def predict(
    input: ArrayLike,
    params: ModelParams,
    adapter: Optional[Adapter] = None,
    config: Optional[ModelConfig] = None,
) -> Tensor:
    """Raw ``n x c x h x w`` forecast for one observation, without recording a tape."""
    adapter = adapter or IdentityAdapter()
    config = config or ModelConfig()
    network, _ = NetworkParams.bind(
        params, activation=config.bottleneck_activation, requires_grad=False
    )
    _, latent_prediction = forward(adapter.encode(lift(input).value), network)
    return adapter.decode(latent_prediction).value
