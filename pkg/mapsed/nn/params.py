"""
Flat parameter storage and the structured views the forward pass reads.

Parameters live in :class:`ModelParams`, an ordered mapping of dotted names such as
``encoder.0.dynamics.phi_q.kernel`` to float64 arrays. Every training step binds them
to fresh leaf :class:`TapeValue` objects and wraps those in frozen dataclasses.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Dict, Iterator, Mapping, Optional, Tuple

import numpy as np

from mapsed.nn.config import ModelConfig
from mapsed.tensor.conv import ConvParams
from mapsed.tensor.tape import TapeValue, Tensor

Bound = Dict[str, TapeValue]

_ENCODER_LAYER = re.compile(r'^encoder\.(\d+)\.')
_MAB_PROJECTIONS = ('phi_q', 'phi_k', 'phi_v', 'phi_c')
_BOTTLENECK_STAGES = ('reduce', 'mix', 'expand')
RELU_GAIN = 2.0


@dataclass(frozen=True)
class ModelShape:
    """Dimensions of the frames the core model sees (after the adapter)."""

    m: int
    n: int
    c: int
    h: int
    w: int


class ModelParams(Mapping[str, Tensor]):
    def __init__(self, arrays: Optional[Mapping[str, Tensor]] = None) -> None:
        self._arrays: Dict[str, Tensor] = {}
        for name, array in (arrays or {}).items():
            self._arrays[name] = np.array(array, dtype=np.float64)

    def __getitem__(self, name: str) -> Tensor:
        return self._arrays[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._arrays)

    def __len__(self) -> int:
        return len(self._arrays)

    def __repr__(self) -> str:
        return f'ModelParams({len(self)} tensors, {self.size} values)'

    @property
    def size(self) -> int:
        return sum(array.size for array in self._arrays.values())

    def bind(self, requires_grad: bool = True) -> Bound:
        return {
            name: TapeValue(array, requires_grad=requires_grad, name=name)
            for name, array in self._arrays.items()
        }

    def copy(self) -> ModelParams:
        return ModelParams(self._arrays)

    def map(self, fn: Callable[[str, Tensor], Tensor]) -> ModelParams:
        return ModelParams({name: fn(name, array) for name, array in self._arrays.items()})

    def with_prefix(self, prefix: str) -> ModelParams:
        return ModelParams({f'{prefix}.{name}': array for name, array in self._arrays.items()})

    def strip_prefix(self, prefix: str) -> ModelParams:
        head = f'{prefix}.'
        return ModelParams(
            {
                name[len(head) :]: array
                for name, array in self._arrays.items()
                if name.startswith(head)
            }
        )

    def equals(self, other: Mapping[str, Tensor]) -> bool:
        """Bitwise equality of names, shapes and values."""
        if list(self) != list(other):
            return False
        return all(np.array_equal(self[name], other[name]) for name in self)


@dataclass(frozen=True)
class BottleneckParams:
    """1x1 reduce, 3x3 mix and 1x1 expand convolutions, 2D or 3D."""

    reduce: ConvParams
    mix: ConvParams
    expand: ConvParams
    activation: str = 'relu'

    @classmethod
    def from_bound(cls, bound: Bound, prefix: str, activation: str = 'relu') -> BottleneckParams:
        return cls(
            *(_conv(bound, f'{prefix}.{stage}') for stage in _BOTTLENECK_STAGES),
            activation=activation,
        )


@dataclass(frozen=True)
class MABParams:
    phi_q: ConvParams
    phi_k: ConvParams
    phi_v: ConvParams
    phi_c: ConvParams
    fusion: BottleneckParams

    @classmethod
    def from_bound(cls, bound: Bound, prefix: str, activation: str = 'relu') -> MABParams:
        return cls(
            *(_conv(bound, f'{prefix}.{name}') for name in _MAB_PROJECTIONS),
            fusion=BottleneckParams.from_bound(bound, f'{prefix}.fusion', activation),
        )


@dataclass(frozen=True)
class EncoderLayerParams:
    dynamics: MABParams
    semantics: MABParams
    merge: BottleneckParams
    residual: BottleneckParams

    @classmethod
    def from_bound(cls, bound: Bound, prefix: str, activation: str = 'relu') -> EncoderLayerParams:
        return cls(
            dynamics=MABParams.from_bound(bound, f'{prefix}.dynamics', activation),
            semantics=MABParams.from_bound(bound, f'{prefix}.semantics', activation),
            merge=BottleneckParams.from_bound(bound, f'{prefix}.merge', activation),
            residual=BottleneckParams.from_bound(bound, f'{prefix}.residual', activation),
        )


@dataclass(frozen=True)
class DecoderParams:
    first: BottleneckParams
    second: BottleneckParams
    dynamics: MABParams
    semantics: MABParams

    @classmethod
    def from_bound(cls, bound: Bound, prefix: str, activation: str = 'relu') -> DecoderParams:
        return cls(
            first=BottleneckParams.from_bound(bound, f'{prefix}.first', activation),
            second=BottleneckParams.from_bound(bound, f'{prefix}.second', activation),
            dynamics=MABParams.from_bound(bound, f'{prefix}.dynamics', activation),
            semantics=MABParams.from_bound(bound, f'{prefix}.semantics', activation),
        )


@dataclass(frozen=True)
class NetworkParams:
    encoder: Tuple[EncoderLayerParams, ...]
    decoder: DecoderParams

    @classmethod
    def bind(
        cls, params: ModelParams, activation: str = 'relu', requires_grad: bool = True
    ) -> Tuple[NetworkParams, Bound]:
        """Structured view over fresh leaves; the leaves come back for gradient lookup."""
        bound = params.bind(requires_grad=requires_grad)
        matches = [_ENCODER_LAYER.match(name) for name in bound]
        layers = sorted({int(match.group(1)) for match in matches if match})
        view = cls(
            encoder=tuple(
                EncoderLayerParams.from_bound(bound, f'encoder.{i}', activation) for i in layers
            ),
            decoder=DecoderParams.from_bound(bound, 'decoder', activation),
        )
        return view, bound


def _conv(bound: Bound, prefix: str) -> ConvParams:
    return ConvParams(kernel=bound[f'{prefix}.kernel'], bias=bound[f'{prefix}.bias'])


class ParamInitializer:
    """
    Normal kernels with variance ``gain / fan_in`` and zero biases, registered in
    call order. Rectified stages use gain 2, everything else gain 1.
    """

    def __init__(self, rng: np.random.Generator, config: Optional[ModelConfig] = None) -> None:
        self._rng = rng
        self._config = config or ModelConfig()
        self._arrays: Dict[str, Tensor] = {}

    def conv(
        self,
        name: str,
        out_channels: int,
        in_channels: int,
        size: int,
        rank: int,
        gain: float = 1.0,
    ) -> None:
        fan_in = in_channels * size**rank
        shape = (out_channels, in_channels) + (size,) * rank
        std = math.sqrt(gain / fan_in)
        self._arrays[f'{name}.kernel'] = self._rng.normal(0.0, std, size=shape)
        self._arrays[f'{name}.bias'] = np.zeros(out_channels, dtype=np.float64)

    def bottleneck(self, name: str, in_channels: int, out_channels: int, rank: int) -> None:
        mid = self._config.mid_width(out_channels)
        gain = RELU_GAIN if self._config.bottleneck_activation == 'relu' else 1.0
        self.conv(f'{name}.reduce', mid, in_channels, 1, rank, gain)
        self.conv(f'{name}.mix', mid, mid, 3, rank, gain)
        self.conv(f'{name}.expand', out_channels, mid, 1, rank, gain)

    def mab(self, name: str, channels: int) -> None:
        for projection in _MAB_PROJECTIONS:
            self.conv(f'{name}.{projection}', channels, channels, 1, 2)
        self.bottleneck(f'{name}.fusion', 2 * channels, channels, 2)

    def build(self) -> ModelParams:
        return ModelParams(self._arrays)


def init_model_params(
    shape: ModelShape, rng: np.random.Generator, config: Optional[ModelConfig] = None
) -> ModelParams:
    config = config or ModelConfig()
    init = ParamInitializer(rng, config)
    for layer in range(config.encoder_layers):
        prefix = f'encoder.{layer}'
        init.mab(f'{prefix}.dynamics', shape.c * shape.m)
        init.mab(f'{prefix}.semantics', shape.c)
        # category axis is the channel axis inside the encoder
        init.bottleneck(f'{prefix}.merge', 2 * shape.c, shape.c, 3)
        init.bottleneck(f'{prefix}.residual', shape.c, shape.c, 3)
    # time axis is the channel axis inside the decoder
    init.bottleneck('decoder.first', shape.m, shape.m, 3)
    init.bottleneck('decoder.second', shape.m, shape.n, 3)
    init.mab('decoder.dynamics', shape.c * shape.n)
    init.mab('decoder.semantics', shape.c)
    return init.build()


def gradients_of(bound: Bound) -> Dict[str, Tensor]:
    """Gradients of bound leaves; leaves the loss never reached get zeros."""
    return {
        name: leaf.grad if leaf.grad is not None else np.zeros_like(leaf.value)
        for name, leaf in bound.items()
    }