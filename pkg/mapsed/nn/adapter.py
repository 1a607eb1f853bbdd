"""
Dimension adapters wrapped around the core model.

The identity adapter passes frames through. The VAE adapter encodes every frame to
the mean of a diagonal Gaussian at half the spatial resolution and decodes latents
back to ``c x h x w``; it is pretrained once and then kept frozen.
"""
from __future__ import annotations

import abc
import logging
import math
from typing import ClassVar, List, Optional, Tuple

import numpy as np

from mapsed.nn.config import VAEConfig
from mapsed.nn.exceptions import AdapterNotReadyError, DivergenceError
from mapsed.nn.optim import Adam
from mapsed.nn.params import RELU_GAIN, Bound, ModelParams, ParamInitializer, gradients_of
from mapsed.tensor import ops
from mapsed.tensor.conv import ConvParams, conv2d_same
from mapsed.tensor.exceptions import DimensionError
from mapsed.tensor.tape import ArrayLike, TapeValue, Tensor, backward, lift
from mapsed.types.exceptions import ConfigurationError

logger = logging.getLogger('mapsed.nn.adapter')

ADAPTER_MODES = ('identity', 'vae')


class Adapter(abc.ABC):
    mode: ClassVar[str]

    @abc.abstractmethod
    def latent_shape(self, c: int, h: int, w: int) -> Tuple[int, int, int]:
        ...

    @abc.abstractmethod
    def encode(self, frames: Tensor) -> Tensor:
        """``T x c x h x w`` frames to latent frames, outside any tape."""

    @abc.abstractmethod
    def decode(self, latent: ArrayLike) -> TapeValue:
        """Latent frames back to ``T x c x h x w``; differentiable in ``latent``."""

    @property
    def params(self) -> Optional[ModelParams]:
        return None


class IdentityAdapter(Adapter):
    mode = 'identity'

    def latent_shape(self, c: int, h: int, w: int) -> Tuple[int, int, int]:
        return c, h, w

    def encode(self, frames: Tensor) -> Tensor:
        return np.asarray(frames, dtype=np.float64)

    def decode(self, latent: ArrayLike) -> TapeValue:
        return lift(latent)


def _conv(bound: Bound, name: str) -> ConvParams:
    return ConvParams(kernel=bound[f'{name}.kernel'], bias=bound[f'{name}.bias'])


def vae_encode_frame(frame: ArrayLike, bound: Bound) -> Tuple[TapeValue, TapeValue]:
    hidden = ops.relu(conv2d_same(frame, _conv(bound, 'encoder.hidden')))
    pooled = ops.avg_pool2(hidden)
    return (
        conv2d_same(pooled, _conv(bound, 'encoder.mean')),
        conv2d_same(pooled, _conv(bound, 'encoder.logvar')),
    )


def vae_decode_frame(latent: ArrayLike, bound: Bound) -> TapeValue:
    hidden = ops.relu(conv2d_same(ops.upsample2(latent), _conv(bound, 'decoder.hidden')))
    return conv2d_same(hidden, _conv(bound, 'decoder.output'))


def kl_divergence(mean: ArrayLike, logvar: ArrayLike) -> TapeValue:
    """KL of N(mean, exp(logvar)) from N(0, 1), summed over every latent entry."""
    mu, lv = lift(mean), lift(logvar)
    terms = ops.sub(ops.add(ops.square(mu), ops.exp(lv)), ops.add(lv, 1.0))
    return ops.scale(ops.reduce_sum(terms), 0.5)


class VAEAdapter(Adapter):
    mode = 'vae'

    def __init__(self, config: Optional[VAEConfig] = None, params: Optional[ModelParams] = None):
        self.config = config or VAEConfig()
        self._params = params
        self.losses: List[float] = []

    @property
    def params(self) -> Optional[ModelParams]:
        return self._params

    @property
    def ready(self) -> bool:
        return self._params is not None

    def _bound(self) -> Bound:
        if self._params is None:
            raise AdapterNotReadyError()
        return self._params.bind(requires_grad=False)

    def latent_shape(self, c: int, h: int, w: int) -> Tuple[int, int, int]:
        _check_even(h, w)
        return self.config.latent_channels or c, h // 2, w // 2

    def encode(self, frames: Tensor) -> Tensor:
        bound = self._bound()
        means = [vae_encode_frame(frame, bound)[0].value for frame in np.asarray(frames)]
        return np.stack(means)

    def decode(self, latent: ArrayLike) -> TapeValue:
        bound = self._bound()
        z = lift(latent)
        return ops.stack(
            [vae_decode_frame(ops.select(z, t), bound) for t in range(z.shape[0])], axis=0
        )


def _check_even(h: int, w: int) -> None:
    if h % 2:
        raise DimensionError('height', 'even', h, operation='vae_adapter')
    if w % 2:
        raise DimensionError('width', 'even', w, operation='vae_adapter')


def init_vae_params(c: int, config: VAEConfig, rng: np.random.Generator) -> ModelParams:
    latent = config.latent_channels or c
    hidden = config.hidden_channels
    init = ParamInitializer(rng)
    init.conv('encoder.hidden', hidden, c, 3, 2, RELU_GAIN)
    init.conv('encoder.mean', latent, hidden, 1, 2, RELU_GAIN)
    init.conv('encoder.logvar', latent, hidden, 1, 2)
    init.conv('decoder.hidden', hidden, latent, 3, 2, RELU_GAIN)
    init.conv('decoder.output', c, hidden, 1, 2, RELU_GAIN)
    return init.build()


def vae_loss(
    frame: ArrayLike, bound: Bound, noise: Tensor, kl_weight: float
) -> Tuple[TapeValue, TapeValue]:
    """Squared reconstruction error plus weighted KL, using ``noise`` for the sample."""
    target = lift(frame)
    mean, logvar = vae_encode_frame(target, bound)
    sample = ops.add(mean, ops.mul(ops.exp(ops.scale(logvar, 0.5)), noise))
    error = ops.reduce_sum(ops.square(ops.sub(vae_decode_frame(sample, bound), target)))
    kl = kl_divergence(mean, logvar)
    return ops.add(error, ops.scale(kl, kl_weight)), kl


def vae_pretrain(frames: Tensor, config: VAEConfig, rng: np.random.Generator) -> VAEAdapter:
    """Fits a VAE adapter on ``T x c x h x w`` frames with Adam and returns it frozen."""
    frames = np.asarray(frames, dtype=np.float64)
    if frames.ndim != 4 or frames.shape[0] == 0:
        raise ConfigurationError('VAE pretraining needs at least one c x h x w frame')
    total, c, h, w = frames.shape
    _check_even(h, w)

    params = init_vae_params(c, config, rng)
    optimizer = Adam(config.learning_rate)
    latent_shape = (config.latent_channels or c, h // 2, w // 2)
    history: List[float] = []

    for epoch in range(config.epochs):
        order = rng.permutation(total)
        epoch_loss = 0.0
        for start in range(0, total, config.batch_size):
            batch = order[start : start + config.batch_size]
            bound = params.bind()
            losses = [
                vae_loss(frames[i], bound, rng.standard_normal(latent_shape), config.kl_weight)[0]
                for i in batch
            ]
            loss = ops.scale(ops.reduce_sum(ops.stack(losses)), 1.0 / len(batch))
            if not math.isfinite(loss.item()):
                raise DivergenceError(f'VAE loss diverged in epoch {epoch}')
            backward(loss)
            params = optimizer.step(params, gradients_of(bound))
            epoch_loss += loss.item() * len(batch)
        history.append(epoch_loss / total)
        logger.debug('VAE epoch %d loss %.6f', epoch, history[-1])

    logger.info('VAE adapter pretrained on %d frames, final loss %.6f', total, history[-1])
    adapter = VAEAdapter(config, params)
    adapter.losses = history
    return adapter


def make_adapter(mode: str, config: Optional[VAEConfig] = None) -> Adapter:
    if mode == IdentityAdapter.mode:
        return IdentityAdapter()
    if mode == VAEAdapter.mode:
        return VAEAdapter(config)
    raise ConfigurationError(f'Unknown adapter mode {mode!r}, expected one of {ADAPTER_MODES}')
