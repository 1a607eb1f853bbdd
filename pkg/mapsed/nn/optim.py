from __future__ import annotations

import abc
from typing import ClassVar, Dict, Mapping, Type

import numpy as np

from mapsed.nn.params import ModelParams
from mapsed.tensor.tape import Tensor
from mapsed.types.exceptions import ConfigurationError


class Optimizer(abc.ABC):
    """
    Produces new parameters from old ones and a gradient mapping.

    Moment buffers are keyed ``<slot>.<parameter name>`` so that they can be stored in
    a checkpoint next to the parameters.
    """

    name: ClassVar[str]
    slots: ClassVar[tuple] = ()

    def __init__(self, learning_rate: float) -> None:
        if learning_rate < 0:
            raise ConfigurationError(f'Learning rate must not be negative, got {learning_rate}')
        self.learning_rate = learning_rate
        self.step_count = 0
        self.moments: Dict[str, Tensor] = {}

    def step(self, params: ModelParams, grads: Mapping[str, Tensor]) -> ModelParams:
        self.step_count += 1
        return params.map(lambda name, value: self._update(name, value, grads[name]))

    @abc.abstractmethod
    def _update(self, name: str, value: Tensor, grad: Tensor) -> Tensor:
        ...

    def _moment(self, slot: str, name: str, like: Tensor) -> Tensor:
        key = f'{slot}.{name}'
        if key not in self.moments:
            self.moments[key] = np.zeros_like(like)
        return self.moments[key]

    def load_state(self, step_count: int, moments: Mapping[str, Tensor]) -> None:
        self.step_count = step_count
        self.moments = {key: np.array(value, dtype=np.float64) for key, value in moments.items()}


class GradientDescent(Optimizer):
    name = 'sgd'

    def _update(self, name: str, value: Tensor, grad: Tensor) -> Tensor:
        return value - self.learning_rate * grad


class Momentum(Optimizer):
    name = 'momentum'
    slots = ('velocity',)

    def __init__(self, learning_rate: float, beta: float = 0.9) -> None:
        super().__init__(learning_rate)
        self.beta = beta

    def _update(self, name: str, value: Tensor, grad: Tensor) -> Tensor:
        velocity = self.beta * self._moment('velocity', name, value) + grad
        self.moments[f'velocity.{name}'] = velocity
        return value - self.learning_rate * velocity


class Adam(Optimizer):
    name = 'adam'
    slots = ('first', 'second')

    def __init__(
        self,
        learning_rate: float,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ) -> None:
        super().__init__(learning_rate)
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps

    def _update(self, name: str, value: Tensor, grad: Tensor) -> Tensor:
        first = self.beta1 * self._moment('first', name, value) + (1 - self.beta1) * grad
        second = self.beta2 * self._moment('second', name, value) + (1 - self.beta2) * grad**2
        self.moments[f'first.{name}'] = first
        self.moments[f'second.{name}'] = second
        first_hat = first / (1 - self.beta1**self.step_count)
        second_hat = second / (1 - self.beta2**self.step_count)
        return value - self.learning_rate * first_hat / (np.sqrt(second_hat) + self.eps)


OPTIMIZERS: Dict[str, Type[Optimizer]] = {
    GradientDescent.name: GradientDescent,
    Momentum.name: Momentum,
    Adam.name: Adam,
}


def make_optimizer(name: str, learning_rate: float) -> Optimizer:
    try:
        factory = OPTIMIZERS[name]
    except KeyError:
        raise ConfigurationError(
            f'Unknown optimizer {name!r}, expected one of {sorted(OPTIMIZERS)}'
        ) from None
    return factory(learning_rate)
