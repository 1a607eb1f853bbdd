from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from mapsed.data.types import OccurrenceSequence
from mapsed.evaluation.exceptions import EmptyTrainingSetError
from mapsed.nn.adapter import Adapter
from mapsed.nn.config import ModelConfig
from mapsed.nn.model import predict
from mapsed.nn.params import ModelParams
from mapsed.tensor.exceptions import DimensionError
from mapsed.tensor.tape import Tensor

logger = logging.getLogger('mapsed.evaluation')

# m x c x h x w observation in, n x c x h x w forecast out
Predictor = Callable[[np.ndarray], np.ndarray]

DEFAULT_RIDGE = 1e-6


def history_baseline(x: Tensor, n: int) -> np.ndarray:
    """Repeats the last observed frame ``n`` times."""
    frames = np.asarray(x, dtype=np.float64)
    if frames.ndim != 4 or frames.shape[0] < 1:
        raise DimensionError('m', 'at least one frame', frames.shape, operation='history')
    return np.repeat(frames[-1:], n, axis=0)


def history_predictor(n: int) -> Predictor:
    def run(x: np.ndarray) -> np.ndarray:
        return history_baseline(x, n)

    return run


@dataclass(frozen=True)
class LinearBaseline:
    """
    One least-squares model per output cell, fitted jointly.

    ``weights`` maps the flattened ``m x c x h x w`` history (plus a trailing 1 when
    ``intercept`` is on) to the flattened ``n x c x h x w`` forecast.
    """

    weights: np.ndarray
    input_shape: tuple
    output_shape: tuple
    intercept: bool = True

    def features(self, x: Tensor) -> np.ndarray:
        frames = np.asarray(x, dtype=np.float64)
        if frames.shape != self.input_shape:
            raise DimensionError('shape', self.input_shape, frames.shape, operation='lr')
        return _design(frames.reshape(1, -1), self.intercept)

    def predict(self, x: Tensor) -> np.ndarray:
        return (self.features(x) @ self.weights).reshape(self.output_shape)

    __call__ = predict


def _design(features: np.ndarray, intercept: bool) -> np.ndarray:
    if not intercept:
        return features
    return np.hstack([features, np.ones((features.shape[0], 1))])


def lr_baseline_fit(
    sequences: Sequence[OccurrenceSequence],
    ridge: float = DEFAULT_RIDGE,
    intercept: bool = True,
) -> LinearBaseline:
    """
    Ridge-damped normal equations ``(A^T A + ridge I) W = A^T B``.

    With fewer sequences than features the equivalent ``W = A^T (A A^T + ridge I)^-1 B``
    is solved instead, which keeps the system as small as the training set. The
    intercept is left out of the penalty: the system is solved on centred inputs and
    targets and the intercept is recovered from the means.
    """
    if not sequences:
        raise EmptyTrainingSetError()
    inputs = np.stack([seq.X.reshape(-1) for seq in sequences])
    targets = np.stack([seq.Y.reshape(-1) for seq in sequences])
    input_mean = inputs.mean(axis=0) if intercept else np.zeros(inputs.shape[1])
    target_mean = targets.mean(axis=0) if intercept else np.zeros(targets.shape[1])
    design = inputs - input_mean
    centred = targets - target_mean
    samples, features = design.shape

    if samples < features:
        gram = design @ design.T + ridge * np.eye(samples)
        weights = design.T @ np.linalg.solve(gram, centred)
    else:
        gram = design.T @ design + ridge * np.eye(features)
        weights = np.linalg.solve(gram, design.T @ centred)
    if intercept:
        weights = np.vstack([weights, target_mean - input_mean @ weights])
    logger.debug('Fitted linear baseline on %d sequences, %d features', samples, features)
    return LinearBaseline(
        weights=weights,
        input_shape=sequences[0].X.shape,
        output_shape=sequences[0].Y.shape,
        intercept=intercept,
    )


def lr_baseline_predict(model: LinearBaseline, x: Tensor) -> np.ndarray:
    return model.predict(x)


def model_predictor(
    params: ModelParams,
    adapter: Optional[Adapter] = None,
    config: Optional[ModelConfig] = None,
) -> Predictor:
    def run(x: np.ndarray) -> np.ndarray:
        return np.asarray(predict(x, params, adapter, config), dtype=np.float64)

    return run
