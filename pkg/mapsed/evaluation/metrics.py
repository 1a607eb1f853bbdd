"""
Forecast error metrics.

``rmse`` and ``mae`` score one category of one forecast over its ``n x h x w`` cells.
Over a split, the per-sequence values are averaged, category by category.
"""
from __future__ import annotations

from typing import Tuple

import numpy as np

from mapsed.tensor.exceptions import DimensionError
from mapsed.tensor.tape import Tensor

RMSE = 'rmse'
MAE = 'mae'


def _pair(y: Tensor, y_pred: Tensor, operation: str) -> Tuple[np.ndarray, np.ndarray]:
    truth = np.asarray(y, dtype=np.float64)
    prediction = np.asarray(y_pred, dtype=np.float64)
    if truth.shape != prediction.shape:
        raise DimensionError('shape', truth.shape, prediction.shape, operation=operation)
    if truth.size == 0:
        raise DimensionError('size', 'at least one cell', 0, operation=operation)
    return truth, prediction


def rmse(y: Tensor, y_pred: Tensor) -> float:
    truth, prediction = _pair(y, y_pred, RMSE)
    return float(np.sqrt(np.mean((truth - prediction) ** 2)))


def mae(y: Tensor, y_pred: Tensor) -> float:
    truth, prediction = _pair(y, y_pred, MAE)
    return float(np.mean(np.abs(truth - prediction)))


def per_category(y: Tensor, y_pred: Tensor) -> Tuple[np.ndarray, np.ndarray]:
    """RMSE and MAE for every category of an ``n x c x h x w`` forecast."""
    truth, prediction = _pair(y, y_pred, 'per_category')
    if truth.ndim != 4:
        raise DimensionError('ndim', 4, truth.ndim, operation='per_category')
    categories = truth.shape[1]
    rmses = np.array([rmse(truth[:, k], prediction[:, k]) for k in range(categories)])
    maes = np.array([mae(truth[:, k], prediction[:, k]) for k in range(categories)])
    return rmses, maes


def absolute_error(y: Tensor, y_pred: Tensor) -> np.ndarray:
    truth, prediction = _pair(y, y_pred, 'absolute_error')
    return np.abs(truth - prediction)


def postprocess(prediction: Tensor, mode: str) -> np.ndarray:
    """Turns raw regression outputs into scored counts."""
    array = np.asarray(prediction, dtype=np.float64)
    if mode == 'raw':
        return array.copy()
    clamped = np.maximum(array, 0.0)
    if mode == 'clamp':
        return clamped
    if mode == 'round':
        return np.rint(clamped)
    raise ValueError(f'Unknown prediction mode {mode!r}')
