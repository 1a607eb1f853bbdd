"""
Training objectives.

``contrastive_loss`` is the Frobenius triplet bound
``max(||S+ - S||^2 - min_i ||S_i - S||^2 + omega, 0)``; ``infonce_dot`` is the
inner-product InfoNCE comparator, computed in log space.
"""
from __future__ import annotations

from typing import Sequence

from pydantic import Field, confloat, conint
from typing_extensions import Literal

from mapsed.tensor import ops
from mapsed.tensor.exceptions import DimensionError
from mapsed.tensor.tape import ArrayLike, TapeValue, lift
from mapsed.types.base import Base
from mapsed.types.exceptions import ConfigurationError

CONTRAST_MODES = ('frobenius', 'dot')


class LossConfig(Base):
    lambda_: confloat(ge=0) = Field(0.1, alias='lambda')  # type: ignore[valid-type]
    """Weight of the L1 term of the reconstruction loss"""

    lambda_c: confloat(ge=0) = 0.1  # type: ignore[valid-type]
    omega: confloat(ge=0) = 1.0  # type: ignore[valid-type]
    num_negatives: conint(ge=1) = 4  # type: ignore[valid-type]
    contrast: Literal['frobenius', 'dot'] = 'frobenius'

    class Config:
        allow_population_by_field_name = True


def _same_shape(a: TapeValue, b: TapeValue, operation: str) -> None:
    if a.shape != b.shape:
        raise DimensionError('shape', a.shape, b.shape, operation=operation)


def squared_distance(a: ArrayLike, b: ArrayLike) -> TapeValue:
    """Squared Frobenius norm of ``a - b``."""
    x, y = lift(a), lift(b)
    _same_shape(x, y, 'squared_distance')
    return ops.reduce_sum(ops.square(ops.sub(x, y)))


def inner_product(a: ArrayLike, b: ArrayLike) -> TapeValue:
    x, y = lift(a), lift(b)
    _same_shape(x, y, 'inner_product')
    return ops.reduce_sum(ops.mul(x, y))


def recon_loss(target: ArrayLike, prediction: ArrayLike, lam: float) -> TapeValue:
    y, y_pred = lift(target), lift(prediction)
    _same_shape(y, y_pred, 'recon_loss')
    residual = ops.sub(y, y_pred)
    squared = ops.reduce_sum(ops.square(residual))
    absolute = ops.reduce_sum(ops.absolute(residual))
    total = ops.add(squared, ops.scale(absolute, lam))
    return ops.scale(total, 1.0 / y.shape[0])


def _check_negatives(negatives: Sequence[ArrayLike]) -> None:
    if not negatives:
        raise ConfigurationError('The negative sample set must not be empty')


def contrastive_loss(
    anchor: ArrayLike, positive: ArrayLike, negatives: Sequence[ArrayLike], omega: float
) -> TapeValue:
    _check_negatives(negatives)
    nearest = ops.minimum([squared_distance(negative, anchor) for negative in negatives])
    return ops.relu(ops.add(ops.sub(squared_distance(positive, anchor), nearest), omega))


def infonce_dot(
    anchor: ArrayLike, positive: ArrayLike, negatives: Sequence[ArrayLike]
) -> TapeValue:
    _check_negatives(negatives)
    positive_score = inner_product(anchor, positive)
    scores = [positive_score] + [inner_product(anchor, negative) for negative in negatives]
    return ops.sub(ops.logsumexp(ops.stack(scores)), positive_score)


def net_loss(recon: ArrayLike, contrastive: ArrayLike, lambda_c: float) -> TapeValue:
    return ops.add(recon, ops.scale(contrastive, lambda_c))


def contrastive_term(
    config: LossConfig,
    anchor: ArrayLike,
    positive: ArrayLike,
    negatives: Sequence[ArrayLike],
) -> TapeValue:
    if config.contrast == 'dot':
        return infonce_dot(anchor, positive, negatives)
    return contrastive_loss(anchor, positive, negatives, config.omega)
