from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from mapsed.data.types import OccurrenceSequence
from mapsed.evaluation.baselines import Predictor
from mapsed.evaluation.exceptions import EvaluationError
from mapsed.evaluation.metrics import absolute_error, per_category, postprocess
from mapsed.utils.parallel import WorkerPool

logger = logging.getLogger('mapsed.evaluation')


@dataclass
class EvalReport:
    categories: List[str]
    rmse: np.ndarray
    mae: np.ndarray

    error_grids: np.ndarray
    """Mean absolute error per ``(horizon, category, row, column)``"""

    frames: Dict[str, np.ndarray] = field(default_factory=dict)
    scores: Dict[str, Any] = field(default_factory=dict)
    config: Dict[str, Any] = field(default_factory=dict)

    @property
    def macro_rmse(self) -> float:
        return float(np.mean(self.rmse))

    @property
    def macro_mae(self) -> float:
        return float(np.mean(self.mae))

    def rows(self) -> List[Tuple[str, float, float]]:
        return [
            (name, float(r), float(a)) for name, r, a in zip(self.categories, self.rmse, self.mae)
        ]


def _forecast(predictor: Predictor, seq: OccurrenceSequence, mode: str) -> np.ndarray:
    prediction = np.asarray(predictor(seq.X), dtype=np.float64)
    if prediction.shape != seq.Y.shape:
        raise EvaluationError(
            f'Predictor returned shape {prediction.shape}, expected {seq.Y.shape}'
        )
    return postprocess(prediction, mode)


def evaluate(
    predictor: Predictor,
    sequences: Sequence[OccurrenceSequence],
    categories: Optional[Sequence[str]] = None,
    prediction_mode: str = 'clamp',
    pool: Optional[WorkerPool] = None,
) -> EvalReport:
    """Scores ``predictor`` on every sequence; metrics are averaged over sequences."""
    if not sequences:
        raise EvaluationError('Nothing to evaluate: the split holds no sequences')

    def run(seq: OccurrenceSequence) -> np.ndarray:
        return _forecast(predictor, seq, prediction_mode)

    if pool is not None:
        predictions = pool.ordered_map(run, sequences)
    else:
        predictions = [run(seq) for seq in sequences]

    rmses, maes, errors = [], [], []
    for seq, prediction in zip(sequences, predictions):
        r, a = per_category(seq.Y, prediction)
        rmses.append(r)
        maes.append(a)
        errors.append(absolute_error(seq.Y, prediction))

    c = sequences[0].Y.shape[1]
    names = list(categories) if categories else [f'category_{k}' for k in range(c)]
    report = EvalReport(
        categories=names,
        rmse=np.mean(rmses, axis=0),
        mae=np.mean(maes, axis=0),
        error_grids=np.mean(errors, axis=0),
        frames={'input': sequences[0].X, 'prediction': predictions[0], 'truth': sequences[0].Y},
    )
    logger.info(
        'Evaluated %d sequences: macro RMSE %.6f, macro MAE %.6f',
        len(sequences),
        report.macro_rmse,
        report.macro_mae,
    )
    return report
