"""
Controlled stimuli fed to a trained forecaster to see what structure it picked up.

* rotation: held-out observations turned by quarter turns, scored against equally
  turned targets;
* semantics: every observed event moved into one category;
* dynamics: a single hotspot walking down the main diagonal.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from mapsed.data.augmentation import aggregate_into_category
from mapsed.data.exceptions import GridTooSmallError
from mapsed.data.synthetic import hotspot_frames, max_hotspot_offset
from mapsed.data.types import GridSpec, OccurrenceSequence
from mapsed.evaluation.baselines import Predictor
from mapsed.evaluation.metrics import postprocess
from mapsed.evaluation.report import EvalReport, evaluate
from mapsed.tensor.transforms import rotate90
from mapsed.utils.parallel import WorkerPool

Cell = Tuple[int, int]


@dataclass
class ProbeResult:
    frames: Dict[str, np.ndarray]
    scores: Dict[str, List[float]] = field(default_factory=dict)


def argmax_cell(frames: np.ndarray) -> Cell:
    """Hottest cell of a ``c x h x w`` frame, summed over categories."""
    grid = np.asarray(frames, dtype=np.float64)
    if grid.ndim == 3:
        grid = grid.sum(axis=0)
    row, column = np.unravel_index(int(np.argmax(grid)), grid.shape)
    return int(row), int(column)


def chebyshev(a: Cell, b: Cell) -> int:
    return max(abs(a[0] - b[0]), abs(a[1] - b[1]))


def rotate_cell(cell: Cell, quarter_turns: int, size: int) -> Cell:
    """Where ``cell`` of a ``size x size`` grid lands after counter-clockwise turns."""
    row, column = cell
    for _ in range(quarter_turns % 4):
        row, column = size - 1 - column, row
    return row, column


def rotate_sequence(seq: OccurrenceSequence, quarter_turns: int) -> OccurrenceSequence:
    return seq.replace(X=rotate90(seq.X, quarter_turns), Y=rotate90(seq.Y, quarter_turns))


def rotation_probe(
    model: Predictor,
    sequences: Sequence[OccurrenceSequence],
    quarter_turns: int,
    categories: Optional[Sequence[str]] = None,
    prediction_mode: str = 'clamp',
    pool: Optional[WorkerPool] = None,
) -> EvalReport:
    rotated = [rotate_sequence(seq, quarter_turns) for seq in sequences]
    report = evaluate(model, rotated, categories, prediction_mode, pool)
    report.scores['quarter_turns'] = quarter_turns
    return report


def semantics_probe(
    model: Predictor, seq: OccurrenceSequence, k: int, prediction_mode: str = 'clamp'
) -> ProbeResult:
    aggregated = aggregate_into_category(seq, k)
    prediction = postprocess(model(aggregated.X), prediction_mode)
    return ProbeResult(
        frames={'input': aggregated.X, 'prediction': prediction},
        scores={'leakage': [cross_category_share(prediction, k)]},
    )


def cross_category_share(prediction: np.ndarray, k: int) -> float:
    """Share of the predicted mass that lands outside category ``k``."""
    total = float(np.sum(prediction))
    if total <= 0.0:
        return 0.0
    return float((total - np.sum(prediction[:, k])) / total)


def diagonal_target(spec: GridSpec, offset: int, step: int) -> Cell:
    """Extrapolated hotspot cell ``step`` frames after the last observation (1-based)."""
    cell = min(offset + spec.m - 1 + step, spec.h - 1)
    return cell, cell


def dynamics_probe(
    model: Predictor,
    spec: GridSpec,
    offset: int = 0,
    mass: float = 1.0,
    prediction_mode: str = 'clamp',
) -> ProbeResult:
    limit = max_hotspot_offset(spec)
    if not 0 <= offset <= limit:
        raise GridTooSmallError(f'Hotspot offset {offset} is outside [0, {limit}]')
    stimulus = hotspot_frames(spec, offset, mass)
    observation = stimulus[: spec.m]
    prediction = postprocess(model(observation), prediction_mode)
    distances = [
        float(chebyshev(argmax_cell(frame), diagonal_target(spec, offset, step)))
        for step, frame in enumerate(prediction, start=1)
    ]
    return ProbeResult(
        frames={'input': observation, 'prediction': prediction},
        scores={'distance': distances},
    )
