from __future__ import annotations

import numpy as np

from mapsed.data.exceptions import CategoryIndexError
from mapsed.data.types import OccurrenceSequence
from mapsed.tensor.exceptions import DimensionError
from mapsed.tensor.transforms import flip_horizontal, rotate90

FLIP_PROBABILITY = 0.5
QUARTER_TURNS = 4


def augment(seq: OccurrenceSequence, rng: np.random.Generator) -> OccurrenceSequence:
    """
    Applies one random flip-then-rotate transform to every frame of ``seq``.

    The flip is drawn first (probability one half), then a shared number of
    counter-clockwise quarter turns from {0, 1, 2, 3}. Frames must be square, even
    for the half turn.
    """
    flip = bool(rng.random() < FLIP_PROBABILITY)
    turns = int(rng.integers(0, QUARTER_TURNS))
    _, h, w = seq.frame_shape
    if turns and h != w:
        raise DimensionError('width', h, w, operation='augment')
    return seq.replace(X=_transform(seq.X, flip, turns), Y=_transform(seq.Y, flip, turns))


def _transform(frames: np.ndarray, flip: bool, turns: int) -> np.ndarray:
    if flip:
        frames = flip_horizontal(frames)
    return rotate90(frames, turns)


def aggregate_into_category(seq: OccurrenceSequence, k: int) -> OccurrenceSequence:
    """Moves every observed event into category ``k``; targets are left untouched."""
    c, _, _ = seq.frame_shape
    if not 0 <= k < c:
        raise CategoryIndexError(f'Category index {k} is outside [0, {c})')
    merged = np.zeros_like(seq.X)
    merged[:, k] = seq.X.sum(axis=1)
    return seq.replace(X=merged)
