from __future__ import annotations

from typing import List, Sequence

import numpy as np

from mapsed.data.types import OccurrenceSequence
from mapsed.tensor.tape import Tensor
from mapsed.types.exceptions import ConfigurationError


def positive_permutation(m: int, rng: np.random.Generator) -> List[int]:
    """Uniform over the non-identity permutations of ``m`` frames (identity when m == 1)."""
    if m < 2:
        return list(range(m))
    identity = np.arange(m)
    while True:
        order = rng.permutation(m)
        if not np.array_equal(order, identity):
            return [int(i) for i in order]


def make_positive(x: Tensor, rng: np.random.Generator) -> Tensor:
    frames = np.asarray(x, dtype=np.float64)
    return frames[positive_permutation(frames.shape[0], rng)]


def negative_indices(size: int, current_index: int, k: int, rng: np.random.Generator) -> List[int]:
    if size < k + 1:
        raise ConfigurationError(
            f'{k} negatives need at least {k + 1} training sequences, got {size}'
        )
    candidates = np.delete(np.arange(size), current_index)
    return [int(i) for i in rng.choice(candidates, size=k, replace=False)]


def sample_negatives(
    dataset: Sequence[OccurrenceSequence], current_index: int, k: int, rng: np.random.Generator
) -> List[Tensor]:
    return [dataset[i].X for i in negative_indices(len(dataset), current_index, k, rng)]
