"""Synthetic stimuli for the probe experiments and the overfit checks."""
from __future__ import annotations

from typing import Callable, Dict, List, Optional

import numpy as np

from mapsed.data.exceptions import GridTooSmallError
from mapsed.data.types import GridSpec, OccurrenceSequence

Generator = Callable[..., List[OccurrenceSequence]]


def max_hotspot_offset(spec: GridSpec) -> int:
    if spec.h != spec.w or spec.h < spec.window_length:
        raise GridTooSmallError(
            f'A diagonal hotspot over {spec.window_length} frames needs a square grid of at '
            f'least {spec.window_length}x{spec.window_length}, got {spec.h}x{spec.w}'
        )
    return spec.h - spec.window_length


def hotspot_frames(
    spec: GridSpec, offset: int, mass: float = 1.0, length: Optional[int] = None
) -> np.ndarray:
    """Frame ``t`` holds ``mass`` at cell ``(t + offset, t + offset)`` of every category."""
    length = spec.window_length if length is None else length
    frames = np.zeros((length, spec.c, spec.h, spec.w), dtype=np.float64)
    for t in range(length):
        cell = min(t + offset, spec.h - 1)
        frames[t, :, cell, cell] = mass
    return frames


def synth_moving_hotspot(
    spec: GridSpec,
    num_sequences: int,
    rng: np.random.Generator,
    mass: float = 1.0,
    max_offset: Optional[int] = None,
) -> List[OccurrenceSequence]:
    limit = max_hotspot_offset(spec)
    if max_offset is not None:
        if not 0 <= max_offset <= limit:
            raise GridTooSmallError(
                f'Hotspot offsets up to {max_offset} leave a {spec.h}x{spec.w} grid; '
                f'the largest valid offset is {limit}'
            )
        limit = max_offset

    sequences = []
    for _ in range(num_sequences):
        offset = int(rng.integers(0, limit + 1))
        frames = hotspot_frames(spec, offset, mass)
        sequences.append(OccurrenceSequence(X=frames[: spec.m], Y=frames[spec.m :]))
    return sequences


def synth_correlated_categories(
    spec: GridSpec,
    num_sequences: int,
    rng: np.random.Generator,
    intensity: float = 2.0,
    hotspots: int = 2,
) -> List[OccurrenceSequence]:
    """
    Poisson counts from a random spatial intensity map, copied into every category
    so that the category channels are perfectly correlated.
    """
    rows, cols = np.mgrid[0 : spec.h, 0 : spec.w]
    sequences = []
    for _ in range(num_sequences):
        rate = np.zeros((spec.h, spec.w), dtype=np.float64)
        for _ in range(hotspots):
            center_row = rng.uniform(0, spec.h - 1)
            center_col = rng.uniform(0, spec.w - 1)
            rate += np.exp(-((rows - center_row) ** 2 + (cols - center_col) ** 2) / 2.0)
        rate *= intensity / max(rate.max(), 1e-12)
        counts = rng.poisson(np.broadcast_to(rate, (spec.window_length, 1, spec.h, spec.w)))
        frames = np.repeat(counts.astype(np.float64), spec.c, axis=1)
        sequences.append(OccurrenceSequence(X=frames[: spec.m], Y=frames[spec.m :]))
    return sequences


GENERATORS: Dict[str, Generator] = {
    'diag': synth_moving_hotspot,
    'correlated': synth_correlated_categories,
}
