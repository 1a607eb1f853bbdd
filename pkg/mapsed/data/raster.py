from __future__ import annotations

import collections
import logging
from datetime import date, datetime, timedelta
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from mapsed.data.exceptions import EmptyCategoryListError, PeriodAlignmentError
from mapsed.data.types import EventRecord, GridSpec, OccurrenceSequence
from mapsed.tensor.tape import Tensor
from mapsed.types.exceptions import ConfigurationError

logger = logging.getLogger('mapsed.data')

SplitRatios = Tuple[float, float, float]
_RATIO_TOLERANCE = 1e-9


def frame_count(period_start: datetime, period_end: datetime, interval: timedelta) -> int:
    span = period_end - period_start
    if span < timedelta(0) or span % interval != timedelta(0):
        raise PeriodAlignmentError(
            f'Period {period_start.isoformat()} .. {period_end.isoformat()} is not a whole '
            f'number of {interval} intervals'
        )
    return span // interval


def records_bbox(records: Iterable[EventRecord]) -> Tuple[float, float, float, float]:
    records = list(records)
    if not records:
        raise ConfigurationError('Cannot derive a bounding box from zero records')
    latitudes = [record.latitude for record in records]
    longitudes = [record.longitude for record in records]
    return min(latitudes), max(latitudes), min(longitudes), max(longitudes)


def top_categories(records: Iterable[EventRecord], count: int) -> Tuple[str, ...]:
    """Most frequent labels first, ties broken alphabetically."""
    counter = collections.Counter(record.category for record in records)
    ranked = sorted(counter.items(), key=lambda item: (-item[1], item[0]))
    return tuple(label for label, _ in ranked[:count])


def cell_edges(low: float, high: float, cells: int) -> Tensor:
    return np.linspace(low, high, cells + 1)


def _cell_index(values: Tensor, low: float, high: float, cells: int) -> Tensor:
    # half-open cells [edge_k, edge_k+1); the upper bbox edge folds into the last cell
    index = np.searchsorted(cell_edges(low, high, cells), values, side='right') - 1
    return np.clip(index, 0, cells - 1).astype(np.int64)


def rasterize(
    records: Sequence[EventRecord],
    spec: GridSpec,
    period_start: datetime,
    period_end: datetime,
) -> List[Tensor]:
    """Counts records per (category, cell) in each interval of the period."""
    if not spec.categories:
        raise EmptyCategoryListError()
    if spec.bbox is None:
        raise ConfigurationError('GridSpec.bbox must be set before rasterizing')

    total = frame_count(period_start, period_end, spec.interval)
    frames = np.zeros((total, spec.c, spec.h, spec.w), dtype=np.float64)
    if not records or not total:
        return list(frames)

    lat_min, lat_max, lon_min, lon_max = spec.bbox
    category_index = {label: k for k, label in enumerate(spec.categories)}

    stamps = np.array([record.timestamp for record in records], dtype='datetime64[us]')
    latitudes = np.array([record.latitude for record in records], dtype=np.float64)
    longitudes = np.array([record.longitude for record in records], dtype=np.float64)
    channels = np.array([category_index.get(record.category, -1) for record in records])

    start = np.datetime64(period_start, 'us')
    end = np.datetime64(period_end, 'us')
    keep = (
        (channels >= 0)
        & (stamps >= start)
        & (stamps < end)
        & (latitudes >= lat_min)
        & (latitudes <= lat_max)
        & (longitudes >= lon_min)
        & (longitudes <= lon_max)
    )
    step = np.timedelta64(spec.interval, 'us')
    slots = ((stamps[keep] - start) // step).astype(np.int64)
    rows = _cell_index(latitudes[keep], lat_min, lat_max, spec.h)
    cols = _cell_index(longitudes[keep], lon_min, lon_max, spec.w)
    np.add.at(frames, (slots, channels[keep], rows, cols), 1.0)

    dropped = len(records) - int(keep.sum())
    if dropped:
        logger.debug('%d records fell outside the grid, period or category list', dropped)
    return list(frames)


def sliding_windows(
    frames: Sequence[Tensor], spec: GridSpec, first_frame_start: Optional[date] = None
) -> List[OccurrenceSequence]:
    """Stride-1 windows of ``m`` observed and ``n`` target frames."""
    length = spec.window_length
    if len(frames) < length:
        logger.warning(
            'Only %d frames available, %d are needed for one sequence', len(frames), length
        )
        return []

    stacked = np.asarray(frames, dtype=np.float64)
    sequences = []
    for t in range(len(frames) - length + 1):
        start_time = None
        if first_frame_start is not None:
            start_time = first_frame_start + t * spec.interval
        sequences.append(
            OccurrenceSequence(
                X=stacked[t : t + spec.m].copy(),
                Y=stacked[t + spec.m : t + length].copy(),
                start_time=start_time,
            )
        )
    return sequences


def validate_ratios(ratios: Sequence[float]) -> SplitRatios:
    if len(ratios) != 3:
        raise ConfigurationError(f'Expected three split ratios, got {len(ratios)}')
    train, val, test = ratios
    if train <= 0 or test <= 0 or val < 0:
        raise ConfigurationError(
            f'Train and test ratios must be positive and validation non-negative, '
            f'got {tuple(ratios)}'
        )
    if abs(sum(ratios) - 1.0) > _RATIO_TOLERANCE:
        raise ConfigurationError(f'Split ratios must sum to 1, got {sum(ratios)}')
    return float(ratios[0]), float(ratios[1]), float(ratios[2])


def split_boundaries(total: int, ratios: Sequence[float]) -> Tuple[int, int]:
    """Frame indices where validation and test periods begin."""
    train, val, _ = validate_ratios(ratios)
    val_start = int(round(total * train))
    test_start = int(round(total * (train + val)))
    return val_start, max(test_start, val_start)


def split_periods(
    frames: Sequence[Tensor], ratios: Sequence[float], window_length: Optional[int] = None
) -> Tuple[List[Tensor], List[Tensor], List[Tensor]]:
    """Contiguous chronological train / validation / test partitions."""
    val_start, test_start = split_boundaries(len(frames), ratios)
    parts = (
        list(frames[:val_start]),
        list(frames[val_start:test_start]),
        list(frames[test_start:]),
    )
    if window_length is not None:
        for name, part in zip(('train', 'val', 'test'), parts):
            if len(part) < window_length:
                logger.warning(
                    'The %s partition has %d frames, fewer than a window of %d',
                    name,
                    len(part),
                    window_length,
                )
    return parts
