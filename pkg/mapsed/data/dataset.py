from __future__ import annotations

import logging
from datetime import date, datetime
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import Field

from mapsed.data.exceptions import DatasetFormatError, IngestionError
from mapsed.data.raster import (
    frame_count,
    rasterize,
    records_bbox,
    sliding_windows,
    split_boundaries,
    split_periods,
    top_categories,
)
from mapsed.data.types import (
    DatasetSummary,
    EventRecord,
    GridSpec,
    OccurrenceSequence,
    SplitSummary,
)
from mapsed.types.base import Base
from mapsed.utils.container import (
    Container,
    ContainerFormatError,
    PathLike,
    load_container,
    save_container,
)
from mapsed.utils.date_conversion import as_midnight

logger = logging.getLogger('mapsed.data')

DATASET_MAGIC = b'MAPSEDDS'
SPLIT_NAMES = ('train', 'val', 'test')
DEFAULT_SPLIT_RATIOS = (0.7, 0.15, 0.15)
_PAD = 1e-6


class Dataset(Base):
    spec: GridSpec
    train: List[OccurrenceSequence] = Field(default_factory=list)
    val: List[OccurrenceSequence] = Field(default_factory=list)
    test: List[OccurrenceSequence] = Field(default_factory=list)
    summary: DatasetSummary = Field(default_factory=DatasetSummary)

    def split(self, name: str) -> List[OccurrenceSequence]:
        if name not in SPLIT_NAMES:
            raise ValueError(f'Unknown split {name!r}, expected one of {SPLIT_NAMES}')
        return getattr(self, name)  # type: ignore[no-any-return]


def _padded_bbox(bbox: Tuple[float, float, float, float]) -> Tuple[float, float, float, float]:
    lat_min, lat_max, lon_min, lon_max = bbox
    if lat_min == lat_max:
        lat_min, lat_max = lat_min - _PAD, lat_max + _PAD
    if lon_min == lon_max:
        lon_min, lon_max = lon_min - _PAD, lon_max + _PAD
    return lat_min, lat_max, lon_min, lon_max


def build_dataset(
    records: Sequence[EventRecord],
    spec: GridSpec,
    ratios: Sequence[float] = DEFAULT_SPLIT_RATIOS,
    period_start: Optional[datetime] = None,
    period_end: Optional[datetime] = None,
) -> Dataset:
    """
    Rasterizes ``records`` into chronologically split, windowed sequences.

    The period defaults to whole intervals starting at midnight of the earliest record
    and covering the latest one. Bounding box and categories, when not fixed in
    ``spec``, are derived from the training period only and frozen for every split.
    """
    if not records:
        raise IngestionError('No valid event records to build a dataset from')

    first = min(record.timestamp for record in records)
    last = max(record.timestamp for record in records)
    start = period_start if period_start is not None else as_midnight(first)
    if period_end is None:
        end = start + ((last - start) // spec.interval + 1) * spec.interval
    else:
        end = period_end

    total = frame_count(start, end, spec.interval)
    val_start, test_start = split_boundaries(total, ratios)
    train_end = start + val_start * spec.interval
    training = [record for record in records if start <= record.timestamp < train_end]
    if not training:
        raise IngestionError(
            f'No records fall in the training period '
            f'{start.isoformat()} .. {train_end.isoformat()}'
        )

    bbox = spec.bbox if spec.bbox is not None else _padded_bbox(records_bbox(training))
    categories = spec.categories or top_categories(training, spec.num_categories)
    frozen = spec.frozen_with(bbox=bbox, categories=categories)

    frames = rasterize(records, frozen, start, end)
    partitions = split_periods(frames, ratios, window_length=frozen.window_length)
    offsets = (0, val_start, test_start)

    splits: Dict[str, List[OccurrenceSequence]] = {}
    split_summaries: Dict[str, SplitSummary] = {}
    for name, part, offset in zip(SPLIT_NAMES, partitions, offsets):
        part_start = start + offset * frozen.interval
        part_end = part_start + len(part) * frozen.interval
        splits[name] = sliding_windows(part, frozen, first_frame_start=part_start.date())
        split_summaries[name] = SplitSummary(
            start=part_start.date().isoformat(),
            end=part_end.date().isoformat(),
            frames=len(part),
            sequences=len(splits[name]),
        )
        logger.info(
            'Split %s: %s .. %s, %d frames, %d sequences',
            name,
            split_summaries[name].start,
            split_summaries[name].end,
            len(part),
            len(splits[name]),
        )

    summary = DatasetSummary(
        period_start=start.date().isoformat(),
        period_end=end.date().isoformat(),
        categories=frozen.categories,
        bbox=frozen.bbox,
        splits=split_summaries,
    )
    return Dataset(spec=frozen, summary=summary, **splits)


def from_sequences(
    spec: GridSpec,
    train: Sequence[OccurrenceSequence],
    val: Sequence[OccurrenceSequence] = (),
    test: Sequence[OccurrenceSequence] = (),
    generator: Optional[str] = None,
) -> Dataset:
    """Wraps already windowed sequences, e.g. synthetic ones, into a dataset."""
    if not spec.categories:
        spec = spec.copy(update={'categories': tuple(f'category_{k}' for k in range(spec.c))})
    splits = {'train': list(train), 'val': list(val), 'test': list(test)}
    summary = DatasetSummary(
        categories=spec.categories,
        bbox=spec.bbox,
        generator=generator,
        splits={
            name: SplitSummary(sequences=len(items), frames=_frames_of(items, spec))
            for name, items in splits.items()
        },
    )
    return Dataset(spec=spec, summary=summary, **splits)


def _frames_of(items: Sequence[OccurrenceSequence], spec: GridSpec) -> int:
    return len(items) * spec.window_length


def _stack(
    sequences: Sequence[OccurrenceSequence], attr: str, frames: int, spec: GridSpec
) -> np.ndarray:
    if not sequences:
        return np.zeros((0, frames, spec.c, spec.h, spec.w), dtype=np.float64)
    return np.stack([getattr(seq, attr) for seq in sequences])


def _dates_of(sequences: Sequence[OccurrenceSequence]) -> List[Optional[str]]:
    return [seq.start_time.isoformat() if seq.start_time else None for seq in sequences]


def save_dataset(
    path: PathLike, dataset: Dataset, config: Optional[Dict[str, Any]] = None
) -> None:
    """Writes every split; ``config`` is stored alongside as the echo of the producing run."""
    spec = dataset.spec
    arrays: Dict[str, np.ndarray] = {}
    start_times: Dict[str, List[Optional[str]]] = {}
    for name in SPLIT_NAMES:
        sequences = dataset.split(name)
        arrays[f'{name}.X'] = _stack(sequences, 'X', spec.m, spec)
        arrays[f'{name}.Y'] = _stack(sequences, 'Y', spec.n, spec)
        start_times[name] = _dates_of(sequences)
    meta: Dict[str, Any] = {
        'kind': 'dataset',
        'grid': spec.to_meta(),
        'start_times': start_times,
        'summary': _summary_meta(dataset.summary),
    }
    if config is not None:
        meta['config'] = dict(config)
    save_container(path, DATASET_MAGIC, Container(meta=meta, arrays=arrays))
    logger.info('Dataset written to %s', path)


def _summary_meta(summary: DatasetSummary) -> Dict[str, Any]:
    payload = summary.dict()
    payload['categories'] = list(summary.categories)
    payload['bbox'] = list(summary.bbox) if summary.bbox is not None else None
    return payload


def load_dataset(path: PathLike) -> Dataset:
    try:
        container = load_container(path, DATASET_MAGIC)
    except FileNotFoundError:
        raise DatasetFormatError(f'Dataset file {path} does not exist') from None
    except ContainerFormatError as ex:
        raise DatasetFormatError(f'{path}: {ex}') from ex

    try:
        spec = GridSpec.from_meta(container.meta['grid'])
        splits: Dict[str, List[OccurrenceSequence]] = {}
        for name in SPLIT_NAMES:
            xs = container.arrays[f'{name}.X']
            ys = container.arrays[f'{name}.Y']
            dates = container.meta['start_times'][name]
            splits[name] = [
                OccurrenceSequence(
                    X=x, Y=y, start_time=date.fromisoformat(day) if day else None
                )
                for x, y, day in zip(xs, ys, dates)
            ]
        summary = DatasetSummary.parse_obj(container.meta.get('summary') or {})
    except (KeyError, TypeError, ValueError) as ex:
        raise DatasetFormatError(f'{path}: missing or malformed field {ex}') from ex
    return Dataset(spec=spec, summary=summary, **splits)
