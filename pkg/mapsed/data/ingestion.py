from __future__ import annotations

import logging
import pathlib
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Union

import numpy as np
import pandas as pd

from mapsed.data.exceptions import IngestionError, MissingColumnError
from mapsed.data.types import EventRecord
from mapsed.types.base import HashableBase
from mapsed.utils.date_conversion import get_zone

logger = logging.getLogger('mapsed.data')


class SchemaMap(HashableBase):
    """Maps CSV header names onto the fields of an :class:`EventRecord`."""

    timestamp: str = 'Date'
    latitude: str = 'Y'
    longitude: str = 'X'
    category: str = 'Category'
    time: Optional[str] = None
    """Separate time-of-day column, joined to ``timestamp`` with a space"""

    timestamp_format: Optional[str] = None
    """strftime pattern; ISO-8601 is expected when omitted"""

    timezone: Optional[str] = None
    """IANA zone aware timestamps are converted to before the zone is dropped"""

    @property
    def columns(self) -> List[str]:
        names = [self.timestamp, self.latitude, self.longitude, self.category]
        if self.time is not None:
            names.append(self.time)
        return names


@dataclass
class IngestionResult:
    records: List[EventRecord] = field(default_factory=list)
    skipped: int = 0

    def __iter__(self) -> Iterator[EventRecord]:  # type: ignore[override]
        return iter(self.records)

    def __len__(self) -> int:
        return len(self.records)

    def __getitem__(self, index: int) -> EventRecord:
        return self.records[index]


def ingest_csv(path: Union[str, pathlib.Path], schema_map: SchemaMap) -> IngestionResult:
    """
    Reads a UTF-8 CSV with a header row into validated event records.

    Rows whose timestamp, coordinates or category cannot be parsed are skipped and
    counted in :attr:`IngestionResult.skipped`.
    """
    path = pathlib.Path(path)
    if not path.is_file():
        raise IngestionError(f'CSV file {path} does not exist')

    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding='utf-8')
    except pd.errors.EmptyDataError:
        raise IngestionError(f'CSV file {path} is empty') from None
    except (UnicodeDecodeError, pd.errors.ParserError) as ex:
        raise IngestionError(f'CSV file {path} could not be parsed: {ex}') from ex

    for column in schema_map.columns:
        if column not in frame.columns:
            raise MissingColumnError(column, available=list(frame.columns))

    raw_timestamps = frame[schema_map.timestamp].str.strip()
    if schema_map.time is not None:
        raw_timestamps = raw_timestamps + ' ' + frame[schema_map.time].str.strip()
    timestamps = _parse_timestamps(raw_timestamps, schema_map)
    latitudes = pd.to_numeric(frame[schema_map.latitude], errors='coerce').to_numpy(np.float64)
    longitudes = pd.to_numeric(frame[schema_map.longitude], errors='coerce').to_numpy(np.float64)
    categories = frame[schema_map.category].str.strip()

    valid = (
        timestamps.notna().to_numpy()
        & np.isfinite(latitudes)
        & np.isfinite(longitudes)
        & (categories != '').to_numpy()
    )
    skipped = int((~valid).sum())
    if skipped:
        logger.warning('Skipped %d malformed rows out of %d in %s', skipped, len(frame), path)

    # rows are validated column-wise above
    records = [
        EventRecord.construct(timestamp=ts, latitude=lat, longitude=lon, category=cat)
        for ts, lat, lon, cat in zip(
            timestamps[valid].dt.to_pydatetime(),
            latitudes[valid].tolist(),
            longitudes[valid].tolist(),
            categories[valid].tolist(),
        )
    ]
    logger.info('Ingested %d records from %s', len(records), path)
    return IngestionResult(records=records, skipped=skipped)


def _parse_timestamps(raw: pd.Series, schema_map: SchemaMap) -> pd.Series:
    fmt = schema_map.timestamp_format or 'ISO8601'
    parsed = pd.to_datetime(raw, format=fmt, errors='coerce')
    if parsed.dtype == object:
        # mixed UTC offsets; align everything on UTC first
        parsed = pd.to_datetime(raw, format=fmt, errors='coerce', utc=True)
    if getattr(parsed.dt, 'tz', None) is not None:
        if schema_map.timezone is not None:
            parsed = parsed.dt.tz_convert(get_zone(schema_map.timezone))
        parsed = parsed.dt.tz_localize(None)
    return parsed
