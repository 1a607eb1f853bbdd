from __future__ import annotations

import math
from datetime import date, datetime, timedelta
from typing import Any, Dict, Optional, Tuple

import numpy as np
from pydantic import Field, conint, root_validator, validator

from mapsed.types.base import Base, HashableBase

DEFAULT_INTERVAL = timedelta(days=7)
DEFAULT_NUM_CATEGORIES = 4


class EventRecord(HashableBase):
    """object: EventRecord"""

    timestamp: datetime
    """Local (naive) date-time of the occurrence"""

    latitude: float
    """Decimal degrees"""

    longitude: float
    """Decimal degrees"""

    category: str
    """Event type label as it appears in the source"""

    @validator('latitude', 'longitude')
    def coordinates_must_be_finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError('coordinates must be finite')
        return v

    @validator('category')
    def category_must_not_be_blank(cls, v: str) -> str:
        v = v.strip()
        if not v:
            raise ValueError('category must not be blank')
        return v


class GridSpec(HashableBase):
    """
    Geometry and windowing of the occurrence grids.

    ``bbox`` and ``categories`` may be left empty and are frozen from the training
    period when a dataset is built. Row index grows with latitude, column index with
    longitude.
    """

    bbox: Optional[Tuple[float, float, float, float]] = None
    """(lat_min, lat_max, lon_min, lon_max)"""

    h: conint(ge=1) = 10  # type: ignore[valid-type]
    w: conint(ge=1) = 10  # type: ignore[valid-type]

    categories: Tuple[str, ...] = ()
    """Ordered category labels; position is the channel index"""

    num_categories: conint(ge=1) = DEFAULT_NUM_CATEGORIES  # type: ignore[valid-type]
    """How many of the most frequent training categories to keep when none are given"""

    interval: timedelta = DEFAULT_INTERVAL
    m: conint(ge=1) = 5  # type: ignore[valid-type]
    n: conint(ge=1) = 3  # type: ignore[valid-type]

    @validator('bbox')
    def bbox_must_be_ordered(
        cls, v: Optional[Tuple[float, float, float, float]]
    ) -> Optional[Tuple[float, float, float, float]]:
        if v is None:
            return v
        lat_min, lat_max, lon_min, lon_max = v
        if not lat_min < lat_max:
            raise ValueError('lat_min must be smaller than lat_max')
        if not lon_min < lon_max:
            raise ValueError('lon_min must be smaller than lon_max')
        return v

    @validator('interval')
    def interval_must_be_positive(cls, v: timedelta) -> timedelta:
        if v <= timedelta(0):
            raise ValueError('interval must be positive')
        return v

    @property
    def c(self) -> int:
        return len(self.categories) if self.categories else self.num_categories

    @property
    def window_length(self) -> int:
        return self.m + self.n

    def frozen_with(
        self, bbox: Tuple[float, float, float, float], categories: Tuple[str, ...]
    ) -> GridSpec:
        return GridSpec(**{**self.dict(), 'bbox': bbox, 'categories': tuple(categories)})

    def to_meta(self) -> Dict[str, Any]:
        return {
            'bbox': list(self.bbox) if self.bbox is not None else None,
            'h': self.h,
            'w': self.w,
            'categories': list(self.categories),
            'num_categories': self.num_categories,
            'interval_seconds': int(self.interval.total_seconds()),
            'm': self.m,
            'n': self.n,
        }

    @classmethod
    def from_meta(cls, meta: Dict[str, Any]) -> GridSpec:
        fields = dict(meta)
        fields['interval'] = timedelta(seconds=fields.pop('interval_seconds'))
        if fields.get('bbox') is not None:
            fields['bbox'] = tuple(fields['bbox'])
        fields['categories'] = tuple(fields.get('categories') or ())
        return cls(**fields)


class OccurrenceSequence(Base):
    """Observation ``X`` (m x c x h x w) and target ``Y`` (n x c x h x w) counts."""

    X: np.ndarray
    Y: np.ndarray
    start_time: Optional[date] = None

    class Config:
        allow_mutation = False

    @validator('X', 'Y', pre=True)
    def coerce_to_float_array(cls, v: Any) -> np.ndarray:
        array = np.asarray(v, dtype=np.float64)
        if array.ndim != 4:
            raise ValueError(f'expected a 4D tensor, got shape {array.shape}')
        return array

    @root_validator(skip_on_failure=True)
    def frames_must_agree(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        x, y = values['X'], values['Y']
        if x.shape[1:] != y.shape[1:]:
            raise ValueError(f'X frames {x.shape[1:]} and Y frames {y.shape[1:]} differ')
        return values

    @property
    def m(self) -> int:
        return int(self.X.shape[0])

    @property
    def n(self) -> int:
        return int(self.Y.shape[0])

    @property
    def frame_shape(self) -> Tuple[int, int, int]:
        c, h, w = self.X.shape[1:]
        return int(c), int(h), int(w)

    def replace(self, **changes: Any) -> OccurrenceSequence:
        fields = {'X': self.X, 'Y': self.Y, 'start_time': self.start_time}
        fields.update(changes)
        return OccurrenceSequence(**fields)


class SplitSummary(HashableBase):
    start: Optional[str] = None
    end: Optional[str] = None
    frames: int = 0
    sequences: int = 0


class DatasetSummary(Base):
    period_start: Optional[str] = None
    period_end: Optional[str] = None
    categories: Tuple[str, ...] = ()
    bbox: Optional[Tuple[float, float, float, float]] = None
    skipped_rows: int = 0
    generator: Optional[str] = None
    splits: Dict[str, SplitSummary] = Field(default_factory=dict)
