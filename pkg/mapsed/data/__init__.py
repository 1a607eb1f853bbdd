from .augmentation import aggregate_into_category, augment
from .dataset import Dataset, build_dataset, from_sequences, load_dataset, save_dataset
from .exceptions import (
    CategoryIndexError,
    DatasetFormatError,
    EmptyCategoryListError,
    GridTooSmallError,
    IngestionError,
    MissingColumnError,
    PeriodAlignmentError,
)
from .ingestion import IngestionResult, SchemaMap, ingest_csv
from .raster import rasterize, sliding_windows, split_periods
from .synthetic import GENERATORS, synth_correlated_categories, synth_moving_hotspot
from .types import EventRecord, GridSpec, OccurrenceSequence

__all__ = (
    'EventRecord',
    'GridSpec',
    'OccurrenceSequence',
    'SchemaMap',
    'IngestionResult',
    'Dataset',
    'ingest_csv',
    'rasterize',
    'sliding_windows',
    'split_periods',
    'augment',
    'aggregate_into_category',
    'synth_moving_hotspot',
    'synth_correlated_categories',
    'GENERATORS',
    'build_dataset',
    'from_sequences',
    'save_dataset',
    'load_dataset',
    'IngestionError',
    'MissingColumnError',
    'EmptyCategoryListError',
    'GridTooSmallError',
    'PeriodAlignmentError',
    'DatasetFormatError',
    'CategoryIndexError',
)
