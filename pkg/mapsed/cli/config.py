"""
Flat ``key = value`` run configuration.

One file drives every command. Keys are the field names of the component configs
(``vae_`` prefixes the VAE ones, ``csv_`` the CSV column mapping) plus a handful of
path and generator settings. Lines starting with ``#`` are comments; an empty value
means "use the default". List values are comma-separated.
"""
from __future__ import annotations

import pathlib
from datetime import date, datetime, timedelta
from typing import Any, Dict, Iterable, Mapping, Optional, Tuple, Type

from pydantic import Extra, Field, conint, validator
from typing_extensions import Literal

from mapsed.cli.exceptions import UnknownConfigKeyError
from mapsed.data.ingestion import SchemaMap
from mapsed.data.types import GridSpec
from mapsed.evaluation.config import EvalConfig
from mapsed.losses import LossConfig
from mapsed.nn.config import ModelConfig, VAEConfig
from mapsed.training.config import TrainConfig
from mapsed.types.base import Base
from mapsed.types.exceptions import ConfigurationError
from mapsed.utils.container import PathLike

DATASET_FILE = 'dataset.mds'

SECTIONS: Tuple[Tuple[str, Type[Base]], ...] = (
    ('', GridSpec),
    ('csv_', SchemaMap),
    ('', LossConfig),
    ('', TrainConfig),
    ('', ModelConfig),
    ('vae_', VAEConfig),
    ('', EvalConfig),
)


class RunConfig(Base):
    """object: RunConfig"""

    log_level: Literal['DEBUG', 'INFO', 'WARNING', 'ERROR'] = 'INFO'
    out: pathlib.Path = pathlib.Path('run')
    input_csv: Optional[pathlib.Path] = None
    dataset: Optional[pathlib.Path] = None
    checkpoint: Optional[pathlib.Path] = None
    resume: bool = False

    ratios: Tuple[float, float, float] = (0.7, 0.15, 0.15)
    period_start: Optional[date] = None
    period_end: Optional[date] = None
    interval_days: conint(ge=1) = 7  # type: ignore[valid-type]

    generator: str = 'diag'
    num_sequences: conint(ge=1) = 32  # type: ignore[valid-type]
    hotspot_mass: float = 1.0
    max_offset: Optional[conint(ge=0)] = None  # type: ignore[valid-type]
    correlated_intensity: float = 2.0
    correlated_hotspots: conint(ge=1) = 2  # type: ignore[valid-type]

    # grid
    bbox: Optional[Tuple[float, float, float, float]] = None
    h: Optional[int] = None
    w: Optional[int] = None
    categories: Optional[Tuple[str, ...]] = None
    num_categories: Optional[int] = None
    m: Optional[int] = None
    n: Optional[int] = None

    # csv column mapping
    csv_timestamp: Optional[str] = None
    csv_latitude: Optional[str] = None
    csv_longitude: Optional[str] = None
    csv_category: Optional[str] = None
    csv_time: Optional[str] = None
    csv_timestamp_format: Optional[str] = None
    csv_timezone: Optional[str] = None

    # losses
    lambda_: Optional[float] = Field(None, alias='lambda')
    lambda_c: Optional[float] = None
    omega: Optional[float] = None
    num_negatives: Optional[int] = None
    contrast: Optional[str] = None

    # training
    learning_rate: Optional[float] = None
    epochs: Optional[int] = None
    batch_size: Optional[int] = None
    seed: Optional[int] = None
    optimizer: Optional[str] = None
    augment: Optional[bool] = None
    adapter: Optional[str] = None
    patience: Optional[int] = None
    max_steps: Optional[int] = None
    fixed_contrast_samples: Optional[bool] = None

    # model
    encoder_layers: Optional[int] = None
    bottleneck_width: Optional[int] = None
    bottleneck_activation: Optional[str] = None

    # dimension adapter
    vae_latent_channels: Optional[int] = None
    vae_hidden_channels: Optional[int] = None
    vae_epochs: Optional[int] = None
    vae_batch_size: Optional[int] = None
    vae_learning_rate: Optional[float] = None
    vae_kl_weight: Optional[float] = None

    # evaluation
    prediction_mode: Optional[str] = None
    split: Optional[str] = None
    baseline: Optional[str] = None
    probe: Optional[str] = None
    turns: Optional[int] = None
    probe_category: Optional[int] = None
    probe_sequence: Optional[int] = None
    probe_offset: Optional[int] = None
    ridge: Optional[float] = None

    class Config:
        extra = Extra.forbid
        allow_population_by_field_name = True

    @validator('log_level', pre=True)
    def normalize_level(cls, v: Any) -> Any:
        return v.strip().upper() if isinstance(v, str) else v

    @validator('bbox', 'categories', 'ratios', pre=True)
    def split_lists(cls, v: Any) -> Any:
        if isinstance(v, str):
            return tuple(item.strip() for item in v.split(',') if item.strip())
        return v

    @property
    def dataset_path(self) -> pathlib.Path:
        return self.dataset if self.dataset is not None else self.out / DATASET_FILE

    @property
    def interval(self) -> timedelta:
        return timedelta(days=self.interval_days)

    @property
    def period(self) -> Tuple[Optional[datetime], Optional[datetime]]:
        return _midnight(self.period_start), _midnight(self.period_end)

    def _section(self, prefix: str, model: Type[Base]) -> Dict[str, Any]:
        values = {}
        for name in model.__fields__:
            value = getattr(self, prefix + name, None)
            if value is not None:
                values[name] = value
        return values

    def grid_spec(self) -> GridSpec:
        return GridSpec(**{**self._section('', GridSpec), 'interval': self.interval})

    def schema_map(self) -> SchemaMap:
        return SchemaMap(**self._section('csv_', SchemaMap))

    def loss_config(self) -> LossConfig:
        return LossConfig(**self._section('', LossConfig))

    def train_config(self) -> TrainConfig:
        return TrainConfig(**self._section('', TrainConfig))

    def model_config(self) -> ModelConfig:
        return ModelConfig(**self._section('', ModelConfig))

    def vae_config(self) -> VAEConfig:
        return VAEConfig(**self._section('vae_', VAEConfig))

    def eval_config(self) -> EvalConfig:
        return EvalConfig(**self._section('', EvalConfig))

    def echo(self) -> Dict[str, Any]:
        """Every key with the value the run actually used, defaults resolved."""
        echo: Dict[str, Any] = {}
        for name in self.__fields__:
            if name not in _component_keys():
                echo[name] = _plain(getattr(self, name))
        components = (
            ('', self.grid_spec()),
            ('csv_', self.schema_map()),
            ('', self.loss_config()),
            ('', self.train_config()),
            ('', self.model_config()),
            ('vae_', self.vae_config()),
            ('', self.eval_config()),
        )
        for prefix, component in components:
            for name, value in component.dict(by_alias=True).items():
                if isinstance(value, timedelta):
                    continue
                echo[prefix + name] = _plain(value)
        return echo


def _midnight(day: Optional[date]) -> Optional[datetime]:
    return datetime(day.year, day.month, day.day) if day is not None else None


def _plain(value: Any) -> Any:
    if isinstance(value, pathlib.PurePath):
        return str(value)
    if isinstance(value, date):
        return value.isoformat()
    if isinstance(value, tuple):
        return [_plain(item) for item in value]
    return value


def _component_keys() -> Iterable[str]:
    keys = set()
    for prefix, model in SECTIONS:
        keys.update(prefix + name for name in model.__fields__)
    return keys


def valid_keys() -> Iterable[str]:
    keys = set()
    for name, field in RunConfig.__fields__.items():
        keys.add(field.alias)
        keys.add(name)
    return keys


def parse_config_text(text: str) -> Dict[str, str]:
    pairs: Dict[str, str] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition('=')
        key = key.strip()
        if not sep or not key:
            raise ConfigurationError(f'Line {number}: expected "key = value", got {raw!r}')
        if key in pairs:
            raise ConfigurationError(f'Line {number}: key {key!r} is set twice')
        pairs[key] = value.strip()
    return pairs


def run_config_from_pairs(pairs: Mapping[str, Any]) -> RunConfig:
    unknown = set(pairs) - set(valid_keys())
    if unknown:
        raise UnknownConfigKeyError(unknown)
    values = {key: value for key, value in pairs.items() if value != ''}
    return RunConfig.parse_obj(values)


def load_run_config(
    path: Optional[PathLike] = None, overrides: Optional[Mapping[str, Any]] = None
) -> RunConfig:
    """Reads the config file (if any) and layers non-empty ``overrides`` on top."""
    pairs: Dict[str, Any] = {}
    if path is not None:
        file = pathlib.Path(path)
        if not file.is_file():
            raise ConfigurationError(f'Config file {file} does not exist')
        pairs.update(parse_config_text(file.read_text(encoding='utf-8')))
    for key, value in (overrides or {}).items():
        if value is not None:
            pairs[key] = value
    return run_config_from_pairs(pairs)
