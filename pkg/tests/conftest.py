from typing import Any, Callable, List

import numpy as np
import pytest

from mapsed.data.dataset import Dataset, from_sequences
from mapsed.data.synthetic import synth_moving_hotspot
from mapsed.data.types import GridSpec, OccurrenceSequence
from mapsed.nn.config import ModelConfig
from mapsed.nn.params import (
    MABParams,
    ModelParams,
    ModelShape,
    ParamInitializer,
    init_model_params,
)
from tests.settings import TEST_SEED


def pytest_addoption(parser: Any) -> None:
    parser.addoption(
        '--runslow', action='store_true', default=False, help='run trained-run acceptance checks'
    )


def pytest_collection_modifyitems(config: Any, items: List[Any]) -> None:
    if config.getoption('--runslow'):
        return
    skip_slow = pytest.mark.skip(reason='trained-run check, pass --runslow to run it')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip_slow)


MABFactory = Callable[..., MABParams]


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(TEST_SEED)


@pytest.fixture()
def make_mab(rng: np.random.Generator) -> MABFactory:
    """Frozen block parameters; ``zero=True`` zeroes every kernel and bias."""

    def factory(channels: int, zero: bool = False) -> MABParams:
        init = ParamInitializer(rng)
        init.mab('block', channels)
        params = init.build()
        if zero:
            params = params.map(lambda name, value: np.zeros_like(value))
        return MABParams.from_bound(params.bind(requires_grad=False), 'block')

    return factory


@pytest.fixture()
def tiny_shape() -> ModelShape:
    return ModelShape(m=3, n=2, c=2, h=4, w=4)


@pytest.fixture()
def tiny_params(tiny_shape: ModelShape, rng: np.random.Generator) -> ModelParams:
    return init_model_params(tiny_shape, rng, ModelConfig())


@pytest.fixture()
def hotspot_spec() -> GridSpec:
    return GridSpec(h=6, w=6, num_categories=1, m=3, n=2)


@pytest.fixture()
def hotspot_sequences(
    hotspot_spec: GridSpec, rng: np.random.Generator
) -> List[OccurrenceSequence]:
    return synth_moving_hotspot(hotspot_spec, 8, rng)


@pytest.fixture()
def hotspot_dataset(
    hotspot_spec: GridSpec, hotspot_sequences: List[OccurrenceSequence]
) -> Dataset:
    return from_sequences(
        hotspot_spec,
        train=hotspot_sequences[:6],
        val=hotspot_sequences[6:7],
        test=hotspot_sequences[7:],
        generator='diag',
    )
