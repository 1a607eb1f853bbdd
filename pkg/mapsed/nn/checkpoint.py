from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from mapsed.nn.exceptions import CheckpointFormatError
from mapsed.nn.params import ModelParams
from mapsed.tensor.tape import Tensor
from mapsed.utils.container import (
    Container,
    ContainerFormatError,
    PathLike,
    load_container,
    save_container,
)

logger = logging.getLogger('mapsed.training')

CHECKPOINT_MAGIC = b'MAPSEDCK'
_PARAMS = 'params'
_ADAPTER = 'adapter'
_MOMENTS = 'moments'


@dataclass
class Checkpoint:
    """
    Model parameters plus everything needed to resume or reproduce a run.

    ``meta`` carries the config echo, counters, RNG state and histories; it has to be
    JSON serializable.
    """

    params: ModelParams
    adapter_params: Optional[ModelParams] = None
    moments: Dict[str, Tensor] = field(default_factory=dict)
    meta: Dict[str, Any] = field(default_factory=dict)


def save_checkpoint(path: PathLike, checkpoint: Checkpoint) -> None:
    arrays: Dict[str, np.ndarray] = dict(checkpoint.params.with_prefix(_PARAMS).items())
    if checkpoint.adapter_params is not None:
        arrays.update(checkpoint.adapter_params.with_prefix(_ADAPTER).items())
    for key, value in checkpoint.moments.items():
        arrays[f'{_MOMENTS}.{key}'] = value
    meta = dict(checkpoint.meta)
    meta['kind'] = 'checkpoint'
    meta['has_adapter'] = checkpoint.adapter_params is not None
    save_container(path, CHECKPOINT_MAGIC, Container(meta=meta, arrays=arrays))
    logger.debug('Checkpoint written to %s', path)


def load_checkpoint(path: PathLike) -> Checkpoint:
    try:
        container = load_container(path, CHECKPOINT_MAGIC)
    except FileNotFoundError:
        raise CheckpointFormatError(f'Checkpoint {path} does not exist') from None
    except ContainerFormatError as ex:
        raise CheckpointFormatError(f'{path}: {ex}') from ex

    stored = ModelParams(container.arrays)
    params = stored.strip_prefix(_PARAMS)
    if not len(params):
        raise CheckpointFormatError(f'{path} holds no model parameters')
    adapter = stored.strip_prefix(_ADAPTER) if container.meta.get('has_adapter') else None
    moments = dict(stored.strip_prefix(_MOMENTS).items())
    return Checkpoint(params=params, adapter_params=adapter, moments=moments, meta=container.meta)
