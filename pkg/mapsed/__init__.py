from importlib import metadata

from .data import Dataset, GridSpec, OccurrenceSequence, build_dataset, load_dataset, save_dataset
from .evaluation import EvalConfig, EvalReport, evaluate
from .losses import LossConfig
from .nn import ModelConfig, VAEConfig, load_checkpoint, predict
from .training import TrainConfig, train_loop
from .types import MapsedError

try:
    __version__ = metadata.version('mapsed')
except metadata.PackageNotFoundError:
    __version__ = '99.99.99'

__all__ = (
    # data
    'Dataset',
    'GridSpec',
    'OccurrenceSequence',
    'build_dataset',
    'save_dataset',
    'load_dataset',
    # configs
    'LossConfig',
    'TrainConfig',
    'ModelConfig',
    'VAEConfig',
    'EvalConfig',
    # pipeline
    'train_loop',
    'predict',
    'load_checkpoint',
    'evaluate',
    'EvalReport',
    # other
    'MapsedError',
    '__version__',
)
