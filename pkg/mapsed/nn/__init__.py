from .adapter import Adapter, IdentityAdapter, VAEAdapter, make_adapter, vae_pretrain
from .checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from .config import ModelConfig, VAEConfig
from .exceptions import AdapterNotReadyError, CheckpointFormatError, DivergenceError
from .mab import channel_attention, mab_forward, spatial_attention
from .model import (
    LatentBundle,
    concat_breadth,
    concat_depth,
    decode,
    encode,
    encoder_layer,
    forward,
    predict,
)
from .optim import Adam, GradientDescent, Momentum, make_optimizer
from .params import MABParams, ModelParams, ModelShape, NetworkParams, init_model_params

__all__ = (
    'Adapter',
    'IdentityAdapter',
    'VAEAdapter',
    'make_adapter',
    'vae_pretrain',
    'Checkpoint',
    'load_checkpoint',
    'save_checkpoint',
    'ModelConfig',
    'VAEConfig',
    'AdapterNotReadyError',
    'CheckpointFormatError',
    'DivergenceError',
    'spatial_attention',
    'channel_attention',
    'mab_forward',
    'LatentBundle',
    'concat_depth',
    'concat_breadth',
    'encoder_layer',
    'encode',
    'decode',
    'forward',
    'predict',
    'GradientDescent',
    'Momentum',
    'Adam',
    'make_optimizer',
    'MABParams',
    'ModelParams',
    'ModelShape',
    'NetworkParams',
    'init_model_params',
)
