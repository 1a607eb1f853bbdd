from .commands import COMMANDS, cmd_build_dataset, cmd_eval, cmd_synth, cmd_train
from .config import RunConfig, load_run_config, parse_config_text
from .exceptions import InvalidGeneratorError, UnknownConfigKeyError
from .main import build_parser, main

__all__ = (
    'COMMANDS',
    'RunConfig',
    'load_run_config',
    'parse_config_text',
    'cmd_build_dataset',
    'cmd_synth',
    'cmd_train',
    'cmd_eval',
    'build_parser',
    'main',
    'UnknownConfigKeyError',
    'InvalidGeneratorError',
)
