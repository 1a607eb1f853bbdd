from .config import TrainConfig
from .report import read_report_rows, render_report, write_report
from .sampling import make_positive, negative_indices, positive_permutation, sample_negatives
from .state import StepHistory, TrainState
from .trainer import (
    BEST_CHECKPOINT,
    LAST_CHECKPOINT,
    REPORT_FILE,
    StepContext,
    TrainResult,
    config_echo,
    train_loop,
    train_step,
    validation_loss,
)

__all__ = (
    'TrainConfig',
    'TrainState',
    'StepHistory',
    'StepContext',
    'TrainResult',
    'train_step',
    'train_loop',
    'validation_loss',
    'config_echo',
    'positive_permutation',
    'make_positive',
    'negative_indices',
    'sample_negatives',
    'render_report',
    'write_report',
    'read_report_rows',
    'BEST_CHECKPOINT',
    'LAST_CHECKPOINT',
    'REPORT_FILE',
)
