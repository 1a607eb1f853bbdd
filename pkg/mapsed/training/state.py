from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from mapsed.nn.optim import Optimizer
from mapsed.nn.params import ModelParams

# (positive permutation, negative indices) per training sequence
FixedDraws = Dict[int, Tuple[List[int], List[int]]]


@dataclass
class StepHistory:
    epoch: List[int] = field(default_factory=list)
    loss: List[float] = field(default_factory=list)
    recon: List[float] = field(default_factory=list)
    contrastive: List[float] = field(default_factory=list)
    semantic_norm: List[float] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.loss)

    def append(
        self, epoch: int, loss: float, recon: float, contrastive: float, semantic_norm: float
    ) -> None:
        self.epoch.append(epoch)
        self.loss.append(loss)
        self.recon.append(recon)
        self.contrastive.append(contrastive)
        self.semantic_norm.append(semantic_norm)

    def to_meta(self) -> Dict[str, List[Any]]:
        return {
            'epoch': list(self.epoch),
            'loss': list(self.loss),
            'recon': list(self.recon),
            'contrastive': list(self.contrastive),
            'semantic_norm': list(self.semantic_norm),
        }

    @classmethod
    def from_meta(cls, meta: Dict[str, List[Any]]) -> StepHistory:
        return cls(
            epoch=[int(v) for v in meta['epoch']],
            loss=[float(v) for v in meta['loss']],
            recon=[float(v) for v in meta['recon']],
            contrastive=[float(v) for v in meta['contrastive']],
            semantic_norm=[float(v) for v in meta['semantic_norm']],
        )


@dataclass
class TrainState:
    """Everything the loop mutates; serializable for exact resumption."""

    params: ModelParams
    optimizer: Optimizer
    rng: np.random.Generator
    epoch: int = 0
    step: int = 0
    history: StepHistory = field(default_factory=StepHistory)
    validation: List[float] = field(default_factory=list)
    best_validation: Optional[float] = None
    best_epoch: Optional[int] = None
    fixed_draws: Optional[FixedDraws] = None
    last_checkpoint: Optional[str] = None

    @property
    def epochs_since_best(self) -> int:
        if self.best_epoch is None:
            return self.epoch
        return self.epoch - self.best_epoch - 1

    def counters_meta(self) -> Dict[str, Any]:
        draws = None
        if self.fixed_draws is not None:
            draws = {str(i): [list(p), list(n)] for i, (p, n) in self.fixed_draws.items()}
        return {
            'epoch': self.epoch,
            'step': self.step,
            'optimizer': self.optimizer.name,
            'optimizer_steps': self.optimizer.step_count,
            'rng': rng_to_meta(self.rng),
            'history': self.history.to_meta(),
            'validation': list(self.validation),
            'best_validation': self.best_validation,
            'best_epoch': self.best_epoch,
            'fixed_draws': draws,
        }

    def restore_counters(self, meta: Dict[str, Any]) -> None:
        self.epoch = int(meta['epoch'])
        self.step = int(meta['step'])
        self.rng = rng_from_meta(meta['rng'])
        self.history = StepHistory.from_meta(meta['history'])
        self.validation = [float(v) for v in meta['validation']]
        self.best_validation = meta.get('best_validation')
        self.best_epoch = meta.get('best_epoch')
        draws = meta.get('fixed_draws')
        if draws is not None:
            self.fixed_draws = {int(i): (list(p), list(n)) for i, (p, n) in draws.items()}


def rng_to_meta(rng: np.random.Generator) -> Dict[str, Any]:
    """Bit generator state with its 128-bit integers written as strings."""
    return _stringify(rng.bit_generator.state)


def rng_from_meta(meta: Dict[str, Any]) -> np.random.Generator:
    state = _integerify(meta)
    bit_generator = getattr(np.random, state['bit_generator'])()
    bit_generator.state = state
    return np.random.Generator(bit_generator)


def _stringify(value: Any) -> Any:
    if isinstance(value, dict):
        return {key: _stringify(item) for key, item in value.items()}
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return value


def _integerify(value: Any) -> Any:
    if isinstance(value, dict):
        return {key: _integerify(item) for key, item in value.items()}
    if isinstance(value, str) and value.lstrip('-').isdigit():
        return int(value)
    return value
