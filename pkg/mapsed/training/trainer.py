"""
Optimization loop: positives by frame permutation, negatives from other training
sequences, loss ``recon + lambda_c * contrastive`` averaged over the batch.

Random draws happen on the calling thread in batch order before any forward pass, and
per-sequence gradients are summed in batch order, so runs are bitwise reproducible
whatever the number of worker threads.
"""
from __future__ import annotations

import logging
import math
import pathlib
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence

import numpy as np

from mapsed.data.augmentation import augment
from mapsed.data.dataset import Dataset
from mapsed.data.types import OccurrenceSequence
from mapsed.losses import LossConfig, contrastive_term, net_loss, recon_loss
from mapsed.nn.adapter import Adapter, VAEAdapter, make_adapter, vae_pretrain
from mapsed.nn.checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from mapsed.nn.config import ModelConfig, VAEConfig
from mapsed.nn.exceptions import CheckpointFormatError, DivergenceError
from mapsed.nn.model import encoder_layer, forward, predict
from mapsed.nn.optim import make_optimizer
from mapsed.nn.params import (
    ModelParams,
    ModelShape,
    NetworkParams,
    gradients_of,
    init_model_params,
)
from mapsed.tensor.tape import Tensor, backward
from mapsed.training.config import TrainConfig
from mapsed.training.report import write_report
from mapsed.training.sampling import negative_indices, positive_permutation
from mapsed.training.state import FixedDraws, TrainState
from mapsed.types.exceptions import ConfigurationError
from mapsed.utils.parallel import WorkerPool

logger = logging.getLogger('mapsed.training')

BEST_CHECKPOINT = 'model.ckpt'
LAST_CHECKPOINT = 'last.ckpt'
REPORT_FILE = 'report.txt'


@dataclass
class StepContext:
    sequences: Sequence[OccurrenceSequence]
    """Training split; negatives are drawn from it"""

    adapter: Adapter
    model_config: ModelConfig = field(default_factory=ModelConfig)
    augment: bool = False
    pool: Optional[WorkerPool] = None


@dataclass
class SequenceJob:
    x: Tensor
    y: Tensor
    positive: Optional[Tensor]
    negatives: List[Tensor]


@dataclass
class SequenceResult:
    grads: Dict[str, Tensor]
    loss: float
    recon: float
    contrastive: float
    semantic_norm: float


@dataclass
class TrainResult:
    state: TrainState
    best_params: ModelParams
    adapter: Adapter
    model_config: ModelConfig


def _prepare_job(
    state: TrainState, index: int, loss_config: LossConfig, context: StepContext
) -> SequenceJob:
    seq = context.sequences[index]
    if context.augment:
        seq = augment(seq, state.rng)
    if loss_config.lambda_c == 0:
        return SequenceJob(x=seq.X, y=seq.Y, positive=None, negatives=[])

    if state.fixed_draws is not None:
        order, negatives = state.fixed_draws[index]
    else:
        order = positive_permutation(seq.m, state.rng)
        negatives = negative_indices(
            len(context.sequences), index, loss_config.num_negatives, state.rng
        )
    return SequenceJob(
        x=seq.X,
        y=seq.Y,
        positive=seq.X[order],
        negatives=[context.sequences[j].X for j in negatives],
    )


def _run_job(
    job: SequenceJob, params: ModelParams, loss_config: LossConfig, context: StepContext
) -> SequenceResult:
    adapter = context.adapter
    network, bound = NetworkParams.bind(params, context.model_config.bottleneck_activation)
    bundle, latent_prediction = forward(adapter.encode(job.x), network)
    recon = recon_loss(job.y, adapter.decode(latent_prediction), loss_config.lambda_)

    if job.positive is None:
        loss = recon
        contrastive = 0.0
    else:
        first_layer = network.encoder[0]
        positive = encoder_layer(adapter.encode(job.positive), first_layer).semantics
        negatives = [
            encoder_layer(adapter.encode(negative), first_layer).semantics
            for negative in job.negatives
        ]
        term = contrastive_term(loss_config, bundle.semantics, positive, negatives)
        loss = net_loss(recon, term, loss_config.lambda_c)
        contrastive = term.item()

    backward(loss)
    return SequenceResult(
        grads=gradients_of(bound),
        loss=loss.item(),
        recon=recon.item(),
        contrastive=contrastive,
        semantic_norm=float(np.linalg.norm(bundle.semantics.value)),
    )


def train_step(
    state: TrainState, batch: Sequence[int], loss_config: LossConfig, context: StepContext
) -> TrainState:
    """One optimizer update on the mean gradient of ``batch`` (indices into the split)."""
    if not batch:
        raise ConfigurationError('A training batch must hold at least one sequence')
    jobs = [_prepare_job(state, index, loss_config, context) for index in batch]
    params = state.params

    def run(job: SequenceJob) -> SequenceResult:
        return _run_job(job, params, loss_config, context)

    if context.pool is not None:
        results = context.pool.ordered_map(run, jobs)
    else:
        results = [run(job) for job in jobs]

    size = len(results)
    loss = sum(result.loss for result in results) / size
    if not math.isfinite(loss):
        raise DivergenceError(
            f'Training loss became {loss} at step {state.step + 1}',
            checkpoint=state.last_checkpoint,
        )

    grads: Dict[str, Tensor] = {}
    for result in results:
        for name, grad in result.grads.items():
            grads[name] = grads[name] + grad if name in grads else grad.copy()
    mean_grads = {name: grad / size for name, grad in grads.items()}

    state.params = state.optimizer.step(params, mean_grads)
    state.step += 1
    state.history.append(
        epoch=state.epoch,
        loss=loss,
        recon=sum(result.recon for result in results) / size,
        contrastive=sum(result.contrastive for result in results) / size,
        semantic_norm=sum(result.semantic_norm for result in results) / size,
    )
    logger.debug(
        'step %d loss %.6f recon %.6f contrastive %.6f',
        state.step,
        loss,
        state.history.recon[-1],
        state.history.contrastive[-1],
    )
    return state


def validation_loss(
    sequences: Sequence[OccurrenceSequence],
    params: ModelParams,
    adapter: Adapter,
    loss_config: LossConfig,
    model_config: ModelConfig,
) -> float:
    """Mean reconstruction loss without recording a tape."""
    losses = []
    for seq in sequences:
        prediction = predict(seq.X, params, adapter, model_config)
        losses.append(recon_loss(seq.Y, prediction, loss_config.lambda_).item())
    return float(np.mean(losses))


def draw_fixed_samples(
    state: TrainState, sequences: Sequence[OccurrenceSequence], loss_config: LossConfig
) -> FixedDraws:
    draws: FixedDraws = {}
    for index, seq in enumerate(sequences):
        order = positive_permutation(seq.m, state.rng)
        negatives = negative_indices(len(sequences), index, loss_config.num_negatives, state.rng)
        draws[index] = (order, negatives)
    return draws


def config_echo(
    train_config: TrainConfig,
    loss_config: LossConfig,
    model_config: ModelConfig,
    vae_config: Optional[VAEConfig] = None,
) -> Dict[str, Any]:
    echo: Dict[str, Any] = {}
    echo.update(train_config.dict())
    echo.update(loss_config.dict(by_alias=True))
    echo.update(model_config.dict())
    if vae_config is not None and train_config.adapter == VAEAdapter.mode:
        echo.update({f'vae_{key}': value for key, value in vae_config.dict().items()})
    return echo


def _build_adapter(
    dataset: Dataset, train_config: TrainConfig, vae_config: VAEConfig, rng: np.random.Generator
) -> Adapter:
    adapter = make_adapter(train_config.adapter, vae_config)
    if isinstance(adapter, VAEAdapter):
        frames = np.concatenate([np.concatenate([seq.X, seq.Y]) for seq in dataset.train])
        adapter = vae_pretrain(frames, vae_config, rng)
    return adapter


def _checkpoint_of(
    state: TrainState, params: ModelParams, adapter: Adapter, echo: Mapping[str, Any]
) -> Checkpoint:
    meta = state.counters_meta()
    meta['config'] = dict(echo)
    return Checkpoint(
        params=params,
        adapter_params=adapter.params,
        moments=dict(state.optimizer.moments),
        meta=meta,
    )


def train_loop(
    dataset: Dataset,
    train_config: TrainConfig,
    loss_config: LossConfig,
    model_config: Optional[ModelConfig] = None,
    vae_config: Optional[VAEConfig] = None,
    output_dir: Optional[pathlib.Path] = None,
    resume: bool = False,
    echo: Optional[Mapping[str, Any]] = None,
    pool: Optional[WorkerPool] = None,
) -> TrainResult:
    """
    Runs epochs of shuffled batches until ``epochs``, ``max_steps`` or ``patience``
    stops it.

    With ``output_dir`` the best-validation parameters go to ``model.ckpt``, the
    resumable state of the latest epoch to ``last.ckpt`` and the step log to
    ``report.txt``. ``resume`` continues from ``last.ckpt``.
    """
    model_config = model_config or ModelConfig()
    vae_config = vae_config or VAEConfig()
    sequences = dataset.train
    if not sequences:
        raise ConfigurationError('The training split holds no sequences')
    if train_config.augment and dataset.spec.h != dataset.spec.w:
        raise ConfigurationError(
            f'Rotation augmentation needs a square grid, got {dataset.spec.h}x{dataset.spec.w}'
        )
    echo = dict(echo) if echo is not None else config_echo(
        train_config, loss_config, model_config, vae_config
    )

    rng = np.random.default_rng(train_config.seed)
    last_path = output_dir / LAST_CHECKPOINT if output_dir is not None else None
    restored = None
    if resume:
        if last_path is None or not last_path.is_file():
            raise CheckpointFormatError(f'No checkpoint to resume from at {last_path}')
        restored = load_checkpoint(last_path)

    if restored is not None and restored.adapter_params is not None:
        adapter: Adapter = VAEAdapter(vae_config, restored.adapter_params)
    elif restored is not None:
        adapter = make_adapter(train_config.adapter, vae_config)
    else:
        adapter = _build_adapter(dataset, train_config, vae_config, rng)

    spec = dataset.spec
    shape = ModelShape(spec.m, spec.n, *adapter.latent_shape(spec.c, spec.h, spec.w))
    params = init_model_params(shape, rng, model_config)
    optimizer = make_optimizer(train_config.optimizer, train_config.learning_rate)
    state = TrainState(params=params, optimizer=optimizer, rng=rng)
    best_params = params

    if restored is not None:
        state.params = restored.params
        state.restore_counters(restored.meta)
        optimizer.load_state(int(restored.meta['optimizer_steps']), restored.moments)
        state.last_checkpoint = str(last_path)
        best_path = output_dir / BEST_CHECKPOINT if output_dir is not None else None
        if best_path is not None and best_path.is_file():
            best_params = load_checkpoint(best_path).params
        else:
            best_params = state.params
        logger.info('Resuming at epoch %d, step %d', state.epoch, state.step)
    elif train_config.fixed_contrast_samples and loss_config.lambda_c > 0:
        state.fixed_draws = draw_fixed_samples(state, sequences, loss_config)

    context = StepContext(
        sequences=sequences,
        adapter=adapter,
        model_config=model_config,
        augment=train_config.augment,
        pool=pool,
    )
    held_out = dataset.val
    if not held_out:
        logger.warning(
            'The validation split is empty; scoring epochs on the %d training sequences',
            len(sequences),
        )
        held_out = sequences

    def out_of_steps() -> bool:
        return train_config.max_steps is not None and state.step >= train_config.max_steps

    while state.epoch < train_config.epochs and not out_of_steps():
        order = state.rng.permutation(len(sequences))
        for start in range(0, len(order), train_config.batch_size):
            if out_of_steps():
                break
            batch = [int(i) for i in order[start : start + train_config.batch_size]]
            train_step(state, batch, loss_config, context)

        score = validation_loss(held_out, state.params, adapter, loss_config, model_config)
        state.validation.append(score)
        improved = state.best_validation is None or score < state.best_validation
        if improved:
            state.best_validation = score
            state.best_epoch = state.epoch
            best_params = state.params
        logger.info(
            'Epoch %d: loss %.6f, validation recon %.6f%s',
            state.epoch,
            state.history.loss[-1] if len(state.history) else float('nan'),
            score,
            ' (best)' if improved else '',
        )
        state.epoch += 1

        if output_dir is not None:
            if improved:
                save_checkpoint(
                    output_dir / BEST_CHECKPOINT, _checkpoint_of(state, best_params, adapter, echo)
                )
            last = output_dir / LAST_CHECKPOINT
            save_checkpoint(last, _checkpoint_of(state, state.params, adapter, echo))
            state.last_checkpoint = str(last)
            write_report(output_dir / REPORT_FILE, echo, state)

        if train_config.patience is not None and state.epochs_since_best >= train_config.patience:
            logger.info('No validation improvement for %d epochs, stopping', train_config.patience)
            break

    if output_dir is not None and state.epoch == 0:
        best = _checkpoint_of(state, best_params, adapter, echo)
        save_checkpoint(output_dir / BEST_CHECKPOINT, best)
        write_report(output_dir / REPORT_FILE, echo, state)
    return TrainResult(
        state=state, best_params=best_params, adapter=adapter, model_config=model_config
    )
