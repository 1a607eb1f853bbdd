from __future__ import annotations

import logging
import pathlib
from typing import Callable, Dict, List, Mapping

import numpy as np

from mapsed.cli.config import RunConfig
from mapsed.cli.exceptions import InvalidGeneratorError
from mapsed.data.dataset import Dataset, build_dataset, from_sequences, load_dataset, save_dataset
from mapsed.data.ingestion import ingest_csv
from mapsed.data.raster import split_boundaries
from mapsed.data.synthetic import GENERATORS, synth_correlated_categories, synth_moving_hotspot
from mapsed.data.types import GridSpec, OccurrenceSequence
from mapsed.evaluation.baselines import (
    Predictor,
    history_predictor,
    lr_baseline_fit,
    model_predictor,
)
from mapsed.evaluation.export import export_probe, export_report
from mapsed.evaluation.probes import dynamics_probe, rotation_probe, semantics_probe
from mapsed.evaluation.report import evaluate
from mapsed.nn.adapter import Adapter, IdentityAdapter, VAEAdapter
from mapsed.nn.checkpoint import Checkpoint, load_checkpoint
from mapsed.nn.config import ModelConfig
from mapsed.training.trainer import BEST_CHECKPOINT, train_loop
from mapsed.types.exceptions import ConfigurationError
from mapsed.utils.parallel import WorkerPool

logger = logging.getLogger('mapsed.cli')

EVAL_DIR = 'eval'


def _print_summary(dataset: Dataset, path: pathlib.Path) -> None:
    summary = dataset.summary
    print(f'dataset: {path}')
    print(f'categories: {", ".join(summary.categories)}')
    if summary.period_start is not None:
        print(f'period: {summary.period_start} .. {summary.period_end}')
    for name, split in summary.splits.items():
        print(f'{name}: {split.frames} frames, {split.sequences} sequences')


def cmd_build_dataset(run: RunConfig) -> pathlib.Path:
    if run.input_csv is None:
        raise ConfigurationError('build-dataset needs the input_csv key')
    records = ingest_csv(run.input_csv, run.schema_map())
    period_start, period_end = run.period
    dataset = build_dataset(records.records, run.grid_spec(), run.ratios, period_start, period_end)
    dataset.summary.skipped_rows = records.skipped

    path = run.dataset_path
    path.parent.mkdir(parents=True, exist_ok=True)
    save_dataset(path, dataset, config=run.echo())
    _print_summary(dataset, path)
    return path


def _synthesize(
    run: RunConfig, spec: GridSpec, count: int, rng: np.random.Generator
) -> List[OccurrenceSequence]:
    if run.generator == 'diag':
        return synth_moving_hotspot(
            spec, count, rng, mass=run.hotspot_mass, max_offset=run.max_offset
        )
    return synth_correlated_categories(
        spec, count, rng, intensity=run.correlated_intensity, hotspots=run.correlated_hotspots
    )


def cmd_synth(run: RunConfig) -> pathlib.Path:
    if run.generator not in GENERATORS:
        raise InvalidGeneratorError(run.generator, GENERATORS)
    spec = run.grid_spec()
    rng = np.random.default_rng(run.train_config().seed)
    sequences = _synthesize(run, spec, run.num_sequences, rng)
    val_start, test_start = split_boundaries(len(sequences), run.ratios)
    dataset = from_sequences(
        spec,
        train=sequences[:val_start],
        val=sequences[val_start:test_start],
        test=sequences[test_start:],
        generator=run.generator,
    )

    path = run.dataset_path
    path.parent.mkdir(parents=True, exist_ok=True)
    save_dataset(path, dataset, config=run.echo())
    _print_summary(dataset, path)
    return path


def cmd_train(run: RunConfig) -> pathlib.Path:
    dataset = load_dataset(run.dataset_path)
    run.out.mkdir(parents=True, exist_ok=True)
    with WorkerPool() as pool:
        result = train_loop(
            dataset,
            run.train_config(),
            run.loss_config(),
            model_config=run.model_config(),
            vae_config=run.vae_config(),
            output_dir=run.out,
            resume=run.resume,
            echo=run.echo(),
            pool=pool,
        )
    state = result.state
    print(f'epochs: {state.epoch}, steps: {state.step}')
    if state.best_validation is not None:
        print(f'best validation recon: {state.best_validation:.6g} (epoch {state.best_epoch})')
    return run.out / BEST_CHECKPOINT


def _adapter_of(run: RunConfig, checkpoint: Checkpoint) -> Adapter:
    if checkpoint.adapter_params is not None:
        return VAEAdapter(run.vae_config(), checkpoint.adapter_params)
    return IdentityAdapter()


def _model_config_of(run: RunConfig, checkpoint: Checkpoint) -> ModelConfig:
    """The architecture the checkpoint was trained with, when its echo records it."""
    trained = checkpoint.meta.get('config') or {}
    values = run.model_config().dict()
    values.update({key: trained[key] for key in ModelConfig.__fields__ if key in trained})
    return ModelConfig(**values)


def cmd_eval(run: RunConfig) -> pathlib.Path:
    settings = run.eval_config()
    dataset = load_dataset(run.dataset_path)
    checkpoint_path = run.checkpoint or run.out / BEST_CHECKPOINT
    checkpoint = load_checkpoint(checkpoint_path)
    sequences = dataset.split(settings.split)
    categories = list(dataset.spec.categories)
    echo = run.echo()
    echo['checkpoint'] = str(checkpoint_path)
    out = run.out / EVAL_DIR

    predictor = model_predictor(
        checkpoint.params, _adapter_of(run, checkpoint), _model_config_of(run, checkpoint)
    )
    with WorkerPool() as pool:
        report = evaluate(predictor, sequences, categories, settings.prediction_mode, pool)
        report.config = echo
        export_report(out, report)

        if settings.baseline is not None:
            baselines: Dict[str, Callable[[], Predictor]] = {
                'history': lambda: history_predictor(dataset.spec.n),
                'lr': lambda: lr_baseline_fit(dataset.train, ridge=settings.ridge),
            }
            baseline = baselines[settings.baseline]()
            scored = evaluate(baseline, sequences, categories, settings.prediction_mode, pool)
            scored.config = echo
            export_report(out, scored, prefix=f'{settings.baseline}_')

        if settings.probe == 'rotation':
            rotated = rotation_probe(
                predictor, sequences, settings.turns, categories, settings.prediction_mode, pool
            )
            rotated.config = echo
            export_report(out, rotated, prefix='rotation_')

    if settings.probe == 'semantics':
        if settings.probe_sequence >= len(sequences):
            raise ConfigurationError(
                f'probe_sequence {settings.probe_sequence} is outside the '
                f'{len(sequences)} {settings.split} sequences'
            )
        result = semantics_probe(
            predictor,
            sequences[settings.probe_sequence],
            settings.probe_category,
            settings.prediction_mode,
        )
        export_probe(out, 'semantics', result.frames, categories, result.scores, echo)
    elif settings.probe == 'dynamics':
        result = dynamics_probe(
            predictor,
            dataset.spec,
            offset=settings.probe_offset,
            prediction_mode=settings.prediction_mode,
        )
        export_probe(out, 'dynamics', result.frames, categories, result.scores, echo)
        logger.info('Dynamics probe distances: %s', result.scores['distance'])
    return out


COMMANDS: Mapping[str, Callable[[RunConfig], pathlib.Path]] = {
    'build-dataset': cmd_build_dataset,
    'synth': cmd_synth,
    'train': cmd_train,
    'eval': cmd_eval,
}
