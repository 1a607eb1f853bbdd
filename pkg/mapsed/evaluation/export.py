"""
CSV artifacts of an evaluation run.

Every grid file holds ``h`` rows of ``w`` comma-separated values; the metric table has
the header ``category,rmse,mae`` and one row per category.
"""
from __future__ import annotations

import logging
import pathlib
from typing import Any, Dict, Mapping, Sequence

import numpy as np
import pandas as pd

from mapsed.evaluation.report import EvalReport
from mapsed.tensor.exceptions import DimensionError
from mapsed.utils.compat import json
from mapsed.utils.container import PathLike, write_atomically, write_text_atomically

logger = logging.getLogger('mapsed.evaluation')

FLOAT_FORMAT = '%.12g'
METRICS_FILE = 'metrics.csv'
SUMMARY_FILE = 'summary.json'
METRIC_COLUMNS = ('category', 'rmse', 'mae')


def render_grid(grid: np.ndarray) -> str:
    array = np.asarray(grid, dtype=np.float64)
    if array.ndim != 2:
        raise DimensionError('ndim', 2, array.ndim, operation='render_grid')
    return pd.DataFrame(array).to_csv(
        header=False, index=False, float_format=FLOAT_FORMAT, lineterminator='\n'
    )


def write_grid_csv(path: PathLike, grid: np.ndarray) -> None:
    write_text_atomically(path, render_grid(grid))


def render_metrics(report: EvalReport) -> str:
    frame = pd.DataFrame(report.rows(), columns=list(METRIC_COLUMNS))
    return frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator='\n')


def write_metrics_csv(path: PathLike, report: EvalReport) -> None:
    write_text_atomically(path, render_metrics(report))


def write_frames(
    directory: pathlib.Path, name: str, frames: np.ndarray, categories: Sequence[str]
) -> int:
    """One grid file per (frame, category) pair; returns the number written."""
    written = 0
    for t, frame in enumerate(np.asarray(frames, dtype=np.float64), start=1):
        for k, grid in enumerate(frame):
            label = categories[k] if k < len(categories) else f'category_{k}'
            write_grid_csv(directory / f'{name}_t{t}_{_slug(label)}.csv', grid)
            written += 1
    return written


def _slug(label: str) -> str:
    return ''.join(ch if ch.isalnum() or ch in '-_' else '_' for ch in label)


def summary_of(report: EvalReport) -> Dict[str, Any]:
    scores = {
        key: np.asarray(value).tolist() if isinstance(value, np.ndarray) else value
        for key, value in report.scores.items()
    }
    return {
        'categories': list(report.categories),
        'macro_rmse': report.macro_rmse,
        'macro_mae': report.macro_mae,
        'scores': scores,
        'config': dict(report.config),
    }


def export_report(directory: PathLike, report: EvalReport, prefix: str = '') -> pathlib.Path:
    """Writes metrics, error heatmaps, probe frames and a JSON summary under ``directory``."""
    root = pathlib.Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    heatmaps = root / 'heatmaps'
    heatmaps.mkdir(exist_ok=True)

    write_metrics_csv(root / f'{prefix}{METRICS_FILE}', report)
    count = write_frames(heatmaps, f'{prefix}abs_error', report.error_grids, report.categories)
    for name, frames in report.frames.items():
        count += write_frames(heatmaps, f'{prefix}{name}', frames, report.categories)
    write_atomically(root / f'{prefix}{SUMMARY_FILE}', json.dumps(summary_of(report)))
    logger.info('Wrote %s and %d grid files to %s', METRICS_FILE, count, root)
    return root


def export_probe(
    directory: PathLike,
    name: str,
    frames: Mapping[str, np.ndarray],
    categories: Sequence[str],
    scores: Mapping[str, Any],
    config: Mapping[str, Any],
) -> pathlib.Path:
    root = pathlib.Path(directory) / name
    root.mkdir(parents=True, exist_ok=True)
    for label, grid in frames.items():
        write_frames(root, label, grid, categories)
    payload = {'scores': dict(scores), 'config': dict(config)}
    write_atomically(root / SUMMARY_FILE, json.dumps(payload))
    logger.info('Wrote %s probe frames to %s', name, root)
    return root
