"""
Plain-text run report.

Layout::

    # mapsed run report
    # <key> = <value>           one line per config key, sorted
    # columns: epoch step loss recon contrastive semantic_norm
    <tab separated row per optimizer step>
    # validation epoch=<e> recon=<value>

The report is rendered from the training state, so a resumed run rewrites exactly the
file an uninterrupted run would have produced.
"""
from __future__ import annotations

from typing import Any, List, Mapping

from mapsed.training.state import TrainState
from mapsed.utils.container import PathLike, write_text_atomically

COLUMNS = ('epoch', 'step', 'loss', 'recon', 'contrastive', 'semantic_norm')


def format_float(value: float) -> str:
    return f'{value:.12g}'


def format_value(value: Any) -> str:
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, (list, tuple)):
        return ','.join(format_value(item) for item in value)
    return str(value)


def render_report(config_echo: Mapping[str, Any], state: TrainState) -> str:
    lines: List[str] = ['# mapsed run report']
    lines.extend(f'# {key} = {format_value(config_echo[key])}' for key in sorted(config_echo))
    lines.append('# columns: ' + ' '.join(COLUMNS))

    history = state.history
    validation_by_epoch = dict(enumerate(state.validation))
    current_epoch = None
    for step in range(len(history)):
        epoch = history.epoch[step]
        if current_epoch is not None and epoch != current_epoch:
            _append_validation(lines, current_epoch, validation_by_epoch)
        current_epoch = epoch
        row = [
            str(epoch),
            str(step + 1),
            format_float(history.loss[step]),
            format_float(history.recon[step]),
            format_float(history.contrastive[step]),
            format_float(history.semantic_norm[step]),
        ]
        lines.append('\t'.join(row))
    if current_epoch is not None:
        _append_validation(lines, current_epoch, validation_by_epoch)
    return '\n'.join(lines) + '\n'


def _append_validation(lines: List[str], epoch: int, validation: Mapping[int, float]) -> None:
    if epoch in validation:
        lines.append(f'# validation epoch={epoch} recon={format_float(validation[epoch])}')


def write_report(path: PathLike, config_echo: Mapping[str, Any], state: TrainState) -> None:
    write_text_atomically(path, render_report(config_echo, state))


def read_report_rows(text: str) -> List[Mapping[str, float]]:
    """Step rows of a rendered report, keyed by column name."""
    rows = []
    for line in text.splitlines():
        if not line or line.startswith('#'):
            continue
        values = line.split('\t')
        rows.append({name: float(value) for name, value in zip(COLUMNS, values)})
    return rows
