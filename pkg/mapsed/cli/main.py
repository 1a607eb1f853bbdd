"""
``mapsed <command> --config run.cfg [overrides]``

Exit status is 0 when the command completes and 1 on any configuration, data or
training error.
"""
from __future__ import annotations

import argparse
import logging
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from mapsed.cli.commands import COMMANDS
from mapsed.cli.config import load_run_config
from mapsed.types.exceptions import MapsedError

logger = logging.getLogger('mapsed.cli')

LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'
OVERRIDES = ('seed', 'out', 'contrast', 'baseline', 'probe', 'turns', 'resume')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='mapsed', description='Sparse spatiotemporal event forecasting'
    )
    commands = parser.add_subparsers(dest='command', required=True)
    for name in COMMANDS:
        command = commands.add_parser(name)
        command.add_argument('--config', help='flat key = value run configuration file')
        command.add_argument('--seed', type=int, default=None)
        command.add_argument('--out', default=None, help='output directory')
        command.add_argument('--contrast', choices=('frobenius', 'dot'), default=None)
        command.add_argument('--baseline', choices=('history', 'lr'), default=None)
        command.add_argument(
            '--probe', choices=('rotation', 'semantics', 'dynamics'), default=None
        )
        command.add_argument('--turns', type=int, default=None, help='quarter turns')
        command.add_argument(
            '--resume', action='store_true', default=None, help='continue from last.ckpt'
        )
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format=LOG_FORMAT)
    overrides: Dict[str, Any] = {key: getattr(args, key) for key in OVERRIDES}
    try:
        run = load_run_config(args.config, overrides)
        logging.getLogger().setLevel(run.log_level)
        logger.debug('Running %s with %s', args.command, run.echo())
        artifact = COMMANDS[args.command](run)
    except (MapsedError, ValidationError) as ex:
        logger.error('%s failed: %s', args.command, ex)
        return 1
    logger.info('%s finished: %s', args.command, artifact)
    return 0
