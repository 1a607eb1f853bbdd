import pathlib

import pytest

from mapsed.cli.commands import cmd_synth
from mapsed.cli.config import run_config_from_pairs
from mapsed.cli.exceptions import InvalidGeneratorError
from mapsed.cli.main import build_parser, main
from mapsed.data.dataset import load_dataset
from mapsed.utils.compat import json

SYNTH_CONFIG = """
h = 6
w = 6
m = 3
n = 2
num_categories = 1
num_sequences = 8
generator = diag
seed = 5
epochs = 1
batch_size = 2
encoder_layers = 1
learning_rate = 0.01
"""


def write_config(tmp_path: pathlib.Path, text: str, out: pathlib.Path) -> str:
    path = tmp_path / 'run.cfg'
    path.write_text(f'{text}\nout = {out}\n', encoding='utf-8')
    return str(path)


@pytest.fixture()
def out(tmp_path) -> pathlib.Path:
    return tmp_path / 'run'


@pytest.fixture()
def synth_config(tmp_path, out) -> str:
    return write_config(tmp_path, SYNTH_CONFIG, out)


def test_parser_knows_every_command():
    parser = build_parser()

    args = parser.parse_args(['eval', '--probe', 'rotation', '--turns', '1'])

    assert args.command == 'eval'
    assert (args.probe, args.turns, args.resume) == ('rotation', 1, None)
    with pytest.raises(SystemExit):
        parser.parse_args(['fit'])


class TestSynth:
    def test_writes_the_dataset_and_prints_the_summary(self, synth_config, out, capsys):
        assert main(['synth', '--config', synth_config]) == 0

        dataset = load_dataset(out / 'dataset.mds')
        assert [len(dataset.train), len(dataset.val), len(dataset.test)] == [6, 1, 1]
        assert dataset.spec.categories == ('category_0',)
        assert dataset.summary.generator == 'diag'
        printed = capsys.readouterr().out
        assert 'train: 30 frames, 6 sequences' in printed

    def test_same_seed_gives_identical_bytes(self, synth_config, out):
        assert main(['synth', '--config', synth_config]) == 0
        first = (out / 'dataset.mds').read_bytes()

        assert main(['synth', '--config', synth_config]) == 0

        assert (out / 'dataset.mds').read_bytes() == first

    def test_seed_override_changes_the_data(self, synth_config, out):
        main(['synth', '--config', synth_config])
        first = (out / 'dataset.mds').read_bytes()

        main(['synth', '--config', synth_config, '--seed', '6'])

        assert (out / 'dataset.mds').read_bytes() != first

    def test_unknown_generator(self, tmp_path, out):
        config = write_config(tmp_path, SYNTH_CONFIG.replace('diag', 'spiral'), out)

        assert main(['synth', '--config', config]) == 1
        assert not (out / 'dataset.mds').exists()

    def test_unknown_generator_names_the_valid_ones(self):
        with pytest.raises(InvalidGeneratorError) as exc_info:
            cmd_synth(run_config_from_pairs({'generator': 'spiral'}))

        assert 'correlated' in str(exc_info.value)
        assert 'diag' in str(exc_info.value)

    def test_offset_that_leaves_the_grid(self, tmp_path, out):
        config = write_config(tmp_path, SYNTH_CONFIG + 'max_offset = 6\n', out)

        assert main(['synth', '--config', config]) == 1


def test_unknown_config_key_exits_with_failure(tmp_path, out):
    config = write_config(tmp_path, SYNTH_CONFIG + 'learning_rte = 0.1\n', out)

    assert main(['synth', '--config', config]) == 1


def test_invalid_value_exits_with_failure(tmp_path, out):
    config = write_config(tmp_path, SYNTH_CONFIG.replace('epochs = 1', 'epochs = one'), out)

    assert main(['train', '--config', config]) == 1


class TestBuildDataset:
    @pytest.fixture()
    def csv_config(self, tmp_path, out) -> str:
        rows = ['Date,X,Y,Category']
        for day in range(20):
            rows.append(f'2021-03-{day + 1:02d}T12:00:00,{20 + day % 3},{10 + day % 2},theft')
        csv = tmp_path / 'events.csv'
        csv.write_text('\n'.join(rows) + '\n', encoding='utf-8')
        text = f'input_csv = {csv}\nh = 2\nw = 2\nm = 2\nn = 1\nnum_categories = 1\n'
        return write_config(tmp_path, text + 'interval_days = 1\n', out)

    def test_builds_windows_from_events(self, csv_config, out):
        assert main(['build-dataset', '--config', csv_config]) == 0

        dataset = load_dataset(out / 'dataset.mds')
        assert [len(dataset.train), len(dataset.val), len(dataset.test)] == [12, 1, 1]
        assert dataset.spec.categories == ('theft',)
        assert dataset.summary.skipped_rows == 0

    def test_rebuild_is_byte_identical(self, csv_config, out):
        main(['build-dataset', '--config', csv_config])
        first = (out / 'dataset.mds').read_bytes()

        main(['build-dataset', '--config', csv_config])

        assert (out / 'dataset.mds').read_bytes() == first

    def test_header_only_file(self, tmp_path, out):
        csv = tmp_path / 'empty.csv'
        csv.write_text('Date,X,Y,Category\n', encoding='utf-8')
        config = write_config(tmp_path, f'input_csv = {csv}\n', out)

        assert main(['build-dataset', '--config', config]) == 1

    def test_input_is_required(self, tmp_path, out):
        config = write_config(tmp_path, '', out)

        assert main(['build-dataset', '--config', config]) == 1


def test_eval_without_a_checkpoint(synth_config, out):
    main(['synth', '--config', synth_config])

    assert main(['eval', '--config', synth_config]) == 1


def test_synth_train_eval(synth_config, out, capsys):
    assert main(['synth', '--config', synth_config]) == 0
    assert main(['train', '--config', synth_config]) == 0

    assert (out / 'model.ckpt').is_file()
    assert (out / 'last.ckpt').is_file()
    assert (out / 'report.txt').is_file()
    assert 'epochs: 1, steps: 3' in capsys.readouterr().out

    assert main(['eval', '--config', synth_config, '--baseline', 'history']) == 0
    assert (out / 'eval' / 'metrics.csv').is_file()
    assert (out / 'eval' / 'history_metrics.csv').is_file()
    summary = json.loads((out / 'eval' / 'summary.json').read_bytes())
    assert summary['config']['checkpoint'] == str(out / 'model.ckpt')
    assert summary['config']['encoder_layers'] == 1

    assert main(['eval', '--config', synth_config, '--probe', 'rotation', '--turns', '1']) == 0
    assert (out / 'eval' / 'rotation_metrics.csv').is_file()

    assert main(['eval', '--config', synth_config, '--probe', 'dynamics']) == 0
    dynamics = json.loads((out / 'eval' / 'dynamics' / 'summary.json').read_bytes())
    assert len(dynamics['scores']['distance']) == 2

    assert main(['eval', '--config', synth_config, '--probe', 'semantics']) == 0
    assert (out / 'eval' / 'semantics' / 'summary.json').is_file()
