import threading
import time

import pytest

from mapsed.types.exceptions import ConfigurationError
from mapsed.utils.parallel import THREADS_ENV_VARIABLE, WorkerPool, configured_thread_count


class TestThreadCount:
    def test_environment_variable(self, monkeypatch):
        monkeypatch.setenv(THREADS_ENV_VARIABLE, '3')
        assert configured_thread_count() == 3

    def test_at_least_one_thread(self, monkeypatch):
        monkeypatch.setenv(THREADS_ENV_VARIABLE, '0')
        assert configured_thread_count() == 1

    def test_defaults_to_cpu_count(self, monkeypatch, mocker):
        monkeypatch.delenv(THREADS_ENV_VARIABLE, raising=False)
        mocker.patch('mapsed.utils.parallel.os.cpu_count', return_value=6)

        assert configured_thread_count() == 6

    def test_not_a_number(self, monkeypatch):
        monkeypatch.setenv(THREADS_ENV_VARIABLE, 'many')

        with pytest.raises(ConfigurationError):
            configured_thread_count()


def test_pool_size_follows_the_environment(monkeypatch):
    monkeypatch.setenv(THREADS_ENV_VARIABLE, '2')

    with WorkerPool() as pool:
        assert pool.max_workers == 2


def test_ordered_map_keeps_submission_order():
    def slow_for_small(value: int) -> int:
        time.sleep(0.01 * (5 - value))
        return value * value

    with WorkerPool(4) as pool:
        assert pool.ordered_map(slow_for_small, range(5)) == [0, 1, 4, 9, 16]


def test_single_worker_runs_inline():
    with WorkerPool(1) as pool:
        threads = pool.ordered_map(lambda _: threading.current_thread(), range(3))

    assert set(threads) == {threading.current_thread()}
