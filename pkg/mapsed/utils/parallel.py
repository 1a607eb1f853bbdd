from __future__ import annotations

import concurrent.futures as futures
import os
from typing import Callable, Iterable, List, Optional, TypeVar

from mapsed.types.exceptions import ConfigurationError

THREADS_ENV_VARIABLE = 'MAPSED_THREADS'

_T = TypeVar('_T')
_R = TypeVar('_R')


def configured_thread_count() -> int:
    raw = os.getenv(THREADS_ENV_VARIABLE)
    if raw is None or not raw.strip():
        return os.cpu_count() or 1
    try:
        count = int(raw)
    except ValueError:
        raise ConfigurationError(f'{THREADS_ENV_VARIABLE} must be an integer: {raw!r}') from None
    return max(count, 1)


class WorkerPool(futures.ThreadPoolExecutor):
    """object: WorkerPool"""

    def __init__(self, max_workers: Optional[int] = None) -> None:
        if max_workers is None:
            max_workers = configured_thread_count()
        super().__init__(max_workers, 'mapsed_worker_')
        self.max_workers = max_workers

    def ordered_map(self, fn: Callable[[_T], _R], items: Iterable[_T]) -> List[_R]:
        """Results come back in submission order whatever order the workers finish in."""
        materialized = list(items)
        if self.max_workers == 1 or len(materialized) <= 1:
            return [fn(item) for item in materialized]
        return list(self.map(fn, materialized))
