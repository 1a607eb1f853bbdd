from typing import Callable

import numpy as np
import pytest

from mapsed.evaluation.probes import argmax_cell


def linear_motion(x: np.ndarray, n: int) -> np.ndarray:
    """Continues a single hotspot along the displacement of its last two frames."""
    frames = np.asarray(x, dtype=np.float64)
    last = argmax_cell(frames[-1])
    previous = argmax_cell(frames[-2])
    step = (last[0] - previous[0], last[1] - previous[1])
    _, h, w = frames.shape[1:]
    out = np.zeros((n,) + frames.shape[1:])
    for tau in range(1, n + 1):
        row = min(max(last[0] + tau * step[0], 0), h - 1)
        column = min(max(last[1] + tau * step[1], 0), w - 1)
        out[tau - 1, :, row, column] = frames[-1][:, last[0], last[1]]
    return out


@pytest.fixture()
def motion_oracle(hotspot_spec) -> Callable[[np.ndarray], np.ndarray]:
    return lambda x: linear_motion(x, hotspot_spec.n)
