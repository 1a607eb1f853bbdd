"""
Geometric transforms of count grids over the last two (height, width) axes.

Rotation is counter-clockwise: one quarter turn maps ``[[1, 2], [3, 4]]`` to
``[[2, 4], [1, 3]]``. Augmentation and the rotation probe both rely on it.
"""
import numpy as np

from mapsed.tensor.exceptions import DimensionError
from mapsed.tensor.tape import Tensor


def rotate90(input: Tensor, quarter_turns: int) -> Tensor:
    array = np.asarray(input, dtype=np.float64)
    turns = int(quarter_turns) % 4
    if turns == 0:
        return array.copy()
    h, w = array.shape[-2:]
    if turns % 2 and h != w:
        raise DimensionError('width', h, w, operation='rotate90')
    return np.ascontiguousarray(np.rot90(array, k=turns, axes=(-2, -1)))


def flip_horizontal(input: Tensor) -> Tensor:
    array = np.asarray(input, dtype=np.float64)
    return np.ascontiguousarray(array[..., ::-1])
