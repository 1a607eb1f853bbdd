from .conv import ConvParams, conv2d_same, conv3d_same
from .exceptions import ContractViolationError, DimensionError
from .ops import matmul, softmax
from .tape import TapeValue, Tensor, backward
from .transforms import flip_horizontal, rotate90

__all__ = (
    'Tensor',
    'TapeValue',
    'ConvParams',
    'backward',
    'conv2d_same',
    'conv3d_same',
    'matmul',
    'softmax',
    'rotate90',
    'flip_horizontal',
    'DimensionError',
    'ContractViolationError',
)
