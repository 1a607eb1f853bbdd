import itertools

import numpy as np
import pytest

from mapsed.tensor import ops
from mapsed.tensor.conv import ConvParams, conv2d_same, conv3d_same
from mapsed.tensor.exceptions import DimensionError
from mapsed.tensor.gradcheck import gradcheck
from tests.settings import GRADIENT_TOLERANCE, ORACLE_TOLERANCE


def naive_conv(x: np.ndarray, kernel: np.ndarray, bias: np.ndarray) -> np.ndarray:
    sizes = kernel.shape[2:]
    padded = np.pad(x, [(0, 0)] + [(k // 2, k // 2) for k in sizes])
    out = np.zeros((kernel.shape[0],) + x.shape[1:])
    for o in range(kernel.shape[0]):
        for position in itertools.product(*[range(s) for s in x.shape[1:]]):
            total = bias[o]
            for c in range(kernel.shape[1]):
                for offset in itertools.product(*[range(k) for k in sizes]):
                    source = tuple(p + d for p, d in zip(position, offset))
                    total += kernel[(o, c) + offset] * padded[(c,) + source]
            out[(o,) + position] = total
    return out


@pytest.mark.parametrize('kernel_size', [(1, 1), (3, 3), (1, 3), (3, 1)])
def test_conv2d_matches_naive_loop(rng, kernel_size):
    x = rng.normal(size=(2, 4, 5))
    kernel = rng.normal(size=(3, 2) + kernel_size)
    bias = rng.normal(size=3)

    out = conv2d_same(x, ConvParams.of(kernel, bias)).value

    np.testing.assert_allclose(out, naive_conv(x, kernel, bias), atol=ORACLE_TOLERANCE)


@pytest.mark.parametrize('kernel_size', [(3, 3, 3), (1, 3, 3), (3, 1, 1)])
def test_conv3d_matches_naive_loop(rng, kernel_size):
    x = rng.normal(size=(2, 3, 4, 4))
    kernel = rng.normal(size=(2, 2) + kernel_size)
    bias = rng.normal(size=2)

    out = conv3d_same(x, ConvParams.of(kernel, bias)).value

    np.testing.assert_allclose(out, naive_conv(x, kernel, bias), atol=ORACLE_TOLERANCE)


def test_zero_padding_at_the_border():
    x = np.ones((1, 3, 3))
    kernel = np.ones((1, 1, 3, 3))

    out = conv2d_same(x, ConvParams.of(kernel, np.zeros(1))).value

    np.testing.assert_array_equal(out[0], [[4, 6, 4], [6, 9, 6], [4, 6, 4]])


@pytest.mark.parametrize(
    ['conv', 'x_shape', 'kernel_shape'],
    [
        [conv2d_same, (2, 4, 5), (3, 2, 3, 3)],
        [conv3d_same, (2, 3, 4, 4), (2, 2, 3, 3, 3)],
    ],
)
def test_conv_is_linear_in_input_and_kernel(rng, conv, x_shape, kernel_shape):
    x, other_x = rng.normal(size=(2,) + x_shape)
    kernel, other_kernel = rng.normal(size=(2,) + kernel_shape)
    zero = np.zeros(kernel_shape[0])
    a, b = 1.7, -0.4

    def run(x, kernel):
        return conv(x, ConvParams.of(kernel, zero)).value

    np.testing.assert_allclose(
        run(a * x + b * other_x, kernel),
        a * run(x, kernel) + b * run(other_x, kernel),
        atol=ORACLE_TOLERANCE,
    )
    np.testing.assert_allclose(
        run(x, a * kernel + b * other_kernel),
        a * run(x, kernel) + b * run(x, other_kernel),
        atol=ORACLE_TOLERANCE,
    )


@pytest.mark.parametrize(
    ['conv', 'x_shape', 'kernel_shape'],
    [
        [conv2d_same, (2, 4, 4), (3, 2, 3, 3)],
        [conv3d_same, (2, 2, 4, 4), (2, 2, 3, 3, 3)],
    ],
)
def test_conv_gradients(rng, conv, x_shape, kernel_shape):
    x = rng.normal(size=x_shape)
    kernel = rng.normal(size=kernel_shape)
    bias = rng.normal(size=kernel_shape[0])
    weights = rng.normal(size=(kernel_shape[0],) + x_shape[1:])

    def fn(x, kernel, bias):
        return ops.reduce_sum(ops.mul(conv(x, ConvParams(kernel, bias)), weights))

    errors = gradcheck(fn, [x, kernel, bias])

    assert max(errors.values()) <= GRADIENT_TOLERANCE, errors


class TestValidation:
    def test_even_kernel_is_rejected(self):
        with pytest.raises(DimensionError) as exc_info:
            conv2d_same(np.ones((1, 4, 4)), ConvParams.of(np.ones((1, 1, 2, 2)), np.zeros(1)))

        assert exc_info.value.axis == 'kernel_spatial_0'

    def test_channel_mismatch(self):
        with pytest.raises(DimensionError) as exc_info:
            conv2d_same(np.ones((2, 4, 4)), ConvParams.of(np.ones((1, 3, 3, 3)), np.zeros(1)))

        assert exc_info.value.axis == 'channel'

    def test_input_rank(self):
        with pytest.raises(DimensionError) as exc_info:
            conv3d_same(np.ones((1, 4, 4)), ConvParams.of(np.ones((1, 1, 3, 3, 3)), np.zeros(1)))

        assert exc_info.value.axis == 'rank'

    def test_bias_length(self):
        with pytest.raises(DimensionError) as exc_info:
            conv2d_same(np.ones((1, 4, 4)), ConvParams.of(np.ones((2, 1, 3, 3)), np.zeros(1)))

        assert exc_info.value.axis == 'bias'
