from typing import Callable, List

import numpy as np
import pytest

from mapsed.tensor import ops
from mapsed.tensor.exceptions import ContractViolationError, DimensionError
from mapsed.tensor.gradcheck import gradcheck
from mapsed.tensor.tape import TapeValue, backward
from tests.settings import GRADIENT_TOLERANCE


def away_from_zero(rng: np.random.Generator, shape: tuple) -> np.ndarray:
    """Entries in +-[0.2, 1] so kinks of relu and abs stay out of reach of the step."""
    return rng.uniform(0.2, 1.0, size=shape) * rng.choice([-1.0, 1.0], size=shape)


def weighted(out: TapeValue, weights: np.ndarray) -> TapeValue:
    return ops.reduce_sum(ops.mul(out, weights))


def assert_gradients_match(fn: Callable[..., TapeValue], arrays: List[np.ndarray]) -> None:
    errors = gradcheck(fn, arrays)
    assert max(errors.values()) <= GRADIENT_TOLERANCE, errors


class TestGradients:
    @pytest.mark.parametrize(
        'op',
        [ops.add, ops.sub, ops.mul],
    )
    def test_binary_elementwise(self, op, rng):
        a, b = away_from_zero(rng, (2, 3)), away_from_zero(rng, (2, 3))
        weights = rng.normal(size=(2, 3))
        assert_gradients_match(lambda x, y: weighted(op(x, y), weights), [a, b])

    def test_broadcast_add_reduces_gradient_to_operand_shape(self, rng):
        a, b = rng.normal(size=(2, 3)), rng.normal(size=(3,))
        weights = rng.normal(size=(2, 3))
        assert_gradients_match(lambda x, y: weighted(ops.add(x, y), weights), [a, b])

    @pytest.mark.parametrize(
        'op',
        [
            ops.neg,
            ops.relu,
            ops.exp,
            ops.absolute,
            ops.square,
            lambda x: ops.scale(x, 2.5),
            lambda x: ops.reshape(x, (3, 4)),
            lambda x: ops.transpose(x, (2, 0, 1)),
            lambda x: ops.reduce_sum(x, axis=1),
            lambda x: ops.reduce_sum(x, axis=0, keepdims=True),
            lambda x: ops.softmax(x, axis=-1),
            lambda x: ops.softmax(x, axis=1),
            lambda x: ops.select(x, 1),
        ],
    )
    def test_unary(self, op, rng):
        a = away_from_zero(rng, (2, 2, 3))
        weights = rng.normal(size=op(TapeValue(a)).shape)
        assert_gradients_match(lambda x: weighted(op(x), weights), [a])

    def test_log(self, rng):
        a = rng.uniform(0.5, 2.0, size=(3, 2))
        assert_gradients_match(lambda x: ops.reduce_sum(ops.log(x)), [a])

    def test_mean_and_logsumexp(self, rng):
        a = rng.normal(size=(4, 3))
        assert_gradients_match(lambda x: ops.mean(ops.square(x)), [a])
        assert_gradients_match(lambda x: ops.logsumexp(x), [a])

    def test_concat_and_stack(self, rng):
        a, b = rng.normal(size=(2, 3)), rng.normal(size=(1, 3))
        weights = rng.normal(size=(3, 3))
        assert_gradients_match(lambda x, y: weighted(ops.concat([x, y], axis=0), weights), [a, b])

        c = rng.normal(size=(2, 3))
        stacked_weights = rng.normal(size=(2, 2, 3))
        assert_gradients_match(
            lambda x, y: weighted(ops.stack([x, y], axis=0), stacked_weights), [a, c]
        )

    def test_matmul(self, rng):
        a, b = rng.normal(size=(3, 4)), rng.normal(size=(4, 2))
        weights = rng.normal(size=(3, 2))
        assert_gradients_match(lambda x, y: weighted(ops.matmul(x, y), weights), [a, b])

    def test_minimum_routes_gradient_to_the_smallest_scalar(self, rng):
        a, b, c = np.array(3.0), np.array(1.0), np.array(2.0)
        assert_gradients_match(lambda x, y, z: ops.scale(ops.minimum([x, y, z]), 2.0), [a, b, c])

        leaves = [TapeValue(v, requires_grad=True) for v in (a, b, c)]
        backward(ops.minimum(leaves))
        assert leaves[1].grad == 1.0
        assert leaves[0].grad == 0.0

    def test_pooling_and_upsampling(self, rng):
        a = rng.normal(size=(2, 4, 6))
        pooled_weights = rng.normal(size=(2, 2, 3))
        assert_gradients_match(lambda x: weighted(ops.avg_pool2(x), pooled_weights), [a])

        small = rng.normal(size=(2, 2, 3))
        upsampled_weights = rng.normal(size=(2, 4, 6))
        assert_gradients_match(lambda x: weighted(ops.upsample2(x), upsampled_weights), [small])


def test_backward_needs_a_scalar_root():
    x = TapeValue(np.ones((2, 2)), requires_grad=True)
    with pytest.raises(ContractViolationError):
        backward(ops.square(x))


def test_gradients_accumulate_over_shared_paths():
    x = TapeValue(np.array([1.0, -2.0, 3.0]), requires_grad=True)
    backward(ops.reduce_sum(ops.add(ops.mul(x, x), x)))
    np.testing.assert_array_equal(x.grad, 2 * x.value + 1)


def test_constant_inputs_record_no_tape():
    out = ops.mul(TapeValue(np.ones(3)), TapeValue(np.ones(3)))
    assert out.is_leaf
    assert not out.requires_grad


def test_softmax_rows_sum_to_one(rng):
    weights = ops.softmax(rng.normal(scale=30.0, size=(5, 7)), axis=1).value
    np.testing.assert_allclose(weights.sum(axis=1), 1.0, atol=1e-12)


def test_logsumexp_is_stable_for_large_inputs():
    out = ops.logsumexp(np.array([1000.0, 1000.0]))
    assert out.item() == pytest.approx(1000.0 + np.log(2.0))


@pytest.mark.parametrize(
    ['call', 'axis'],
    [
        [lambda: ops.matmul(np.ones((2, 3)), np.ones((2, 3))), 'inner'],
        [lambda: ops.concat([np.ones((2, 3)), np.ones((2, 4))], axis=0), 'shape'],
        [lambda: ops.reshape(np.ones((2, 3)), (4, 2)), 'size'],
        [lambda: ops.avg_pool2(np.ones((3, 4))), 'height'],
        [lambda: ops.minimum([]), 'count'],
        [lambda: ops.add(np.ones((2, 3)), np.ones((3, 2))), 'shape'],
    ],
)
def test_dimension_errors_name_the_offending_axis(call, axis):
    with pytest.raises(DimensionError) as exc_info:
        call()

    assert exc_info.value.axis == axis
