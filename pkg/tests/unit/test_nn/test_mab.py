import numpy as np
import pytest

from mapsed.nn.config import ModelConfig
from mapsed.nn.mab import bottleneck, channel_attention, mab_forward, spatial_attention
from mapsed.nn.params import MABParams, ParamInitializer
from mapsed.tensor import ops
from mapsed.tensor.exceptions import DimensionError
from mapsed.tensor.gradcheck import joint_gradcheck
from tests.settings import GRADIENT_TOLERANCE, ORACLE_TOLERANCE


def pointwise(z: np.ndarray, projection) -> np.ndarray:
    c = z.shape[0]
    kernel = projection.kernel.value[:, :, 0, 0]
    return kernel @ z.reshape(c, -1) + projection.bias.value[:, None]


def naive_spatial(z: np.ndarray, params: MABParams) -> np.ndarray:
    q, k, v = (pointwise(z, p) for p in (params.phi_q, params.phi_k, params.phi_v))
    positions = q.shape[1]
    out = np.zeros_like(v)
    for i in range(positions):
        logits = np.array([q[:, i] @ k[:, j] for j in range(positions)])
        weights = np.exp(logits - logits.max())
        weights /= weights.sum()
        for j in range(positions):
            out[:, i] += weights[j] * v[:, j]
    return out.reshape(z.shape)


def naive_channel(z: np.ndarray, params: MABParams) -> np.ndarray:
    shared = pointwise(z, params.phi_c)
    channels = shared.shape[0]
    out = np.zeros_like(shared)
    for a in range(channels):
        logits = np.array([shared[a] @ shared[b] for b in range(channels)])
        weights = np.exp(logits - logits.max())
        weights /= weights.sum()
        for b in range(channels):
            out[a] += weights[b] * shared[b]
    return out.reshape(z.shape)


def test_attention_rows_are_distributions(rng, make_mab):
    blocks = [make_mab(2) for _ in range(10)]
    for instance in range(1000):
        z = rng.normal(scale=3.0, size=(2, 2, 3))
        params = blocks[instance % len(blocks)]

        _, spatial = spatial_attention(z, params)
        _, channel = channel_attention(z, params)

        for weights in (spatial.value, channel.value):
            assert (weights >= 0).all()
            np.testing.assert_allclose(weights.sum(axis=1), 1.0, atol=1e-12)


def test_spatial_attention_matches_naive_loop(rng, make_mab):
    params = make_mab(3)
    z = rng.normal(size=(3, 3, 4))

    out, weights = spatial_attention(z, params)

    assert weights.shape == (12, 12)
    np.testing.assert_allclose(out.value, naive_spatial(z, params), atol=ORACLE_TOLERANCE)


def test_channel_attention_matches_naive_loop(rng, make_mab):
    params = make_mab(3)
    z = rng.normal(size=(3, 3, 4))

    out, weights = channel_attention(z, params)

    assert weights.shape == (3, 3)
    np.testing.assert_allclose(out.value, naive_channel(z, params), atol=ORACLE_TOLERANCE)


def test_zero_weights_make_the_block_an_identity(rng, make_mab):
    z = rng.normal(size=(4, 3, 3))
    np.testing.assert_array_equal(mab_forward(z, make_mab(4, zero=True)).value, z)


@pytest.mark.parametrize('shape', [(1, 1, 1), (2, 4, 4), (5, 2, 6)])
def test_block_keeps_shape(rng, make_mab, shape):
    z = rng.normal(size=shape)
    assert mab_forward(z, make_mab(shape[0])).shape == shape


def test_block_combines_both_branches(rng, make_mab):
    params = make_mab(2)
    z = rng.normal(size=(2, 3, 3))
    stacked = np.concatenate([naive_spatial(z, params), naive_channel(z, params)], axis=0)

    expected = bottleneck(stacked, params.fusion).value + z

    np.testing.assert_allclose(mab_forward(z, params).value, expected, atol=ORACLE_TOLERANCE)


def test_block_needs_a_three_axis_input(make_mab):
    with pytest.raises(DimensionError):
        mab_forward(np.zeros((1, 2, 3, 3)), make_mab(2))


@pytest.mark.parametrize('shape', [(1, 2, 2), (2, 3, 3), (3, 2, 3)])
def test_block_gradients_match_finite_differences(rng, shape):
    init = ParamInitializer(rng, ModelConfig(bottleneck_activation='none'))
    init.mab('block', shape[0])
    params = init.build()
    names = list(params)
    z = rng.normal(size=shape)
    weights = rng.normal(size=shape)

    def loss(z_leaf, *leaves):
        block = MABParams.from_bound(dict(zip(names, leaves)), 'block', activation='none')
        return ops.reduce_sum(ops.mul(mab_forward(z_leaf, block), weights))

    assert joint_gradcheck(loss, [z, *params.values()]) <= GRADIENT_TOLERANCE
