import collections

import numpy as np
import pytest

from mapsed.training.sampling import (
    make_positive,
    negative_indices,
    positive_permutation,
    sample_negatives,
)
from mapsed.types.exceptions import ConfigurationError


def test_positive_is_never_the_identity(rng):
    counts = collections.Counter(tuple(positive_permutation(3, rng)) for _ in range(6000))

    assert (0, 1, 2) not in counts
    assert len(counts) == 5
    for count in counts.values():
        assert abs(count / 6000 - 0.2) <= 0.03


def test_single_frame_positive_is_the_frame_itself(rng):
    assert positive_permutation(1, rng) == [0]


def test_make_positive_reorders_frames(rng):
    x = np.arange(4.0).reshape(4, 1, 1, 1)

    positive = make_positive(x, rng)

    assert sorted(positive.ravel()) == [0.0, 1.0, 2.0, 3.0]
    assert not np.array_equal(positive, x)


def test_negatives_are_distinct_and_exclude_the_anchor(rng):
    for current in range(6):
        chosen = negative_indices(6, current, 4, rng)

        assert len(chosen) == len(set(chosen)) == 4
        assert current not in chosen
        assert all(0 <= i < 6 for i in chosen)


def test_too_few_sequences_for_the_negatives(rng):
    with pytest.raises(ConfigurationError):
        negative_indices(4, 0, 4, rng)


def test_sample_negatives_returns_observations(hotspot_sequences, rng):
    negatives = sample_negatives(hotspot_sequences, 0, 3, rng)

    assert len(negatives) == 3
    assert all(x.shape == hotspot_sequences[0].X.shape for x in negatives)


def test_every_other_sequence_is_an_equally_likely_negative(rng):
    draws = 10_000
    size = 6
    counts = collections.Counter(negative_indices(size, 2, 1, rng)[0] for _ in range(draws))

    share = 1 / (size - 1)
    sigma = np.sqrt(share * (1 - share) / draws)
    assert sorted(counts) == [0, 1, 3, 4, 5]
    for count in counts.values():
        assert abs(count / draws - share) <= 3 * sigma
