import numpy as np
import pytest

from mapsed.data.augmentation import aggregate_into_category, augment
from mapsed.data.exceptions import CategoryIndexError
from mapsed.data.types import OccurrenceSequence
from mapsed.tensor.exceptions import DimensionError
from mapsed.tensor.transforms import flip_horizontal, rotate90

DRAWS = 10_000


@pytest.fixture()
def chiral() -> OccurrenceSequence:
    """A pattern whose mirror image is not one of its rotations."""
    frame = np.zeros((1, 3, 3))
    frame[0, 0, 0] = 1.0
    frame[0, 0, 1] = 2.0
    return OccurrenceSequence(X=np.stack([frame, 2 * frame]), Y=frame[None])


def is_rotation(candidate: np.ndarray, original: np.ndarray) -> bool:
    return any(np.array_equal(candidate, rotate90(original, k)) for k in range(4))


def forced_rng(mocker, draw: float, turns: int):
    rng = mocker.Mock(spec=np.random.Generator)
    rng.random.return_value = draw
    rng.integers.return_value = turns
    return rng


def test_counts_are_preserved(rng):
    seq = OccurrenceSequence(
        X=rng.poisson(1.0, size=(3, 2, 4, 4)), Y=rng.poisson(1.0, size=(2, 2, 4, 4))
    )
    for _ in range(20):
        out = augment(seq, rng)

        np.testing.assert_array_equal(out.X.sum(axis=(2, 3)), seq.X.sum(axis=(2, 3)))
        np.testing.assert_array_equal(out.Y.sum(axis=(2, 3)), seq.Y.sum(axis=(2, 3)))


def test_flip_and_turn_frequencies(rng, chiral):
    flips = 0
    turns = np.zeros(4)
    for _ in range(DRAWS):
        out = augment(chiral, rng)
        flipped = not is_rotation(out.X, chiral.X)
        flips += flipped
        base = flip_horizontal(chiral.X) if flipped else chiral.X
        turns[[np.array_equal(out.X, rotate90(base, k)) for k in range(4)].index(True)] += 1

    assert abs(flips / DRAWS - 0.5) <= 0.02
    np.testing.assert_allclose(turns / DRAWS, 0.25, atol=0.02)


def test_flip_happens_before_rotation(mocker, chiral):
    out = augment(chiral, forced_rng(mocker, 0.1, 1))

    np.testing.assert_array_equal(out.X, rotate90(flip_horizontal(chiral.X), 1))
    np.testing.assert_array_equal(out.Y, rotate90(flip_horizontal(chiral.Y), 1))


def test_draw_above_one_half_does_not_flip(mocker, chiral):
    out = augment(chiral, forced_rng(mocker, 0.5, 0))
    np.testing.assert_array_equal(out.X, chiral.X)


@pytest.mark.parametrize('turns', [1, 2, 3])
def test_any_turn_needs_square_frames(mocker, turns):
    seq = OccurrenceSequence(X=np.zeros((1, 1, 2, 3)), Y=np.zeros((1, 1, 2, 3)))

    with pytest.raises(DimensionError):
        augment(seq, forced_rng(mocker, 0.9, turns))


def test_flip_alone_keeps_non_square_frames(mocker):
    seq = OccurrenceSequence(X=np.zeros((1, 1, 2, 3)), Y=np.zeros((1, 1, 2, 3)))

    assert augment(seq, forced_rng(mocker, 0.1, 0)).X.shape == (1, 1, 2, 3)


class TestAggregation:
    def test_moves_every_observed_event_into_one_category(self, rng):
        seq = OccurrenceSequence(
            X=rng.poisson(1.0, size=(3, 3, 4, 4)), Y=rng.poisson(1.0, size=(2, 3, 4, 4))
        )

        out = aggregate_into_category(seq, 1)

        np.testing.assert_array_equal(out.X[:, 1], seq.X.sum(axis=1))
        assert out.X[:, [0, 2]].sum() == 0
        np.testing.assert_array_equal(out.Y, seq.Y)

    @pytest.mark.parametrize('k', [-1, 3])
    def test_out_of_range(self, rng, k):
        seq = OccurrenceSequence(X=np.zeros((1, 3, 2, 2)), Y=np.zeros((1, 3, 2, 2)))

        with pytest.raises(CategoryIndexError):
            aggregate_into_category(seq, k)
