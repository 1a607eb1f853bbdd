import numpy as np
import pytest

from mapsed.data.exceptions import GridTooSmallError
from mapsed.data.types import GridSpec, OccurrenceSequence
from mapsed.evaluation.baselines import history_predictor
from mapsed.evaluation.probes import (
    argmax_cell,
    chebyshev,
    cross_category_share,
    diagonal_target,
    dynamics_probe,
    rotate_cell,
    rotation_probe,
    semantics_probe,
)
from mapsed.evaluation.report import evaluate
from mapsed.tensor.transforms import rotate90


@pytest.mark.parametrize('turns', [0, 1, 2, 3, 5])
def test_rotate_cell_follows_the_grid_rotation(rng, turns):
    for _ in range(10):
        cell = (int(rng.integers(5)), int(rng.integers(5)))
        grid = np.zeros((5, 5))
        grid[cell] = 1.0

        assert argmax_cell(rotate90(grid, turns)) == rotate_cell(cell, turns, 5)


def test_argmax_sums_categories():
    frame = np.zeros((2, 3, 3))
    frame[0, 0, 0] = 2.0
    frame[1, 2, 2] = 1.5
    frame[0, 2, 2] = 1.0

    assert argmax_cell(frame) == (2, 2)
    assert chebyshev((0, 0), (2, 1)) == 2


class TestRotation:
    def test_zero_turns_equal_plain_evaluation(self, hotspot_sequences, hotspot_spec):
        predictor = history_predictor(hotspot_spec.n)

        rotated = rotation_probe(predictor, hotspot_sequences, 0)
        plain = evaluate(predictor, hotspot_sequences)

        np.testing.assert_array_equal(rotated.rmse, plain.rmse)
        np.testing.assert_array_equal(rotated.mae, plain.mae)
        np.testing.assert_array_equal(rotated.error_grids, plain.error_grids)
        assert rotated.scores['quarter_turns'] == 0

    @pytest.mark.parametrize('turns', [1, 2, 3])
    def test_oracle_is_exact_after_any_rotation(self, hotspot_sequences, motion_oracle, turns):
        report = rotation_probe(motion_oracle, hotspot_sequences, turns)

        assert report.macro_mae == 0.0
        np.testing.assert_array_equal(
            report.frames['input'], rotate90(hotspot_sequences[0].X, turns)
        )


class TestSemantics:
    def test_zero_model_predicts_nothing(self, rng):
        seq = OccurrenceSequence(
            X=rng.poisson(1.0, size=(3, 3, 4, 4)), Y=rng.poisson(1.0, size=(2, 3, 4, 4))
        )

        result = semantics_probe(lambda x: np.zeros((2, 3, 4, 4)), seq, k=1)

        assert result.scores['leakage'] == [0.0]
        assert result.frames['prediction'].sum() == 0.0
        np.testing.assert_array_equal(result.frames['input'][:, 1], seq.X.sum(axis=1))

    def test_leakage_is_the_share_outside_the_category(self):
        prediction = np.ones((2, 4, 3, 3))
        assert cross_category_share(prediction, 0) == pytest.approx(0.75)

    def test_clamped_prediction_is_nonnegative(self, rng):
        seq = OccurrenceSequence(X=np.ones((2, 2, 2, 2)), Y=np.ones((1, 2, 2, 2)))

        result = semantics_probe(lambda x: rng.normal(size=(1, 2, 2, 2)), seq, k=0)

        assert (result.frames['prediction'] >= 0).all()
        assert 0.0 <= result.scores['leakage'][0] <= 1.0


class TestDynamics:
    def test_oracle_has_zero_distance(self, hotspot_spec, motion_oracle):
        for offset in (0, 1):
            result = dynamics_probe(motion_oracle, hotspot_spec, offset=offset)

            assert result.scores['distance'] == [0.0, 0.0]

    def test_history_lags_behind(self, hotspot_spec):
        result = dynamics_probe(history_predictor(hotspot_spec.n), hotspot_spec)

        assert result.scores['distance'] == [1.0, 2.0]
        assert result.frames['input'].shape == (3, 1, 6, 6)

    def test_target_is_clipped_to_the_grid(self):
        spec = GridSpec(h=5, w=5, num_categories=1, m=3, n=4)

        assert diagonal_target(spec, 0, 1) == (3, 3)
        assert diagonal_target(spec, 0, 4) == (4, 4)

    def test_offset_outside_the_grid(self, hotspot_spec, motion_oracle):
        with pytest.raises(GridTooSmallError):
            dynamics_probe(motion_oracle, hotspot_spec, offset=2)
