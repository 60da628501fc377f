"""Tests for standardized Ridge fitting and the network coefficient."""
import json

import numpy as np
import pytest

from previous_kit.errors import FitError, FormatError, MissingModelError, ModelMismatchError
from previous_kit.models.metrics import ArchMetrics
from previous_kit.models.network import LayerKind, TensorShape
from previous_kit.models.regression import ModelBundle, ObservationSet, RidgeModel, Target
from previous_kit.utils.io import load_bundle, save_bundle
from previous_kit.utils.regression import (
    evaluate_layer,
    fit_bundle,
    fit_network_coefficient,
    fit_ridge,
    pearson,
    predict_layer,
    select_predictors,
    standardize,
)


def observations(X, y, kind=LayerKind.CONV, target=Target.RUNTIME):
    return ObservationSet(kind=kind, target=target, X=np.asarray(X, dtype=float), y=np.asarray(y, dtype=float))


def layer(n_weights=0, ops=0, mem_ops=0, kind=LayerKind.CONV, name='l'):
    return ArchMetrics(layer_name=name, kind=kind, n_weights=int(n_weights), ops=int(ops), mem_ops=int(mem_ops),
                       out_shape=TensorShape(1, 1, 1))


def ops_only(values, y):
    """Observations varying only in ops."""
    return observations([[0, v, 0] for v in values], y)


def random_instance(rng):
    n = int(rng.integers(5, 51))
    X = rng.integers(1, 10 ** 6, size=(n, 3))
    y = 1.0 + X @ np.array([1e-6, 2e-6, 3e-6]) + rng.uniform(0.0, 0.1, n)
    return X, y


class TestStandardize:
    """Tests for standardize."""

    def test_single_column(self):
        """Test [1, 2, 3] maps to [-1, 0, 1]."""
        Z, mean, std = standardize([[1.0], [2.0], [3.0]])
        assert list(Z[:, 0]) == [-1.0, 0.0, 1.0]
        assert (mean[0], std[0]) == (2.0, 1.0)

    def test_constant_column(self):
        """Test a constant column gets std 1 and zero scores."""
        Z, mean, std = standardize([[5.0], [5.0]])
        assert list(Z[:, 0]) == [0.0, 0.0]
        assert std[0] == 1.0

    def test_scale_invariance(self):
        """Test positive rescaling leaves the scores unchanged."""
        X = np.array([[1.0, 10.0], [4.0, 30.0], [9.0, 20.0]])
        Z, _, _ = standardize(X)
        Zk, _, _ = standardize(X * 7.5)
        np.testing.assert_allclose(Zk, Z, rtol=1e-12)

    def test_single_row(self):
        """Test one observation yields all-zero scores."""
        Z, _, std = standardize([[1.0, 2.0, 3.0]])
        assert np.all(Z == 0)
        assert list(std) == [1.0, 1.0, 1.0]


class TestPearson:
    """Tests for pearson."""

    @pytest.mark.parametrize('y,expected', [([2, 4, 6], 1.0), ([6, 4, 2], -1.0), ([1, 1, 2], 0.8660254)])
    def test_small_cases(self, y, expected):
        """Test perfect, inverse and partial correlation."""
        assert pearson([1, 2, 3], y) == pytest.approx(expected, abs=1e-7)

    def test_constant_input(self):
        """Test correlation with a constant vector is undefined."""
        with pytest.raises(FitError, match='constant'):
            pearson([1, 2, 3], [4, 4, 4])

    def test_too_short(self):
        """Test a single point is rejected."""
        with pytest.raises(FitError):
            pearson([1], [2])


class TestFitRidge:
    """Tests for fit_ridge."""

    def test_exact_fit_at_zero_lambda(self):
        """Test a perfect line is reproduced without shrinkage."""
        model = fit_ridge(ops_only([1, 2, 3], [2, 4, 6]), lam=0.0)
        assert model.coef[1] == pytest.approx(2.0, rel=1e-12)
        assert model.intercept == pytest.approx(4.0)
        for ops, y in [(1, 2.0), (2, 4.0), (3, 6.0)]:
            assert predict_layer(model, layer(ops=ops)) == pytest.approx(y, rel=1e-12)

    def test_unit_lambda_shrinks(self):
        """Test lambda 1 gives 4 / (2 + 1) on the standardized predictor."""
        model = fit_ridge(ops_only([1, 2, 3], [2, 4, 6]), lam=1.0)
        assert model.coef[1] == pytest.approx(4.0 / 3.0, rel=1e-12)
        assert predict_layer(model, layer(ops=3)) < 6.0
        assert predict_layer(model, layer(ops=1)) > 2.0

    def test_single_observation(self):
        """Test one row gives zero coefficients and intercept y."""
        model = fit_ridge(observations([[1, 2, 3]], [5.0]), lam=0.0)
        assert model.coef == (0.0, 0.0, 0.0)
        assert model.intercept == 5.0
        assert model.active == (False, False, False)

    def test_constant_predictors_inactive(self):
        """Test structurally constant columns stay out of the solve."""
        model = fit_ridge(ops_only([1, 2, 3], [2, 4, 6]), lam=1.0)
        assert model.active == (False, True, False)
        assert (model.coef[0], model.coef[2]) == (0.0, 0.0)
        assert (model.std[0], model.std[2]) == (1.0, 1.0)

    def test_matches_least_squares_oracle(self):
        """Test lambda 0 matches ordinary least squares on random instances."""
        rng = np.random.default_rng(7)
        for _ in range(100):
            X, y = random_instance(rng)
            model = fit_ridge(observations(X, y), lam=0.0)
            design = np.column_stack([np.ones(len(y)), X * 1e-6])
            beta, *_ = np.linalg.lstsq(design, y, rcond=None)
            expected = design @ beta
            fitted = [predict_layer(model, layer(*row)) for row in X]
            np.testing.assert_allclose(fitted, expected, rtol=1e-9)

    def test_monotone_shrinkage(self):
        """Test the coefficient norm falls as lambda grows."""
        X, y = random_instance(np.random.default_rng(11))
        norms = [np.linalg.norm(fit_ridge(observations(X, y), lam=lam).coef) for lam in (0.0, 1.0, 10.0, 1000.0)]
        assert norms == sorted(norms, reverse=True)
        assert norms[-1] < 0.1 * norms[0]

    def test_rescaled_predictor(self):
        """Test rescaling a column at fit time leaves predictions unchanged."""
        X, y = random_instance(np.random.default_rng(5))
        scaled = X * np.array([1, 1000, 1])
        base = fit_ridge(observations(X, y), lam=1.0)
        rescaled = fit_ridge(observations(scaled, y), lam=1.0)
        for row, srow in zip(X[:5], scaled[:5]):
            assert predict_layer(rescaled, layer(*srow)) == pytest.approx(predict_layer(base, layer(*row)), rel=1e-9)

    def test_collinear_predictors_pruned(self):
        """Test proportional columns keep a single predictor."""
        ops = np.array([1.0, 2.0, 3.0, 5.0])
        obs = observations(np.column_stack([ops, ops, 2 * ops]), 1.0 + ops)
        model = fit_ridge(obs, lam=0.0, select=True)
        assert sum(model.active) == 1
        assert predict_layer(model, layer(1, 1, 2)) == pytest.approx(2.0)

    def test_singular_without_selection(self):
        """Test lambda 0 refuses a rank-deficient solve."""
        ops = np.array([1.0, 2.0, 3.0, 5.0])
        obs = observations(np.column_stack([ops, ops, 2 * ops]), 1.0 + ops)
        with pytest.raises(FitError, match='singular'):
            fit_ridge(obs, lam=0.0)

    def test_collinear_predictors_share_weight(self):
        """Test ridge without selection splits a duplicated predictor evenly."""
        n = np.array([1.0, 2.0, 3.0, 4.0])
        y = np.array([1.0, 1.9, 4.1, 8.0])
        model = fit_ridge(observations(np.column_stack([np.zeros(4), n, 2 * n]), y), lam=1.0)
        z = (n - n.mean()) / n.std(ddof=1)
        expected = z @ (y - y.mean()) / (2 * z @ z + 1.0)
        assert model.active == (False, True, True)
        assert model.coef[0] == 0.0
        assert model.coef[1] == pytest.approx(expected, rel=1e-12)
        assert model.coef[2] == pytest.approx(expected, rel=1e-12)
        assert expected == pytest.approx(1.2836, abs=1e-4)

    def test_non_positive_response(self):
        """Test responses must be positive."""
        with pytest.raises(FitError, match='positive'):
            fit_ridge(ops_only([1, 2], [1.0, 0.0]))

    def test_negative_lambda(self):
        """Test the penalty must be non-negative."""
        with pytest.raises(FitError):
            fit_ridge(ops_only([1, 2], [1.0, 2.0]), lam=-1.0)


class TestSelectPredictors:
    """Tests for select_predictors."""

    def test_orders_by_correlation(self):
        """Test the strongest predictor wins among duplicates."""
        Z, _, _ = standardize(np.array([[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]]))
        assert select_predictors(Z, [0.2, -0.9]) == (False, True)

    def test_independent_columns_kept(self):
        """Test full-rank columns are all kept."""
        Z, _, _ = standardize(np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [2.0, 0.0]]))
        assert select_predictors(Z, [0.5, 0.5]) == (True, True)


class TestPredictLayer:
    """Tests for predict_layer and evaluate_layer."""

    def model(self, coef=(0.0, 1.0, 0.0), intercept=0.5):
        return RidgeModel(kind=LayerKind.CONV, target=Target.RUNTIME, coef=coef, intercept=intercept,
                          mean=(0.0, 1e6, 0.0), std=(1.0, 1e6, 1.0), lam=1.0)

    def test_constructed_model(self):
        """Test intercept plus standardized ops."""
        assert predict_layer(self.model(), layer(ops=2e6)) == pytest.approx(1.5)

    def test_negative_clamped(self):
        """Test negative predictions clamp to zero and are flagged."""
        assert evaluate_layer(self.model(coef=(0.0, -1.0, 0.0)), layer(ops=2e6)) == (0.0, True)

    def test_extrapolation(self):
        """Test values beyond the training range are predicted unflagged."""
        assert evaluate_layer(self.model(), layer(ops=101e6)) == (pytest.approx(100.5), False)

    def test_kind_mismatch(self):
        """Test a conv model cannot price a pool layer."""
        with pytest.raises(ModelMismatchError):
            predict_layer(self.model(), layer(ops=1, kind=LayerKind.POOL))


class TestFitNetworkCoefficient:
    """Tests for fit_network_coefficient."""

    def test_proportional(self):
        """Test exact proportionality recovers c."""
        assert fit_network_coefficient([100, 200, 300], [88, 176, 264]) == pytest.approx(0.88, rel=1e-12)

    def test_single_point(self):
        """Test one network gives measured / sum."""
        assert fit_network_coefficient([10], [11]) == pytest.approx(1.1)

    def test_zero_norm(self):
        """Test all-zero sums are rejected."""
        with pytest.raises(FitError, match='zero-norm'):
            fit_network_coefficient([0.0, 0.0], [1.0, 2.0])

    def test_length_mismatch(self):
        """Test vectors must pair up."""
        with pytest.raises(FitError):
            fit_network_coefficient([1.0, 2.0], [1.0])


class TestModelBundle:
    """Tests for fit_bundle and bundle serialization."""

    @pytest.fixture
    def bundle(self):
        X, y = random_instance(np.random.default_rng(3))
        per_kind = {'conv': observations(X, y),
                    'pool': observations(X[:, [1, 1, 2]] * [0, 1, 1], y, kind=LayerKind.POOL)}
        energy = {'conv': observations(X, 2 * y, target=Target.ENERGY)}
        return fit_bundle({Target.RUNTIME: per_kind, Target.ENERGY: energy}, system_id='test-rig', lam=1.0,
                          provenance={'im2col': False})

    def test_models_keyed_by_kind_and_target(self, bundle):
        """Test every fitted pair is addressable."""
        assert len(bundle.models) == 3
        assert bundle.kinds(Target.RUNTIME) == ['conv', 'pool']
        assert bundle.get_model(LayerKind.CONV, 'energy').target is Target.ENERGY
        assert bundle.provenance['lambda'] == 1.0
        assert bundle.provenance['im2col'] is False
        assert bundle.provenance['predictor_selection'] == 'none'

    def test_missing_model(self, bundle):
        """Test absent kinds fail loudly with the layer name."""
        with pytest.raises(MissingModelError, match='relu3'):
            bundle.get_model(LayerKind.RELU, Target.RUNTIME, layer_name='relu3')

    def test_json_round_trip(self, bundle):
        """Test coefficients survive JSON serialization bit-exactly."""
        restored = ModelBundle.from_dict(json.loads(json.dumps(bundle.to_dict())))
        assert restored == bundle

    def test_file_round_trip(self, bundle, tmp_path):
        """Test save_bundle then load_bundle."""
        path = save_bundle(bundle, tmp_path / 'bundle.json')
        assert load_bundle(path) == bundle

    def test_non_positive_coefficient(self, bundle):
        """Test stored network coefficients must be positive."""
        data = bundle.to_dict()
        data['c_energy'] = 0.0
        with pytest.raises(FormatError):
            ModelBundle.from_dict(data)

    def test_malformed_block(self, bundle):
        """Test missing fields surface as a format error."""
        data = bundle.to_dict()
        del data['models'][0]['intercept']
        with pytest.raises(FormatError, match='malformed'):
            ModelBundle.from_dict(data)
