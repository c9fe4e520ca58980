import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from gapboot import (
    ConfigError,
    DimensionError,
    ar2_model,
    generate_series,
    ma2_model,
    make_model,
    mar_model,
    mean_estimator,
    mma_model,
    monte_carlo_true_se,
    mperiodic_model,
    periodic_model,
)
from gapboot.models import FAMILY_GAPS, _mma_coefficients, row_mean_spread


class TestModelSpec:
    def test_family_defaults(self):
        assert ar2_model(200, 5).gap_q == FAMILY_GAPS["ar2"]
        assert periodic_model(200, 5).gap_q == 0
        assert mar_model(200, 5).gap_q == FAMILY_GAPS["mar"]

    def test_gap_override(self):
        assert ar2_model(200, 5, gap_q=0).gap_q == 0

    def test_dimensions(self):
        assert ar2_model(200, 5).d == 1
        assert mar_model(200, 5).d == 4
        assert ar2_model(200, 5).m == 40

    def test_indivisible_length(self):
        with pytest.raises(DimensionError):
            ar2_model(201, 5)

    def test_unknown_family(self):
        with pytest.raises(ConfigError):
            make_model("arma", 100, 5)

    def test_unknown_innovation(self):
        with pytest.raises(ConfigError):
            ar2_model(100, 5, innovation="cauchy")

    def test_nonstationary_ar(self):
        with pytest.raises(ConfigError, match="stationary"):
            ar2_model(100, 5, ar=(1.2, 0.0))
        with pytest.raises(ConfigError, match="stationary"):
            ar2_model(100, 5, ar=(0.5, 0.5))


class TestGeneration:
    @pytest.mark.parametrize(
        "factory", [ar2_model, ma2_model, periodic_model, mar_model, mma_model, mperiodic_model]
    )
    def test_shapes_and_determinism(self, factory):
        spec = factory(120, 4)
        a = generate_series(spec, seed=5)
        b = generate_series(spec, seed=5)
        c = generate_series(spec, seed=6)
        assert a.values.shape == (30, 4, spec.d)
        assert a.gap_q == spec.gap_q
        assert_array_equal(a.values, b.values)
        assert not np.array_equal(a.values, c.values)

    def test_centered_exponential_innovations(self):
        spec = ar2_model(5000, 5, innovation="centered_exponential", ar=(0.0, 0.0), mu=0.0)
        x = generate_series(spec, seed=1).series().ravel() / spec.sigma**2
        assert abs(x.mean()) < 0.05
        # Exponential(1) - 1 is right-skewed with skewness 2.
        skew = np.mean(x**3) / np.mean(x**2) ** 1.5
        assert 1.5 < skew < 2.5

    def test_periodic_row_means(self):
        spec = periodic_model(4 * 5000, 4, mu=1.0)
        arr = generate_series(spec, seed=3)
        t = 2 * np.pi * np.arange(1, 5) / 4
        expected = 1.0 + np.cos(t) + np.sin(t)
        assert_allclose(arr.values.mean(axis=(0, 2)), expected, atol=0.01)

    def test_mar_lag_one_autocorrelation(self):
        # Component 1 follows a pure AR(1) with coefficient 0.5.
        spec = mar_model(100_000, 100, gap_q=0, cov_kind="identity")
        x = generate_series(spec, seed=8).series()[:, 0]
        x = x - x.mean()
        rho = (x[1:] @ x[:-1]) / (x @ x)
        assert rho == pytest.approx(0.5, abs=0.03)

    def test_mar_mean_vector(self):
        spec = mar_model(40_000, 10)
        got = generate_series(spec, seed=2).series().mean(axis=0)
        assert_allclose(got, [0.2, 0.3, 0.4, 0.5], atol=0.05)

    def test_gap_makes_columns_independent(self):
        # With a long deleted gap, adjacent-column grand means decorrelate.
        spec = ar2_model(400, 4)
        cols = np.stack(
            [generate_series(spec, seed=s).values.mean(axis=(1, 2)) for s in range(150)]
        )
        first, second = cols[:, 0], cols[:, 1]
        corr = np.corrcoef(first, second)[0, 1]
        assert abs(corr) < 0.2


class TestMmaCoefficients:
    def test_structure(self):
        phi1, phi2 = _mma_coefficients(212)
        phi1 = np.asarray(phi1)
        phi2 = np.asarray(phi2)
        assert_array_equal(np.diag(phi1), [1.0, 2.0, 2.0, 2.0])
        assert_array_equal(np.triu(phi1, 1), np.zeros((4, 4)))
        assert_allclose(np.diag(phi2), 0.125)
        lower = phi2[np.tril_indices(4, -1)]
        assert ((0.0 < lower) & (lower < 0.125)).all()

    def test_preset_is_stable(self):
        assert _mma_coefficients(212) == _mma_coefficients(212)


class TestMonteCarloTruth:
    def test_requires_enough_runs(self):
        with pytest.raises(ConfigError):
            monte_carlo_true_se(ar2_model(100, 5), mean_estimator(), runs=50, seed=0)

    def test_ar2_desk_scale(self):
        se = monte_carlo_true_se(ar2_model(200, 5), mean_estimator(), runs=400, seed=123)
        assert se[0] == pytest.approx(0.013, rel=0.15)


def test_row_mean_spread_flags_periodic():
    homogeneous = row_mean_spread(ar2_model(120, 4), runs=150, seed=0)
    assert homogeneous["max_z"] < 4.5
    periodic = row_mean_spread(periodic_model(120, 4), runs=150, seed=0)
    assert periodic["max_z"] > 10.0
