import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from gapboot import (
    BoundsError,
    ConfigError,
    ConsistencyError,
    DegenerateCorrelationError,
    InsufficientDataError,
    SubseriesEstimates,
    build_data_array,
    componentwise_mean_estimator,
    correlation_matrix,
    default_block_length,
    gb2_variance,
    mean_estimator,
    sampling_window_correlation,
    subseries_estimates,
    sym_inverse_sqrt,
    sym_sqrt,
)


class TestDefaultBlockLength:
    @pytest.mark.parametrize("m,expected", [(575, 17), (8, 4), (1000, 20), (40, 7)])
    def test_values(self, m, expected):
        assert default_block_length(m) == expected

    def test_clamped_to_valid_range(self):
        assert default_block_length(8, scale=0.1) == 2
        assert default_block_length(9, scale=100.0) == 8

    def test_too_few_columns(self):
        with pytest.raises(InsufficientDataError):
            default_block_length(7)

    def test_bad_scale(self):
        with pytest.raises(ConfigError):
            default_block_length(100, scale=0.0)


class TestSubseriesEstimates:
    def test_window_count(self):
        arr = build_data_array(np.arange(10.0), p=2)
        sub = subseries_estimates(arr, mean_estimator(), ell=2)
        assert sub.count == 4

    def test_window_means(self):
        arr = build_data_array([1.0, 2.0, 3.0, 4.0], p=1)
        sub = subseries_estimates(arr, mean_estimator(), ell=2)
        assert_array_equal(sub.grid[:, 0, 0], [1.5, 2.5, 3.5])
        assert sub.full_estimates[0, 0] == 2.5

    def test_constant_data(self):
        arr = build_data_array(np.full(12, 3.0), p=3)
        sub = subseries_estimates(arr, mean_estimator(), ell=2)
        assert_array_equal(sub.grid, np.full_like(sub.grid, 3.0))

    @pytest.mark.parametrize("ell", [1, 5, 6])
    def test_bad_window_length(self, ell):
        arr = build_data_array(np.arange(10.0), p=2)
        with pytest.raises(BoundsError):
            subseries_estimates(arr, mean_estimator(), ell=ell)


def make_sub(rows, full):
    """Scalar SubseriesEstimates from per-row window sequences."""
    grid = np.asarray(rows, float).T[:, :, None]
    return SubseriesEstimates(
        grid=grid, full_estimates=np.asarray(full, float)[:, None], ell=2
    )


class TestSamplingWindowCorrelation:
    def test_self_correlation_is_one(self):
        sub = make_sub([[1.0, 2.0, 3.0]], [2.0])
        assert sampling_window_correlation(sub, 1, 1) == pytest.approx(1.0, abs=1e-15)

    def test_identical_sequences(self):
        sub = make_sub([[1.0, 2.0, 3.0], [1.0, 2.0, 3.0]], [2.0, 2.0])
        assert sampling_window_correlation(sub, 1, 2) == pytest.approx(1.0, abs=1e-15)

    def test_hand_value(self):
        # Deviations (-1,0,1) and (0,-1,1): num 1/3, dens 2/3 -> 0.5.
        sub = make_sub([[1.0, 2.0, 3.0], [2.0, 1.0, 3.0]], [2.0, 2.0])
        assert sampling_window_correlation(sub, 1, 2) == pytest.approx(0.5, abs=1e-15)

    def test_degenerate(self):
        sub = make_sub([[2.0, 2.0, 2.0], [1.0, 2.0, 3.0]], [2.0, 2.0])
        with pytest.raises(DegenerateCorrelationError):
            sampling_window_correlation(sub, 1, 2)

    def test_clipped_to_unit_interval(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            seqs = rng.standard_normal((2, 6))
            sub = make_sub(seqs, rng.standard_normal(2))
            assert abs(sampling_window_correlation(sub, 1, 2)) <= 1.0


class TestSymmetricRoots:
    def test_inverse_sqrt_identity(self):
        assert_allclose(sym_inverse_sqrt(np.eye(3)), np.eye(3), atol=1e-15)

    def test_inverse_sqrt_diagonal(self):
        out = sym_inverse_sqrt(np.diag([4.0, 9.0]))
        assert_allclose(out, np.diag([0.5, 1.0 / 3.0]), rtol=1e-14, atol=1e-16)

    def test_inverse_sqrt_dense(self):
        m = np.array([[2.0, 1.0], [1.0, 2.0]])  # eigenvalues 1 and 3
        out = sym_inverse_sqrt(m)
        assert_allclose(out @ out @ m, np.eye(2), atol=1e-12)

    def test_asymmetric_rejected(self):
        with pytest.raises(ConsistencyError):
            sym_inverse_sqrt(np.array([[1.0, 0.5], [0.1, 1.0]]))

    def test_eps_floor_handles_singular_input(self):
        out = sym_inverse_sqrt(np.ones((2, 2)))
        assert np.isfinite(out).all()

    def test_sqrt_roundtrip(self):
        m = np.array([[3.0, 1.0], [1.0, 2.0]])
        root = sym_sqrt(m)
        assert_allclose(root @ root, m, rtol=1e-12, atol=1e-14)


class TestCorrelationMatrix:
    def setup_method(self):
        rng = np.random.default_rng(4)
        arr = build_data_array(rng.standard_normal((60, 2)) + [0.5, -1.0], p=3)
        self.sub = subseries_estimates(arr, componentwise_mean_estimator(2), ell=6)

    def test_self_is_identity(self):
        for j in (1, 2, 3):
            assert_allclose(correlation_matrix(self.sub, j, j), np.eye(2), atol=1e-8)

    def test_scalar_case_matches_window_correlation(self):
        rng = np.random.default_rng(5)
        arr = build_data_array(rng.standard_normal(40), p=2)
        sub = subseries_estimates(arr, mean_estimator(), ell=5)
        matrix = correlation_matrix(sub, 1, 2)
        scalar = sampling_window_correlation(sub, 1, 2)
        assert_allclose(matrix[0, 0], scalar, rtol=1e-10)

    def test_mirror_gives_minus_identity(self):
        rng = np.random.default_rng(6)
        dev = rng.standard_normal((9, 2))
        full = np.array([[0.3, -0.2], [0.3, -0.2]])
        grid = np.stack([full[0] + dev, full[1] - dev], axis=1)
        sub = SubseriesEstimates(grid=grid, full_estimates=full, ell=3)
        assert_allclose(correlation_matrix(sub, 1, 2), -np.eye(2), atol=1e-8)

    def test_degenerate_row_propagates_index(self):
        grid = self.sub.grid.copy()
        grid[:, 1, :] = self.sub.full_estimates[1]
        sub = SubseriesEstimates(grid=grid, full_estimates=self.sub.full_estimates, ell=6)
        with pytest.raises(DegenerateCorrelationError, match="row 2"):
            correlation_matrix(sub, 1, 2)


class TestGb2Variance:
    def test_single_row_returns_input(self):
        sub = make_sub([[1.0, 2.0, 3.0]], [2.0])
        v = gb2_variance(np.array([[[2.0]]]), sub, weights=[1.0])
        assert v.scalar == 2.0

    def test_perfect_correlation(self):
        # sigma_1 = sigma_2 = 2, rho = 1 -> four terms of 0.25*4 each.
        sub = make_sub([[1.0, 2.0, 3.0], [1.0, 2.0, 3.0]], [2.0, 2.0])
        v = gb2_variance(np.array([[[4.0]], [[4.0]]]), sub, weights=[0.5, 0.5])
        assert v.scalar == pytest.approx(4.0, rel=1e-12)

    def test_zero_correlation(self):
        # Deviations (-1,0,1) vs (1,-2,1) are orthogonal -> diagonal only.
        sub = make_sub([[1.0, 2.0, 3.0], [3.0, 0.0, 3.0]], [2.0, 2.0])
        v = gb2_variance(np.array([[[4.0]], [[4.0]]]), sub, weights=[0.5, 0.5])
        assert v.scalar == 2.0

    def test_degenerate_policies(self):
        sub = make_sub([[1.0, 2.0, 3.0], [2.0, 2.0, 2.0]], [2.0, 2.0])
        variances = np.array([[[4.0]], [[4.0]]])
        with pytest.raises(DegenerateCorrelationError):
            gb2_variance(variances, sub)
        v = gb2_variance(variances, sub, degenerate="zero")
        assert v.scalar == 2.0
        with pytest.raises(ConfigError):
            gb2_variance(variances, sub, degenerate="ignore")

    def test_weight_validation(self):
        sub = make_sub([[1.0, 2.0, 3.0], [1.0, 2.0, 3.0]], [2.0, 2.0])
        variances = np.array([[[4.0]], [[4.0]]])
        with pytest.raises(ConsistencyError):
            gb2_variance(variances, sub, weights=[0.2, 0.2])

    def test_output_symmetric_psd(self):
        rng = np.random.default_rng(8)
        arr = build_data_array(rng.standard_normal((72, 2)), p=4)
        est = componentwise_mean_estimator(2)
        sub = subseries_estimates(arr, est, ell=5)
        variances = np.stack(
            [np.cov(arr.row(j), rowvar=False) / arr.m for j in range(1, 5)]
        )
        v = gb2_variance(variances, sub)
        assert_allclose(v.matrix, v.matrix.T, atol=1e-15)
        assert np.linalg.eigvalsh(v.matrix)[0] >= -1e-12


def test_rho_scale_invariant_for_mean():
    rng = np.random.default_rng(10)
    series = rng.standard_normal(36)
    arr1 = build_data_array(series, p=2)
    arr2 = build_data_array(17.5 * series, p=2)
    sub1 = subseries_estimates(arr1, mean_estimator(), ell=4)
    sub2 = subseries_estimates(arr2, mean_estimator(), ell=4)
    r1 = sampling_window_correlation(sub1, 1, 2)
    r2 = sampling_window_correlation(sub2, 1, 2)
    assert_allclose(r1, r2, rtol=1e-12)
