"""Gap bootstrap I.

Each row of the gapped array is bootstrapped on its own, which captures
the within-row variability but says nothing about dependence between
row estimators.  Under approximate exchangeability of rows, the average
squared pairwise difference of the row estimates identifies the common
cross-row covariance, and the two ingredients combine into a variance
estimate for the equally weighted row combination.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import DataArray, EstimatorSpec, VarianceEstimate, apply_estimator, psd_project
from .errors import BoundsError, DimensionError, FewRowsWarning, InsufficientDataError
from .resample import BootstrapConfig, iid_bootstrap_variance

__all__ = [
    "RowEstimates",
    "collect_row_estimates",
    "cross_covariance",
    "gb1_variance",
    "pairwise_difference_variance",
]


@dataclass(frozen=True)
class RowEstimates:
    """Per-row estimates (p, r) and bootstrap variances (p, r, r)."""

    estimates: np.ndarray
    variances: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.estimates, dtype=np.float64)
        v = np.asarray(self.variances, dtype=np.float64)
        if e.ndim != 2:
            raise DimensionError(f"estimates must be (p, r), got shape {e.shape}")
        p, r = e.shape
        if v.shape != (p, r, r):
            raise DimensionError(
                f"variances must be (p, r, r) = {(p, r, r)}, got shape {v.shape}"
            )
        object.__setattr__(self, "estimates", e)
        object.__setattr__(self, "variances", v)

    @property
    def p(self) -> int:
        return self.estimates.shape[0]

    @property
    def r(self) -> int:
        return self.estimates.shape[1]


def collect_row_estimates(
    array: DataArray,
    estimator: EstimatorSpec,
    config: BootstrapConfig = BootstrapConfig(),
) -> RowEstimates:
    """Evaluate the estimator and its bootstrap variance on every row.

    Row j draws from a stream keyed by ("row", j) on top of the config
    seed, so the p bootstraps are mutually independent yet reproducible.
    """
    estimates = []
    variances = []
    for j in range(1, array.p + 1):
        row = array.row(j)
        estimates.append(apply_estimator(estimator, row, f"row {j}"))
        variances.append(iid_bootstrap_variance(row, estimator, config, key=("row", j)).matrix)
    return RowEstimates(estimates=np.stack(estimates), variances=np.stack(variances))


def pairwise_difference_variance(estimates: np.ndarray) -> np.ndarray:
    """Average outer product of row-estimate differences over ordered pairs.

    (1 / (p (p-1))) * sum_{j != k} (theta_j - theta_k)(theta_j - theta_k)'.
    Under row exchangeability this estimates Sigma_j + Sigma_k - 2*Cov,
    the variance of the difference of two row estimators.
    """
    e = np.asarray(estimates, dtype=np.float64)
    if e.ndim != 2:
        raise DimensionError(f"estimates must be (p, r), got shape {e.shape}")
    p = e.shape[0]
    if p < 2:
        raise InsufficientDataError(f"need at least 2 rows for pairwise differences, got {p}")
    diff = e[:, None, :] - e[None, :, :]
    return np.einsum("jka,jkb->ab", diff, diff) / (p * (p - 1))


def cross_covariance(rows: RowEstimates, j: int, k: int) -> np.ndarray:
    """Moment-matched covariance between the row-j and row-k estimators.

    [Sigma_j + Sigma_k - pairwise_difference_variance] / 2, symmetrised.
    Requires j != k; the diagonal is the row's own bootstrap variance.
    """
    if j == k:
        raise ValueError(f"j = k = {j}: a row's covariance with itself is its bootstrap variance")
    p = rows.p
    if not (1 <= j <= p and 1 <= k <= p):
        raise BoundsError(f"row pair ({j}, {k}) outside 1..{p}")
    vtilde = pairwise_difference_variance(rows.estimates)
    c = 0.5 * (rows.variances[j - 1] + rows.variances[k - 1] - vtilde)
    return 0.5 * (c + c.T)


def gb1_variance(rows: RowEstimates) -> VarianceEstimate:
    """Combine row variances and cross covariances for the equal-weight mean.

    p^{-2} [ sum_j Sigma_j + sum_{j != k} cov(j, k) ] with the closed form
    sum_{j != k} cov(j, k) = (p - 1) sum_j Sigma_j - p (p - 1) vtilde / 2,
    followed by projection onto the PSD cone (the combination can go
    negative when rows disagree more than their own variances allow).

    Raises InsufficientDataError for p < 2 and emits FewRowsWarning for
    p < 5, where the p (p - 1) pairwise differences are very noisy.
    """
    p = rows.p
    if p < 2:
        raise InsufficientDataError(f"gap bootstrap I needs at least 2 rows, got {p}")
    if p < 5:
        warnings.warn(
            f"gap bootstrap I with only {p} rows: cross-covariance rests on "
            f"{p * (p - 1)} pairwise differences",
            FewRowsWarning,
            stacklevel=2,
        )
    vtilde = pairwise_difference_variance(rows.estimates)
    total = rows.variances.sum(axis=0)
    cross_total = (p - 1) * total - 0.5 * p * (p - 1) * vtilde
    combined = (total + cross_total) / p**2
    return VarianceEstimate(matrix=psd_project(combined), method="gb1")
