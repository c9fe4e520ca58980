"""Reference methods: subsampling, a column block bootstrap, and the
naive independent-column estimate.

All three operate on whole columns of the gapped array, treating each
period as one sampling unit, and serve as comparison points for the gap
bootstrap methods.
"""
from __future__ import annotations

import numpy as np

from ._rand import derived_stream
from .core import (
    DataArray,
    EstimatorSpec,
    VarianceEstimate,
    apply_estimator,
    apply_estimator_batch,
    psd_project,
)
from .errors import BoundsError
from .resample import BootstrapConfig

__all__ = [
    "block_bootstrap_variance",
    "naive_column_variance",
    "subsampling_variance",
]


def subsampling_variance(array: DataArray, estimator: EstimatorSpec, ell: int) -> VarianceEstimate:
    """Subsampling estimate from overlapping windows of ell whole columns.

    (ell * p / n) * I^{-1} sum_i (theta_i - theta_full)(theta_i - theta_full)'
    over the I = m - ell + 1 windows, theta_i evaluated on the window's
    ell*p observations in series order.  The leading factor rescales the
    window-level sampling variability to full-sample size.
    """
    m, p = array.m, array.p
    if not 1 < ell < m:
        raise BoundsError(f"window length {ell} outside 2..{m - 1}")
    count = m - ell + 1
    full = apply_estimator(estimator, array.series(), "full series")
    # Window means of columns via one stacked batch: (I, ell*p, d).
    windows = np.stack([array.column_block(i, ell) for i in range(1, count + 1)])
    theta = apply_estimator_batch(estimator, windows, "subsampling windows")
    dev = theta - full
    cov = dev.T @ dev / count
    scaled = (ell * p / array.n) * cov
    return VarianceEstimate(matrix=scaled, method="subsampling")


def block_bootstrap_variance(
    array: DataArray,
    estimator: EstimatorSpec,
    ell: int,
    config: BootstrapConfig = BootstrapConfig(),
    key: tuple = (),
) -> VarianceEstimate:
    """Moving-block bootstrap over columns.

    Each replicate concatenates ceil(m / ell) uniformly chosen
    overlapping blocks of ell consecutive columns, truncated to m
    columns, and re-evaluates the estimator on the resulting series.
    The replicate spread (divisor B) is the variance estimate.  With
    ell = 1 this is the i.i.d. bootstrap over columns.
    """
    m, p, d = array.m, array.p, array.d
    if not 1 <= ell < m:
        raise BoundsError(f"block length {ell} outside 1..{m - 1}")
    reps = config.replicates
    nblocks = -(-m // ell)  # ceil
    rng = derived_stream(config.seed, "block_bootstrap", *key)
    starts = rng.integers(0, m - ell + 1, size=(reps, nblocks), dtype=np.int64)
    # Column indices of each replicate: starts expanded by 0..ell-1, truncated to m.
    cols = (starts[:, :, None] + np.arange(ell)[None, None, :]).reshape(reps, nblocks * ell)
    cols = cols[:, :m]
    theta = np.empty((reps, estimator.dim))
    chunk = max(1, 4_000_000 // (m * p * d))  # keep gathers around ~32 MB
    for lo in range(0, reps, chunk):
        gathered = array.values[cols[lo : lo + chunk]]  # (b, m, p, d)
        stack = gathered.reshape(gathered.shape[0], m * p, d)
        theta[lo : lo + gathered.shape[0]] = apply_estimator_batch(
            estimator, stack, f"block resamples {lo + 1}.."
        )
    dev = theta - theta.mean(axis=0)
    cov = dev.T @ dev / reps
    return VarianceEstimate(matrix=cov, method="block_bootstrap")


def naive_column_variance(
    array: DataArray, estimator: EstimatorSpec
) -> tuple[VarianceEstimate, np.ndarray]:
    """Treat per-column estimates as i.i.d. draws of the full estimator.

    Returns ``(estimate, discrepancy)`` where the estimate is
    m^{-1} * sample covariance (divisor m - 1) of the per-column
    estimates, and the discrepancy is theta_full minus the average
    column estimate -- zero for linear estimators, and a diagnostic of
    how far this shortcut is from consistent otherwise.
    """
    full = apply_estimator(estimator, array.series(), "full series")
    theta = apply_estimator_batch(estimator, array.values, "columns")
    centre = theta.mean(axis=0)
    dev = theta - centre
    cov = dev.T @ dev / (array.m - 1)
    estimate = VarianceEstimate(matrix=cov / array.m, method="naive_column")
    return estimate, full - centre
