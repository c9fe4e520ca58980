"""Within-row i.i.d. bootstrap.

Rows of a gapped array are treated as i.i.d. samples; the bootstrap
resamples a row with replacement, evaluates the estimator on each
resample, and reports the spread of the replicates around their mean
(divisor B, the Monte Carlo population convention).  Small samples can
be enumerated exhaustively, which removes all Monte Carlo error.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._rand import derived_stream
from .core import EstimatorSpec, VarianceEstimate, apply_estimator_batch
from .errors import ConfigError, InsufficientDataError

__all__ = [
    "BootstrapConfig",
    "bootstrap_replicates",
    "iid_bootstrap_variance",
    "resample_indices",
]

#: Largest number of resamples the exhaustive mode will enumerate (m**m).
MAX_EXHAUSTIVE = 1_000_000

#: Replicates are evaluated in chunks of this many resamples to bound memory.
_CHUNK = 65_536


@dataclass(frozen=True)
class BootstrapConfig:
    """Replicate count, seed, and sampling mode for bootstrap draws.

    mode "monte_carlo" draws ``replicates`` random resamples; mode
    "exhaustive" enumerates all m**m index tuples (allowed only while
    m**m <= 1e6, i.e. m <= 7) and ignores ``replicates`` and ``seed``.
    """

    replicates: int = 1000
    seed: int = 0
    mode: str = "monte_carlo"

    def __post_init__(self):
        if self.mode not in ("monte_carlo", "exhaustive"):
            raise ConfigError(f"unknown bootstrap mode {self.mode!r}")
        if self.mode == "monte_carlo" and self.replicates < 2:
            raise ConfigError(f"need at least 2 replicates, got {self.replicates}")


def resample_indices(m: int, replicates: int, seed: int, key: tuple = ()) -> np.ndarray:
    """Draw a (replicates, m) table of with-replacement indices in [0, m).

    The whole table is one batched draw from a stream derived from
    ``(seed, *key)``; replicate b is row b.  Consequently the draw for
    replicate b never depends on the total replicate count requested by
    other callers, only on its own position.
    """
    rng = derived_stream(seed, *key)
    return rng.integers(0, m, size=(replicates, m), dtype=np.int64)


def _exhaustive_indices(m: int) -> np.ndarray:
    """All m**m resample index tuples in lexicographic order, shape (m**m, m)."""
    total = m**m
    grids = np.unravel_index(np.arange(total), (m,) * m)
    return np.stack(grids, axis=1).astype(np.int64)


def _evaluate_resamples(
    sample: np.ndarray, indices: np.ndarray, estimator: EstimatorSpec
) -> np.ndarray:
    out = np.empty((indices.shape[0], estimator.dim))
    for lo in range(0, indices.shape[0], _CHUNK):
        chunk = indices[lo : lo + _CHUNK]
        out[lo : lo + chunk.shape[0]] = apply_estimator_batch(
            estimator, sample[chunk], f"resamples {lo + 1}.."
        )
    return out


def _as_sample(sample) -> np.ndarray:
    arr = np.asarray(sample, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise InsufficientDataError(f"sample must be (m,) or (m, d), got ndim={arr.ndim}")
    if arr.shape[0] < 2:
        raise InsufficientDataError(f"need at least 2 observations, got {arr.shape[0]}")
    return arr


def bootstrap_replicates(
    sample,
    estimator: EstimatorSpec,
    config: BootstrapConfig = BootstrapConfig(),
    key: tuple = (),
) -> np.ndarray:
    """Estimator values on each bootstrap resample, shape (B, r).

    In exhaustive mode B = m**m and the rows enumerate every resample in
    lexicographic index order, each occurring exactly once.
    """
    arr = _as_sample(sample)
    m = arr.shape[0]
    if config.mode == "exhaustive":
        if m**m > MAX_EXHAUSTIVE:
            raise ConfigError(
                f"exhaustive mode enumerates m**m = {m**m} resamples, "
                f"above the limit {MAX_EXHAUSTIVE}"
            )
        idx = _exhaustive_indices(m)
    else:
        idx = resample_indices(m, config.replicates, config.seed, key)
    return _evaluate_resamples(arr, idx, estimator)


def iid_bootstrap_variance(
    sample,
    estimator: EstimatorSpec,
    config: BootstrapConfig = BootstrapConfig(),
    key: tuple = (),
) -> VarianceEstimate:
    """Bootstrap variance of the estimator over one i.i.d. sample.

    Parameters
    ----------
    sample : array_like, shape (m,) or (m, d)
        Observations assumed i.i.d.; m >= 2.
    estimator : EstimatorSpec
    config : BootstrapConfig
        Replicate count B, seed and mode.
    key : tuple
        Extra stream-key components (e.g. the row index) so distinct
        rows driven by the same seed get independent draws.

    Returns
    -------
    VarianceEstimate
        (1/B) * sum_b (theta*_b - mean(theta*)) (theta*_b - mean(theta*))',
        an (r, r) PSD matrix.  In exhaustive mode the average runs over
        all m**m equally likely resamples and is exact.

    Notes
    -----
    For the sample mean the exhaustive value equals the plug-in variance
    divided by m; e.g. rows (0, 2) -> 0.5 and (1, 2, 3) -> 2/9.
    """
    reps = bootstrap_replicates(sample, estimator, config, key)
    dev = reps - reps.mean(axis=0)
    cov = dev.T @ dev / reps.shape[0]
    return VarianceEstimate(matrix=cov, method=f"iid_bootstrap[{config.mode}]")
