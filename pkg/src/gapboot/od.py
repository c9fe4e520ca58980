"""Origin-destination split estimation on daily slot records.

Traffic entering a corridor at 7 origins leaves at 7 destinations; a
trip entering at origin k can only leave at destination j >= k, and the
last origin feeds only the last destination.  The 21 free split
proportions theta = (p_11..p_16, p_22..p_26, ..., p_66) are estimated by
least squares from daily records of origin and destination counts, one
record per (day, slot) pair.  Days play the role of periods and the S
slots within a day the role of rows of a gapped array, so the gap
bootstrap machinery applies with slot-specific weight matrices
W_k = Gamma_full^{-1} Gamma_slot.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from ._rand import derived_stream
from .errors import (
    BoundsError,
    ConfigError,
    ConsistencyError,
    DataError,
    DegenerateCorrelationError,
    DimensionError,
    InsufficientDataError,
    RankError,
)
from .gb1 import RowEstimates, gb1_variance
from .gb2 import default_block_length
from .resample import BootstrapConfig

__all__ = [
    "DEFAULT_SPLIT_THETA",
    "ODDataset",
    "PARAM_NAMES",
    "SplitProportions",
    "build_design",
    "ls_estimate",
    "od_gb1_standard_errors",
    "od_gb2_standard_errors",
    "od_weights",
    "read_od_csv",
    "recover_split_matrix",
    "surrogate_od_dataset",
    "write_od_csv",
]

#: Condition-number ceiling for the normal-equation solves.
MAX_CONDITION = 1e12

PARAM_NAMES = tuple(f"p{k}{j}" for k in range(1, 7) for j in range(k, 7))

#: A feasible default split used by the surrogate generator: mass decays
#: with distance and every row leaves something for the final destination.
DEFAULT_SPLIT_THETA = (
    0.55, 0.18, 0.10, 0.07, 0.05, 0.03,
    0.50, 0.20, 0.12, 0.08, 0.06,
    0.48, 0.22, 0.14, 0.09,
    0.52, 0.24, 0.15,
    0.55, 0.28,
    0.62,
)


def _design_basis() -> np.ndarray:
    """basis[k] is d(O)/d(o_{k+1}), shape (7, 21), for origins 1..6."""
    basis = np.zeros((6, 7, 21))
    col = 0
    for k in range(6):
        width = 6 - k
        for t in range(width):
            basis[k, k + t, col + t] = 1.0
            basis[k, 6, col + t] = -1.0
        col += width
    return basis


_BASIS = _design_basis()


def build_design(origins, destinations) -> tuple[np.ndarray, np.ndarray]:
    """Design matrix and response of one record.

    Returns (O, D') with O of shape (7, 21) -- block k carrying o_k on
    the shifted diagonal of rows k..6 and -o_k across the last row --
    and D' = (d_1, ..., d_6, d_7 - sum_k o_k).
    """
    o = np.asarray(origins, dtype=np.float64)
    d = np.asarray(destinations, dtype=np.float64)
    if o.shape != (7,) or d.shape != (7,):
        raise DimensionError(f"expected 7 origins and 7 destinations, got {o.shape} and {d.shape}")
    if not (np.isfinite(o).all() and np.isfinite(d).all()):
        raise DataError("record contains non-finite counts")
    design = np.einsum("k,kij->ij", o[:6], _BASIS)
    response = np.concatenate([d[:6], [d[6] - o.sum()]])
    return design, response


@dataclass(frozen=True)
class ODDataset:
    """Daily origin/destination counts, shape (days, slots, 7) each."""

    origins: np.ndarray
    destinations: np.ndarray

    def __post_init__(self):
        o = np.asarray(self.origins, dtype=np.float64)
        d = np.asarray(self.destinations, dtype=np.float64)
        if o.ndim != 3 or o.shape[2] != 7:
            raise DimensionError(f"origins must be (days, slots, 7), got shape {o.shape}")
        if d.shape != o.shape:
            raise DimensionError(
                f"destinations shape {d.shape} does not match origins shape {o.shape}"
            )
        if o.shape[0] < 2:
            raise InsufficientDataError(f"need at least 2 days, got {o.shape[0]}")
        if not (np.isfinite(o).all() and np.isfinite(d).all()):
            raise DataError("dataset contains non-finite counts")
        if (o < 0).any() or (d < 0).any():
            raise DataError("dataset contains negative counts")
        object.__setattr__(self, "origins", o)
        object.__setattr__(self, "destinations", d)

    @property
    def days(self) -> int:
        return self.origins.shape[0]

    @property
    def slots(self) -> int:
        return self.origins.shape[1]


@dataclass(frozen=True)
class SplitProportions:
    """The 21 free parameters plus derived full-matrix views."""

    theta: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.theta, dtype=np.float64)
        if t.shape != (21,):
            raise DimensionError(f"theta must have 21 entries, got shape {t.shape}")
        object.__setattr__(self, "theta", t)

    @property
    def matrix(self) -> np.ndarray:
        return recover_split_matrix(self.theta)

    def infeasible_entries(self) -> list[tuple[int, int, float]]:
        """Cells of the full split matrix outside [0, 1], as (origin, destination, value)."""
        full = self.matrix
        out = []
        for i in range(7):
            for j in range(i, 7):
                v = float(full[i, j])
                if not 0.0 <= v <= 1.0:
                    out.append((i + 1, j + 1, v))
        return out


def recover_split_matrix(theta) -> np.ndarray:
    """Upper-triangular 7x7 split matrix implied by the 21 free parameters.

    Row k holds p_kk..p_k6 from theta, then p_k7 = 1 - their sum; row 7
    is (0, ..., 0, 1).  Rows therefore sum to one by construction.
    """
    t = np.asarray(theta, dtype=np.float64)
    if t.shape != (21,):
        raise DimensionError(f"theta must have 21 entries, got shape {t.shape}")
    full = np.zeros((7, 7))
    col = 0
    for k in range(6):
        width = 6 - k
        row = t[col : col + width]
        full[k, k:6] = row
        full[k, 6] = 1.0 - row.sum()
        col += width
    full[6, 6] = 1.0
    return full


# ---------------------------------------------------------------------------
# CSV interchange
# ---------------------------------------------------------------------------

OD_CSV_COLUMNS = (
    ["day", "slot"]
    + [f"o{i}" for i in range(1, 8)]
    + [f"d{i}" for i in range(1, 8)]
)


def read_od_csv(path) -> ODDataset:
    """Load a dataset from ``day,slot,o1..o7,d1..d7`` records.

    Every (day, slot) pair must occur exactly once and the slot values
    must cover 1..S for each day; days are taken in sorted order.
    """
    records: dict[tuple[int, int], np.ndarray] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or list(reader.fieldnames) != OD_CSV_COLUMNS:
            raise DataError(
                f"bad header: expected {','.join(OD_CSV_COLUMNS)}, got "
                f"{','.join(reader.fieldnames or [])}"
            )
        for lineno, row in enumerate(reader, start=2):
            try:
                day = int(row["day"])
                slot = int(row["slot"])
                vals = np.array([float(row[c]) for c in OD_CSV_COLUMNS[2:]])
            except (TypeError, ValueError) as exc:
                raise DataError(f"unparseable record at line {lineno}: {exc}") from exc
            if (day, slot) in records:
                raise DataError(f"duplicate record for day {day}, slot {slot} at line {lineno}")
            records[(day, slot)] = vals
    if not records:
        raise DataError("empty dataset")
    days = sorted({k[0] for k in records})
    slots = sorted({k[1] for k in records})
    if slots != list(range(1, len(slots) + 1)):
        raise DataError(f"slots must cover 1..S, got {slots}")
    origins = np.empty((len(days), len(slots), 7))
    destinations = np.empty((len(days), len(slots), 7))
    for di, day in enumerate(days):
        for si, slot in enumerate(slots):
            try:
                vals = records[(day, slot)]
            except KeyError:
                raise DataError(f"missing record for day {day}, slot {slot}") from None
            origins[di, si] = vals[:7]
            destinations[di, si] = vals[7:]
    return ODDataset(origins=origins, destinations=destinations)


def write_od_csv(dataset: ODDataset, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(OD_CSV_COLUMNS)
        for di in range(dataset.days):
            for si in range(dataset.slots):
                writer.writerow(
                    [di + 1, si + 1]
                    + [repr(float(v)) for v in dataset.origins[di, si]]
                    + [repr(float(v)) for v in dataset.destinations[di, si]]
                )


# ---------------------------------------------------------------------------
# Least squares and weights
# ---------------------------------------------------------------------------

def _statistics(dataset: ODDataset) -> tuple[np.ndarray, np.ndarray]:
    """Per-record normal-equation pieces G = O'O (D, S, 21, 21) and h = O'D'."""
    o = dataset.origins
    d = dataset.destinations
    design = np.einsum("dsk,kij->dsij", o[..., :6], _BASIS)
    response = np.concatenate([d[..., :6], (d[..., 6] - o.sum(axis=-1))[..., None]], axis=-1)
    g = np.einsum("dsij,dsik->dsjk", design, design)
    h = np.einsum("dsij,dsi->dsj", design, response)
    return g, h


def _check_condition(gamma: np.ndarray, what: str) -> None:
    eig = np.linalg.eigvalsh(0.5 * (gamma + gamma.T))
    if eig[0] <= 0.0 or eig[-1] / eig[0] > MAX_CONDITION:
        cond = np.inf if eig[0] <= 0.0 else eig[-1] / eig[0]
        raise RankError(f"normal equations for {what} are rank deficient (condition {cond:.2e})")


def _solve(gamma: np.ndarray, rhs: np.ndarray, what: str, ridge: float = 0.0) -> np.ndarray:
    g = gamma + ridge * np.eye(gamma.shape[0]) if ridge else gamma
    _check_condition(g, what)
    try:
        return cho_solve(cho_factor(g), rhs)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - guarded by cond check
        raise RankError(f"normal equations for {what} could not be factorised: {exc}") from exc


def ls_estimate(dataset: ODDataset, slot: int | None = None, *, ridge: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Least-squares split estimate from one slot's records (or all).

    Returns ``(theta, gamma)`` where gamma is the accumulated O'O matrix
    actually solved (including any ridge term).  ``slot`` is 1-based;
    ``None`` pools every record.  Rank-deficient or ill-conditioned
    normal equations (condition number above 1e12) raise RankError.
    """
    g, h = _statistics(dataset)
    if slot is None:
        gamma = g.sum(axis=(0, 1))
        rhs = h.sum(axis=(0, 1))
        what = "all slots"
    else:
        if not 1 <= slot <= dataset.slots:
            raise BoundsError(f"slot {slot} outside 1..{dataset.slots}")
        gamma = g[:, slot - 1].sum(axis=0)
        rhs = h[:, slot - 1].sum(axis=0)
        what = f"slot {slot}"
    if ridge:
        gamma = gamma + ridge * np.eye(21)
    theta = _solve(gamma, rhs, what)
    return theta, gamma


def od_weights(gamma_full: np.ndarray, slot_gammas: np.ndarray) -> np.ndarray:
    """Slot weight matrices W_k = Gamma_full^{-1} Gamma_k, shape (S, r, r).

    Validates that the slot matrices sum to the full matrix (the slots
    partition the records) and that the weights sum to the identity,
    both to within 1e-8 relative tolerance.
    """
    gf = np.asarray(gamma_full, dtype=np.float64)
    gs = np.asarray(slot_gammas, dtype=np.float64)
    if gf.ndim != 2 or gf.shape[0] != gf.shape[1]:
        raise DimensionError(f"gamma_full must be square, got shape {gf.shape}")
    r = gf.shape[0]
    if gs.ndim != 3 or gs.shape[1:] != (r, r):
        raise DimensionError(f"slot_gammas must be (S, {r}, {r}), got shape {gs.shape}")
    scale = max(float(np.abs(gf).max()), 1.0)
    if float(np.abs(gs.sum(axis=0) - gf).max()) > 1e-8 * scale:
        raise ConsistencyError("slot matrices do not sum to the full matrix")
    _check_condition(gf, "all slots")
    factor = cho_factor(gf)
    weights = np.stack([cho_solve(factor, gk) for gk in gs])
    if float(np.abs(weights.sum(axis=0) - np.eye(r)).max()) > 1e-8:
        raise ConsistencyError("slot weights do not sum to the identity")
    return weights


# ---------------------------------------------------------------------------
# Bootstrap within slots
# ---------------------------------------------------------------------------

def _slot_bootstrap_covs(
    g: np.ndarray, h: np.ndarray, config: BootstrapConfig, ridge: float
) -> np.ndarray:
    """Pairs-bootstrap covariance of each slot estimate, shape (S, 21, 21).

    Within slot k whole day-records are resampled with replacement;
    replicate b re-solves the normal equations built from its day
    multiplicities.  Streams are keyed by slot, so slot draws are
    independent of each other and of the slot count.
    """
    days, slots = g.shape[0], g.shape[1]
    reps = config.replicates
    eye = ridge * np.eye(21) if ridge else None
    covs = np.empty((slots, 21, 21))
    for k in range(slots):
        rng = derived_stream(config.seed, "slot", k + 1)
        idx = rng.integers(0, days, size=(reps, days), dtype=np.int64)
        flat = idx + np.arange(reps)[:, None] * days
        counts = np.bincount(flat.ravel(), minlength=reps * days).reshape(reps, days)
        counts = counts.astype(np.float64)
        gb = (counts @ g[:, k].reshape(days, 441)).reshape(reps, 21, 21)
        hb = counts @ h[:, k]
        if eye is not None:
            gb = gb + eye
        try:
            thetas = np.linalg.solve(gb, hb[..., None])[..., 0]
        except np.linalg.LinAlgError as exc:
            raise RankError(
                f"singular bootstrap normal equations in slot {k + 1}: {exc}"
            ) from exc
        dev = thetas - thetas.mean(axis=0)
        covs[k] = dev.T @ dev / reps
    return covs


def _window_estimates(
    g: np.ndarray, h: np.ndarray, ell: int, ridge: float
) -> np.ndarray:
    """Slot estimates on sliding windows of ell whole days, shape (S, I, 21)."""
    days, slots = g.shape[0], g.shape[1]
    count = days - ell + 1
    cg = np.cumsum(g, axis=0)
    ch = np.cumsum(h, axis=0)
    gwin = cg[ell - 1 :].copy()
    gwin[1:] -= cg[: days - ell]
    hwin = ch[ell - 1 :].copy()
    hwin[1:] -= ch[: days - ell]
    if ridge:
        gwin = gwin + ridge * np.eye(21)
    out = np.empty((slots, count, 21))
    for k in range(slots):
        try:
            out[k] = np.linalg.solve(gwin[:, k], hwin[:, k][..., None])[..., 0]
        except np.linalg.LinAlgError as exc:
            raise RankError(f"singular window normal equations in slot {k + 1}: {exc}") from exc
    return out


def od_gb2_standard_errors(
    dataset: ODDataset,
    ell: int | None = None,
    config: BootstrapConfig = BootstrapConfig(),
    *,
    degenerate: str = "error",
    ridge: float = 0.0,
) -> np.ndarray:
    """Gap bootstrap II standard errors of the 21 pooled split estimates.

    Combines, for each parameter a, the slot-level bootstrap scales
    sigma_ak = sqrt(w_ak' Cov_k w_ak) (w_ak the a-th row of the slot
    weight W_k) through the correlation of the slot window-estimate
    projections, centred at the full-data estimate:

        Var(theta_n[a]) = sum_{k,l} sigma_ak sigma_al rho_a(k, l).

    Parameters
    ----------
    dataset : ODDataset
    ell : int, optional
        Window length in days; default ``default_block_length(days)``.
    config : BootstrapConfig
        Slot bootstrap replicates and seed.
    degenerate : {"error", "zero"}
        Policy when a window-projection series has zero variability.
    ridge : float
        Optional ridge added to every normal-equation solve for nearly
        collinear volumes.  When positive, the weight/partition identity
        checks are skipped (the ridge perturbs them by design).

    Returns
    -------
    ndarray, shape (21,)
        Standard errors ordered as PARAM_NAMES.
    """
    if degenerate not in ("error", "zero"):
        raise ConfigError(f"degenerate policy must be 'error' or 'zero', got {degenerate!r}")
    g, h = _statistics(dataset)
    days, slots = dataset.days, dataset.slots
    gk = g.sum(axis=0)
    hk = h.sum(axis=0)
    g0 = gk.sum(axis=0)
    h0 = hk.sum(axis=0)
    theta = _solve(g0, h0, "all slots", ridge)
    if ridge:
        factor = cho_factor(g0 + ridge * np.eye(21))
        weights = np.stack([cho_solve(factor, gmat) for gmat in gk])
    else:
        weights = od_weights(g0, gk)
    if ell is None:
        ell = default_block_length(days)
    if not 1 < ell < days:
        raise BoundsError(f"window length {ell} outside 2..{days - 1}")

    window = _window_estimates(g, h, ell, ridge)  # (S, I, 21)
    count = window.shape[1]
    dev = window - theta[None, None, :]
    proj = np.einsum("kab,kib->aki", weights, dev)  # (21, S, I)
    moment = np.einsum("aki,aki->ak", proj, proj) / count  # (21, S)
    num = np.einsum("aki,ali->akl", proj, proj) / count  # (21, S, S)
    # Window solves on noise-free data leave round-off residue (~1e-13 of
    # the estimate), so degeneracy is judged against a scale-aware floor
    # rather than exact zero: genuine window variation sits many orders
    # above it.
    floor = (1e-9 * (1.0 + np.abs(theta))) ** 2
    flat = moment <= floor[:, None]  # (21, S)
    if degenerate == "error" and flat.any():
        a, k = np.argwhere(flat)[0]
        raise DegenerateCorrelationError(
            f"window projections carry no variation for parameter {PARAM_NAMES[a]} "
            f"in slot {k + 1}"
        )
    den = np.sqrt(moment[:, :, None] * moment[:, None, :])
    live = ~(flat[:, :, None] | flat[:, None, :])
    rho = np.divide(num, den, out=np.zeros_like(num), where=live & (den > 0.0))
    rho = np.clip(rho, -1.0, 1.0)
    ident = np.arange(slots)
    rho[:, ident, ident] = 1.0

    covs = _slot_bootstrap_covs(g, h, config, ridge)
    quad = np.einsum("kab,kbc,kac->ak", weights, covs, weights)
    sigma = np.sqrt(np.clip(quad, 0.0, None))
    var = np.einsum("ak,akl,al->a", sigma, rho, sigma)
    return np.sqrt(np.clip(var, 0.0, None))


def od_gb1_standard_errors(
    dataset: ODDataset,
    config: BootstrapConfig = BootstrapConfig(),
    *,
    ridge: float = 0.0,
) -> np.ndarray:
    """Gap bootstrap I standard errors from the per-slot split estimates.

    Treats the S slot estimates as exchangeable rows: per-slot pairs
    bootstraps give the slot variances, pairwise differences the common
    cross-slot covariance, and the equally weighted combination formula
    the variance of the pooled estimate.  Shares the slot bootstrap
    streams with the GB-II path, so both report consistent slot scales.
    """
    g, h = _statistics(dataset)
    gk = g.sum(axis=0)
    hk = h.sum(axis=0)
    estimates = np.stack(
        [_solve(gk[k], hk[k], f"slot {k + 1}", ridge) for k in range(dataset.slots)]
    )
    covs = _slot_bootstrap_covs(g, h, config, ridge)
    rows = RowEstimates(estimates=estimates, variances=covs)
    return gb1_variance(rows).standard_errors


# ---------------------------------------------------------------------------
# Surrogate generator
# ---------------------------------------------------------------------------

def _ar1_path(rng, days: int, shape: tuple, sd: float, phi: float) -> np.ndarray:
    """Stationary AR(1) sample path over days, i.i.d. across ``shape``."""
    path = np.empty((days,) + shape)
    path[0] = rng.normal(0.0, sd, size=shape)
    if phi > 0.0:
        innov = sd * np.sqrt(1.0 - phi * phi)
        for t in range(1, days):
            path[t] = phi * path[t - 1] + rng.normal(0.0, innov, size=shape)
    else:
        path[1:] = rng.normal(0.0, sd, size=(days - 1,) + shape)
    return path


def surrogate_od_dataset(
    days: int,
    slots: int = 36,
    *,
    seed: int = 0,
    design_seed: int = 0,
    day_ar: float = 0.0,
    day_scale: float = 0.15,
    noise: float = 0.05,
    split_drift: float = 0.0,
    slot_spread: float = 0.35,
    jitter: float = 0.1,
    base_volume: float = 60.0,
    theta=None,
) -> tuple[ODDataset, SplitProportions]:
    """Generate a synthetic corridor dataset with known split proportions.

    Origin volumes are lognormal: a fixed per-origin level plus a
    per-(slot, origin) profile with log-scale ``slot_spread`` (both drawn
    once from ``design_seed``; vary ``seed`` alone to replicate the same
    corridor), an AR(1) day effect with coefficient ``day_ar`` shared by
    all slots of a day, and independent log-scale ``jitter`` per record.
    ``slot_spread=0`` makes the slots statistically interchangeable.

    Destination counts are ``origins @ P`` plus mean-zero noise with two
    parts.  The first is i.i.d. N(0, (noise * base_volume)^2) per count.
    The second, scaled by ``split_drift``, perturbs the day's effective
    split pattern: destinations gain ``origins @ dP_d`` where dP_d
    spreads an AR(1) path (coefficient ``day_ar``, per-entry standard
    deviation ``split_drift``) over the 21 free proportions, the last
    column absorbing the row sums.  By linearity of the design this is a
    mean-zero shift of the fitted coefficients shared by all slots of
    the day, so with ``day_ar > 0`` the slot estimates are serially
    dependent in a way i.i.d. within-slot resampling cannot see, while
    ``E[destinations]`` still follows the fixed generating theta.
    Counts are truncated at zero; with ``noise = split_drift = 0`` the
    split model holds exactly and least squares recovers theta to solver
    precision.

    Returns the dataset together with the generating SplitProportions.
    """
    if days < 2:
        raise InsufficientDataError(f"need at least 2 days, got {days}")
    if slots < 1:
        raise ConfigError(f"need at least 1 slot, got {slots}")
    if not 0.0 <= day_ar < 1.0:
        raise ConfigError(f"day_ar must lie in [0, 1), got {day_ar}")
    if noise < 0.0:
        raise ConfigError(f"noise must be >= 0, got {noise}")
    if split_drift < 0.0:
        raise ConfigError(f"split_drift must be >= 0, got {split_drift}")
    if slot_spread < 0.0:
        raise ConfigError(f"slot_spread must be >= 0, got {slot_spread}")
    if jitter < 0.0:
        raise ConfigError(f"jitter must be >= 0, got {jitter}")
    if day_scale < 0.0:
        raise ConfigError(f"day_scale must be >= 0, got {day_scale}")
    truth = SplitProportions(theta=np.asarray(theta if theta is not None else DEFAULT_SPLIT_THETA))
    bad = truth.infeasible_entries()
    if bad:
        raise ConfigError(f"theta implies split proportions outside [0, 1]: {bad[:3]}")
    full = truth.matrix

    design_rng = derived_stream(design_seed, "od-profile")
    level = design_rng.normal(0.0, 0.35, size=7)
    scale = design_rng.normal(0.0, slot_spread, size=slots)
    profile = np.exp(level[None, :] + scale[:, None])

    rng = derived_stream(seed, "od-surrogate")
    delta = _ar1_path(rng, days, (7,), day_scale, day_ar)
    wobble = rng.normal(0.0, jitter, size=(days, slots, 7))
    origins = base_volume * profile[None, :, :] * np.exp(delta[:, None, :] + wobble)
    destinations = np.einsum("dsk,kj->dsj", origins, full)
    if split_drift > 0.0:
        wiggle = _ar1_path(rng, days, (21,), split_drift, day_ar)
        dp = np.zeros((days, 7, 7))
        col = 0
        for k in range(6):
            width = 6 - k
            dp[:, k, k:6] = wiggle[:, col : col + width]
            dp[:, k, 6] = -wiggle[:, col : col + width].sum(axis=1)
            col += width
        exposure = np.exp(scale)
        exposure = exposure / exposure.mean()
        drifted = np.einsum("dsk,dkj->dsj", origins, dp)
        destinations = destinations + exposure[None, :, None] * drifted
    if noise > 0.0:
        destinations = destinations + rng.normal(0.0, noise * base_volume, size=(days, slots, 7))
    if noise > 0.0 or split_drift > 0.0:
        destinations = np.clip(destinations, 0.0, None)
    return ODDataset(origins=origins, destinations=destinations), truth
