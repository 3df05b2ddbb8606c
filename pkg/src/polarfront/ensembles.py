"""Statistics of random Pareto front surfaces.

A random front is characterised by its projected-length process; an ensemble
stores N sampled length fields over one shared direction grid, so every
statistic here is a per-column (per-direction) computation: means, weighted
bootstrap averages, covariances, deviation envelopes, empirical quantiles,
domination and deviation probabilities, and the excursion-set statistics
(quantile, bisection mean, deviation) from random-set theory.

When the ensemble was built from an objective table (N samples of the
objective values over a finite input space), the table is retained so that
lengths can be re-scalarised exactly at arbitrary directions instead of
falling back to nearest-grid lookup.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InsufficientDataError
from .fronts import ScoringSpec, grid_hypervolume, hypervolume_distance
from .geometry import (
    DirectionGrid,
    GridFront,
    as_vector,
    direction_array,
    optimal_direction,
    projected_lengths,
)


@dataclass(frozen=True, eq=False)
class ObjectiveTable:
    """Sampled objective values over a finite input space.

    ``samples[n, x, :]`` is the objective vector produced by input ``x`` in
    sample ``n``.
    """

    input_ids: tuple
    samples: np.ndarray  # (N, X, M)

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=float)
        if arr.ndim != 3:
            raise ValueError("samples must have shape (N, X, M)")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("objective table must be non-empty")
        if not np.all(np.isfinite(arr)):
            raise ValueError("objective table values must be finite")
        if len(self.input_ids) != arr.shape[1]:
            raise ValueError("one input id per table column is required")
        object.__setattr__(self, "input_ids", tuple(self.input_ids))
        arr = np.array(arr)
        arr.flags.writeable = False
        object.__setattr__(self, "samples", arr)

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.samples.shape[1]

    @property
    def dim(self) -> int:
        return self.samples.shape[2]


@dataclass(frozen=True, eq=False)
class FrontEnsemble:
    """N sampled front length fields over one shared grid.

    Sharing the grid is mandatory: statistics are taken per column and are
    meaningless across differing direction sets.
    """

    reference: np.ndarray
    grid: DirectionGrid
    lengths: np.ndarray  # (N, K)
    source: ObjectiveTable | None = None

    def __post_init__(self):
        ref = as_vector(self.reference, "reference")
        lengths = np.asarray(self.lengths, dtype=float)
        if lengths.ndim != 2 or lengths.shape[0] < 1:
            raise ValueError("lengths must be a non-empty (N, K) matrix")
        if lengths.shape[1] != self.grid.size:
            raise ValueError("lengths columns must match the grid size")
        if ref.size != self.grid.dim:
            raise ValueError("reference dimension does not match grid")
        if not np.all(np.isfinite(lengths)):
            raise ValueError("lengths must be finite")
        if np.any(lengths < 0):
            raise ValueError("lengths must be non-negative")
        if self.source is not None:
            if self.source.n_samples != lengths.shape[0]:
                raise ValueError("source sample count must match ensemble rows")
            if self.source.dim != ref.size:
                raise ValueError("source dimension must match reference")
        ref2 = np.array(ref)
        ref2.flags.writeable = False
        object.__setattr__(self, "reference", ref2)
        arr = np.array(lengths)
        arr.flags.writeable = False
        object.__setattr__(self, "lengths", arr)

    @property
    def n_samples(self) -> int:
        return self.lengths.shape[0]

    @property
    def dim(self) -> int:
        return self.reference.size

    def row_front(self, n: int) -> GridFront:
        return GridFront(self.reference, self.grid, self.lengths[n])

    def lengths_at(self, lam) -> np.ndarray:
        """Per-row projected length along an arbitrary direction, shape (N,).

        Exact re-scalarisation of the retained objective table when present;
        otherwise nearest-grid lookup (subject to the grid's angular
        resolution).
        """
        arr = direction_array(lam)
        if self.source is not None:
            return exact_lengths_at(self.source, self.reference, arr)
        return self.lengths[:, self.grid.nearest_index(arr)]


def exact_lengths_at(table: ObjectiveTable, eta: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """Per-sample best scalarised length over the input space at one direction."""
    diff = np.maximum(table.samples - np.asarray(eta, dtype=float), 0.0)  # (N, X, M)
    s = np.min(diff / lam, axis=2)  # (N, X)
    return s.max(axis=1)


def ensemble_from_objective_table(
    table: ObjectiveTable, eta, grid: DirectionGrid
) -> FrontEnsemble:
    """Build the length matrix of the front of each objective sample.

    Row n, column k is the largest scalarised length over the input space for
    sample n along grid direction k; the table is retained as the source.
    """
    eta = as_vector(eta, "reference")
    if table.dim != eta.size or grid.dim != eta.size:
        raise ValueError("dimension mismatch between table, reference and grid")
    rows = np.stack(
        [projected_lengths(table.samples[n], eta, grid.directions) for n in range(table.n_samples)]
    )
    return FrontEnsemble(eta, grid, rows, source=table)


def mean_front(e: FrontEnsemble) -> GridFront:
    """Per-direction arithmetic mean of the sampled length fields."""
    return GridFront(e.reference, e.grid, e.lengths.mean(axis=0))


def bayesian_bootstrap_front(e: FrontEnsemble, rounds: int, seed: int) -> list[GridFront]:
    """Bootstrap draws of the mean front under uniform random simplex weights.

    Each round draws weights proportional to iid standard exponentials
    (uniform on the probability simplex) and returns the weighted
    per-direction average.
    """
    if rounds < 1:
        raise ValueError("rounds must be at least 1")
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(rounds):
        w = rng.standard_exponential(e.n_samples)
        w = w / w.sum()
        out.append(GridFront(e.reference, e.grid, w @ e.lengths))
    return out


def length_covariance(e: FrontEnsemble, i: int, j: int) -> float:
    """Unbiased sample covariance between the length columns i and j."""
    if e.n_samples < 2:
        raise InsufficientDataError("covariance needs at least two samples")
    cols = e.lengths[:, [i, j]]
    return float(np.cov(cols[:, 0], cols[:, 1], ddof=1)[0, 1])


def covariance_matrix_pair(e: FrontEnsemble, i: int, j: int) -> np.ndarray:
    """Covariance matrix between two directions: lam_i lam_j^T times the scalar."""
    scalar = length_covariance(e, i, j)
    li = e.grid.directions[i]
    lj = e.grid.directions[j]
    return np.outer(li, lj) * scalar


def deviation_surfaces(e: FrontEnsemble, beta: float) -> tuple[GridFront, GridFront]:
    """Mean +- beta standard deviations per direction, truncated at zero.

    The results are polar surfaces but not necessarily valid fronts: the
    maximum ratio condition can fail, so they are excluded from validity
    guarantees.
    """
    if beta < 0:
        raise ValueError("beta must be non-negative")
    if e.n_samples < 2:
        raise InsufficientDataError("deviation surfaces need at least two samples")
    mu = e.lengths.mean(axis=0)
    sigma = e.lengths.std(axis=0, ddof=1)
    upper = np.maximum(mu + beta * sigma, 0.0)
    lower = np.maximum(mu - beta * sigma, 0.0)
    return (
        GridFront(e.reference, e.grid, upper),
        GridFront(e.reference, e.grid, lower),
    )


def empirical_quantile_rank(alpha: float, n: int) -> int:
    """Rank (1-based) of the lower empirical alpha-quantile: ceil(alpha*n)."""
    if not (0.0 < alpha < 1.0):
        raise ValueError("alpha must lie strictly inside (0, 1)")
    rank = math.ceil(alpha * n - 1e-9)
    return min(max(rank, 1), n)


def quantile_front(e: FrontEnsemble, alpha: float) -> GridFront:
    """Per-direction lower empirical quantile of the length columns.

    Uses the order statistic at rank ceil(alpha*N): deterministic, positively
    homogeneous and monotone, which keeps quantiles of valid ensembles valid.
    """
    rank = empirical_quantile_rank(alpha, e.n_samples)
    cols = np.sort(e.lengths, axis=0)
    return GridFront(e.reference, e.grid, cols[rank - 1])


def domination_probability(e: FrontEnsemble, y) -> float:
    """Fraction of sampled fronts whose domination region contains y.

    Counts rows whose length along the direction from the reference to y is
    at least ||y - reference||; ties count as dominated (closed region).
    """
    y = as_vector(y, "objective vector")
    if not np.all(y > e.reference):
        raise DomainError("y must strongly dominate the reference vector")
    lam = optimal_direction(y, e.reference)
    radius = float(np.linalg.norm(y - e.reference))
    row_lengths = e.lengths_at(lam)
    return float(np.mean(row_lengths >= radius))


def deviation_probability(ea: FrontEnsemble, eb: FrontEnsemble, y) -> float:
    """Probability that y falls strictly between two paired random fronts.

    For each paired sample, y is between the fronts exactly when
    (l_A/r - 1)(l_B/r - 1) < 0 with r = ||y - reference||; boundary contacts
    do not count.
    """
    y = as_vector(y, "objective vector")
    if ea.n_samples != eb.n_samples:
        raise ValueError("deviation probability needs paired samples")
    if not np.array_equal(ea.reference, eb.reference):
        raise ValueError("ensembles must share the reference vector")
    if not np.all(y > ea.reference):
        raise DomainError("y must strongly dominate the reference vector")
    lam = optimal_direction(y, ea.reference)
    radius = float(np.linalg.norm(y - ea.reference))
    la = ea.lengths_at(lam)
    lb = eb.lengths_at(lam)
    return float(np.mean((la / radius - 1.0) * (lb / radius - 1.0) < 0.0))


def vorobev_quantile_front(e: FrontEnsemble, alpha: float) -> GridFront:
    """Boundary of the alpha-level excursion set of the coverage function.

    The set of points dominated with probability at least alpha equals the
    domination region of the (1 - alpha)-quantile front, so this returns
    ``quantile_front(e, 1 - alpha)`` directly.
    """
    return quantile_front(e, 1.0 - alpha)


@dataclass(frozen=True)
class VorobevMeanResult:
    """Outcome of the bisection for the expectation-matching excursion level.

    ``front`` is the quantile front at ``alpha_star``; ``bracket`` holds the
    final (lo, hi) levels whose grid hypervolumes straddle ``expected_hv``;
    ``converged`` is False when the iteration budget ran out first.
    """

    front: GridFront
    alpha_star: float
    bracket: tuple[float, float]
    expected_hv: float
    converged: bool


def vorobev_mean_front(
    e: FrontEnsemble, hv_tol: float = 1e-3, max_iters: int = 50
) -> VorobevMeanResult:
    """Excursion level whose quantile front matches the expected hypervolume.

    Bisects the level alpha over (0, 1): the grid hypervolume of
    ``vorobev_quantile_front(alpha)`` is a non-increasing step function of
    alpha, and the returned level alpha* satisfies the two-sided property
    that its hypervolume is >= the expected hypervolume while any higher
    level falls at or below it.  The initial bracket (1/(2N), 1 - 1/(2N))
    maps to the max-row and min-row fronts, whose hypervolumes always
    straddle the row-average.
    """
    V = float(np.mean([grid_hypervolume(e.row_front(n)) for n in range(e.n_samples)]))
    n = e.n_samples

    def hv_at(alpha: float) -> float:
        return grid_hypervolume(vorobev_quantile_front(e, alpha))

    lo = 1.0 / (2 * n)
    hi = 1.0 - 1.0 / (2 * n)
    if n == 1:
        front = vorobev_quantile_front(e, 0.5)
        return VorobevMeanResult(front, 0.5, (0.5, 0.5), V, True)
    tol_hv = hv_tol * max(abs(V), 1e-300)
    converged = False
    alpha_star = lo
    for _ in range(max_iters):
        mid = 0.5 * (lo + hi)
        hv_mid = hv_at(mid)
        if abs(hv_mid - V) <= tol_hv:
            alpha_star = mid
            lo = mid
            converged = True
            break
        if hv_mid >= V:
            lo = mid
        else:
            hi = mid
        alpha_star = lo
        if hi - lo <= 1.0 / (max(n, 2) * 1024):
            converged = True
            break
    return VorobevMeanResult(
        front=vorobev_quantile_front(e, alpha_star),
        alpha_star=alpha_star,
        bracket=(lo, hi),
        expected_hv=V,
        converged=converged,
    )


def vorobev_deviation(e: FrontEnsemble, a: GridFront) -> float:
    """Expected symmetric-difference volume between ``a`` and the random front."""
    if a.grid != e.grid:
        raise ValueError("front must share the ensemble grid")
    if not np.array_equal(a.reference, e.reference):
        raise ValueError("front must share the ensemble reference")
    return float(np.mean([hypervolume_distance(a, e.row_front(n)) for n in range(e.n_samples)]))


def functional_front(e: FrontEnsemble, scoring: ScoringSpec) -> GridFront:
    """Per-direction minimiser of the empirical expected score.

    Squared scoring yields the column means (the mean front); pinball(alpha)
    yields the lower empirical alpha-quantile columns (the quantile front).
    """
    if scoring.kind == "squared":
        return mean_front(e)
    if scoring.kind == "pinball":
        return quantile_front(e, scoring.alpha)
    raise ValueError(f"no per-direction minimiser implemented for {scoring.kind!r} scoring")
