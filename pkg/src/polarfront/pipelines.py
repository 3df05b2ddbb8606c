"""End-to-end pipelines: time-series ingestion, per-period bootstrap front
distributions, pairwise domination-probability maps with signed year-over-year
changes, target-driven input selection, and objective normalization.

The front randomness per period comes from a day-level bootstrap: each
ensemble row is the front of a with-replacement resample of the period's
daily-maximum vectors.  Domination maps are evaluated on a polar lattice
(directions times radial fractions of a per-direction bounding length), so
every evaluation point sits exactly on a grid ray and no interpolation is
involved.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from datetime import date, datetime

import numpy as np

from .ensembles import FrontEnsemble, ObjectiveTable
from .errors import DomainError
from .fronts import ScoringSpec
from .geometry import DirectionGrid, as_vector, optimal_direction, projected_lengths


def derive_seed(seed: int, label: str) -> int:
    """A stable child seed for a named substream of one run seed."""
    digest = hashlib.sha256(f"{seed}:{label}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass(frozen=True, eq=False)
class SeriesDataset:
    """Raw observations: strictly increasing timestamps, M value columns.

    NaN marks a missing reading.  Column labels keep the original units.
    """

    timestamps: tuple[datetime, ...]
    values: np.ndarray  # (T, M), NaN = missing
    labels: tuple[str, ...]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        stamps = tuple(self.timestamps)
        if values.ndim != 2 or values.shape[0] != len(stamps):
            raise ValueError("values must be one row per timestamp")
        if len(self.labels) != values.shape[1]:
            raise ValueError("one label per value column is required")
        if len(stamps) == 0:
            raise ValueError("dataset is empty")
        if any(b <= a for a, b in zip(stamps[:-1], stamps[1:])):
            order = np.argsort([s.timestamp() for s in stamps], kind="stable")
            stamps = tuple(stamps[i] for i in order)
            values = values[order]
        object.__setattr__(self, "timestamps", stamps)
        values = np.array(values)
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def dim(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True, eq=False)
class DailyMaxima:
    """Per-day component-wise maxima over the observed readings.

    Days with no observation in any column are dropped entirely; a column
    unobserved on an otherwise retained day stays NaN, and such days are
    excluded from front construction only when a target component is absent.
    """

    days: tuple[date, ...]
    values: np.ndarray  # (D, M), NaN = column unobserved that day
    labels: tuple[str, ...]

    def complete_rows(self, columns=None) -> np.ndarray:
        """Day vectors observed in every requested column (default: all)."""
        cols = list(range(self.values.shape[1])) if columns is None else list(columns)
        sub = self.values[:, cols]
        keep = ~np.isnan(sub).any(axis=1)
        return sub[keep]


def daily_max(ds: SeriesDataset) -> DailyMaxima:
    """Component-wise daily maxima of the observed readings (UTC days)."""
    by_day: dict[date, np.ndarray] = {}
    for ts, row in zip(ds.timestamps, ds.values):
        day = ts.date()
        if day not in by_day:
            by_day[day] = row.copy()
        else:
            by_day[day] = np.fmax(by_day[day], row)  # fmax ignores NaN where possible
    days = []
    values = []
    for day in sorted(by_day):
        row = by_day[day]
        if np.isnan(row).all():
            continue  # no observation at all: drop the day
        days.append(day)
        values.append(row)
    if not days:
        raise ValueError("no day retains any observation")
    return DailyMaxima(tuple(days), np.asarray(values, dtype=float), ds.labels)


@dataclass(frozen=True, eq=False)
class PeriodEnsemble:
    """Bootstrap front distribution of one period's daily-maximum vectors.

    Each ensemble row is the front of a same-size with-replacement resample
    of the period's day vectors; the day vectors and resample indices are
    retained so pairwise marginal analyses can rebuild 2-D fronts from the
    same resamples.
    """

    label: str
    days: np.ndarray  # (D, M) complete day vectors used for the full-M fronts
    ensemble: FrontEnsemble
    resample_indices: np.ndarray  # (B, D)
    seed: int

    @property
    def n_rounds(self) -> int:
        return self.resample_indices.shape[0]


def period_front_ensemble(
    days, eta, grid: DirectionGrid, B: int, seed: int, label: str = ""
) -> PeriodEnsemble:
    """Day-bootstrap front ensemble for one period.

    B rows; row b holds the projected lengths of the front of the b-th
    resample.  A resample can only lose points, so no row exceeds the
    full-period front anywhere.
    """
    day_values = np.asarray(days, dtype=float)
    if day_values.ndim != 2 or day_values.shape[0] < 1:
        raise ValueError("need at least one day vector")
    if not np.all(np.isfinite(day_values)):
        raise ValueError("day vectors must be finite (filter incomplete days first)")
    if B < 1:
        raise ValueError("bootstrap rounds must be at least 1")
    eta = as_vector(eta, "reference")
    rng = np.random.default_rng(seed)
    n_days = day_values.shape[0]
    indices = rng.integers(0, n_days, size=(B, n_days))
    rows = np.stack(
        [projected_lengths(day_values[idx], eta, grid.directions) for idx in indices]
    )
    ensemble = FrontEnsemble(eta, grid, rows)
    return PeriodEnsemble(label, day_values, ensemble, indices, int(seed))


@dataclass(frozen=True, eq=False)
class PolarLattice:
    """Polar evaluation lattice: per-direction radial fractions of a bound.

    Point (level t, direction k) is ``reference + t * scale_k * lam_k``;
    every point lies exactly on a grid ray.
    """

    reference: np.ndarray
    grid: DirectionGrid
    levels: np.ndarray  # (L,) fractions in (0, 1]
    scale: np.ndarray  # (K,) per-direction bounding lengths

    def __post_init__(self):
        ref = as_vector(self.reference, "reference")
        levels = np.asarray(self.levels, dtype=float)
        scale = np.asarray(self.scale, dtype=float)
        if levels.ndim != 1 or np.any(levels <= 0) or np.any(levels > 1):
            raise ValueError("levels must be radial fractions in (0, 1]")
        if scale.shape != (self.grid.size,) or np.any(scale <= 0):
            raise ValueError("scale must hold one positive length per direction")
        for name, arr in (("reference", ref), ("levels", levels), ("scale", scale)):
            frozen = np.array(arr)
            frozen.flags.writeable = False
            object.__setattr__(self, name, frozen)

    def matches(self, other: "PolarLattice") -> bool:
        return (
            self.grid == other.grid
            and np.array_equal(self.reference, other.reference)
            and np.array_equal(self.levels, other.levels)
            and np.array_equal(self.scale, other.scale)
        )


@dataclass(frozen=True, eq=False)
class DominationMap:
    """Domination probabilities on a polar lattice, shape (L, K)."""

    lattice: PolarLattice
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        expected = (self.lattice.levels.size, self.lattice.grid.size)
        if vals.shape != expected:
            raise ValueError(f"values must have shape {expected}")
        if np.any((vals < 0) | (vals > 1)):
            raise ValueError("probabilities must lie in [0, 1]")
        vals = np.array(vals)
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)


def pairwise_domination_map(
    pe: PeriodEnsemble,
    pair: tuple[int, int],
    grid2d: DirectionGrid,
    levels,
    scale=None,
) -> DominationMap:
    """Domination probabilities of the period's 2-D marginal front distribution.

    The period's day vectors are projected to the index pair (components
    dropped, not imputed) before front construction, reusing the period's
    resamples.  The lattice bound defaults to the pairwise full-period front;
    pass an explicit per-direction ``scale`` to share a lattice across
    periods.
    """
    i, j = pair
    M = pe.days.shape[1]
    if not (0 <= i < M and 0 <= j < M and i != j):
        raise ValueError("pair must name two distinct objective columns")
    if grid2d.dim != 2:
        raise ValueError("pairwise maps need a 2-D direction grid")
    eta2 = pe.ensemble.reference[[i, j]]
    days2 = pe.days[:, [i, j]]
    rows = np.stack(
        [projected_lengths(days2[idx], eta2, grid2d.directions) for idx in pe.resample_indices]
    )
    levels = np.asarray(levels, dtype=float)
    if scale is None:
        scale = projected_lengths(days2, eta2, grid2d.directions)
    scale = np.asarray(scale, dtype=float)
    lattice = PolarLattice(eta2, grid2d, levels, scale)
    radii = levels[:, None] * scale[None, :]  # (L, K)
    values = np.mean(rows[None, :, :] >= radii[:, None, :], axis=1)
    return DominationMap(lattice, values)


@dataclass(frozen=True)
class SignedChange:
    """Pointwise change between two domination maps on one lattice.

    ``mean_negative``/``mean_positive`` average the negative/positive parts
    over the whole lattice, so |mean_negative| + mean_positive equals the
    mean absolute change.
    """

    mean_negative: float
    mean_positive: float
    field: np.ndarray


def signed_yearly_changes(map_a: DominationMap, map_b: DominationMap) -> SignedChange:
    """Signed change field map_b - map_a and its averaged negative/positive parts."""
    if not map_a.lattice.matches(map_b.lattice):
        raise ValueError("maps must share an identical evaluation lattice")
    field = map_b.values - map_a.values
    return SignedChange(
        mean_negative=float(np.minimum(field, 0.0).mean()),
        mean_positive=float(np.maximum(field, 0.0).mean()),
        field=field,
    )


def select_best_input(table: ObjectiveTable, target, eta, scoring: ScoringSpec):
    """Input whose sampled outcomes score best along the target's direction.

    Scores each sample's scalarised length at the direction from the
    reference to the target against the target's own radius, averages over
    samples and returns the argmin input id; ties break to the lowest id.
    """
    eta = as_vector(eta, "reference")
    target = as_vector(target, "target")
    if not np.all(target > eta):
        raise DomainError("target must strongly dominate the reference vector")
    lam = optimal_direction(target, eta)
    radius = float(np.linalg.norm(target - eta))
    diff = np.maximum(table.samples - eta, 0.0)  # (N, X, M)
    s = np.min(diff / lam.components, axis=2)  # (N, X)
    losses = scoring.score(s, radius, table.dim).mean(axis=0)  # (X,)
    best = min(range(table.n_inputs), key=lambda x: (losses[x], table.input_ids[x]))
    return table.input_ids[best]


@dataclass(frozen=True, eq=False)
class AffineNormalizer:
    """Component-wise affine map to [0, 1] given per-objective bounds."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = as_vector(self.lower, "lower bounds")
        upper = as_vector(self.upper, "upper bounds")
        if lower.size != upper.size:
            raise ValueError("bounds must have equal dimension")
        if np.any(upper <= lower):
            raise ValueError("upper bounds must exceed lower bounds componentwise")
        for name, arr in (("lower", lower), ("upper", upper)):
            frozen = np.array(arr)
            frozen.flags.writeable = False
            object.__setattr__(self, name, frozen)

    @property
    def span(self) -> np.ndarray:
        return self.upper - self.lower

    def forward(self, points) -> np.ndarray:
        return (np.asarray(points, dtype=float) - self.lower) / self.span

    def inverse(self, points) -> np.ndarray:
        return np.asarray(points, dtype=float) * self.span + self.lower

    @property
    def default_reference(self) -> np.ndarray:
        """Reference slightly worse than the lower bounds: l - 0.2 (u - l)."""
        return self.lower - 0.2 * self.span


def normalize_objectives(points, lower, upper) -> tuple[np.ndarray, np.ndarray]:
    """Normalize points to bound-relative units; also return the default reference.

    The default reference is expressed in the original units.
    """
    norm = AffineNormalizer(np.asarray(lower, dtype=float), np.asarray(upper, dtype=float))
    return norm.forward(points), norm.default_reference


def domination_map_for_ensemble(
    e: FrontEnsemble, levels, scale=None
) -> DominationMap:
    """Domination probabilities of any ensemble on its own grid rays."""
    levels = np.asarray(levels, dtype=float)
    if scale is None:
        scale = e.lengths.max(axis=0)
    scale = np.asarray(scale, dtype=float)
    lattice = PolarLattice(e.reference, e.grid, levels, scale)
    radii = levels[:, None] * scale[None, :]
    values = np.mean(e.lengths[None, :, :] >= radii[:, None, :], axis=1)
    return DominationMap(lattice, values)
