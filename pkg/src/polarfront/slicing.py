"""Low-dimensional slices of Pareto front surfaces.

The positive unit sphere partitions into slices obtained by pinning a subset
of direction components to a fixed positive vector ``v`` with ``||v|| < 1``.
Re-inflating a P-dimensional direction into the full space, reading the
front's length there and scaling by ``sqrt(1 - ||v||^2)`` yields a valid
P-dimensional front over the kept objectives; this is the basis for the
interactive slice views.

Kept indices are 0-based.  Point sets and objective-table ensembles are
sliced exactly (lengths re-scalarised at the reconstructed directions);
grid fronts fall back to nearest-direction lookup, an approximation bounded
by the grid's angular resolution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ensembles import FrontEnsemble, empirical_quantile_rank, exact_lengths_at
from .geometry import DirectionGrid, GridFront, PointFront, as_vector, projected_lengths


@dataclass(frozen=True, eq=False)
class SliceSpec:
    """Which objective indices to keep, and the pinned direction components.

    ``kept`` is a strictly increasing tuple of 0-based indices of size P;
    ``fixed`` holds the remaining M-P direction components, all positive
    with Euclidean norm < 1.  ``fixed`` may be empty, in which case the
    slice is the identity.
    """

    kept: tuple[int, ...]
    fixed: np.ndarray

    def __post_init__(self):
        kept = tuple(int(i) for i in self.kept)
        if len(kept) < 1:
            raise ValueError("kept index set must be non-empty")
        if any(b <= a for a, b in zip(kept[:-1], kept[1:])):
            raise ValueError("kept indices must be strictly increasing")
        if kept[0] < 0:
            raise ValueError("kept indices must be non-negative")
        fixed = np.asarray(self.fixed, dtype=float).reshape(-1)
        if fixed.size:
            if not np.all(np.isfinite(fixed)) or np.any(fixed <= 0):
                raise ValueError("fixed components must be positive and finite")
            if np.linalg.norm(fixed) >= 1.0:
                raise ValueError("fixed vector must have norm < 1")
        fixed = np.array(fixed)
        fixed.flags.writeable = False
        object.__setattr__(self, "kept", kept)
        object.__setattr__(self, "fixed", fixed)

    @property
    def dim(self) -> int:
        """Dimension M of the full objective space."""
        return len(self.kept) + self.fixed.size

    @property
    def kept_dim(self) -> int:
        return len(self.kept)

    @property
    def complement(self) -> tuple[int, ...]:
        return tuple(m for m in range(self.dim) if m not in self.kept)

    @property
    def scale(self) -> float:
        """sqrt(1 - ||fixed||^2): the radial factor every slice length carries."""
        return float(np.sqrt(max(1.0 - float(self.fixed @ self.fixed), 0.0)))

    def validate_for_dim(self, M: int):
        if self.dim != M:
            raise ValueError(f"slice spec covers {self.dim} objectives, data has {M}")
        if self.kept[-1] >= M:
            raise ValueError("kept index out of range")


def reconstruct_direction(spec: SliceSpec, lam) -> np.ndarray:
    """Inflate a P-dimensional direction into the full M-dimensional sphere.

    Kept components are ``sqrt(1 - ||v||^2) * lam`` and complement components
    are ``v``; the output has unit norm by construction.
    """
    lam = as_vector(lam, "direction")
    if lam.size != len(spec.kept):
        raise ValueError("direction dimension must match the kept index count")
    if np.any(lam <= 0) or abs(np.linalg.norm(lam) - 1.0) > 1e-9:
        raise ValueError("lam must be a positive unit vector")
    out = np.empty(spec.dim, dtype=float)
    out[list(spec.kept)] = spec.scale * lam
    out[list(spec.complement)] = spec.fixed
    return out


def reconstruct_many(spec: SliceSpec, sub_directions: np.ndarray) -> np.ndarray:
    """Vectorised reconstruction of a (Ks, P) block of sub-directions."""
    subs = np.asarray(sub_directions, dtype=float)
    out = np.empty((subs.shape[0], spec.dim), dtype=float)
    out[:, list(spec.kept)] = spec.scale * subs
    out[:, list(spec.complement)] = spec.fixed
    return out


def _source_lengths(front: GridFront | PointFront, directions: np.ndarray) -> np.ndarray:
    """Front lengths at arbitrary full-space directions.

    Exact for point fronts; nearest-grid lookup for grid fronts.
    """
    if isinstance(front, PointFront):
        return projected_lengths(front.points, front.reference, directions)
    idx = np.argmax(directions @ front.grid.directions.T, axis=1)
    return front.lengths[idx]


def project_front(
    front: GridFront | PointFront, spec: SliceSpec, sub_grid: DirectionGrid
) -> GridFront:
    """Slice a front to the kept objectives at the pinned fixed vector.

    The projected length along a kept-space direction equals the source
    length at the reconstructed direction times ``sqrt(1 - ||v||^2)``; the
    result is a front over the projected reference.
    """
    spec.validate_for_dim(front.dim)
    if sub_grid.dim != spec.kept_dim:
        raise ValueError("sub grid dimension must match the kept index count")
    full = reconstruct_many(spec, sub_grid.directions)
    lengths = _source_lengths(front, full) * spec.scale
    return GridFront(front.reference[list(spec.kept)], sub_grid, lengths)


def fixed_component_trace(
    front: GridFront | PointFront, spec: SliceSpec, sub_grid: DirectionGrid
) -> np.ndarray:
    """Complement coordinates of the sliced points, shape (Ks, M-P).

    Each slice point lives in the full space; its complement coordinates are
    ``eta_complement + length * v`` and vary with the sub-direction unless
    the sliced lengths are constant.
    """
    spec.validate_for_dim(front.dim)
    full = reconstruct_many(spec, sub_grid.directions)
    lengths = _source_lengths(front, full)
    comp = list(spec.complement)
    return front.reference[comp][None, :] + lengths[:, None] * spec.fixed[None, :]


def slice_statistics(
    e: FrontEnsemble,
    spec: SliceSpec,
    sub_grid: DirectionGrid,
    alphas: tuple[float, ...] = (0.05, 0.95),
    include_mean: bool = True,
) -> dict[str, np.ndarray]:
    """Per-direction statistics of the sliced ensemble.

    Projects every ensemble row (exactly via the objective-table source when
    present, nearest-grid otherwise) and reduces per sub-direction.  Because
    projection scales lengths by a constant, the statistics of projections
    equal the scaled statistics of the source lengths at the reconstructed
    directions.  Returns a mapping with key "mean" and one "q<alpha>" entry
    per requested level.
    """
    spec.validate_for_dim(e.dim)
    full = reconstruct_many(spec, sub_grid.directions)  # (Ks, M)
    if e.source is not None:
        rows = np.stack([exact_lengths_at(e.source, e.reference, d) for d in full], axis=1)
    else:
        idx = np.argmax(full @ e.grid.directions.T, axis=1)
        rows = e.lengths[:, idx]
    rows = rows * spec.scale  # (N, Ks)
    out: dict[str, np.ndarray] = {}
    if include_mean:
        out["mean"] = rows.mean(axis=0)
    if alphas:
        sorted_rows = np.sort(rows, axis=0)
        for alpha in alphas:
            rank = empirical_quantile_rank(float(alpha), e.n_samples)
            out[f"q{alpha:g}"] = sorted_rows[rank - 1]
    return out
