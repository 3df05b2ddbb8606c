"""Reference-anchored polar geometry for Pareto front surfaces.

A front is represented relative to a fixed reference vector ``eta`` by the
length at which the ray ``eta + t*lam`` (for a positive unit direction
``lam``) leaves the front's domination region.  Everything else in the
package is built on the primitives here: the length scalarisation, the
polar coordinate transform, Pareto domination predicates, the validity
conditions for a discretised front, and direction-set generation.

All containers are immutable after construction and every function is pure,
so they are safe to share across threads.  Randomised direction sampling
takes an explicit seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError

# Components of a unit direction below this are rejected: the scalarisation
# divides by them and tiny values overflow.  Measure-zero effect on sampling.
DIRECTION_FLOOR = 1e-9

# |norm - 1| tolerance for accepting a vector as a unit direction.
UNIT_NORM_TOL = 1e-12

# Absolute tolerance on lengths when classifying a point against a front
# boundary; ties go to the closed (weakly dominated) region.
BOUNDARY_TOL = 1e-9


def as_vector(values, name: str = "vector") -> np.ndarray:
    """Coerce to a finite 1-D float array."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must have finite components")
    return arr


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class Direction:
    """A positive unit vector: every component > 0, Euclidean norm 1."""

    components: np.ndarray

    def __post_init__(self):
        arr = as_vector(self.components, "direction")
        if arr.size < 1:
            raise ValueError("direction must have at least one component")
        if np.any(arr <= 0):
            raise ValueError("direction components must be strictly positive")
        if abs(np.linalg.norm(arr) - 1.0) > UNIT_NORM_TOL:
            raise ValueError("direction must have unit Euclidean norm")
        object.__setattr__(self, "components", _frozen(arr))

    @property
    def dim(self) -> int:
        return self.components.size

    @staticmethod
    def from_raw(values) -> "Direction":
        """Normalize an arbitrary positive vector into a Direction."""
        arr = as_vector(values, "direction")
        norm = np.linalg.norm(arr)
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        return Direction(arr / norm)


def direction_array(lam) -> np.ndarray:
    """Accept a Direction or a raw array and return the validated components."""
    if isinstance(lam, Direction):
        return lam.components
    return Direction(as_vector(lam, "direction")).components


@dataclass(frozen=True, eq=False)
class DirectionGrid:
    """A fixed, ordered set of K positive unit directions.

    ``scheme`` records how the grid was produced ("equi-angular-2d",
    "gaussian-abs-mc" or "user-supplied") and ``seed`` the RNG seed for the
    Monte-Carlo scheme, so that a serialized grid can be reproduced exactly.
    """

    directions: np.ndarray  # (K, M)
    scheme: str = "user-supplied"
    seed: int | None = None

    def __post_init__(self):
        arr = np.asarray(self.directions, dtype=float)
        if arr.ndim != 2 or arr.shape[0] < 1:
            raise ValueError("directions must be a non-empty (K, M) array")
        if not np.all(np.isfinite(arr)):
            raise ValueError("directions must be finite")
        if np.any(arr <= 0):
            raise ValueError("all direction components must be strictly positive")
        norms = np.linalg.norm(arr, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-9):
            raise ValueError("grid rows must be unit vectors")
        if self.scheme not in ("equi-angular-2d", "gaussian-abs-mc", "user-supplied"):
            raise ValueError(f"unknown grid scheme: {self.scheme!r}")
        object.__setattr__(self, "directions", _frozen(arr))

    @property
    def size(self) -> int:
        return self.directions.shape[0]

    @property
    def dim(self) -> int:
        return self.directions.shape[1]

    def direction(self, k: int) -> Direction:
        return Direction(self.directions[k])

    def nearest_index(self, lam) -> int:
        """Index of the grid direction with smallest angular distance to lam."""
        arr = direction_array(lam)
        return int(np.argmax(self.directions @ arr))

    def __eq__(self, other):
        if not isinstance(other, DirectionGrid):
            return NotImplemented
        return (
            self.scheme == other.scheme
            and self.seed == other.seed
            and self.directions.shape == other.directions.shape
            and np.array_equal(self.directions, other.directions)
        )

    def __hash__(self):
        return hash((self.scheme, self.seed, self.directions.shape))


@dataclass(frozen=True, eq=False)
class GridFront:
    """A polar surface sampled on a direction grid.

    Stores one non-negative projected length per grid direction.  A front
    with all lengths zero is the degenerate surface that arises when the
    reference vector weakly dominates everything.
    """

    reference: np.ndarray
    grid: DirectionGrid
    lengths: np.ndarray

    def __post_init__(self):
        ref = as_vector(self.reference, "reference")
        if ref.size != self.grid.dim:
            raise ValueError("reference dimension does not match grid")
        lengths = np.asarray(self.lengths, dtype=float)
        if lengths.shape != (self.grid.size,):
            raise ValueError("lengths must be one value per grid direction")
        if not np.all(np.isfinite(lengths)):
            raise ValueError("lengths must be finite")
        if np.any(lengths < 0):
            raise ValueError("lengths must be non-negative")
        object.__setattr__(self, "reference", _frozen(ref))
        object.__setattr__(self, "lengths", _frozen(lengths))

    @property
    def dim(self) -> int:
        return self.reference.size

    @property
    def is_degenerate(self) -> bool:
        return bool(np.all(self.lengths == 0.0))

    def with_lengths(self, lengths) -> "GridFront":
        return GridFront(self.reference, self.grid, lengths)

    def boundary_points(self) -> np.ndarray:
        """The sampled surface points ``eta + l_k * lam_k``, shape (K, M)."""
        return self.reference[None, :] + self.lengths[:, None] * self.grid.directions

    def length_at(self, lam) -> float:
        """Length along an arbitrary direction via nearest grid lookup.

        Exact only when ``lam`` is a grid direction; otherwise the nearest
        direction by angular distance is used.
        """
        return float(self.lengths[self.grid.nearest_index(lam)])


@dataclass(frozen=True, eq=False)
class PointFront:
    """A finite point set with a reference vector.

    Projected lengths are computed on demand from the points, so any
    direction can be evaluated exactly (no grid interpolation).
    """

    reference: np.ndarray
    points: np.ndarray  # (n, M)

    def __post_init__(self):
        ref = as_vector(self.reference, "reference")
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise ValueError("points must be a non-empty (n, M) array")
        if pts.shape[1] != ref.size:
            raise ValueError("points dimension does not match reference")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        if ref.size < 2:
            raise ValueError("need at least two objectives")
        object.__setattr__(self, "reference", _frozen(ref))
        object.__setattr__(self, "points", _frozen(pts))

    @property
    def dim(self) -> int:
        return self.reference.size


def length_scalarisation(y, eta, lam) -> float:
    """Projected length of ``y`` seen from ``eta`` along direction ``lam``.

    ``min_m max(y_m - eta_m, 0) / lam_m``: the distance at which the ray
    through ``lam`` exits the axis-aligned box spanned by ``eta`` and ``y``.
    Zero exactly when ``y`` does not strongly dominate ``eta``.
    """
    y = as_vector(y, "objective vector")
    eta = as_vector(eta, "reference")
    arr = direction_array(lam)
    if not (y.size == eta.size == arr.size):
        raise ValueError("dimension mismatch")
    return float(np.min(np.maximum(y - eta, 0.0) / arr))


def scalarise_points(points: np.ndarray, eta: np.ndarray, lam) -> np.ndarray:
    """Length scalarisation of each row of ``points`` along one direction."""
    arr = direction_array(lam)
    diff = np.maximum(np.asarray(points, dtype=float) - np.asarray(eta, dtype=float), 0.0)
    return np.min(diff / arr, axis=-1)


def projected_lengths(points: np.ndarray, eta: np.ndarray, directions: np.ndarray) -> np.ndarray:
    """Per-direction maximum scalarised length of a point set, shape (K,).

    This is the polar representation of the Pareto front surface of the set:
    along each direction the surface sits at the largest projected length any
    point achieves.  Cost O(K * n * M); chunked over directions to bound memory.
    """
    pts = np.asarray(points, dtype=float)
    eta = np.asarray(eta, dtype=float)
    dirs = np.asarray(directions, dtype=float)
    diff = np.maximum(pts - eta[None, :], 0.0)  # (n, M)
    K = dirs.shape[0]
    out = np.empty(K, dtype=float)
    # ~8 MB working set per chunk at n*M doubles
    chunk = max(1, int(1_000_000 // max(1, diff.shape[0] * diff.shape[1]) + 1))
    for start in range(0, K, chunk):
        block = dirs[start : start + chunk]  # (k, M)
        s = np.min(diff[None, :, :] / block[:, None, :], axis=2)  # (k, n)
        out[start : start + chunk] = s.max(axis=1)
    return out


def strongly_dominates_reference(y, eta) -> bool:
    y = as_vector(y)
    eta = as_vector(eta, "reference")
    return bool(np.all(y > eta))


def optimal_direction(y, eta) -> Direction:
    """The direction along which ``y`` attains its largest projected length.

    Requires ``y`` to strongly dominate ``eta``; the maximiser is the unit
    vector pointing from ``eta`` to ``y``, where the scalarised value equals
    ``||y - eta||``.
    """
    y = as_vector(y, "objective vector")
    eta = as_vector(eta, "reference")
    if y.size != eta.size:
        raise ValueError("dimension mismatch")
    if not np.all(y > eta):
        raise DomainError("y must strongly dominate the reference vector")
    diff = y - eta
    return Direction(diff / np.linalg.norm(diff))


def to_polar(y, eta) -> tuple[Direction, float]:
    """Polar coordinates of a point in the truncated space: (direction, radius)."""
    y = as_vector(y, "objective vector")
    eta = as_vector(eta, "reference")
    lam = optimal_direction(y, eta)
    return lam, float(np.linalg.norm(y - eta))


def from_polar(eta, lam, length: float) -> np.ndarray:
    """Inverse polar transform: ``eta + length * lam``. Requires length > 0."""
    eta = as_vector(eta, "reference")
    arr = direction_array(lam)
    if eta.size != arr.size:
        raise ValueError("dimension mismatch")
    if not (np.isfinite(length) and length > 0):
        raise DomainError("length must be positive")
    return eta + float(length) * arr


def dominates(a, b, relation: str = "weak") -> bool:
    """Pareto domination predicate.

    weak:   every component of a >= b
    strict: weak and a != b
    strong: every component strictly greater
    """
    a = as_vector(a, "a")
    b = as_vector(b, "b")
    if a.size != b.size:
        raise ValueError("dimension mismatch")
    if relation == "weak":
        return bool(np.all(a >= b))
    if relation == "strict":
        return bool(np.all(a >= b) and np.any(a > b))
    if relation == "strong":
        return bool(np.all(a > b))
    raise ValueError(f"unknown relation: {relation!r}")


class FrontRelation(Enum):
    """How a point of the truncated space sits relative to a front boundary."""

    DOMINATED_WEAK = "dominated-weak"
    STRICTLY_BELOW = "strictly-below"
    STRICTLY_ABOVE = "strictly-above"
    ON_OR_ABOVE = "on-or-above"


def front_domination_query(y, front: GridFront, tol: float = BOUNDARY_TOL) -> FrontRelation:
    """Classify a point against a front via its radius at the optimal direction.

    Compares ``||y - eta||`` with the front's length along the direction from
    ``eta`` to ``y`` (nearest grid lookup; exact when that direction is in the
    grid).  Boundary ties within ``tol`` classify as dominated-weak, treating
    the domination region as closed.
    """
    y = as_vector(y, "objective vector")
    if not np.all(y > front.reference):
        raise DomainError("y must strongly dominate the reference vector")
    lam, radius = to_polar(y, front.reference)
    front_len = front.length_at(lam)
    if abs(radius - front_len) <= tol:
        return FrontRelation.DOMINATED_WEAK
    if radius < front_len:
        return FrontRelation.STRICTLY_BELOW
    return FrontRelation.STRICTLY_ABOVE


def front_relation_holds(y, front: GridFront, relation: FrontRelation) -> bool:
    """Exact domination-region membership test for each of the four relations."""
    y = as_vector(y, "objective vector")
    if not np.all(y > front.reference):
        raise DomainError("y must strongly dominate the reference vector")
    lam, radius = to_polar(y, front.reference)
    front_len = front.length_at(lam)
    if relation is FrontRelation.DOMINATED_WEAK:
        return radius <= front_len
    if relation is FrontRelation.STRICTLY_BELOW:
        return radius < front_len
    if relation is FrontRelation.STRICTLY_ABOVE:
        return radius > front_len
    return radius >= front_len


@dataclass(frozen=True)
class ParetoCheck:
    """Outcome of the discrete Pareto front validity check.

    status is "valid", "fails-C1" (a non-positive length, with its direction
    index) or "fails-C2" (an ordered direction pair violating the maximum
    ratio condition).
    """

    status: str
    index: int | None = None
    pair: tuple[int, int] | None = None

    def __bool__(self) -> bool:
        return self.status == "valid"


def check_pareto_conditions(front: GridFront, tol: float = 1e-9) -> ParetoCheck:
    """Check the two sampled-front validity conditions.

    C1 (positive lengths): every length > tol.  C2 (maximum ratio): for every
    ordered pair of grid directions (lam, ups),
    ``max_m (l_lam * lam_m) / (l_ups * ups_m) >= 1 - tol``; equivalently no
    sampled boundary point strongly dominates another.  Returns the first
    violation in scan order.
    """
    lengths = front.lengths
    small = np.flatnonzero(lengths <= tol)
    if small.size:
        return ParetoCheck("fails-C1", index=int(small[0]))
    # boundary points relative to eta: (K, M), all strictly positive after C1
    pts = lengths[:, None] * front.grid.directions
    K = pts.shape[0]
    threshold = 1.0 - tol
    chunk = max(1, int(4_000_000 // max(1, K * pts.shape[1])))
    for start in range(0, K, chunk):
        block = pts[start : start + chunk]  # (k, M)
        ratios = np.max(block[:, None, :] / pts[None, :, :], axis=2)  # (k, K)
        bad = np.argwhere(ratios < threshold)
        if bad.size:
            i, j = bad[0]
            return ParetoCheck("fails-C2", pair=(int(start + i), int(j)))
    return ParetoCheck("valid")


def equi_angular_grid_2d(K: int) -> DirectionGrid:
    """K directions at angles (k - 1/2) * (pi/2) / K, k = 1..K.

    Uniform in angle is uniform on the positive quarter circle, and the
    midpoint placement makes grid averages midpoint-rule quadratures.
    """
    if K < 1:
        raise ValueError("K must be at least 1")
    theta = (np.arange(1, K + 1) - 0.5) * (np.pi / 2) / K
    dirs = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    return DirectionGrid(dirs, scheme="equi-angular-2d", seed=None)


def sample_directions(M: int, K: int, seed: int) -> DirectionGrid:
    """K directions drawn uniformly on the positive orthant of the unit sphere.

    Draw M iid standard normals, take absolute values and normalize; by sign
    symmetry of the Gaussian this is uniform on the positive orthant.  Rows
    with any component below the positivity floor are redrawn.
    """
    if M < 2:
        raise ValueError("M must be at least 2")
    if K < 1:
        raise ValueError("K must be at least 1")
    rng = np.random.default_rng(seed)
    dirs = np.empty((K, M), dtype=float)
    filled = 0
    while filled < K:
        draw = np.abs(rng.standard_normal((K - filled, M)))
        norms = np.linalg.norm(draw, axis=1)
        ok = norms > 0
        draw = draw[ok] / norms[ok, None]
        draw = draw[np.min(draw, axis=1) >= DIRECTION_FLOOR]
        take = draw.shape[0]
        dirs[filled : filled + take] = draw
        filled += take
    return DirectionGrid(dirs, scheme="gaussian-abs-mc", seed=int(seed))


def user_grid(directions) -> DirectionGrid:
    """Wrap explicitly supplied unit directions as a grid."""
    return DirectionGrid(np.asarray(directions, dtype=float), scheme="user-supplied", seed=None)


def singleton_grid_1d() -> DirectionGrid:
    """The one-point grid over the single 1-D positive unit direction."""
    return DirectionGrid(np.ones((1, 1)), scheme="user-supplied", seed=None)
