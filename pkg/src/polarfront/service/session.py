"""Immutable session state for the slice-serving API.

A session wraps one loaded ensemble with its objective labels, per-objective
bounds and reference vector.  Slider weights act in bound-normalized space
(where every objective spans [0, 1]); the session converts between the
normalized directions the UI reasons about and the raw directions the
stored lengths live on.  When the ensemble carries its objective-table
source, lengths are re-scalarised exactly at any direction; otherwise the
nearest grid direction is used and the angular error is reported.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..ensembles import (
    FrontEnsemble,
    ObjectiveTable,
    empirical_quantile_rank,
    ensemble_from_objective_table,
    exact_lengths_at,
)
from ..errors import DataFormatError
from ..geometry import sample_directions
from ..pipelines import AffineNormalizer
from ..serialization import ensemble_from_dict, grid_from_dict, objective_table_from_dict

# complement slider weights are rescaled only when their norm exceeds this,
# keeping the fixed vector strictly inside the unit ball
V_NORM_CAP = 0.99

DEFAULT_TABLE_GRID_K = 256
DEFAULT_TABLE_GRID_SEED = 0


@dataclass(frozen=True, eq=False)
class SessionState:
    """One loaded ensemble plus the normalization context for sliders."""

    ensemble: FrontEnsemble
    labels: tuple[str, ...]
    normalizer: AffineNormalizer
    normalized_source: np.ndarray | None  # tau(samples) when a table source exists

    @property
    def eta(self) -> np.ndarray:
        return self.ensemble.reference

    @property
    def dim(self) -> int:
        return self.ensemble.dim

    @property
    def has_table_source(self) -> bool:
        return self.ensemble.source is not None

    @property
    def eta_normalized(self) -> np.ndarray:
        return self.normalizer.forward(self.eta)

    def raw_direction(self, lam_normalized: np.ndarray) -> np.ndarray:
        """Raw-space unit direction matching a normalized-space direction."""
        r = self.normalizer.span * lam_normalized
        return r / np.linalg.norm(r)

    def normalized_lengths_at(self, lam_normalized: np.ndarray) -> tuple[np.ndarray, float]:
        """Per-row lengths in normalized space along a normalized direction.

        Returns (lengths, angular_error): the error is zero on the exact
        (table-source) path and the raw-space lookup angle otherwise.
        """
        if self.normalized_source is not None:
            table = ObjectiveTable(self.ensemble.source.input_ids, self.normalized_source)
            return exact_lengths_at(table, self.eta_normalized, lam_normalized), 0.0
        r = self.raw_direction(lam_normalized)
        idx = self.ensemble.grid.nearest_index(r)
        chosen = self.ensemble.grid.directions[idx]
        angle = float(np.arccos(np.clip(chosen @ r, -1.0, 1.0)))
        # y = eta + l_raw * r  =>  tau(y) = tau(eta) + (l_raw / ||span * phi||) * phi
        scale = float(np.linalg.norm(self.normalizer.span * lam_normalized))
        return self.ensemble.lengths[:, idx] / scale, angle

    def raw_lengths_at(self, r: np.ndarray) -> tuple[np.ndarray, float]:
        """Per-row lengths in raw space along a raw unit direction."""
        if self.ensemble.source is not None:
            return exact_lengths_at(self.ensemble.source, self.eta, r), 0.0
        idx = self.ensemble.grid.nearest_index(r)
        chosen = self.ensemble.grid.directions[idx]
        angle = float(np.arccos(np.clip(chosen @ r, -1.0, 1.0)))
        return self.ensemble.lengths[:, idx], angle


def reduce_lengths(rows: np.ndarray, alphas: tuple[float, ...], include_mean: bool = True):
    """Per-column mean and lower empirical quantiles of a length matrix."""
    out: dict[str, np.ndarray] = {}
    if include_mean:
        out["mean"] = rows.mean(axis=0)
    if alphas:
        sorted_rows = np.sort(rows, axis=0)
        n = rows.shape[0]
        for alpha in alphas:
            out[f"q{alpha:g}"] = sorted_rows[empirical_quantile_rank(float(alpha), n) - 1]
    return out


def fixed_vector_from_weights(weights_complement: np.ndarray) -> np.ndarray:
    """Map complement slider weights to the pinned direction components.

    Identity below the norm cap; rescaled onto the cap otherwise, so a
    deliberate ||w_c|| < 0.99 is preserved exactly.
    """
    w = np.asarray(weights_complement, dtype=float)
    norm = float(np.linalg.norm(w))
    return w / max(1.0, norm / V_NORM_CAP)


def derive_bounds(doc: dict, ensemble: FrontEnsemble) -> tuple[np.ndarray, np.ndarray]:
    """Bounds from the document, else estimated from the data itself.

    Table sources use the sampled objective values; plain ensembles use the
    reconstructed boundary points of every row front.  Flat objectives are
    widened symmetrically so the normalizer stays invertible.
    """
    if "bounds" in doc:
        try:
            lower = np.asarray(doc["bounds"]["lower"], dtype=float)
            upper = np.asarray(doc["bounds"]["upper"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise DataFormatError(f"bad bounds: {exc}") from exc
        return lower, upper
    if ensemble.source is not None:
        flat = ensemble.source.samples.reshape(-1, ensemble.dim)
    else:
        dirs = ensemble.grid.directions
        flat = (
            ensemble.reference[None, None, :]
            + ensemble.lengths[:, :, None] * dirs[None, :, :]
        ).reshape(-1, ensemble.dim)
    lower = flat.min(axis=0)
    upper = flat.max(axis=0)
    span = upper - lower
    pad = np.where(span <= 0, np.maximum(np.abs(upper), 1.0) * 0.1, 0.0)
    return lower - pad, upper + pad


def session_from_document(doc: dict) -> SessionState:
    """Build a session from an ensemble or objective-table JSON document."""
    if "lengths" in doc:
        ensemble = ensemble_from_dict(doc)
    elif "samples" in doc:
        table = objective_table_from_dict(doc)
        if "grid" in doc:
            grid = grid_from_dict(doc["grid"])
        else:
            grid = sample_directions(table.dim, DEFAULT_TABLE_GRID_K, DEFAULT_TABLE_GRID_SEED)
        if "eta" in doc:
            eta = np.asarray(doc["eta"], dtype=float)
        else:
            lower = table.samples.reshape(-1, table.dim).min(axis=0)
            upper = table.samples.reshape(-1, table.dim).max(axis=0)
            eta = lower - 0.2 * (upper - lower)
        ensemble = ensemble_from_objective_table(table, eta, grid)
    else:
        raise DataFormatError("document is neither an ensemble nor an objective table")
    labels = tuple(doc.get("labels") or (f"f{m + 1}" for m in range(ensemble.dim)))
    if len(labels) != ensemble.dim:
        raise DataFormatError("one label per objective is required")
    lower, upper = derive_bounds(doc, ensemble)
    normalizer = AffineNormalizer(lower, upper)
    normalized_source = None
    if ensemble.source is not None:
        normalized_source = normalizer.forward(ensemble.source.samples)
    return SessionState(
        ensemble=ensemble,
        labels=labels,
        normalizer=normalizer,
        normalized_source=normalized_source,
    )
