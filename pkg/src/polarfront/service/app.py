"""HTTP/JSON service over one immutable loaded ensemble.

All GET endpoints are pure functions of (loaded data, query), so identical
queries produce identical bodies.  Loading happens before the app serves;
replacing the session is an exclusive swap guarded by a lock.
"""

from __future__ import annotations

import threading
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from fastapi.staticfiles import StaticFiles

from ..ensembles import domination_probability
from ..errors import DataFormatError, DomainError
from ..fronts import ScoringSpec
from ..geometry import equi_angular_grid_2d
from ..pipelines import select_best_input
from ..serialization import load_json
from ..slicing import SliceSpec, reconstruct_many
from .schemas import (
    BoundsModel,
    DecideRequest,
    DecideResponse,
    DominationResponse,
    MarginalResponse,
    MarginalStat,
    MetaResponse,
    SlicePolyline,
    SliceResponse,
)
from .session import SessionState, fixed_vector_from_weights, reduce_lengths, session_from_document

DEFAULT_ALPHAS = (0.05, 0.95)
DEFAULT_SUB_K = 181


class SessionHolder:
    """Exclusive-swap container; reads see one consistent snapshot."""

    def __init__(self, state: SessionState | None = None):
        self._lock = threading.Lock()
        self._state = state

    def get(self) -> SessionState:
        with self._lock:
            state = self._state
        if state is None:
            raise HTTPException(status_code=503, detail="no ensemble loaded")
        return state

    def swap(self, state: SessionState):
        with self._lock:
            self._state = state


def _parse_floats(raw: str, name: str) -> np.ndarray:
    try:
        values = np.asarray([float(v) for v in raw.split(",") if v.strip() != ""], dtype=float)
    except ValueError:
        raise HTTPException(status_code=400, detail=f"{name} must be comma-separated numbers")
    if values.size == 0:
        raise HTTPException(status_code=400, detail=f"{name} must be non-empty")
    return values


def _parse_weights(raw: str, dim: int) -> np.ndarray:
    weights = _parse_floats(raw, "weights")
    if weights.size != dim:
        raise HTTPException(status_code=400, detail=f"expected {dim} weights")
    if np.any((weights <= 0.0) | (weights >= 1.0)):
        raise HTTPException(status_code=400, detail="weights must lie strictly inside (0, 1)")
    return weights


def _parse_alphas(raw: str | None) -> tuple[float, ...]:
    if raw is None:
        return DEFAULT_ALPHAS
    alphas = _parse_floats(raw, "alphas")
    if np.any((alphas <= 0.0) | (alphas >= 1.0)):
        raise HTTPException(status_code=400, detail="alphas must lie strictly inside (0, 1)")
    return tuple(float(a) for a in alphas)


def create_app(
    data_path: str | Path | None = None,
    state: SessionState | None = None,
    static_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="polarfront slice server")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    if data_path is not None:
        try:
            state = session_from_document(load_json(data_path))
        except (OSError, DataFormatError) as exc:
            raise SystemExit(f"cannot load ensemble data: {exc}")
    holder = SessionHolder(state)
    app.state.sessions = holder

    @app.get("/meta", response_model=MetaResponse)
    def meta() -> MetaResponse:
        s = holder.get()
        return MetaResponse(
            M=s.dim,
            N=s.ensemble.n_samples,
            K=s.ensemble.grid.size,
            labels=list(s.labels),
            bounds=BoundsModel(
                lower=s.normalizer.lower.tolist(), upper=s.normalizer.upper.tolist()
            ),
            eta=s.eta.tolist(),
            has_table_source=s.has_table_source,
            grid_scheme=s.ensemble.grid.scheme,
        )

    @app.get("/marginal", response_model=MarginalResponse)
    def marginal(weights: str = Query(...), alphas: str | None = Query(default=None)) -> MarginalResponse:
        s = holder.get()
        w = _parse_weights(weights, s.dim)
        levels = _parse_alphas(alphas)
        lam = w / np.linalg.norm(w)
        r = s.raw_direction(lam)
        lengths, angle = s.normalized_lengths_at(lam)
        raw_scale = float(np.linalg.norm(s.normalizer.span * lam))
        stats = {}
        for name, value in reduce_lengths(lengths[:, None], levels).items():
            l_norm = float(value[0])
            l_raw = l_norm * raw_scale
            point = s.eta + l_raw * r
            stats[name] = MarginalStat(
                length_normalized=l_norm, length_raw=l_raw, point=point.tolist()
            )
        return MarginalResponse(
            weights=w.tolist(),
            direction_raw=r.tolist(),
            stats=stats,
            exact=s.has_table_source,
            angular_error_rad=angle,
        )

    @app.get("/slice", response_model=SliceResponse)
    def slice_view(
        i: int = Query(...),
        j: int = Query(...),
        weights: str = Query(...),
        alphas: str | None = Query(default=None),
        sub_k: int = Query(default=DEFAULT_SUB_K, ge=2, le=2048),
    ) -> SliceResponse:
        s = holder.get()
        if s.dim < 3:
            raise HTTPException(status_code=400, detail="slices need at least 3 objectives")
        if not (0 <= i < s.dim and 0 <= j < s.dim) or i == j:
            raise HTTPException(status_code=400, detail="i and j must be distinct objective indices")
        w = _parse_weights(weights, s.dim)
        levels = _parse_alphas(alphas)
        kept = tuple(sorted((i, j)))
        complement = [m for m in range(s.dim) if m not in kept]
        v = fixed_vector_from_weights(w[complement])
        spec = SliceSpec(kept, v)
        sub = equi_angular_grid_2d(sub_k)
        full = reconstruct_many(spec, sub.directions)  # normalized-space directions
        rows = np.empty((s.ensemble.n_samples, sub_k))
        max_angle = 0.0
        for idx in range(sub_k):
            rows[:, idx], angle = s.normalized_lengths_at(full[idx])
            max_angle = max(max_angle, angle)
        stats = reduce_lengths(rows, levels)
        eta_n = s.eta_normalized
        # the midpoint grid is symmetric under theta -> pi/2 - theta, so a
        # swapped (i, j) request is served by reversing the angle axis and
        # transposing the two kept coordinates
        swapped = i > j
        polylines = {}
        for name, lengths_n in stats.items():
            scaled = lengths_n * spec.scale  # projected slice lengths
            pts_n = eta_n[list(kept)][None, :] + scaled[:, None] * sub.directions
            pts_raw = pts_n * s.normalizer.span[list(kept)][None, :] + s.normalizer.lower[list(kept)][None, :]
            fixed_n = eta_n[complement][None, :] + lengths_n[:, None] * v[None, :]
            fixed_raw = fixed_n * s.normalizer.span[complement][None, :] + s.normalizer.lower[complement][None, :]
            if swapped:
                scaled = scaled[::-1]
                pts_n = pts_n[::-1, ::-1]
                pts_raw = pts_raw[::-1, ::-1]
                fixed_raw = fixed_raw[::-1]
            polylines[name] = SlicePolyline(
                lengths=scaled.tolist(),
                points_normalized=pts_n.tolist(),
                points_raw=pts_raw.tolist(),
                fixed_raw=fixed_raw.tolist(),
            )
        theta = (np.arange(1, sub_k + 1) - 0.5) * (np.pi / 2) / sub_k
        return SliceResponse(
            i=i,
            j=j,
            v=v.tolist(),
            scale=spec.scale,
            angles=theta.tolist(),
            polylines=polylines,
            exact=s.has_table_source,
            max_angular_error_rad=max_angle,
        )

    @app.get("/domination", response_model=DominationResponse)
    def domination(y: str = Query(...)) -> DominationResponse:
        s = holder.get()
        point = _parse_floats(y, "y")
        if point.size != s.dim:
            raise HTTPException(status_code=400, detail=f"expected {s.dim} components")
        try:
            prob = domination_probability(s.ensemble, point)
        except DomainError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return DominationResponse(y=point.tolist(), probability=prob, exact=s.has_table_source)

    @app.post("/decide", response_model=DecideResponse)
    def decide(request: DecideRequest) -> DecideResponse:
        s = holder.get()
        if s.ensemble.source is None:
            raise HTTPException(status_code=409, detail="ensemble has no objective-table source")
        target = np.asarray(request.target, dtype=float)
        if target.size != s.dim:
            raise HTTPException(status_code=400, detail=f"expected {s.dim} components")
        try:
            scoring = ScoringSpec(request.scoring, request.alpha)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        try:
            best = select_best_input(s.ensemble.source, target, s.eta, scoring)
        except (DomainError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        table = s.ensemble.source
        from ..geometry import optimal_direction, scalarise_points

        lam = optimal_direction(target, s.eta)
        radius = float(np.linalg.norm(target - s.eta))
        losses = {}
        for x, input_id in enumerate(table.input_ids):
            sx = scalarise_points(table.samples[:, x, :], s.eta, lam)
            losses[str(input_id)] = float(np.mean(scoring.score(sx, radius, s.dim)))
        chosen = table.input_ids.index(best)
        return DecideResponse(
            input_id=best,
            loss=losses[str(best)],
            losses=losses,
            samples=table.samples[:, chosen, :].tolist(),
        )

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="dashboard")

    return app
