"""Command-line entry point.

Thin argument-parsing layer over the core package: every subcommand loads
files, calls the corresponding library functions and writes JSON/CSV.  All
randomness flows from ``--seed``; named substreams derive from it, so a run
is reproducible byte for byte.

Exit codes: 0 success, 2 validation error (bad flags or parameter domains),
3 data error (missing/unreadable/malformed input files).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .ensembles import (
    FrontEnsemble,
    bayesian_bootstrap_front,
    deviation_surfaces,
    ensemble_from_objective_table,
    mean_front,
    quantile_front,
    vorobev_mean_front,
    vorobev_quantile_front,
)
from .errors import DataFormatError, DomainError
from .extremes import (
    WeibullSpec,
    conditional_excess_probability,
    scalarised_length_distribution,
    weibull_norm_constants,
)
from .fronts import ScoringSpec, front_from_points
from .geometry import DirectionGrid, GridFront, PointFront, equi_angular_grid_2d, sample_directions
from .pipelines import (
    daily_max,
    derive_seed,
    pairwise_domination_map,
    period_front_ensemble,
    select_best_input,
    signed_yearly_changes,
    SeriesDataset,
)
from .serialization import (
    canonical_json,
    ensemble_from_dict,
    front_to_dict,
    grid_from_dict,
    grid_hash,
    grid_to_dict,
    load_json,
    objective_table_from_dict,
    read_points_csv,
    read_series_csv,
)
from .slicing import SliceSpec, fixed_component_trace, slice_statistics
from .geometry import projected_lengths

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_DATA = 3


def _parse_vector(text: str, name: str) -> np.ndarray:
    try:
        return np.asarray([float(v) for v in text.split(",") if v.strip() != ""], dtype=float)
    except ValueError:
        raise ValueError(f"{name} must be comma-separated numbers, got {text!r}")


def _parse_scoring(text: str) -> ScoringSpec:
    if ":" in text:
        kind, _, param = text.partition(":")
        return ScoringSpec(kind, float(param))
    return ScoringSpec(text)


def _build_grid(M: int, args) -> DirectionGrid:
    if args.grid_scheme == "equi2d":
        if M != 2:
            raise ValueError("equi-angular grids are 2-D only")
        return equi_angular_grid_2d(args.grid_k)
    return sample_directions(M, args.grid_k, seed=args.grid_seed)


def _add_grid_flags(parser, default_k=512):
    parser.add_argument("--grid-k", type=int, default=default_k, help="number of grid directions")
    parser.add_argument("--grid-seed", type=int, default=0, help="seed for the MC direction grid")
    parser.add_argument(
        "--grid-scheme",
        choices=["mc", "equi2d"],
        default="mc",
        help="direction sampling scheme (equi2d is 2-D only)",
    )


def _write_output(text: str, out: str | None):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load_ensemble(args, need_seed_label: str = "grid") -> FrontEnsemble:
    """Resolve --ensemble / --table flags into a FrontEnsemble."""
    if getattr(args, "ensemble", None):
        return ensemble_from_dict(load_json(args.ensemble))
    doc = load_json(args.table)
    table = objective_table_from_dict(doc)
    if args.eta is not None:
        eta = _parse_vector(args.eta, "--eta")
    elif "eta" in doc:
        eta = np.asarray(doc["eta"], dtype=float)
    else:
        flat = table.samples.reshape(-1, table.dim)
        lower, upper = flat.min(axis=0), flat.max(axis=0)
        eta = lower - 0.2 * (upper - lower)
    if "grid" in doc:
        grid = grid_from_dict(doc["grid"])
    else:
        grid = _build_grid(table.dim, args)
    return ensemble_from_objective_table(table, eta, grid)


def cmd_front(args) -> int:
    points = read_points_csv(args.points)
    eta = _parse_vector(args.eta, "--eta")
    if eta.size != points.shape[1]:
        raise ValueError(f"--eta has {eta.size} components, points have {points.shape[1]}")
    grid = _build_grid(points.shape[1], args)
    front = front_from_points(PointFront(eta, points), grid)
    _write_output(canonical_json(front_to_dict(front)), args.out)
    if args.boundary_csv:
        pts = front.boundary_points()
        if front.dim == 2:
            order = np.argsort(np.arctan2(pts[:, 1] - eta[1], pts[:, 0] - eta[0]))
            pts = pts[order]
        with open(args.boundary_csv, "w", encoding="utf-8") as fh:
            fh.write(",".join(f"f{m + 1}" for m in range(front.dim)) + "\n")
            for row in pts:
                fh.write(",".join(repr(float(v)) for v in row) + "\n")
    return EXIT_OK


def cmd_stats(args) -> int:
    e = _load_ensemble(args)
    requested = [token.strip() for token in args.stats.split(",") if token.strip()]
    stats: dict = {}
    for token in requested:
        kind, _, param = token.partition(":")
        if kind == "mean":
            stats["mean"] = mean_front(e).lengths.tolist()
        elif kind == "q":
            stats[f"q{float(param):g}"] = quantile_front(e, float(param)).lengths.tolist()
        elif kind == "vorobev-q":
            stats[f"vorobev-q{float(param):g}"] = vorobev_quantile_front(
                e, float(param)
            ).lengths.tolist()
        elif kind == "vorobev-mean":
            res = vorobev_mean_front(e)
            stats["vorobev-mean"] = {
                "alpha_star": res.alpha_star,
                "lengths": res.front.lengths.tolist(),
                "expected_hv": res.expected_hv,
                "converged": res.converged,
            }
        elif kind == "deviation":
            upper, lower = deviation_surfaces(e, float(param) if param else 1.0)
            stats[f"deviation{float(param) if param else 1.0:g}"] = {
                "upper": upper.lengths.tolist(),
                "lower": lower.lengths.tolist(),
            }
        elif kind == "bootstrap":
            rounds = int(param) if param else 50
            fronts = bayesian_bootstrap_front(e, rounds, seed=derive_seed(args.seed, "bootstrap"))
            stats[f"bootstrap{rounds}"] = [f.lengths.tolist() for f in fronts]
        else:
            raise ValueError(f"unknown stat token: {token!r}")
    doc = {
        "reference": e.reference.tolist(),
        "grid_ref": grid_hash(e.grid),
        "n_samples": e.n_samples,
        "stats": stats,
    }
    if args.include_grid:
        doc["grid"] = grid_to_dict(e.grid)
    _write_output(canonical_json(doc), args.out)
    return EXIT_OK


def cmd_slices(args) -> int:
    e = _load_ensemble(args)
    kept = tuple(int(v) for v in args.kept.split(","))
    if args.v is not None:
        v = _parse_vector(args.v, "--v")
    elif args.weights is not None:
        from .service.session import fixed_vector_from_weights

        w = _parse_vector(args.weights, "--weights")
        if w.size != e.dim:
            raise ValueError(f"--weights needs {e.dim} components")
        complement = [m for m in range(e.dim) if m not in kept]
        v = fixed_vector_from_weights(w[complement])
    else:
        raise ValueError("one of --v or --weights is required")
    spec = SliceSpec(kept, v)
    if len(kept) == 2:
        sub = equi_angular_grid_2d(args.sub_k)
    elif len(kept) == 1:
        from .geometry import singleton_grid_1d

        sub = singleton_grid_1d()
    else:
        raise ValueError("slices keep one or two indices")
    alphas = tuple(float(a) for a in args.alphas.split(",")) if args.alphas else ()
    stats = slice_statistics(e, spec, sub, alphas=alphas)
    mean_gridfront = GridFront(e.reference, e.grid, e.lengths.mean(axis=0))
    trace = fixed_component_trace(mean_gridfront, spec, sub)
    doc = {
        "kept": list(kept),
        "v": v.tolist(),
        "scale": spec.scale,
        "sub_directions": sub.directions.tolist(),
        "stats": {name: values.tolist() for name, values in stats.items()},
        "mean_fixed_trace": trace.tolist(),
    }
    _write_output(canonical_json(doc), args.out)
    return EXIT_OK


def cmd_evt(args) -> int:
    rates = _parse_vector(args.rates, "--rates")
    spec = WeibullSpec(args.shape, rates)
    lam = _parse_vector(args.direction, "--direction")
    lam = lam / np.linalg.norm(lam)
    norm = weibull_norm_constants(spec, lam, args.n)
    dist = scalarised_length_distribution(spec, lam)
    doc = {
        "shape": args.shape,
        "rates": rates.tolist(),
        "direction": lam.tolist(),
        "n": args.n,
        "norm_constants": {"scale": norm.scale, "location": norm.location, "k": norm.k},
        "length_distribution": {"shape": dist.shape, "rate": dist.rate},
    }
    if args.samples:
        rng = np.random.default_rng(derive_seed(args.seed, "evt"))
        draws = spec.sample(rng, args.samples)
        u = args.threshold_u
        if u is None:
            from .ensembles import empirical_quantile_rank

            s_all = np.sort(np.min(draws / lam, axis=1))
            u = float(s_all[empirical_quantile_rank(args.threshold_quantile, args.samples) - 1])
        levels = _parse_vector(args.levels, "--levels")
        empirical = []
        exceedances = None
        for excess in levels:
            res = conditional_excess_probability(
                draws, u, z=(u + float(excess)) * lam, eta=np.zeros(spec.dim)
            )
            empirical.append(res.probability)
            exceedances = res.exceedances
        cdf_u = float(dist.cdf(u))
        closed = [
            float((dist.cdf(u + x) - cdf_u) / (1.0 - cdf_u)) for x in levels
        ]
        doc["excess"] = {
            "threshold": u,
            "exceedances": exceedances,
            "levels": levels.tolist(),
            "empirical": empirical,
            "conditional_weibull": closed,
        }
        if abs(args.shape - 1.0) < 1e-12:
            doc["excess"]["exponential_closed_form"] = [
                float(1.0 - np.exp(-dist.rate * x)) for x in levels
            ]
    _write_output(canonical_json(doc), args.out)
    return EXIT_OK


def cmd_pollution(args) -> int:
    stamps, values, labels = read_series_csv(args.csv)
    ds = SeriesDataset(tuple(stamps), values, tuple(labels))
    dm = daily_max(ds)
    M = len(labels)
    eta = _parse_vector(args.eta, "--eta") if args.eta else np.zeros(M)
    if eta.size != M:
        raise ValueError(f"--eta needs {M} components")
    periods: dict[str, np.ndarray] = {}
    for day, row in zip(dm.days, dm.values):
        label = str(day.year) if args.period == "year" else f"{day.year}-{day.month:02d}"
        periods.setdefault(label, []).append(row)
    period_labels = sorted(periods)
    if len(period_labels) < 1:
        raise DataFormatError("no periods found")
    grid2d = equi_angular_grid_2d(args.grid2d_k)
    levels = np.linspace(1.0 / args.levels_n, 1.0, args.levels_n)
    pairs = [(i, j) for i in range(M) for j in range(M) if i < j]
    out_pairs = []
    for i, j in pairs:
        eta2 = eta[[i, j]]
        per_period_days = {}
        for label in period_labels:
            rows = np.asarray(periods[label], dtype=float)[:, [i, j]]
            rows = rows[~np.isnan(rows).any(axis=1)]
            rows = rows[np.all(rows > eta2, axis=1)]
            if rows.shape[0] >= 1:
                per_period_days[label] = rows
        usable = [label for label in period_labels if label in per_period_days]
        if not usable:
            continue
        scale = None
        for label in usable:
            full = projected_lengths(per_period_days[label], eta2, grid2d.directions)
            scale = full if scale is None else np.maximum(scale, full)
        scale = np.maximum(scale, 1e-12)
        maps = {}
        for label in usable:
            pe = period_front_ensemble(
                per_period_days[label],
                eta2,
                grid2d,
                B=args.bootstrap,
                seed=derive_seed(args.seed, f"pair:{i}-{j}:period:{label}"),
                label=label,
            )
            maps[label] = pairwise_domination_map(pe, (0, 1), grid2d, levels, scale=scale)
        changes = []
        for prev, curr in zip(usable[:-1], usable[1:]):
            change = signed_yearly_changes(maps[prev], maps[curr])
            changes.append(
                {
                    "from": prev,
                    "to": curr,
                    "mean_negative": change.mean_negative,
                    "mean_positive": change.mean_positive,
                    "mean_abs": abs(change.mean_negative) + change.mean_positive,
                }
            )
        out_pairs.append(
            {
                "i": i,
                "j": j,
                "labels": [labels[i], labels[j]],
                "lattice": {
                    "reference": eta2.tolist(),
                    "levels": levels.tolist(),
                    "scale": scale.tolist(),
                    "grid_ref": grid_hash(grid2d),
                },
                "maps": {label: maps[label].values.tolist() for label in usable},
                "changes": changes,
            }
        )
    doc = {
        "labels": list(labels),
        "eta": eta.tolist(),
        "periods": period_labels,
        "grid2d": grid_to_dict(grid2d),
        "pairs": out_pairs,
    }
    _write_output(canonical_json(doc), args.out)
    return EXIT_OK


def cmd_decide(args) -> int:
    doc = load_json(args.table)
    table = objective_table_from_dict(doc)
    if args.eta is not None:
        eta = _parse_vector(args.eta, "--eta")
    elif "eta" in doc:
        eta = np.asarray(doc["eta"], dtype=float)
    else:
        raise ValueError("--eta is required when the table file has no reference")
    target = _parse_vector(args.target, "--target")
    scoring = _parse_scoring(args.scoring)
    best = select_best_input(table, target, eta, scoring)
    out_doc = {
        "target": target.tolist(),
        "scoring": args.scoring,
        "input_id": best,
    }
    _write_output(canonical_json(out_doc), args.out)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(data_path=args.data, static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polarfront",
        description="Polar-parameterised Pareto front toolkit: front construction, "
        "front-distribution statistics, slices, extreme-value analysis and pipelines.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_front = sub.add_parser("front", help="build a front from a points file")
    p_front.add_argument("--points", required=True, help="CSV of objective points")
    p_front.add_argument("--eta", required=True, help="reference vector, comma-separated")
    _add_grid_flags(p_front)
    p_front.add_argument("--out", default="-", help="output front JSON path (default stdout)")
    p_front.add_argument("--boundary-csv", default=None, help="optional boundary polyline CSV")
    p_front.set_defaults(func=cmd_front)

    p_stats = sub.add_parser("stats", help="front-distribution statistics of an ensemble")
    src = p_stats.add_mutually_exclusive_group(required=True)
    src.add_argument("--ensemble", help="ensemble JSON file")
    src.add_argument("--table", help="objective-table JSON file")
    p_stats.add_argument("--eta", default=None, help="reference (tables without one)")
    _add_grid_flags(p_stats, default_k=256)
    p_stats.add_argument(
        "--stats",
        default="mean,q:0.05,q:0.95",
        help="comma list: mean | q:<a> | vorobev-q:<a> | vorobev-mean | deviation:<beta> | bootstrap:<rounds>",
    )
    p_stats.add_argument("--seed", type=int, default=0)
    p_stats.add_argument("--include-grid", action="store_true", help="embed the grid in the output")
    p_stats.add_argument("--out", default="-")
    p_stats.set_defaults(func=cmd_stats)

    p_slices = sub.add_parser("slices", help="low-dimensional slice statistics")
    src = p_slices.add_mutually_exclusive_group(required=True)
    src.add_argument("--ensemble")
    src.add_argument("--table")
    p_slices.add_argument("--eta", default=None)
    _add_grid_flags(p_slices, default_k=256)
    p_slices.add_argument("--kept", required=True, help="kept objective indices, e.g. 0,1")
    p_slices.add_argument("--v", default=None, help="fixed direction components (norm < 1)")
    p_slices.add_argument("--weights", default=None, help="all-M slider weights in (0,1)")
    p_slices.add_argument("--sub-k", type=int, default=181)
    p_slices.add_argument("--alphas", default="0.05,0.95")
    p_slices.add_argument("--seed", type=int, default=0)
    p_slices.add_argument("--out", default="-")
    p_slices.set_defaults(func=cmd_slices)

    p_evt = sub.add_parser("evt", help="extreme-value constants and excess probabilities")
    p_evt.add_argument("--shape", type=float, required=True, help="Weibull shape")
    p_evt.add_argument("--rates", required=True, help="Weibull rates per objective")
    p_evt.add_argument("--direction", required=True, help="positive direction (normalised)")
    p_evt.add_argument("--n", type=int, required=True, help="sample count for the max")
    p_evt.add_argument("--samples", type=int, default=0, help="MC draws for excess estimates")
    p_evt.add_argument("--threshold-quantile", type=float, default=0.9)
    p_evt.add_argument("--threshold-u", type=float, default=None)
    p_evt.add_argument("--levels", default="0.25,0.5,1.0,2.0", help="excess levels")
    p_evt.add_argument("--seed", type=int, default=0)
    p_evt.add_argument("--out", default="-")
    p_evt.set_defaults(func=cmd_evt)

    p_pol = sub.add_parser("pollution", help="period-wise domination maps from a time series")
    p_pol.add_argument("--csv", required=True, help="timestamp,<name1>,...,<nameM> series CSV")
    p_pol.add_argument("--eta", default=None, help="reference vector (default zeros)")
    p_pol.add_argument("--period", choices=["year", "month"], default="year")
    p_pol.add_argument("--grid2d-k", type=int, default=64)
    p_pol.add_argument("--levels-n", type=int, default=10)
    p_pol.add_argument("--bootstrap", type=int, default=64)
    p_pol.add_argument("--seed", type=int, default=0)
    p_pol.add_argument("--out", default="-")
    p_pol.set_defaults(func=cmd_pollution)

    p_dec = sub.add_parser("decide", help="select the input most likely to hit a target")
    p_dec.add_argument("--table", required=True, help="objective-table JSON file")
    p_dec.add_argument("--target", required=True, help="target vector")
    p_dec.add_argument("--eta", default=None)
    p_dec.add_argument("--scoring", default="squared", help="squared | pinball:<a> | hv-absolute")
    p_dec.add_argument("--out", default="-")
    p_dec.set_defaults(func=cmd_decide)

    p_serve = sub.add_parser("serve", help="run the slice-serving HTTP API")
    p_serve.add_argument("--data", required=True, help="ensemble or objective-table JSON")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--static", default=None, help="static dashboard bundle directory")
    p_serve.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DataFormatError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (DomainError, ValueError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
