"""Polar parameterisation toolkit for Pareto front surfaces."""

from .errors import DataFormatError, DomainError, InsufficientDataError
from .geometry import (
    Direction,
    DirectionGrid,
    FrontRelation,
    GridFront,
    ParetoCheck,
    PointFront,
    check_pareto_conditions,
    dominates,
    equi_angular_grid_2d,
    from_polar,
    front_domination_query,
    length_scalarisation,
    optimal_direction,
    sample_directions,
    to_polar,
    user_grid,
)

__all__ = [
    "DataFormatError",
    "Direction",
    "DirectionGrid",
    "DomainError",
    "FrontRelation",
    "GridFront",
    "InsufficientDataError",
    "ParetoCheck",
    "PointFront",
    "check_pareto_conditions",
    "dominates",
    "equi_angular_grid_2d",
    "from_polar",
    "front_domination_query",
    "length_scalarisation",
    "optimal_direction",
    "sample_directions",
    "to_polar",
    "user_grid",
]

__version__ = "0.1.0"
