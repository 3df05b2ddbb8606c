"""Extreme-value behaviour of projected-length processes.

When objective samples have independent Weibull components, their scalarised
lengths along any positive direction are again Weibull, so the maximum
length over N samples converges, after the usual affine normalisation, to a
standard Gumbel law.  This module provides those normalising constants, the
scalarised-length distribution, the GEV/GPD evaluation formulas, polar
threshold surfaces, and empirical conditional excess probabilities past a
threshold surface.

No distribution fitting happens here: parameters come from the closed forms
or from the caller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ensembles import FrontEnsemble, quantile_front
from .errors import DomainError, InsufficientDataError
from .geometry import GridFront, as_vector, direction_array, optimal_direction, scalarise_points

# below this |xi| the GEV/GPD formulas switch to their exact xi=0 limits,
# avoiding catastrophic cancellation in (1 + xi z)^(-1/xi)
XI_ZERO_CUTOFF = 1e-8


@dataclass(frozen=True, eq=False)
class WeibullSpec:
    """Independent Weibull margins: shared shape, one rate per objective.

    Component m has CDF 1 - exp(-(rate_m * x)^shape) on x >= 0.
    """

    shape: float
    rates: np.ndarray

    def __post_init__(self):
        if not (np.isfinite(self.shape) and self.shape > 0):
            raise ValueError("shape must be positive")
        rates = as_vector(self.rates, "rates")
        if np.any(rates <= 0):
            raise ValueError("rates must be positive")
        rates = np.array(rates)
        rates.flags.writeable = False
        object.__setattr__(self, "rates", rates)

    @property
    def dim(self) -> int:
        return self.rates.size

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        """Draw vectors with independent Weibull components, shape (*size, M)."""
        shape = tuple(np.atleast_1d(size)) + (self.dim,)
        return rng.weibull(self.shape, size=shape) / self.rates


@dataclass(frozen=True)
class GumbelNorm:
    """Affine normalisation for the maximum scalarised length over N samples.

    (max - location) / scale converges to the standard Gumbel distribution;
    k is the Weibull rate of a single scalarised length.
    """

    scale: float
    location: float
    k: float

    def __post_init__(self):
        if not (self.scale > 0 and self.k > 0):
            raise ValueError("scale and k must be positive")


def scalarisation_rate(spec: WeibullSpec, lam) -> float:
    """Weibull rate of the scalarised length: (sum_m (rate_m lam_m)^shape)^(1/shape)."""
    arr = direction_array(lam)
    if arr.size != spec.dim:
        raise ValueError("direction dimension must match rates")
    return float(np.sum((spec.rates * arr) ** spec.shape) ** (1.0 / spec.shape))


def weibull_norm_constants(spec: WeibullSpec, lam, N: int) -> GumbelNorm:
    """Gumbel normalising constants for the max length over N samples.

    scale = log(N)^(1/shape - 1) / (shape * k), location = log(N)^(1/shape) / k.
    """
    if N < 2:
        raise ValueError("N must be at least 2")
    k = scalarisation_rate(spec, lam)
    log_n = math.log(N)
    scale = log_n ** (1.0 / spec.shape - 1.0) / (spec.shape * k)
    location = log_n ** (1.0 / spec.shape) / k
    return GumbelNorm(scale=scale, location=location, k=k)


@dataclass(frozen=True)
class WeibullDistribution:
    """Weibull(shape, rate) with CDF 1 - exp(-(rate x)^shape) on x >= 0."""

    shape: float
    rate: float

    def cdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.where(x > 0, 1.0 - np.exp(-((self.rate * np.maximum(x, 0.0)) ** self.shape)), 0.0)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.weibull(self.shape, size=n) / self.rate


def scalarised_length_distribution(spec: WeibullSpec, lam) -> WeibullDistribution:
    """Distribution of one sample's scalarised length along a direction.

    The minimum of independent Weibulls with a common shape is Weibull with
    the combined rate, so the length is Weibull(shape, k_lam).
    """
    return WeibullDistribution(shape=spec.shape, rate=scalarisation_rate(spec, lam))


def gumbel_cdf(x) -> np.ndarray:
    """Standard Gumbel distribution function exp(-exp(-x))."""
    x = np.asarray(x, dtype=float)
    return np.exp(-np.exp(-x))


def gev_cdf(x, xi: float, mu: float, sigma: float) -> np.ndarray:
    """Generalised extreme value distribution function.

    xi = 0 evaluates the exact Gumbel limit exp(-exp(-(x-mu)/sigma)); the
    crossover to the limit form happens below |xi| = 1e-8.
    """
    if not (np.isfinite(sigma) and sigma > 0):
        raise ValueError("sigma must be positive")
    x = np.asarray(x, dtype=float)
    z = (x - mu) / sigma
    if abs(xi) < XI_ZERO_CUTOFF:
        return np.exp(-np.exp(-z))
    t = 1.0 + xi * z
    inside = t > 0
    core = np.exp(-np.power(np.where(inside, t, 1.0), -1.0 / xi))
    if xi > 0:
        return np.where(inside, core, 0.0)
    return np.where(inside, core, 1.0)


def gpd_cdf(x, xi: float, beta: float) -> np.ndarray:
    """Generalised Pareto distribution function on excesses x >= 0.

    xi = 0 evaluates the exact exponential limit 1 - exp(-x/beta).
    """
    if not (np.isfinite(beta) and beta > 0):
        raise ValueError("beta must be positive")
    x = np.asarray(x, dtype=float)
    xc = np.maximum(x, 0.0)
    if abs(xi) < XI_ZERO_CUTOFF:
        return np.where(x >= 0, 1.0 - np.exp(-xc / beta), 0.0)
    t = 1.0 + xi * xc / beta
    if xi > 0:
        return np.where(x >= 0, 1.0 - np.power(t, -1.0 / xi), 0.0)
    upper = -beta / xi
    capped = np.minimum(xc, upper)
    t = np.maximum(1.0 + xi * capped / beta, 0.0)
    return np.where(x >= 0, np.where(xc >= upper, 1.0, 1.0 - np.power(t, -1.0 / xi)), 0.0)


def excess_scale(xi: float, mu: float, sigma: float, u: float) -> float:
    """GPD scale implied by GEV parameters at threshold u: sigma + xi (u - mu)."""
    beta = sigma + xi * (u - mu)
    if beta <= 0:
        raise ValueError("implied excess scale is non-positive at this threshold")
    return beta


# A threshold surface is just a sampled polar surface used as {u_lambda}.
ThresholdSurface = GridFront


def excess_threshold_from_quantile(e: FrontEnsemble, alpha: float) -> ThresholdSurface:
    """Use an upper quantile of the length process as the threshold surface."""
    return quantile_front(e, alpha)


@dataclass(frozen=True)
class ExcessProbability:
    """Empirical conditional excess result with its evidence size."""

    probability: float
    exceedances: int
    threshold: float


def conditional_excess_probability(
    samples: np.ndarray,
    threshold: ThresholdSurface | float,
    z,
    eta=None,
) -> ExcessProbability:
    """P[length(Y) - u <= length(z) | length(Y) > u] along z's own direction.

    ``samples`` holds raw objective vectors, one per row; the threshold
    length u comes from the surface (nearest-grid lookup at the direction of
    z) or is supplied directly as a scalar with an explicit reference.
    Raises insufficient-data when no sample exceeds the threshold.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 2:
        raise ValueError("samples must be an (N, M) array")
    if isinstance(threshold, GridFront):
        reference = threshold.reference
    else:
        if eta is None:
            raise ValueError("a scalar threshold needs an explicit reference vector")
        reference = as_vector(eta, "reference")
    z = as_vector(z, "z")
    if not np.all(z > reference):
        raise DomainError("z must strongly dominate the reference vector")
    lam = optimal_direction(z, reference)
    if isinstance(threshold, GridFront):
        u = threshold.length_at(lam)
    else:
        u = float(threshold)
    s_z = float(np.linalg.norm(z - reference))
    s_y = scalarise_points(samples, reference, lam)
    exceed = s_y > u
    count = int(np.count_nonzero(exceed))
    if count == 0:
        raise InsufficientDataError("no samples exceed the threshold along this direction")
    prob = float(np.count_nonzero(exceed & (s_y <= s_z)) / count)
    return ExcessProbability(probability=prob, exceedances=count, threshold=u)
