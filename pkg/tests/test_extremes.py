import math

import numpy as np
import pytest
from scipy.stats import kstest

from polarfront import GridFront, InsufficientDataError, equi_angular_grid_2d
from polarfront.ensembles import FrontEnsemble, quantile_front
from polarfront.extremes import (
    ExcessProbability,
    WeibullSpec,
    conditional_excess_probability,
    excess_scale,
    excess_threshold_from_quantile,
    gev_cdf,
    gpd_cdf,
    gumbel_cdf,
    scalarisation_rate,
    scalarised_length_distribution,
    weibull_norm_constants,
)

DIAG = np.array([1.0, 1.0]) / math.sqrt(2)


class TestNormConstants:
    def test_exponential_case(self):
        spec = WeibullSpec(1.0, np.array([1.0, 1.0]))
        norm = weibull_norm_constants(spec, DIAG, N=100)
        assert norm.k == pytest.approx(math.sqrt(2))
        assert norm.location == pytest.approx(math.log(100) / math.sqrt(2))
        assert norm.scale == pytest.approx(1 / math.sqrt(2))

    def test_rate_scaling_homogeneity(self):
        spec = WeibullSpec(1.7, np.array([1.0, 2.0]))
        scaled = WeibullSpec(1.7, np.array([3.0, 6.0]))
        n1 = weibull_norm_constants(spec, DIAG, N=50)
        n2 = weibull_norm_constants(scaled, DIAG, N=50)
        assert n2.k == pytest.approx(3 * n1.k)
        assert n2.scale == pytest.approx(n1.scale / 3)
        assert n2.location == pytest.approx(n1.location / 3)

    def test_rejects_bad_direction(self):
        spec = WeibullSpec(1.0, np.array([1.0, 1.0]))
        with pytest.raises(ValueError):
            weibull_norm_constants(spec, np.array([1.0, 0.0]), N=10)
        with pytest.raises(ValueError):
            weibull_norm_constants(spec, DIAG, N=1)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            WeibullSpec(0.0, np.array([1.0]))
        with pytest.raises(ValueError):
            WeibullSpec(1.0, np.array([1.0, -1.0]))


class TestScalarisedDistribution:
    def test_exponential_special_case(self):
        spec = WeibullSpec(1.0, np.array([1.0, 1.0]))
        dist = scalarised_length_distribution(spec, DIAG)
        assert dist.shape == 1.0
        assert dist.rate == pytest.approx(math.sqrt(2))
        x = np.linspace(0, 3, 7)
        assert np.allclose(dist.cdf(x), 1 - np.exp(-math.sqrt(2) * x))

    def test_cdf_at_zero(self):
        spec = WeibullSpec(2.0, np.array([1.0, 3.0]))
        dist = scalarised_length_distribution(spec, DIAG)
        assert dist.cdf(0.0) == 0.0

    @pytest.mark.parametrize("shape", [0.5, 1.0, 2.0])
    def test_simulation_matches_cdf(self, shape):
        rng = np.random.default_rng(2024)
        spec = WeibullSpec(shape, np.array([1.0, 2.0]))
        lam = np.array([0.6, 0.8])
        draws = spec.sample(rng, 100_000)
        s = np.min(draws / lam, axis=1)
        dist = scalarised_length_distribution(spec, lam)
        stat = kstest(s, dist.cdf).statistic
        assert stat < 0.01


class TestClosedFormCdfs:
    def test_gumbel_at_zero(self):
        assert gumbel_cdf(0.0) == pytest.approx(math.exp(-1))

    def test_gpd_exponential_limit(self):
        x = np.linspace(0, 5, 11)
        assert np.allclose(gpd_cdf(x, 0.0, 2.0), 1 - np.exp(-x / 2.0))

    def test_gev_continuity_at_xi_zero(self):
        x = np.linspace(-2, 5, 50)
        near = gev_cdf(x, 1e-8, 0.3, 1.2)
        zero = gev_cdf(x, 0.0, 0.3, 1.2)
        assert np.max(np.abs(near - zero)) < 1e-6
        near_neg = gev_cdf(x, -1e-8, 0.3, 1.2)
        assert np.max(np.abs(near_neg - zero)) < 1e-6

    def test_gpd_continuity_at_xi_zero(self):
        x = np.linspace(0, 5, 50)
        assert np.max(np.abs(gpd_cdf(x, 1e-8, 1.5) - gpd_cdf(x, 0.0, 1.5))) < 1e-6

    def test_monotone_and_bounded(self):
        rng = np.random.default_rng(5)
        x = np.linspace(-10, 20, 400)
        for _ in range(40):
            xi = rng.uniform(-1.5, 1.5)
            mu = rng.uniform(-3, 3)
            sigma = rng.uniform(0.1, 4.0)
            vals = gev_cdf(x, xi, mu, sigma)
            assert np.all(np.diff(vals) >= -1e-12)
            assert np.all((vals >= 0) & (vals <= 1))
            beta = rng.uniform(0.1, 4.0)
            gvals = gpd_cdf(x, xi, beta)
            assert np.all(np.diff(gvals) >= -1e-12)
            assert np.all((gvals >= 0) & (gvals <= 1))

    def test_invalid_scales(self):
        with pytest.raises(ValueError):
            gev_cdf(0.0, 0.1, 0.0, 0.0)
        with pytest.raises(ValueError):
            gpd_cdf(0.0, 0.1, -1.0)

    def test_excess_scale_convention(self):
        # with xi = 0 the implied excess scale is the GEV sigma itself
        assert excess_scale(0.0, 2.0, 0.7, 10.0) == pytest.approx(0.7)
        with pytest.raises(ValueError):
            excess_scale(-1.0, 0.0, 1.0, 5.0)


class TestConditionalExcess:
    def _samples(self, rng, n=100_000):
        spec = WeibullSpec(1.0, np.array([1.0, 1.0]))
        return spec.sample(rng, n)

    def test_below_threshold_is_zero(self):
        rng = np.random.default_rng(7)
        samples = self._samples(rng, 5000)
        res = conditional_excess_probability(samples, 1.0, z=0.5 * DIAG, eta=[0.0, 0.0])
        assert res.probability == 0.0
        assert res.exceedances > 0

    def test_far_above_threshold_is_one(self):
        rng = np.random.default_rng(8)
        samples = self._samples(rng, 5000)
        res = conditional_excess_probability(samples, 0.5, z=50.0 * DIAG, eta=[0.0, 0.0])
        assert res.probability == 1.0

    def test_memoryless_exponential_case(self):
        # shape 1: scalarised lengths are exponential(rate k), so the excess
        # past u is exponential(rate k) again
        rng = np.random.default_rng(9)
        samples = self._samples(rng)
        k = scalarisation_rate(WeibullSpec(1.0, np.array([1.0, 1.0])), DIAG)
        u = 1.0
        for excess in (0.2, 0.5, 1.0, 2.0):
            z = (u + excess) * DIAG
            res = conditional_excess_probability(samples, u, z=z, eta=[0.0, 0.0])
            assert res.probability == pytest.approx(1 - math.exp(-k * excess), abs=0.02)
            assert res.probability == pytest.approx(float(gpd_cdf(excess, 0.0, 1.0 / k)), abs=0.02)

    def test_threshold_surface_lookup(self):
        rng = np.random.default_rng(10)
        samples = self._samples(rng, 20_000)
        grid = equi_angular_grid_2d(64)
        surface = GridFront([0.0, 0.0], grid, np.full(64, 1.0))
        z = 1.5 * DIAG
        by_surface = conditional_excess_probability(samples, surface, z=z)
        by_scalar = conditional_excess_probability(samples, 1.0, z=z, eta=[0.0, 0.0])
        assert by_surface.probability == by_scalar.probability
        assert by_surface.threshold == 1.0

    def test_no_exceedances_raises(self):
        samples = np.full((100, 2), 0.5)
        with pytest.raises(InsufficientDataError):
            conditional_excess_probability(samples, 10.0, z=11.0 * DIAG, eta=[0.0, 0.0])


class TestThresholdFromQuantile:
    def _ensemble(self, rng, N=50):
        grid = equi_angular_grid_2d(32)
        rows = rng.uniform(0.5, 2.0, size=(N, 32))
        return FrontEnsemble([0.0, 0.0], grid, rows)

    def test_matches_quantile_front(self):
        rng = np.random.default_rng(11)
        e = self._ensemble(rng)
        t = excess_threshold_from_quantile(e, 0.9)
        assert np.array_equal(t.lengths, quantile_front(e, 0.9).lengths)

    def test_monotone_in_alpha(self):
        rng = np.random.default_rng(12)
        e = self._ensemble(rng)
        t1 = excess_threshold_from_quantile(e, 0.5)
        t2 = excess_threshold_from_quantile(e, 0.95)
        assert np.all(t1.lengths <= t2.lengths)

    def test_exceedance_rate(self):
        rng = np.random.default_rng(13)
        e = self._ensemble(rng, N=200)
        alpha = 0.8
        t = excess_threshold_from_quantile(e, alpha)
        rates = np.mean(e.lengths > t.lengths[None, :], axis=0)
        assert np.all(np.abs(rates - (1 - alpha)) <= 1.0 / e.n_samples + 1e-12)


class TestGumbelConvergence:
    @pytest.mark.parametrize("shape", [0.5, 1.0, 2.0])
    def test_normalized_maxima_near_gumbel(self, shape):
        rng = np.random.default_rng(20240817)
        spec = WeibullSpec(shape, np.array([1.0, 1.0]))
        N = 256
        reps = 2000
        norm = weibull_norm_constants(spec, DIAG, N)
        draws = spec.sample(rng, (reps, N))
        s = np.min(draws / DIAG, axis=2)
        z = (s.max(axis=1) - norm.location) / norm.scale
        stat = kstest(z, lambda x: np.exp(-np.exp(-np.asarray(x, dtype=float)))).statistic
        assert stat < 0.06
