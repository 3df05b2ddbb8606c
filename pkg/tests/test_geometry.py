import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polarfront import (
    Direction,
    DomainError,
    FrontRelation,
    GridFront,
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
from polarfront.geometry import front_relation_holds, projected_lengths


class TestLengthScalarisation:
    def test_radial_point(self):
        assert length_scalarisation([3, 4], [0, 0], [0.6, 0.8]) == pytest.approx(5.0, abs=1e-12)

    def test_outside_truncated_space(self):
        assert length_scalarisation([1, 1], [2, 2], [0.6, 0.8]) == 0.0
        assert length_scalarisation([1, 1], [2, 2], np.array([1, 1]) / math.sqrt(2)) == 0.0

    def test_direct_evaluation(self):
        lam = np.array([1, 1]) / math.sqrt(2)
        assert length_scalarisation([2, 6], [0, 0], lam) == pytest.approx(2 * math.sqrt(2), rel=1e-12)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            length_scalarisation([np.inf, 1], [0, 0], [0.6, 0.8])
        with pytest.raises(ValueError):
            length_scalarisation([1, 1], [np.nan, 0], [0.6, 0.8])

    def test_zero_iff_not_strongly_dominating(self):
        rng = np.random.default_rng(1)
        lam = np.array([0.6, 0.8])
        for _ in range(200):
            y = rng.normal(size=2)
            s = length_scalarisation(y, [0, 0], lam)
            if np.all(y > 0):
                assert s > 0
            else:
                assert s == 0.0


class TestOptimalDirection:
    def test_normalisation(self):
        d = optimal_direction([3, 4], [0, 0])
        assert np.allclose(d.components, [0.6, 0.8], atol=1e-15)

    def test_symmetry(self):
        d = optimal_direction([2, 2], [1, 1])
        assert np.allclose(d.components, np.ones(2) / math.sqrt(2))

    def test_maximises_scalarisation(self):
        y = np.array([1.0, 0.5])
        eta = np.zeros(2)
        d = optimal_direction(y, eta)
        best = length_scalarisation(y, eta, d)
        assert best == pytest.approx(np.linalg.norm(y), rel=1e-12)
        grid = sample_directions(2, 500, seed=7)
        for k in range(grid.size):
            assert length_scalarisation(y, eta, grid.directions[k]) <= best + 1e-12

    def test_rejects_outside_domain(self):
        with pytest.raises(DomainError):
            optimal_direction([1, 1], [1, 1])
        with pytest.raises(DomainError):
            optimal_direction([0, 1], [1, 0])


class TestPolarTransform:
    def test_forward(self):
        lam, radius = to_polar([3, 4], [0, 0])
        assert np.allclose(lam.components, [0.6, 0.8])
        assert radius == pytest.approx(5.0)

    def test_inverse(self):
        y = from_polar([0, 0], [0.6, 0.8], 5.0)
        assert np.allclose(y, [3, 4], atol=1e-12)

    def test_round_trip_random(self):
        rng = np.random.default_rng(5)
        eta = np.array([-1.0, 0.5, 2.0])
        worst = 0.0
        for _ in range(1000):
            y = eta + rng.uniform(0.01, 10.0, size=3)
            lam, radius = to_polar(y, eta)
            back = from_polar(eta, lam, radius)
            worst = max(worst, np.max(np.abs(back - y) / np.maximum(np.abs(y), 1e-300)))
        assert worst < 1e-10

    def test_from_polar_requires_positive_length(self):
        with pytest.raises(DomainError):
            from_polar([0, 0], [0.6, 0.8], 0.0)


class TestDominates:
    def test_equal_vectors(self):
        assert dominates([1, 2], [1, 2], "weak")
        assert not dominates([1, 2], [1, 2], "strict")
        assert not dominates([1, 2], [1, 2], "strong")

    def test_strong(self):
        assert dominates([2, 3], [1, 2], "strong")
        assert dominates([2, 3], [1, 2], "strict")
        assert dominates([2, 3], [1, 2], "weak")

    def test_incomparable(self):
        for rel in ("weak", "strict", "strong"):
            assert not dominates([2, 1], [1, 2], rel)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            dominates([1, 2], [1, 2, 3])


class TestFrontDominationQuery:
    @pytest.fixture
    def constant_front(self):
        grid = equi_angular_grid_2d(32)
        return GridFront([0.0, 0.0], grid, np.full(32, 2.0))

    def test_strictly_below(self, constant_front):
        lam = constant_front.grid.directions[5]
        assert front_domination_query(1.0 * lam, constant_front) is FrontRelation.STRICTLY_BELOW

    def test_boundary_ties_to_dominated_weak(self, constant_front):
        lam = constant_front.grid.directions[5]
        assert front_domination_query(2.0 * lam, constant_front) is FrontRelation.DOMINATED_WEAK

    def test_strictly_above(self, constant_front):
        lam = constant_front.grid.directions[5]
        assert front_domination_query(2.5 * lam, constant_front) is FrontRelation.STRICTLY_ABOVE

    def test_relation_predicates(self, constant_front):
        lam = constant_front.grid.directions[3]
        y = 2.0 * lam
        assert front_relation_holds(y, constant_front, FrontRelation.DOMINATED_WEAK)
        assert front_relation_holds(y, constant_front, FrontRelation.ON_OR_ABOVE)
        assert not front_relation_holds(y, constant_front, FrontRelation.STRICTLY_BELOW)
        assert not front_relation_holds(y, constant_front, FrontRelation.STRICTLY_ABOVE)

    def test_outside_domain(self, constant_front):
        with pytest.raises(DomainError):
            front_domination_query([-1.0, 1.0], constant_front)


class TestParetoConditions:
    def test_sphere_front_valid(self):
        for M in range(2, 7):
            grid = sample_directions(M, 256, seed=M)
            front = GridFront(np.zeros(M), grid, np.ones(grid.size))
            assert check_pareto_conditions(front, tol=1e-9).status == "valid"

    def test_zero_length_fails_c1(self):
        grid = equi_angular_grid_2d(4)
        lengths = np.array([1.0, 1.0, 1.0, 0.0])
        result = check_pareto_conditions(GridFront([0, 0], grid, lengths))
        assert result.status == "fails-C1"
        assert result.index == 3

    def test_strong_domination_fails_c2(self):
        # boundary point along the second direction strongly dominates the first
        grid = equi_angular_grid_2d(2)
        lengths = np.array([0.1, 3.0])
        p0 = lengths[0] * grid.directions[0]
        p1 = lengths[1] * grid.directions[1]
        assert dominates(p1, p0, "strong")  # constructed by brute-force comparison
        result = check_pareto_conditions(GridFront([0, 0], grid, lengths))
        assert result.status == "fails-C2"
        assert result.pair == (0, 1)

    def test_degenerate_reports_c1(self):
        grid = equi_angular_grid_2d(3)
        front = GridFront([0, 0], grid, np.zeros(3))
        assert front.is_degenerate
        assert check_pareto_conditions(front).status == "fails-C1"


class TestDirectionSampling:
    def test_equi_angular_two(self):
        grid = equi_angular_grid_2d(2)
        expected = [
            [math.cos(math.pi / 8), math.sin(math.pi / 8)],
            [math.cos(3 * math.pi / 8), math.sin(3 * math.pi / 8)],
        ]
        assert np.allclose(grid.directions, expected, atol=1e-15)

    def test_component_symmetry(self):
        grid = sample_directions(3, 10000, seed=11)
        means = grid.directions.mean(axis=0)
        assert np.all(np.abs(means / means.mean() - 1.0) < 0.02)

    def test_determinism(self):
        a = sample_directions(4, 257, seed=123)
        b = sample_directions(4, 257, seed=123)
        assert a == b
        assert not (a == sample_directions(4, 257, seed=124))

    def test_positivity_floor(self):
        grid = sample_directions(2, 5000, seed=3)
        assert grid.directions.min() >= 1e-9

    def test_invalid_args(self):
        with pytest.raises(ValueError):
            sample_directions(1, 10, seed=0)
        with pytest.raises(ValueError):
            sample_directions(3, 0, seed=0)
        with pytest.raises(ValueError):
            equi_angular_grid_2d(0)


def _finite_vectors(m, lo=-50.0, hi=50.0):
    return st.lists(st.floats(lo, hi, allow_nan=False), min_size=m, max_size=m)


class TestInvariants:
    @given(
        y=_finite_vectors(3),
        bump=st.lists(st.floats(0.0, 10.0), min_size=3, max_size=3),
        seed=st.integers(0, 10_000),
    )
    @settings(max_examples=200, deadline=None)
    def test_monotone_increasing_everywhere(self, y, bump, seed):
        y = np.array(y)
        better = y + np.array(bump)
        lam = sample_directions(3, 1, seed=seed).directions[0]
        eta = np.zeros(3)
        assert length_scalarisation(better, eta, lam) >= length_scalarisation(y, eta, lam)

    @given(
        y=st.lists(st.floats(0.01, 50.0), min_size=3, max_size=3),
        bump=st.lists(st.floats(0.001, 10.0), min_size=3, max_size=3),
        seed=st.integers(0, 10_000),
    )
    @settings(max_examples=200, deadline=None)
    def test_strongly_monotone_in_truncated_space(self, y, bump, seed):
        y = np.array(y)
        better = y + np.array(bump)
        lam = sample_directions(3, 1, seed=seed).directions[0]
        eta = np.zeros(3)
        assert length_scalarisation(better, eta, lam) > length_scalarisation(y, eta, lam)

    @given(t=st.floats(0.0, 1e6), seed=st.integers(0, 10_000))
    @settings(max_examples=200, deadline=None)
    def test_radial_identity(self, t, seed):
        lam = sample_directions(2, 1, seed=seed).directions[0]
        eta = np.array([-0.5, 1.5])
        s = length_scalarisation(eta + t * lam, eta, lam)
        assert s == pytest.approx(t, rel=1e-12, abs=1e-12)

    def test_optimal_direction_is_strict_maximiser(self):
        rng = np.random.default_rng(17)
        eta = np.zeros(2)
        grid = sample_directions(2, 200, seed=99)
        for _ in range(50):
            y = rng.uniform(0.05, 5.0, size=2)
            best = length_scalarisation(y, eta, optimal_direction(y, eta))
            others = [length_scalarisation(y, eta, d) for d in grid.directions]
            assert max(others) <= best + 1e-12


class TestProjectedLengths:
    def test_matches_scalar_path(self):
        rng = np.random.default_rng(2)
        pts = rng.uniform(0.1, 4.0, size=(7, 3))
        eta = np.full(3, -0.5)
        grid = sample_directions(3, 64, seed=5)
        batch = projected_lengths(pts, eta, grid.directions)
        for k in range(grid.size):
            expect = max(length_scalarisation(p, eta, grid.directions[k]) for p in pts)
            assert batch[k] == pytest.approx(expect, rel=1e-12)


class TestTypes:
    def test_direction_validation(self):
        with pytest.raises(ValueError):
            Direction(np.array([0.6, 0.8, 0.0]))
        with pytest.raises(ValueError):
            Direction(np.array([0.5, 0.5]))

    def test_grid_front_validation(self):
        grid = equi_angular_grid_2d(3)
        with pytest.raises(ValueError):
            GridFront([0, 0], grid, [1.0, 1.0])  # wrong K
        with pytest.raises(ValueError):
            GridFront([0, 0], grid, [1.0, -1.0, 1.0])

    def test_user_grid_rejects_non_unit(self):
        with pytest.raises(ValueError):
            user_grid([[1.0, 1.0]])
