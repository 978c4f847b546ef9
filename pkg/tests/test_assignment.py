"""Tests for the auction assignment solver and its brute-force oracle"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from core.errors import ConfigError, ShapeError, SizeMismatchError, SolverError
from assignment import (
    LAZY_THRESHOLD,
    Assignment,
    AuctionParams,
    CostMatrix,
    auction_solve,
    brute_force_solve,
    point_cost,
)

MODES = [False, True]


def _integer_instances(count, seed=0, max_n=7, max_cost=20):
    gen = np.random.default_rng(seed)
    for _ in range(count):
        n = int(gen.integers(1, max_n + 1))
        yield gen.integers(0, max_cost + 1, (n, n)).astype(np.float64)


class TestCostMatrix:
    def test_point_cost_hand_example(self):
        costs = point_cost([[0.0, 0.0, 0.0]], [[1.0, 2.0, 2.0]])
        assert costs.cost(0, 0) == 9.0

    def test_identical_sets_zero_diagonal(self):
        cloud = np.random.default_rng(0).normal(size=(15, 3))
        costs = point_cost(cloud, cloud)
        np.testing.assert_array_equal(np.diag(costs.materialize()), np.zeros(15))

    def test_size_mismatch(self):
        with pytest.raises(SizeMismatchError):
            point_cost(np.zeros((3, 3)), np.zeros((4, 3)))

    def test_rejects_negative(self):
        with pytest.raises(SolverError):
            CostMatrix(matrix=[[0.0, -1.0], [1.0, 0.0]])

    def test_rejects_non_finite(self):
        with pytest.raises(SolverError):
            CostMatrix(matrix=[[0.0, np.inf], [1.0, 0.0]])

    def test_rejects_non_square(self):
        with pytest.raises(ShapeError):
            CostMatrix(matrix=np.zeros((2, 3)))

    def test_lazy_above_threshold(self):
        gen = np.random.default_rng(1)
        a = gen.normal(size=(LAZY_THRESHOLD + 1, 3))
        b = gen.normal(size=(LAZY_THRESHOLD + 1, 3))
        lazy = point_cost(a, b)
        assert lazy.is_lazy
        dense = lazy.materialize()
        assert lazy.max_cost() >= dense.max()
        assert lazy.mean_cost() == pytest.approx(dense.mean(), rel=1e-9)
        assert lazy.cost(5, 17) == pytest.approx(dense[5, 17], rel=1e-12)
        sigma = gen.permutation(LAZY_THRESHOLD + 1)
        assert lazy.total(sigma) == pytest.approx(dense[np.arange(len(sigma)), sigma].sum(), rel=1e-9)

    def test_transpose(self):
        costs = CostMatrix(matrix=[[4.0, 1.0], [2.0, 3.0]])
        np.testing.assert_array_equal(costs.transpose().materialize(), [[4.0, 2.0], [1.0, 3.0]])


class TestAuctionParams:
    def test_eps_order(self):
        with pytest.raises(ConfigError):
            AuctionParams(eps_start=0.01, eps_final=0.1)

    def test_divisor(self):
        with pytest.raises(ConfigError):
            AuctionParams(eps_start=1.0, eps_final=0.1, eps_scale_divisor=1.0)

    def test_phases_end_at_eps_final(self):
        phases = list(AuctionParams(eps_start=1.0, eps_final=0.01).phases())
        assert phases == [1.0, 0.25, 0.0625, 0.015625, 0.01]

    def test_integer_schedule(self):
        params = AuctionParams.for_integer_costs(CostMatrix(matrix=np.full((4, 4), 8.0)))
        assert params.eps_final == pytest.approx(0.2)
        assert params.eps_start == 4.0


class TestAuctionSolve:
    @pytest.mark.parametrize("parallel", MODES)
    def test_single_element(self, parallel):
        costs = CostMatrix(matrix=[[2.5]])
        result = auction_solve(costs, AuctionParams(1.0, 0.1, parallel=parallel))
        np.testing.assert_array_equal(result.sigma, [0])
        assert result.total_cost == 2.5

    @pytest.mark.parametrize("parallel", MODES)
    def test_two_by_two(self, parallel):
        costs = CostMatrix(matrix=[[4.0, 1.0], [2.0, 3.0]])
        params = AuctionParams(eps_start=2.0, eps_final=0.1, parallel=parallel)
        result = auction_solve(costs, params)
        np.testing.assert_array_equal(result.sigma, [1, 0])
        assert result.total_cost == 3.0

    @pytest.mark.parametrize("parallel", MODES)
    def test_identity_friendly(self, parallel):
        n = 6
        costs = CostMatrix(matrix=1.0 - np.eye(n))
        result = auction_solve(costs, AuctionParams.for_integer_costs(costs, parallel=parallel))
        np.testing.assert_array_equal(result.sigma, np.arange(n))
        assert result.total_cost == 0.0

    @pytest.mark.parametrize("parallel", MODES)
    def test_matches_brute_force_on_integer_costs(self, parallel):
        for matrix in _integer_instances(200, seed=11):
            costs = CostMatrix(matrix=matrix)
            result = auction_solve(costs, AuctionParams.for_integer_costs(costs, parallel=parallel))
            assert result.is_permutation()
            assert result.total_cost == brute_force_solve(costs).total_cost

    @given(st.integers(2, 7), st.integers(0, 2 ** 32 - 1))
    @settings(max_examples=40, deadline=None)
    def test_float_costs_within_bound(self, n, seed):
        gen = np.random.default_rng(seed)
        costs = point_cost(gen.normal(size=(n, 3)), gen.normal(size=(n, 3)))
        params = AuctionParams.for_float_costs(costs, tolerance=1e-3)
        result = auction_solve(costs, params)
        optimum = brute_force_solve(costs).total_cost
        assert result.is_permutation()
        assert result.total_cost == pytest.approx(costs.total(result.sigma))
        assert optimum - 1e-9 <= result.total_cost <= optimum + n * params.eps_final + 1e-9

    @pytest.mark.parametrize("parallel", MODES)
    def test_tighter_epsilon_stays_within_bound(self, parallel):
        gen = np.random.default_rng(8)
        n = 256
        costs = point_cost(gen.normal(size=(n, 3)), gen.normal(size=(n, 3)))
        params = AuctionParams.for_float_costs(costs, tolerance=1e-4, parallel=parallel)
        tight = AuctionParams(eps_start=params.eps_start, eps_final=params.eps_final / 10, parallel=parallel)
        loose_cost = auction_solve(costs, params).total_cost
        tight_cost = auction_solve(costs, tight).total_cost
        assert abs(loose_cost - tight_cost) <= n * params.eps_final + 1e-9

    def test_lazy_and_dense_agree(self):
        gen = np.random.default_rng(3)
        a, b = gen.normal(size=(6, 3)), gen.normal(size=(6, 3))
        lazy = CostMatrix(a=a, b=b)
        dense = point_cost(a, b)
        params = AuctionParams.for_float_costs(dense, tolerance=1e-6)
        optimum = brute_force_solve(dense).total_cost
        for costs in (lazy, dense):
            result = auction_solve(costs, params)
            assert result.total_cost == pytest.approx(optimum, abs=6 * params.eps_final + 1e-9)

    def test_deterministic(self):
        gen = np.random.default_rng(4)
        costs = point_cost(gen.normal(size=(30, 3)), gen.normal(size=(30, 3)))
        first = auction_solve(costs)
        second = auction_solve(costs)
        np.testing.assert_array_equal(first.sigma, second.sigma)
        assert first.iterations == second.iterations

    def test_bid_budget_exceeded(self):
        costs = CostMatrix(matrix=[[4.0, 1.0, 3.0], [2.0, 0.0, 5.0], [3.0, 2.0, 2.0]])
        with pytest.raises(SolverError):
            auction_solve(costs, AuctionParams(eps_start=2.0, eps_final=0.1, max_bids=1))


class TestBruteForce:
    def test_two_by_two(self):
        result = brute_force_solve(CostMatrix(matrix=[[4.0, 1.0], [2.0, 3.0]]))
        np.testing.assert_array_equal(result.sigma, [1, 0])
        assert result.total_cost == 3.0

    def test_ties_break_lexicographically(self):
        result = brute_force_solve(CostMatrix(matrix=np.full((4, 4), 2.0)))
        np.testing.assert_array_equal(result.sigma, np.arange(4))
        assert result.total_cost == 8.0

    def test_size_limit(self):
        with pytest.raises(SolverError):
            brute_force_solve(CostMatrix(matrix=np.zeros((11, 11))))


def test_assignment_inverse():
    result = Assignment(sigma=[2, 0, 1], total_cost=0.0)
    np.testing.assert_array_equal(result.inverse(), [1, 2, 0])
    assert result.is_permutation()
    assert not Assignment(sigma=[0, 0, 1], total_cost=0.0).is_permutation()
