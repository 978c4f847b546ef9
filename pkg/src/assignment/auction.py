#!/usr/bin/env python3
"""
Auction assignment solver
Bertsekas forward auction for minimum-cost perfect matching with epsilon
scaling. Sequential (Gauss-Seidel) bidding is the default; the Jacobi mode lets
every unassigned bidder bid against the same prices in one round.
"""

from dataclasses import dataclass
from typing import Optional
import logging
import math

import numpy as np

from core.errors import ConfigError, SolverError
from .costs import CostMatrix

logger = logging.getLogger(__name__)

try:
    from numba import njit, prange
    NUMBA_AVAILABLE = True
except ImportError:
    NUMBA_AVAILABLE = False
    prange = range

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda func: func

if not NUMBA_AVAILABLE:
    logger.warning("numba not available; auction kernels run as plain Python")

DEFAULT_SCALE_DIVISOR = 4.0
DEFAULT_FLOAT_TOLERANCE = 1e-4
# bid budget per solve, in units of n^2 * eps_start / eps_final
BID_BUDGET_FACTOR = 64
MAX_BID_BUDGET = 2 ** 62


@dataclass
class AuctionParams:
    eps_start: float
    eps_final: float
    eps_scale_divisor: float = DEFAULT_SCALE_DIVISOR
    parallel: bool = False
    max_bids: Optional[int] = None

    def __post_init__(self):
        if not (math.isfinite(self.eps_final) and self.eps_final > 0):
            raise ConfigError(f"eps_final must be > 0, got {self.eps_final}")
        if not (math.isfinite(self.eps_start) and self.eps_start >= self.eps_final):
            raise ConfigError(f"eps_start ({self.eps_start}) must be >= eps_final ({self.eps_final})")
        if not self.eps_scale_divisor > 1:
            raise ConfigError(f"eps_scale_divisor must be > 1, got {self.eps_scale_divisor}")

    @classmethod
    def for_integer_costs(cls, costs: CostMatrix, granularity: float = 1.0, **kwargs) -> 'AuctionParams':
        """Schedule that is exactly optimal when costs are multiples of `granularity`"""
        eps_final = granularity / (costs.n + 1)
        return cls(eps_start=max(costs.max_cost() / 2.0, eps_final), eps_final=eps_final, **kwargs)

    @classmethod
    def for_float_costs(cls, costs: CostMatrix, tolerance: float = DEFAULT_FLOAT_TOLERANCE,
                        **kwargs) -> 'AuctionParams':
        """eps_final = tolerance x mean cost"""
        eps_final = max(tolerance * costs.mean_cost(), 1e-12)
        return cls(eps_start=max(costs.max_cost() / 2.0, eps_final), eps_final=eps_final, **kwargs)

    def phases(self):
        eps = self.eps_start
        while True:
            yield eps
            if eps <= self.eps_final:
                return
            eps = max(eps / self.eps_scale_divisor, self.eps_final)

    def bid_budget(self, n: int) -> int:
        if self.max_bids is not None:
            return int(self.max_bids)
        budget = BID_BUDGET_FACTOR * float(n) * float(n) * math.ceil(self.eps_start / self.eps_final)
        return int(min(budget + BID_BUDGET_FACTOR * n, MAX_BID_BUDGET))


@dataclass
class Assignment:
    """sigma[i] is the column matched to row i"""
    sigma: np.ndarray
    total_cost: float
    iterations: int = 0
    phases: int = 0

    def __post_init__(self):
        self.sigma = np.asarray(self.sigma, dtype=np.int64)

    @property
    def n(self) -> int:
        return int(self.sigma.shape[0])

    def is_permutation(self) -> bool:
        return bool(np.array_equal(np.sort(self.sigma), np.arange(self.n)))

    def inverse(self) -> np.ndarray:
        inverse = np.empty_like(self.sigma)
        inverse[self.sigma] = np.arange(self.n)
        return inverse


@njit(nogil=True, cache=True)
def _cost(matrix, a, b, lazy, i, j):
    if lazy:
        dx = a[i, 0] - b[j, 0]
        dy = a[i, 1] - b[j, 1]
        dz = a[i, 2] - b[j, 2]
        return dx * dx + dy * dy + dz * dz
    return matrix[i, j]


@njit(nogil=True, cache=True)
def _best_two(matrix, a, b, lazy, n, prices, i):
    """Best object (lowest index on ties) and the top two values for bidder i"""
    best = -1
    w1 = -np.inf
    w2 = -np.inf
    for j in range(n):
        v = -_cost(matrix, a, b, lazy, i, j) - prices[j]
        if v > w1:
            w2 = w1
            w1 = v
            best = j
        elif v > w2:
            w2 = v
    return best, w1, w2


@njit(nogil=True, cache=True)
def _gauss_seidel_phase(matrix, a, b, lazy, n, prices, eps, person_to_obj, obj_to_person, budget):
    person_to_obj[:] = -1
    obj_to_person[:] = -1
    # FIFO of unassigned bidders
    queue = np.arange(n)
    head = 0
    count = n
    bids = 0
    while count > 0:
        i = queue[head]
        head = (head + 1) % n
        count -= 1

        best, w1, w2 = _best_two(matrix, a, b, lazy, n, prices, i)
        if w2 == -np.inf:
            prices[best] += eps
        else:
            prices[best] += w1 - w2 + eps

        previous = obj_to_person[best]
        obj_to_person[best] = i
        person_to_obj[i] = best
        if previous >= 0:
            person_to_obj[previous] = -1
            queue[(head + count) % n] = previous
            count += 1

        bids += 1
        if bids > budget:
            return -1
    return bids


@njit(nogil=True, parallel=True, cache=True)
def _jacobi_phase(matrix, a, b, lazy, n, prices, eps, person_to_obj, obj_to_person, budget):
    person_to_obj[:] = -1
    obj_to_person[:] = -1
    bid_obj = np.full(n, -1, dtype=np.int64)
    bid_inc = np.zeros(n)
    high_bid = np.zeros(n)
    high_bidder = np.full(n, -1, dtype=np.int64)

    unassigned = n
    bids = 0
    while unassigned > 0:
        # bid: every unassigned bidder against the same prices
        for i in prange(n):
            bid_obj[i] = -1
            if person_to_obj[i] == -1:
                best, w1, w2 = _best_two(matrix, a, b, lazy, n, prices, i)
                bid_obj[i] = best
                if w2 == -np.inf:
                    bid_inc[i] = eps
                else:
                    bid_inc[i] = w1 - w2 + eps

        # compete: highest increment wins, lowest bidder index on ties
        high_bidder[:] = -1
        for i in range(n):
            j = bid_obj[i]
            if j < 0:
                continue
            bids += 1
            if high_bidder[j] == -1 or bid_inc[i] > high_bid[j]:
                high_bid[j] = bid_inc[i]
                high_bidder[j] = i

        # assign
        for j in range(n):
            winner = high_bidder[j]
            if winner == -1:
                continue
            prices[j] += high_bid[j]
            previous = obj_to_person[j]
            if previous >= 0:
                person_to_obj[previous] = -1
                unassigned += 1
            obj_to_person[j] = winner
            person_to_obj[winner] = j
            unassigned -= 1

        if bids > budget:
            return -1
    return bids


def auction_solve(costs: CostMatrix, params: Optional[AuctionParams] = None) -> Assignment:
    """Complete assignment within n * eps_final of the optimum"""
    if params is None:
        params = AuctionParams.for_float_costs(costs)
    n = costs.n

    if costs.is_lazy:
        a, b = costs.points
        matrix = np.zeros((1, 1))
        lazy = True
    else:
        a = b = np.zeros((1, 3))
        matrix = costs.materialize()
        lazy = False

    if n == 1:
        sigma = np.zeros(1, dtype=np.int64)
        return Assignment(sigma=sigma, total_cost=costs.total(sigma), iterations=0, phases=0)

    prices = np.zeros(n)
    person_to_obj = np.full(n, -1, dtype=np.int64)
    obj_to_person = np.full(n, -1, dtype=np.int64)
    phase_kernel = _jacobi_phase if params.parallel else _gauss_seidel_phase

    remaining = params.bid_budget(n)
    total_bids = 0
    phases = 0
    for eps in params.phases():
        bids = phase_kernel(matrix, a, b, lazy, n, prices, eps, person_to_obj, obj_to_person, remaining)
        phases += 1
        if bids < 0:
            raise SolverError(f"auction exceeded its bid budget at eps={eps:.3g} (n={n})")
        if not np.all(np.isfinite(prices)):
            raise SolverError(f"auction prices diverged at eps={eps:.3g}")
        total_bids += int(bids)
        remaining -= int(bids)
        logger.debug(f"auction phase {phases}: eps={eps:.4g} bids={bids}")

    sigma = person_to_obj.copy()
    result = Assignment(sigma=sigma, total_cost=costs.total(sigma), iterations=total_bids, phases=phases)
    if not result.is_permutation():
        raise SolverError("auction terminated without a complete matching")
    return result
