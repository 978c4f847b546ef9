#!/usr/bin/env python3
"""
Exact assignment by enumeration
Reference solver for small instances.
"""

from itertools import permutations

import numpy as np

from core.errors import SolverError
from .auction import Assignment
from .costs import CostMatrix

MAX_BRUTE_FORCE_SIZE = 10


def brute_force_solve(costs: CostMatrix) -> Assignment:
    """Optimum over all n! permutations; lexicographically smallest sigma on ties"""
    n = costs.n
    if n > MAX_BRUTE_FORCE_SIZE:
        raise SolverError(f"brute force limited to n <= {MAX_BRUTE_FORCE_SIZE}, got n={n}")

    matrix = costs.materialize()
    rows = np.arange(n)
    best_sigma = None
    best_cost = np.inf
    # permutations() yields in lexicographic order, so strict < keeps the first minimum
    for sigma in permutations(range(n)):
        total = float(matrix[rows, sigma].sum())
        if total < best_cost:
            best_cost = total
            best_sigma = sigma

    return Assignment(sigma=np.array(best_sigma), total_cost=best_cost)
