"""
PPE Sizer - Assignment

Auction solver with epsilon scaling for the point matching behind the
earth mover loss, and an exact enumeration oracle.
"""

from .costs import CostMatrix, LAZY_THRESHOLD, point_cost
from .auction import (
    AuctionParams,
    Assignment,
    NUMBA_AVAILABLE,
    DEFAULT_FLOAT_TOLERANCE,
    auction_solve,
)
from .brute_force import MAX_BRUTE_FORCE_SIZE, brute_force_solve

__all__ = [
    'CostMatrix',
    'LAZY_THRESHOLD',
    'point_cost',
    'AuctionParams',
    'Assignment',
    'NUMBA_AVAILABLE',
    'DEFAULT_FLOAT_TOLERANCE',
    'auction_solve',
    'MAX_BRUTE_FORCE_SIZE',
    'brute_force_solve',
]
