"""
Worst-case cost of digit assembly as a function of the radix.

For m = r**(k+1) - 1 the worst plaintext has every digit equal to r - 1, so
joining its terms takes (r - 1)(k + 1) - 1 = (r - 1) log_r(m + 1) - 1
additions. The real-valued form is increasing in r, which makes r = 2 optimal.
"""

import logging
import math
from typing import Iterable, Tuple

import numpy as np
import pandas as pd

from src.core.radix_cache import floor_log
from src.errors import ScanBudgetError
from src.models.bench_models import RadixCostProfile

logger = logging.getLogger(__name__)

SCAN_BUDGET = 1 << 24
SCAN_CHUNK = 1 << 20
_TOLERANCE = 1e-12


def predicted_cost(radix: int, m: int) -> float:
    """(r - 1) * log_r(m + 1) - 1."""
    if radix < 2:
        raise ValueError(f"radix must be >= 2, got {radix}")
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    return (radix - 1) * math.log(m + 1) / math.log(radix) - 1


def auxiliary_g(radix: float) -> float:
    """r ln r - r + 1; the derivative of the cost has the sign of this term."""
    return radix * math.log(radix) - radix + 1


def measured_cost(radix: int, m: int) -> int:
    """
    Brute-force maximum of the digit-join addition count over x in (0, m].

    Raises:
        ScanBudgetError: if m exceeds SCAN_BUDGET
    """
    if radix < 2:
        raise ValueError(f"radix must be >= 2, got {radix}")
    if m > SCAN_BUDGET:
        raise ScanBudgetError(f"m = {m} exceeds the scan budget of {SCAN_BUDGET}")
    if m < 1:
        return 0

    k = floor_log(m, radix)
    best = 0
    for start in range(1, m + 1, SCAN_CHUNK):
        x = np.arange(start, min(start + SCAN_CHUNK, m + 1), dtype=np.int64)
        sums = np.zeros_like(x)
        for _ in range(k + 1):
            sums += x % radix
            x //= radix
        best = max(best, int(sums.max()))
    return best - 1


def optimal_radix(m: int, r_range: Tuple[int, int]) -> int:
    """Radix in the inclusive range minimizing predicted_cost; ties go to the smaller."""
    low, high = r_range
    if low < 2 or high < low:
        raise ValueError(f"Invalid radix range {r_range}")

    best_radix, best_cost = low, predicted_cost(low, m)
    for radix in range(low + 1, high + 1):
        cost = predicted_cost(radix, m)
        if cost < best_cost - _TOLERANCE:
            best_radix, best_cost = radix, cost
    return best_radix


def monotonicity_check(m: int, r_max: int) -> bool:
    """True iff predicted_cost(r + 1, m) >= predicted_cost(r, m) for r in [2, r_max)."""
    return all(
        predicted_cost(radix + 1, m) >= predicted_cost(radix, m) - _TOLERANCE
        for radix in range(2, r_max)
    )


def cost_profile(radix: int, m: int) -> RadixCostProfile:
    return RadixCostProfile(
        radix=radix,
        max_plain=m,
        k=floor_log(m, radix),
        predicted_worst_cost=predicted_cost(radix, m),
        measured_worst_cost=measured_cost(radix, m),
    )


def cost_table(radixes: Iterable[int], exponents: Iterable[int]) -> pd.DataFrame:
    """
    Predicted versus measured worst case at m = r**(k+1) - 1.

    Returns:
        DataFrame with columns radix, k, max_plain, closed_form,
        predicted_worst_cost, measured_worst_cost, matches
    """
    exponents = list(exponents)
    rows = []
    for radix in radixes:
        for k in exponents:
            profile = cost_profile(radix, radix ** (k + 1) - 1)
            rows.append(
                {
                    "radix": radix,
                    "k": k,
                    "max_plain": profile.max_plain,
                    "closed_form": (radix - 1) * (k + 1) - 1,
                    "predicted_worst_cost": profile.predicted_worst_cost,
                    "measured_worst_cost": profile.measured_worst_cost,
                    "matches": profile.matches,
                }
            )
    logger.debug("Computed cost table with %d rows", len(rows))
    return pd.DataFrame(rows)
