"""Error budgets for the AGM algorithms, in ulps of the working magnifier.

Truncation bounds such as ``4 (2+sqrt 2) 531**-(2**(n-1))`` are far too
small (or their denominators far too large) to evaluate exactly at useful
``n``, so they are carried as an upper bound on their base-2 logarithm.
Every conversion to integer ulps rounds outward.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

LOG2_531 = math.log2(531)
# Relative slack applied to float logarithms so they only ever overestimate.
_REL = 1e-12
_ABS = 1e-9


def log2_upper(x: float) -> float:
    return x + abs(x) * _REL + _ABS


def ceil_ulps_from_log2(lg: float) -> int:
    """Smallest integer count of ulps guaranteed to be >= ``2**lg``."""
    lg = log2_upper(lg)
    if lg < 0:
        return 1
    if lg < 1000:
        return math.ceil(2.0**lg * (1 + 1e-12)) + 1
    return 1 << (math.ceil(lg) + 1)


@dataclass(frozen=True)
class ErrorBudget:
    """Accumulated error of one algorithm run.

    ``rounding_ulps`` is in units of the working magnifier, ``truncation_log2``
    bounds the distance between the exact iterate and pi, and
    ``rescale_ulps`` counts ulps of the *target* magnifier lost when the
    result is re-expressed there.
    """

    algorithm: str
    n: int
    rounding_ulps: Fraction
    truncation_log2: float
    rescale_ulps: int = 1

    @property
    def truncation_log10(self) -> float:
        return self.truncation_log2 * math.log10(2)

    def total_ulps(self, working: int, target: int | None = None) -> int:
        """Integer bound ``B`` on ``|value - pi|`` in ulps of ``target``.

        With ``target`` omitted, the bound is in working ulps and has no
        rescale term.
        """
        if target is None:
            return math.ceil(self.rounding_ulps) + ceil_ulps_from_log2(
                self.truncation_log2 + math.log2(working))
        rnd = self.rounding_ulps * target
        rounding = -(-rnd.numerator // (rnd.denominator * working))
        trunc = ceil_ulps_from_log2(self.truncation_log2 + math.log2(target))
        return rounding + trunc + self.rescale_ulps

    def as_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "n": self.n,
            "rounding_ulps": str(self.rounding_ulps),
            "truncation_log10": self.truncation_log10,
            "rescale_ulps": self.rescale_ulps,
        }
