"""The Borwein AGM product for pi in fixed point.

With ``x = 1/sqrt 2``, ``y_{k+1} = (1+y_k) / (2 sqrt y_k)`` and
``z_{k+1} = (1 + z_k y_k) / ((1+z_k) sqrt y_k)``,

    pi_n = (2 + sqrt 2) * prod_{i=1..n} (1+y_i)/(1+z_i)

decreases to pi with ``pi_n - pi <= 4 (2+sqrt 2) 531**-(2**(n-1))``.  The
fixed-point evaluation loses less than ``21 n + 3`` ulps.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Optional

from .budget import LOG2_531, ErrorBudget
from .errors import BudgetError, ContractError
from .fixedpoint import (FixedReal, Magnifier, fx_add, fx_div, fx_mul, fx_one,
                         fx_sqrt, fx_two, int_scale)

# log2(4 * (2 + sqrt 2)) < log2(14)
_LOG2_4PI0 = math.log2(14)


@dataclass(frozen=True)
class BorweinState:
    """Snapshot after ``index`` iterations of a run that will stop at ``n``."""

    magnifier: Magnifier
    n: int
    index: int
    s2: FixedReal
    y: FixedReal
    z: FixedReal
    prod: FixedReal

    @property
    def iterations_left(self) -> int:
        return self.n - self.index


def check_borwein_precondition(m: Magnifier, n: int):
    if n < 0:
        raise ContractError("iteration count must be nonnegative")
    if not 600 * (n + 1) < m.value:
        raise BudgetError(
            f"magnifier too small for {n} iterations: need m > {600 * (n + 1)}")


def borwein_init(m: Magnifier) -> tuple:
    """``(sqrt 2, y_1, z_1)``."""
    one = fx_one(m)
    s2 = fx_sqrt(m, fx_two(m))
    ss2 = fx_sqrt(m, s2)
    y1 = fx_div(m, fx_add(one, s2), int_scale(2, ss2))
    return s2, y1, ss2


def borwein_step(m: Magnifier, y: FixedReal, z: FixedReal) -> tuple:
    """``(y_{k+1}, z_{k+1})`` from ``(y_k, z_k)``."""
    one = fx_one(m)
    sy = fx_sqrt(m, y)
    ny = fx_div(m, fx_add(one, y), int_scale(2, sy))
    nz = fx_div(m, fx_add(one, fx_mul(m, z, y)), fx_mul(m, fx_add(one, z), sy))
    return ny, nz


def borwein_start(m: Magnifier, n: int) -> BorweinState:
    check_borwein_precondition(m, n)
    if n < 1:
        raise ContractError("a Borwein state needs at least one iteration")
    one = fx_one(m)
    s2, y1, z1 = borwein_init(m)
    prod = fx_div(m, fx_add(one, y1), fx_add(one, z1))
    return BorweinState(m, n, 1, s2, y1, z1, prod)


def borwein_advance(st: BorweinState) -> BorweinState:
    if st.index >= st.n:
        raise ContractError("run already complete")
    m = st.magnifier
    one = fx_one(m)
    ny, nz = borwein_step(m, st.y, st.z)
    prod = fx_mul(m, st.prod, fx_div(m, fx_add(one, ny), fx_add(one, nz)))
    return replace(st, index=st.index + 1, y=ny, z=nz, prod=prod)


def borwein_finish(st: BorweinState) -> FixedReal:
    m = st.magnifier
    return fx_mul(m, fx_add(fx_two(m), st.s2), st.prod)


def borwein_pi(m: Magnifier, n: int, state: Optional[BorweinState] = None,
               on_step: Optional[Callable[[BorweinState], None]] = None) -> FixedReal:
    """Fixed-point ``pi_n``.

    ``state`` resumes a run from a snapshot; ``on_step`` receives a snapshot
    after every iteration.  The result is bit-identical either way.
    """
    check_borwein_precondition(m, n)
    if n == 0:
        return fx_add(fx_two(m), fx_sqrt(m, fx_two(m)))
    if state is None:
        st = borwein_start(m, n)
        if on_step:
            on_step(st)
    else:
        if state.magnifier != m or state.n != n:
            raise ContractError("state belongs to a different run")
        st = state
    while st.index < n:
        st = borwein_advance(st)
        if on_step:
            on_step(st)
    return borwein_finish(st)


def borwein_truncation_log2(n: int) -> float:
    """Upper bound on ``log2(pi_n - pi)``."""
    return _LOG2_4PI0 - 2.0 ** (n - 1) * LOG2_531


def borwein_iterations_for(digits: int, base: int = 10) -> int:
    """Smallest ``p`` with ``4 pi_0 531**-(2**p) < base**-digits``.

    ``pi_{p+1}`` then has the requested accuracy, so a run needs ``p + 1``
    iterations.
    """
    if digits < 1:
        raise ContractError("digit count must be >= 1")
    # 4 pi_0 multiplies the bound, so its logarithm is added to the target.
    num = digits * math.log(base) + math.log(4 * (2 + math.sqrt(2)))
    x = math.log(num / math.log(531)) / math.log(2)
    # Outward rounding: only ever round the requirement up.
    return max(0, math.ceil(x + abs(x) * 1e-12 + 1e-12))


def borwein_budget(n: int, m: Optional[Magnifier] = None) -> ErrorBudget:
    if m is not None:
        check_borwein_precondition(m, n)
    return ErrorBudget("borwein", n, Fraction(21 * n + 3), borwein_truncation_log2(n))
