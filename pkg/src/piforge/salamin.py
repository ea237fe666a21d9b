"""The Brent-Salamin (Gauss-Legendre) AGM formula for pi in fixed point.

Starting from ``a_0 = 1``, ``b_0 = 1/sqrt 2``,

    pi'_N = 4 a_N**2 / (1 - sum_{k=1..N-1} 2**(k-1) (a_{k-1} - b_{k-1})**2)

Halvings and the power-of-two weights are shifts; the only full division is
the final one.  ``salamin_pi(m, n)`` evaluates ``pi'_{n+1}``, the quantity
whose rounding error is bounded by
``160 (3/2)**(n+1) + 80 * 3**(n+1) + 100`` ulps.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Optional

from .budget import LOG2_531, ErrorBudget, log2_upper
from .errors import BudgetError, ContractError
from .fixedpoint import (FixedReal, Magnifier, fx_div, fx_halve, fx_mul, fx_one,
                         fx_sqrt, int_scale)


@dataclass(frozen=True)
class AgmPair:
    a: FixedReal
    b: FixedReal


@dataclass(frozen=True)
class SalaminState:
    """After ``k`` AGM steps of a run evaluating ``pi'_{n+1}``.

    ``total`` accumulates the weighted squared gaps already consumed and
    ``pow2`` is the weight of the next one, ``2**k``.
    """

    magnifier: Magnifier
    n: int
    k: int
    pair: AgmPair
    total: FixedReal
    pow2: int


def agm_step(m: Magnifier, pair: AgmPair) -> AgmPair:
    a, b = pair.a, pair.b
    if a.mantissa <= 0 or b.mantissa <= 0:
        raise ContractError("AGM operands must be positive")
    return AgmPair(fx_halve(a + b), fx_sqrt(m, fx_mul(m, a, b)))


def check_salamin_precondition(m: Magnifier, n: int):
    if n < 0:
        raise ContractError("iteration count must be nonnegative")
    need = 3 ** (n + 1) * 10 ** (n + 6)
    if m.value < need:
        raise BudgetError(f"magnifier too small for n={n}: need m >= 3^{n + 1}*10^{n + 6}")


def salamin_start(m: Magnifier, n: int) -> SalaminState:
    check_salamin_precondition(m, n)
    one = fx_one(m)
    b0 = fx_sqrt(m, FixedReal(m.value // 2, m))
    return SalaminState(m, n, 0, AgmPair(one, b0), FixedReal(0, m), 1)


def salamin_advance(st: SalaminState) -> SalaminState:
    steps = st.n + 1
    if st.k >= steps:
        raise ContractError("run already complete")
    m = st.magnifier
    total = st.total
    if st.k + 1 <= steps - 1:
        gap = st.pair.a.mantissa - st.pair.b.mantissa
        # One rounding for the whole weighted square.
        term = (gap * gap * st.pow2) // m.value
        total = FixedReal(total.mantissa + term, m)
    return replace(st, k=st.k + 1, pair=agm_step(m, st.pair), total=total, pow2=st.pow2 * 2)


def salamin_finish(st: SalaminState) -> FixedReal:
    m = st.magnifier
    a = st.pair.a
    num = int_scale(4, fx_mul(m, a, a))
    den = FixedReal(m.value - st.total.mantissa, m)
    return fx_div(m, num, den)


def salamin_pi(m: Magnifier, n: int, state: Optional[SalaminState] = None,
               on_step: Optional[Callable[[SalaminState], None]] = None) -> FixedReal:
    """Fixed-point ``pi'_{n+1}`` (``n + 1`` AGM steps, one division)."""
    check_salamin_precondition(m, n)
    if state is None:
        st = salamin_start(m, n)
    else:
        if state.magnifier != m or state.n != n:
            raise ContractError("state belongs to a different run")
        st = state
    while st.k < n + 1:
        st = salamin_advance(st)
        if on_step:
            on_step(st)
    return salamin_finish(st)


def salamin_truncation_log2(n: int) -> float:
    """Upper bound on ``log2 |pi'_{n+1} - pi|``."""
    return math.log2(132 + 384 * 2**n) - 2.0**n * LOG2_531


def salamin_rounding_ulps(n: int) -> Fraction:
    return 160 * Fraction(3, 2) ** (n + 1) + 80 * 3 ** (n + 1) + 100


def salamin_budget(n: int, m: Optional[Magnifier] = None) -> ErrorBudget:
    if m is not None:
        check_salamin_precondition(m, n)
    return ErrorBudget("salamin", n, salamin_rounding_ulps(n), salamin_truncation_log2(n))


def salamin_iterations_for(digits: int, base: int = 10) -> int:
    """Smallest ``n`` with ``|pi'_{n+1} - pi| < base**-digits / 2``."""
    if digits < 1:
        raise ContractError("digit count must be >= 1")
    target = -digits * math.log2(base) - 1
    n = 0
    while log2_upper(salamin_truncation_log2(n)) >= target:
        n += 1
    return n
