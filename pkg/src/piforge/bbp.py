"""Hexadecimal digit extraction for pi with the BBP series.

    pi = sum_i 16**-i * (4/(8i+1) - 2/(8i+4) - 1/(8i+5) - 1/(8i+6))

For the digit at 1-based hexadecimal position ``d`` each sub-sum
``S_k = sum_i 1/(16**i (8i+k))`` is scaled by ``16**(d-1) * 2**p`` and only
its value modulo ``2**p`` is kept.  Terms with ``i < d`` are computed with a
modular power, terms ``d <= i < d + p/4`` with a shifting numerator, and the
remaining tail is worth less than one unit.  Every integer division rounds
down, so each scaled sub-sum is an under-approximation with an error below
``delta = d + p//4 + 1`` units.  The digit is emitted only when the lower and
upper ends of that error window agree on it; otherwise the answer is None.
"""
from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

from .errors import ContractError

log = logging.getLogger(__name__)

# Sub-sum offsets and their coefficients in the series.
WEIGHTS = {1: 4, 4: -2, 5: -1, 6: -1}
KS = tuple(WEIGHTS)


@dataclass(frozen=True)
class BbpParams:
    """Target position ``d`` (1-based, after the point) and working precision ``p`` bits."""

    d: int
    p: int

    def __post_init__(self):
        if self.d < 1:
            raise ContractError(f"hex position must be >= 1, got {self.d}")
        if self.p < 1:
            raise ContractError(f"precision must be >= 1 bit, got {self.p}")

    @property
    def delta(self) -> int:
        """Error bound, in units, on one scaled sub-sum."""
        return self.d + self.p // 4 + 1

    def guards_ok(self) -> bool:
        return self.p > 3 and 8 * self.delta < 2 ** (self.p - 4)


@dataclass(frozen=True)
class BbpLowState:
    i: int
    res: int


@dataclass(frozen=True)
class BbpMidState:
    i: int
    s: int
    res: int


def pow_mod(base: int, exp: int, modulus: int) -> int:
    """``base**exp mod modulus`` by square-and-multiply (delegated to builtin pow)."""
    if modulus <= 0:
        raise ContractError("modulus must be positive")
    if exp < 0:
        raise ContractError("exponent must be nonnegative")
    return pow(base, exp, modulus)


def bbp_low_step(k: int, params: BbpParams, st: BbpLowState) -> BbpLowState:
    p, d = params.p, params.d
    r = 8 * st.i + k
    res = st.res + ((2**p) * pow_mod(16, d - 1 - st.i, r)) // r
    if res >= 2**p:
        res -= 2**p
    return BbpLowState(st.i + 1, res)


def bbp_sum_low(k: int, params: BbpParams, start: int = 0, stop: Optional[int] = None) -> int:
    """Scaled sum of the terms ``start <= i < stop`` (default ``0..d``), modulo ``2**p``.

    Partial sums over contiguous ranges add up, modulo ``2**p``, to the
    full sum bit for bit.
    """
    if stop is None:
        stop = params.d
    if not 0 <= start <= stop <= params.d:
        raise ContractError(f"bad index range [{start}, {stop}) for d={params.d}")
    p, d = params.p, params.d
    mask = (1 << p) - 1
    res = 0
    for i in range(start, stop):
        r = 8 * i + k
        res = (res + (pow(16, d - 1 - i, r) << p) // r) & mask
    return res


def bbp_mid_step(k: int, st: BbpMidState) -> BbpMidState:
    r = 8 * st.i + k
    return BbpMidState(st.i + 1, st.s // 16, st.res + st.s // r)


def bbp_sum_mid(k: int, params: BbpParams) -> int:
    n = params.p // 4
    if n < 1:
        raise ContractError("precision must be at least 4 bits for the middle sum")
    st = BbpMidState(params.d, 2 ** (params.p - 4), 0)
    for _ in range(n):
        st = bbp_mid_step(k, st)
    return st.res


def bbp_sum(k: int, params: BbpParams) -> int:
    """Under-approximation of the scaled ``S_k`` (mod ``2**p``) with error < ``delta``."""
    return bbp_sum_low(k, params) + bbp_sum_mid(k, params)


def _low_chunk(d: int, p: int, start: int, stop: int) -> tuple:
    # The four low sums in one pass; same arithmetic as bbp_sum_low.
    mask = (1 << p) - 1
    r1 = r4 = r5 = r6 = 0
    e = d - 1 - start
    r = 8 * start
    for _ in range(start, stop):
        r1 = (r1 + (pow(16, e, r + 1) << p) // (r + 1)) & mask
        r4 = (r4 + (pow(16, e, r + 4) << p) // (r + 4)) & mask
        r5 = (r5 + (pow(16, e, r + 5) << p) // (r + 5)) & mask
        r6 = (r6 + (pow(16, e, r + 6) << p) // (r + 6)) & mask
        e -= 1
        r += 8
    return r1, r4, r5, r6


def split_range(n: int, parts: int) -> list:
    """Cut ``[0, n)`` into at most ``parts`` contiguous, nonempty ranges."""
    parts = max(1, min(parts, n))
    step, extra = divmod(n, parts)
    out = []
    lo = 0
    for j in range(parts):
        hi = lo + step + (1 if j < extra else 0)
        out.append((lo, hi))
        lo = hi
    return out


def low_sums(params: BbpParams, threads: int = 1) -> tuple:
    """``(L1, L4, L5, L6)``: all four low sums, optionally split across processes."""
    d, p = params.d, params.p
    mask = (1 << p) - 1
    ranges = split_range(d, threads)
    if threads <= 1 or len(ranges) == 1:
        return _low_chunk(d, p, 0, d)
    with ProcessPoolExecutor(max_workers=len(ranges)) as pool:
        futures = [pool.submit(_low_chunk, d, p, lo, hi) for lo, hi in ranges]
        parts = [f.result() for f in futures]
    return tuple(sum(col) & mask for col in zip(*parts))


def pi_hex_digit(params: BbpParams, threads: int = 1) -> Optional[int]:
    """Hex digit of pi at position ``params.d``, or None when it cannot be certified.

    A returned digit always equals ``floor(pi * 16**d) mod 16``.
    """
    p = params.p
    if not 3 < p:
        return None
    delta = params.delta
    if not 8 * delta < 2 ** (p - 4):
        return None
    lows = low_sums(params, threads)
    s1, s4, s5, s6 = (lo + bbp_sum_mid(k, params) for lo, k in zip(lows, KS))
    y = 4 * s1 + (9 * 2**p - (2 * s4 + s5 + s6 + 4 * delta))
    lo_digit = y % 2**p // 2 ** (p - 4)
    hi_digit = (y + 8 * delta) % 2**p // 2 ** (p - 4)
    if lo_digit != hi_digit:
        return None
    return lo_digit


def choose_precision(d: int, slack: int = 0) -> int:
    """Smallest multiple of 4 passing both precision guards at position ``d``, plus ``slack``."""
    if d < 1:
        raise ContractError(f"hex position must be >= 1, got {d}")
    p = 4
    while not BbpParams(d, p).guards_ok():
        p += 4
    return p + slack


def default_threads() -> int:
    env = os.environ.get("PIFORGE_THREADS")
    if env:
        return max(1, int(env))
    return 1


def hex_digit(d: int, p: Optional[int] = None, max_extra_bits: int = 64,
              threads: int = 1) -> tuple:
    """Digit at position ``d`` with precision escalation.

    Starts at ``p`` (default :func:`choose_precision`) and retries with 4 more
    bits each time the digit is not certified, giving up after
    ``max_extra_bits``.  Returns ``(digit or None, last precision tried)``.
    """
    if p is None:
        p = choose_precision(d)
    cap = p + max_extra_bits
    while True:
        digit = pi_hex_digit(BbpParams(d, p), threads)
        if digit is not None or p + 4 > cap:
            return digit, p
        log.debug("position %d not certified at %d bits, escalating", d, p)
        p += 4
