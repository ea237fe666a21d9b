"""Certified digit strings from fixed-point approximations of pi.

The approximation is rescaled to ``base**(N+g)``, where ``g`` guard digits
sit beyond the ``N`` requested ones.  Writing the rescaled integer as
``q * base**g + r``, every emitted digit (those of ``q``) is certain when the
error bound ``B`` cannot carry or borrow across the guard window, i.e.
``B < r < base**g - B``.  Otherwise the run is reported as ambiguous.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Union

from .bbp import hex_digit
from .borwein import (BorweinState, borwein_budget, borwein_iterations_for, borwein_pi,
                      borwein_truncation_log2)
from .budget import ErrorBudget
from .errors import ConfigurationError, ContractError
from .fixedpoint import FixedReal, Magnifier, change_magnifier
from .salamin import (SalaminState, salamin_budget, salamin_iterations_for, salamin_pi,
                      salamin_truncation_log2)

log = logging.getLogger(__name__)

ALGORITHMS = ("borwein", "salamin")
BASES = (10, 16)
MIN_GUARD = 4
_CHUNK = 2000
_ALPHABET = "0123456789ABCDEF"


@dataclass(frozen=True)
class DigitRequest:
    digits: int
    base: int = 10
    guard_digits: Optional[int] = None
    algorithm: str = "borwein"

    def __post_init__(self):
        if self.digits < 1:
            raise ConfigurationError(f"digit count must be >= 1, got {self.digits}")
        if self.base not in BASES:
            raise ConfigurationError(f"base must be 10 or 16, got {self.base}")
        if self.guard_digits is not None and self.guard_digits < 1:
            raise ConfigurationError("guard digits must be >= 1")
        if self.algorithm not in ALGORITHMS:
            raise ConfigurationError(f"unknown algorithm {self.algorithm!r}")


@dataclass
class DigitReport:
    algorithm: str
    base: int
    digits: int
    guard_digits: int
    verdict: str
    digit_string: str
    guard_remainder: int
    budget_ulps: int
    n: int = 0
    magnifier_bits: int = 0
    rounding_ulps: str = "0"
    truncation_log10: float = 0.0
    timings: dict = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return self.verdict == "certified"

    def as_dict(self) -> dict:
        d = asdict(self)
        del d["digit_string"]
        return d


# -- rendering ---------------------------------------------------------------

def _fixed_width(q: int, base: int, width: int, pows: dict) -> str:
    if width == 0:
        if q:
            raise ContractError("value does not fit the requested width")
        return ""
    if width <= _CHUNK:
        s = format(q, "X") if base == 16 else str(q)
        if len(s) > width:
            raise ContractError("value does not fit the requested width")
        return s.rjust(width, "0")
    half = width // 2
    if half not in pows:
        pows[half] = base**half
    hi, lo = divmod(q, pows[half])
    return _fixed_width(hi, base, width - half, pows) + _fixed_width(lo, base, half, pows)


def render(q: int, n: int, base: int = 10) -> str:
    """``q / base**n`` as ``"<int>.<n digits>"``; hex digits are upper case."""
    if q < 0:
        raise ContractError("cannot render a negative value")
    if base not in BASES:
        raise ContractError(f"base must be 10 or 16, got {base}")
    ip, frac = divmod(q, base**n)
    head = format(ip, "X") if base == 16 else str(ip)
    return head + "." + _fixed_width(frac, base, n, {})


def _parse_digits(s: str, base: int) -> int:
    if len(s) <= _CHUNK:
        return int(s, base) if s else 0
    half = len(s) // 2
    return _parse_digits(s[:-half], base) * base**half + _parse_digits(s[-half:], base)


def parse(text: str, base: int = 10) -> tuple:
    """Inverse of :func:`render`: ``(q, n)``."""
    head, sep, frac = text.strip().partition(".")
    if not sep or not head:
        raise ContractError("expected '<int>.<digits>'")
    valid = set(_ALPHABET[:base]) | set(_ALPHABET[10:base].lower())
    if not set(head + frac) <= valid:
        raise ContractError(f"invalid base-{base} digits")
    return int(head, base) * base ** len(frac) + _parse_digits(frac, base), len(frac)


# -- certification -----------------------------------------------------------

def guard_digits_for(ulps: int, base: int = 10, minimum: int = MIN_GUARD) -> int:
    """Fewest guard digits ``g >= minimum`` with ``base**g > 2 * ulps``."""
    g = 1
    while base**g <= 2 * ulps:
        g += 1
    return max(minimum, g)


def certify_digits(value: FixedReal, req: DigitRequest, budget: ErrorBudget) -> DigitReport:
    """Digits of ``value`` with a verdict on whether they are provably those of pi."""
    t0 = time.perf_counter()
    m = value.magnifier
    n_digits, base = req.digits, req.base
    g = req.guard_digits
    if g is None:
        g = MIN_GUARD
        while True:
            bound = budget.total_ulps(m.value, base ** (n_digits + g))
            g_needed = guard_digits_for(bound, base)
            if g_needed <= g:
                break
            g = g_needed
    target = base ** (n_digits + g)
    bound = budget.total_ulps(m.value, target)
    window = base**g
    if not window > 2 * bound:
        raise ConfigurationError(
            f"{g} guard digits cannot hold an error of {bound} ulps (need base^g > {2 * bound})")
    if not target < m.value:
        raise ConfigurationError("working magnifier is smaller than the requested digit scale")
    rescaled = change_magnifier(m, Magnifier(target), value)
    q, r = divmod(rescaled.mantissa, window)
    verdict = "certified" if bound < r < window - bound else "ambiguous"
    t1 = time.perf_counter()
    text = render(q, n_digits, base)
    t2 = time.perf_counter()
    return DigitReport(
        algorithm=budget.algorithm, base=base, digits=n_digits, guard_digits=g,
        verdict=verdict, digit_string=text, guard_remainder=r, budget_ulps=bound,
        n=budget.n, magnifier_bits=m.bits, rounding_ulps=str(budget.rounding_ulps),
        truncation_log10=budget.truncation_log10,
        timings={"rescale": t1 - t0, "render": t2 - t1},
    )


# -- end-to-end runs ---------------------------------------------------------

def plan_run(req: DigitRequest) -> tuple:
    """Iteration count and working magnifier (a power of two) for ``req``.

    The magnifier is large enough that the rounding budget shrinks below a
    quarter ulp once rescaled, leaving the guard window almost untouched.
    """
    g = req.guard_digits if req.guard_digits is not None else MIN_GUARD
    scale_digits = req.digits + g
    if req.algorithm == "borwein":
        n = borwein_iterations_for(scale_digits, req.base) + 1
        rounding = math.ceil(borwein_budget(n).rounding_ulps)
        floor_bits = (600 * (n + 1)).bit_length()
    else:
        n = salamin_iterations_for(scale_digits, req.base)
        rounding = math.ceil(salamin_budget(n).rounding_ulps)
        floor_bits = (3 ** (n + 1) * 10 ** (n + 6)).bit_length()
    bits = math.ceil(scale_digits * math.log2(req.base)) + rounding.bit_length() + 2
    return n, Magnifier.pow2(max(bits, floor_bits + 1))


def compute_digits(req: DigitRequest, state=None,
                   on_step: Optional[Callable] = None) -> DigitReport:
    """Run the requested algorithm and certify its digits.

    ``state`` resumes from a checkpointed :class:`BorweinState` or
    :class:`SalaminState`; ``on_step`` sees every intermediate state.
    """
    n, m = plan_run(req)
    log.info("%s: %d digits base %d, n=%d, magnifier 2^%d",
             req.algorithm, req.digits, req.base, n, m.bits - 1)
    t0 = time.perf_counter()
    if req.algorithm == "borwein":
        if state is not None and not isinstance(state, BorweinState):
            raise ContractError("checkpoint holds a different algorithm's state")
        value = borwein_pi(m, n, state=state, on_step=on_step)
        budget = borwein_budget(n, m)
    else:
        if state is not None and not isinstance(state, SalaminState):
            raise ContractError("checkpoint holds a different algorithm's state")
        value = salamin_pi(m, n, state=state, on_step=on_step)
        budget = salamin_budget(n, m)
    t1 = time.perf_counter()
    report = certify_digits(value, req, budget)
    report.timings = {"iterate": t1 - t0, **report.timings}
    return report


def truncation_log10_at(algorithm: str, index: int) -> float:
    """Truncation bound of the iterate reached after ``index`` steps of a run."""
    if algorithm == "borwein":
        return borwein_truncation_log2(index) * math.log10(2)
    # k AGM steps give pi'_k, the iterate salamin_pi calls n = k - 1.
    return salamin_truncation_log2(index - 1) * math.log10(2)


# -- cross-validation --------------------------------------------------------

@dataclass(frozen=True)
class PositionCheck:
    position: int
    agm_digit: int
    bbp_digit: Optional[int]
    precision_bits: int

    @property
    def verdict(self) -> str:
        if self.bbp_digit is None:
            return "inconclusive"
        return "match" if self.bbp_digit == self.agm_digit else "mismatch"


@dataclass(frozen=True)
class CrosscheckResult:
    checks: tuple

    @property
    def mismatches(self) -> list:
        return [c.position for c in self.checks if c.verdict == "mismatch"]

    @property
    def inconclusive(self) -> list:
        return [c.position for c in self.checks if c.verdict == "inconclusive"]

    @property
    def passed(self) -> bool:
        """No position disagrees; inconclusive positions do not fail the check."""
        return not self.mismatches

    @property
    def all_match(self) -> bool:
        return self.passed and not self.inconclusive


def crosscheck(run: Union[DigitReport, str], positions, threads: int = 1) -> CrosscheckResult:
    """Compare hex digits of an AGM run with independent BBP extractions."""
    if isinstance(run, DigitReport):
        if run.base != 16:
            raise ConfigurationError("crosscheck needs a base-16 run")
        text = run.digit_string
    else:
        text = run
    head, _, frac = text.strip().partition(".")
    if head != "3" or not frac:
        raise ConfigurationError("digit string must look like '3.<hex digits>'")
    checks = []
    for d in positions:
        if not 1 <= d <= len(frac):
            raise ConfigurationError(f"position {d} outside the run (1..{len(frac)})")
        try:
            agm = int(frac[d - 1], 16)
        except ValueError:
            raise ConfigurationError(f"non-hex character at position {d}") from None
        bbp, p = hex_digit(d, threads=threads)
        checks.append(PositionCheck(d, agm, bbp, p))
    return CrosscheckResult(tuple(checks))
