"""Certified digits of pi with the Borwein and Brent-Salamin AGM algorithms,
and BBP extraction of isolated hexadecimal digits for cross-validation."""

from .bbp import BbpParams, choose_precision, hex_digit, pi_hex_digit
from .borwein import borwein_budget, borwein_iterations_for, borwein_pi
from .digits import DigitReport, DigitRequest, certify_digits, compute_digits, crosscheck
from .fixedpoint import FixedReal, Magnifier
from .salamin import salamin_budget, salamin_iterations_for, salamin_pi

__version__ = "0.1.0"

__all__ = [
    "BbpParams", "choose_precision", "hex_digit", "pi_hex_digit",
    "borwein_budget", "borwein_iterations_for", "borwein_pi",
    "DigitReport", "DigitRequest", "certify_digits", "compute_digits", "crosscheck",
    "FixedReal", "Magnifier",
    "salamin_budget", "salamin_iterations_for", "salamin_pi",
]
