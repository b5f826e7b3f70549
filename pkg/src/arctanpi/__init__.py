"""High-precision arctan derivatives, arctan series and BBP-type series for pi."""
from .bignum import FixedPoint, PrecisionContext, from_rational, parse_decimal, sqrt_int, to_decimal_string
from .derivative_engine import closed_form_derivative, oracle_eval, poly_oracle_coeffs
from .digit_extract import DigitRequest, extract_digits, mod_pow
from .expansions import (
    SeriesEvaluation,
    euler_arctan,
    generator_sum,
    maclaurin_arctan,
    sine_expansion_arctan,
)
from .pi_formulas import (
    BBP16,
    PI_BASE4,
    PISQRT3_2764,
    PISQRT3_BASE8,
    SeriesSpec,
    builtin_specs,
    partial_sum,
    reference_pi,
)

__version__ = "0.1.0"
