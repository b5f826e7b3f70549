"""Truncated arctan series with rigorous tail bounds.

Four evaluators:

* ``maclaurin_arctan``      sum (-1)^n x^(2n+1) / (2n+1), |x| < 1
* ``euler_arctan``          Euler-transformed form, all real x
* ``sine_expansion_arctan`` sum (1/n) cos^n(theta) sin(n theta), all real x
* ``generator_sum``         sum (1/n) cos^n(theta) sin(n theta) for a given frame,
                            whose limit is pi/2 - theta

Each returns a :class:`SeriesEvaluation` at the input's scale.  Terms are
accumulated at extra working precision; ``tail_bound`` is the mathematical
tail majorant rounded up, plus two ulps covering final truncation and
accumulated working-precision rounding, so it bounds the distance from
``value`` to the true limit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .bignum import FixedPoint, PrecisionContext, cdiv, mul, tdiv
from .derivative_engine import (
    ThetaFrame,
    closed_form_derivative,
    iter_sin_multiples,
    theta_frame,
)

DEFAULT_MAX_TERMS = 100_000


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class SeriesEvaluation:
    value: FixedPoint
    terms_used: int
    tail_bound: FixedPoint
    converged: bool


def _working_bits(scale_bits: int, guard_bits: int, max_terms: int) -> int:
    return scale_bits + guard_bits + 2 * max(max_terms, 1).bit_length()


def _finish(
    acc: int, work: int, scale: int, terms: int, tail_work: int, tol: FixedPoint
) -> SeriesEvaluation:
    """Truncate the working sum and turn a working-scale tail majorant into a bound."""
    value = FixedPoint(acc, work).rescale(scale)
    tail = FixedPoint(cdiv(tail_work, 1 << (work - scale)) + 2, scale)
    converged = tail.mantissa <= tol.rescale(scale).mantissa
    return SeriesEvaluation(value, terms, tail, converged)


def _default_tol(tol: FixedPoint | None, scale: int) -> FixedPoint:
    # tightest attainable: one ulp of series tail plus the two-ulp slack
    return FixedPoint(3, scale) if tol is None else tol


def _tol_work(tol: FixedPoint, work: int, scale: int) -> int:
    """Budget available to the mathematical tail at working scale (may be negative)."""
    t = tol.rescale(work).mantissa
    return t - (2 << (work - scale))


def maclaurin_arctan(
    x: FixedPoint,
    tol: FixedPoint | None = None,
    max_terms: int = DEFAULT_MAX_TERMS,
    guard_bits: int = 32,
) -> SeriesEvaluation:
    s = x.scale_bits
    if abs(x.mantissa) >= 1 << s:
        raise DomainError(
            "maclaurin_arctan requires |x| < 1: the power series has radius of "
            "convergence 1 and converges only logarithmically at the endpoint"
        )
    tol = _default_tol(tol, s)
    work = _working_bits(s, guard_bits, max_terms)
    if x.mantissa == 0:
        return _finish(0, work, s, 0, 0, tol)
    budget = _tol_work(tol, work, s)
    xw = x.rescale(work)
    x2 = mul(xw, xw).mantissa
    x2_up = abs(x2) + 1
    power = xw.mantissa  # x^(2n+1), truncated
    power_up = abs(power) + 1  # upper bound on |x^(2n+1)|
    acc = 0
    n = 0
    while True:
        bound = cdiv(power_up, 2 * n + 1)
        if n >= max_terms or bound <= budget:
            break
        term = tdiv(power, 2 * n + 1)
        acc += term if n % 2 == 0 else -term
        power = tdiv(power * x2, 1 << work)
        power_up = cdiv(power_up * x2_up, 1 << work)
        n += 1
    return _finish(acc, work, s, n, bound, tol)


def _euler_ratio(p: int, q: int, work: int, tol_work: int, max_terms: int):
    """Euler-transformed arctan(p/q) at working scale.

    Returns (sum mantissa, terms used, tail majorant mantissa).
    """
    sign = -1 if (p < 0) != (q < 0) else 1
    p, q = abs(p), abs(q)
    d = p * p + q * q
    term = (p * q << work) // d  # x / (1 + x^2)
    term_up = cdiv(p * q << work, d)
    geo = Fraction(d, q * q)  # 1 / (1 - x^2/(1+x^2))
    acc = 0
    n = 0
    while True:
        bound = cdiv(term_up * geo.numerator, geo.denominator)
        if n >= max_terms or bound <= tol_work or p == 0:
            break
        acc += term
        term = term * (2 * n + 2) * p * p // ((2 * n + 3) * d)
        term_up = cdiv(term_up * (2 * n + 2) * p * p, (2 * n + 3) * d)
        n += 1
    if p == 0:
        bound = 0
    return sign * acc, n, bound


def euler_arctan(
    x: FixedPoint,
    tol: FixedPoint | None = None,
    max_terms: int = DEFAULT_MAX_TERMS,
    guard_bits: int = 32,
) -> SeriesEvaluation:
    s = x.scale_bits
    tol = _default_tol(tol, s)
    work = _working_bits(s, guard_bits, max_terms)
    acc, n, bound = _euler_ratio(x.mantissa, 1 << s, work, _tol_work(tol, work, s), max_terms)
    return _finish(acc, work, s, n, bound, tol)


def euler_arctan_rational(
    p: int, q: int, ctx: PrecisionContext, tol: FixedPoint | None = None,
    max_terms: int = DEFAULT_MAX_TERMS,
) -> SeriesEvaluation:
    """arctan(p/q) for an exact rational argument (no input rounding)."""
    if q == 0:
        raise ZeroDivisionError("arctan argument has zero denominator")
    s = ctx.scale_bits
    tol = _default_tol(tol, s)
    work = _working_bits(s, ctx.guard_bits, max_terms)
    acc, n, bound = _euler_ratio(p, q, work, _tol_work(tol, work, s), max_terms)
    return _finish(acc, work, s, n, bound, tol)


def _frame_sum(
    frame: ThetaFrame, tol_work: int, max_terms: int
) -> tuple[int, int, int]:
    """sum_{n>=1} cos^n sin(n theta) / n at the frame's scale.

    Returns (sum mantissa, terms used, tail majorant mantissa).
    """
    work = frame.scale_bits
    one = 1 << work
    c = frame.cos_theta.mantissa
    c_up = abs(c) + 1
    if c_up >= one:
        raise DomainError("|cos theta| must be < 1 for the series to converge")
    sines = iter_sin_multiples(frame)
    power = c  # cos^n, truncated
    power_up = c_up  # upper bound on |cos|^n
    acc = 0
    n = 1
    while True:
        bound = 0 if c == 0 else cdiv(power_up << work, n * (one - c_up))
        if n - 1 >= max_terms or bound <= tol_work:
            break
        acc += tdiv(tdiv(power * next(sines).mantissa, one), n)
        power = tdiv(power * c, one)
        power_up = cdiv(power_up * c_up, one)
        n += 1
    return acc, n - 1, bound


def sine_expansion_arctan(
    x: FixedPoint,
    tol: FixedPoint | None = None,
    max_terms: int = DEFAULT_MAX_TERMS,
    guard_bits: int = 32,
) -> SeriesEvaluation:
    """arctan via sum (1/n) (x^2/(1+x^2))^(n/2) sin(n theta), odd extension for x < 0."""
    s = x.scale_bits
    tol = _default_tol(tol, s)
    work = _working_bits(s, guard_bits, max_terms)
    frame = theta_frame(abs(x), work, branch="arcsin")
    acc, n, bound = _frame_sum(frame, _tol_work(tol, work, s), max_terms)
    if x.mantissa < 0:
        acc = -acc
    return _finish(acc, work, s, n, bound, tol)


def sine_expansion_terms(x: FixedPoint, n_max: int, ctx: PrecisionContext) -> list[FixedPoint]:
    """Individual terms 1..n_max of the sine expansion (x >= 0 branch, odd-extended)."""
    work = _working_bits(ctx.scale_bits, ctx.guard_bits, n_max)
    frame = theta_frame(abs(x), work, branch="arcsin")
    one = 1 << work
    c = frame.cos_theta.mantissa
    power = c
    out = []
    for n, sn in zip(range(1, n_max + 1), iter_sin_multiples(frame)):
        term = tdiv(tdiv(power * sn.mantissa, one), n)
        if x.mantissa < 0:
            term = -term
        out.append(FixedPoint(term, work).rescale(ctx.scale_bits))
        power = tdiv(power * c, one)
    return out


def taylor_identity_term(n: int, x: FixedPoint, ctx: PrecisionContext) -> FixedPoint:
    """``-(-1)^n x^n f^(n)(x) / n!`` using the closed-form derivative.

    For x >= 0 this equals term n of the sine expansion.  The derivative is
    evaluated with enough extra bits that multiplying by x^n keeps the
    result accurate at ``ctx``.
    """
    s = x.scale_bits
    mag = max(abs(x.mantissa).bit_length() - s, 0)
    inner = PrecisionContext(ctx.working_bits + n * mag + 8, ctx.guard_bits)
    deriv = closed_form_derivative(n, x, inner)
    num = deriv.mantissa * x.mantissa**n
    value = FixedPoint(tdiv(num, math.factorial(n) << (s * n)), inner.scale_bits)
    if n % 2 == 0:
        value = -value
    return value.rescale(ctx.scale_bits)


def generator_sum(
    frame: ThetaFrame,
    tol: FixedPoint | None = None,
    max_terms: int = DEFAULT_MAX_TERMS,
    guard_bits: int = 32,
) -> SeriesEvaluation:
    """Partial sum of sum_{n>=1} cos^n(theta) sin(n theta) / n, whose limit is pi/2 - theta.

    ``frame`` supplies sin and cos of theta; theta must lie in (0, pi), i.e.
    ``sin_theta > 0`` and ``|cos_theta| < 1``.  The result is at the frame's scale.
    """
    s = frame.scale_bits
    if frame.sin_theta.mantissa <= 0:
        raise DomainError("theta must lie in (0, pi): sin theta must be positive")
    if abs(frame.cos_theta.mantissa) >= 1 << s:
        raise DomainError("|cos theta| must be < 1")
    tol = _default_tol(tol, s)
    work = _working_bits(s, guard_bits, max_terms)
    wide = ThetaFrame(frame.sin_theta.rescale(work), frame.cos_theta.rescale(work))
    acc, n, bound = _frame_sum(wide, _tol_work(tol, work, s), max_terms)
    return _finish(acc, work, s, n, bound, tol)
