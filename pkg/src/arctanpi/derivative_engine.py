"""nth derivative of arctan: closed form in theta, and an exact polynomial oracle.

With ``sin(theta) = 1/sqrt(1+x^2)`` the closed form reads

    f^(n)(x) = (-1)^(n-1) (n-1)! sin^n(theta) sin(n theta).

The angle is taken on the arccot branch, ``cos(theta) = x/sqrt(1+x^2)`` and
``theta`` in (0, pi).  Reading ``theta`` as ``arcsin(1/sqrt(1+x^2))`` literally
forces ``cos(theta) >= 0`` and gives the wrong sign for negative ``x`` at even
orders; that reading is still available as ``branch="arcsin"``.

The oracle writes ``f^(n)(x) = P_n(x) / (1+x^2)^n`` with integer polynomials
generated by ``P_1 = 1``, ``P_{k+1} = P_k' (1+x^2) - 2k x P_k``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

from .bignum import FixedPoint, PrecisionContext, mul, tdiv

BRANCHES = ("arccot", "arcsin")


@dataclass(frozen=True)
class DerivativePolynomial:
    n: int
    coeffs: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc


@dataclass(frozen=True)
class ThetaFrame:
    sin_theta: FixedPoint
    cos_theta: FixedPoint

    @property
    def scale_bits(self) -> int:
        return self.sin_theta.scale_bits


def theta_frame(x: FixedPoint, scale_bits: int, branch: str = "arccot") -> ThetaFrame:
    """sin/cos of theta for ``x``, each within one ulp at ``scale_bits``.

    Computed from the exact rational ``1 + x^2`` with integer square roots.
    """
    if branch not in BRANCHES:
        raise ValueError(f"unknown branch {branch!r}; expected one of {BRANCHES}")
    s = x.scale_bits
    mx = x.mantissa
    denom = (1 << (2 * s)) + mx * mx  # (1 + x^2) * 4^s
    sin_m = math.isqrt((1 << (2 * scale_bits + 2 * s)) // denom)
    cos_m = math.isqrt(((mx * mx) << (2 * scale_bits)) // denom)
    if branch == "arccot" and mx < 0:
        cos_m = -cos_m
    return ThetaFrame(FixedPoint(sin_m, scale_bits), FixedPoint(cos_m, scale_bits))


def iter_sin_multiples(frame: ThetaFrame) -> Iterator[FixedPoint]:
    """Yield sin(theta), sin(2 theta), ... by the three-term recurrence."""
    two_cos = frame.cos_theta.mul_int(2)
    prev = FixedPoint.zero(frame.scale_bits)
    cur = frame.sin_theta
    while True:
        yield cur
        prev, cur = cur, mul(two_cos, cur) - prev


def sin_multiple_recurrence(frame: ThetaFrame, n_max: int) -> list[FixedPoint]:
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    it = iter_sin_multiples(frame)
    return [next(it) for _ in range(n_max)]


def _check_order(n: int) -> None:
    if n < 1:
        raise ValueError(f"derivative order must be positive, got {n}")


def _closed_form_guard(n: int) -> int:
    # absolute accuracy must survive the (n-1)! factor and O(n^2) recurrence growth
    return math.factorial(n - 1).bit_length() + 2 * n.bit_length() + 4


def closed_form_derivative(
    n: int, x: FixedPoint, ctx: PrecisionContext, branch: str = "arccot"
) -> FixedPoint:
    _check_order(n)
    work = ctx.working_bits + _closed_form_guard(n)
    frame = theta_frame(x, work, branch)
    sin_n_theta = sin_multiple_recurrence(frame, n)[-1]
    power = frame.sin_theta
    for _ in range(n - 1):
        power = mul(power, frame.sin_theta)
    value = mul(power, sin_n_theta).mul_int(math.factorial(n - 1))
    if n % 2 == 0:
        value = -value
    return value.rescale(ctx.scale_bits)


@lru_cache(maxsize=None)
def poly_oracle_coeffs(n: int) -> DerivativePolynomial:
    _check_order(n)
    if n == 1:
        return DerivativePolynomial(1, (1,))
    k = n - 1
    p = poly_oracle_coeffs(k).coeffs
    out = [0] * (len(p) + 1)
    for j in range(1, len(p)):
        d = j * p[j]  # P_k' contributes d x^(j-1) and d x^(j+1)
        out[j - 1] += d
        out[j + 1] += d
    for j, c in enumerate(p):
        out[j + 1] -= 2 * k * c
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return DerivativePolynomial(n, tuple(out))


def oracle_eval(n: int, x: FixedPoint, ctx: PrecisionContext) -> FixedPoint:
    """Evaluate ``P_n(x) / (1+x^2)^n`` by exact Horner then n truncating divisions."""
    poly = poly_oracle_coeffs(n)
    s = x.scale_bits
    mx = x.mantissa
    acc = poly.coeffs[-1]
    for t, c in enumerate(reversed(poly.coeffs[:-1])):
        acc = acc * mx + (c << (s * (t + 1)))
    num_scale = s * poly.degree  # P_n(x) == acc / 2^num_scale exactly
    work = ctx.working_bits + 2 * n.bit_length()
    shift = work - num_scale
    m = acc << shift if shift >= 0 else tdiv(acc, 1 << -shift)
    denom = (1 << (2 * s)) + mx * mx
    for _ in range(n):
        m = tdiv(m << (2 * s), denom)
    return FixedPoint(m, work).rescale(ctx.scale_bits)
