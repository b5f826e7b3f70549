"""BBP-style series for pi and pi*sqrt(3), held as data.

A :class:`SeriesSpec` describes

    prefactor * sum_{n>=0} (+-1)^n r^n sum_j a_j / (m n + c_j)

with ``r = ratio_num / ratio_den``.  The built-in specs come from choosing
theta = pi/4, pi/3 and pi/6 in the generator identity
``pi/2 - theta = sum_{n>=1} cos^n(theta) sin(n theta) / n`` and regrouping one
sign period at a time; :func:`regroup_check` verifies that regrouping
numerically.  The classic base-16 BBP formula is included for digit
extraction.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

from .bignum import (
    FixedPoint,
    PrecisionContext,
    ceil_fraction,
    mul,
    sqrt_int,
    tdiv,
)
from .derivative_engine import ThetaFrame
from .expansions import SeriesEvaluation, euler_arctan_rational, generator_sum


class Target(str, enum.Enum):
    PI = "PI"
    PI_SQRT3 = "PI_SQRT3"


@dataclass(frozen=True)
class SeriesSpec:
    name: str
    prefactor: Fraction
    sign_alternates: bool
    ratio_num: int
    ratio_den: int
    period: int
    terms: tuple[tuple[int, int], ...]
    target: Target

    def __post_init__(self):
        object.__setattr__(self, "prefactor", Fraction(self.prefactor))
        object.__setattr__(self, "terms", tuple((int(a), int(c)) for a, c in self.terms))
        object.__setattr__(self, "target", Target(self.target))
        if not 0 < self.ratio_num < self.ratio_den:
            raise ValueError(f"{self.name}: ratio must satisfy 0 < num < den")
        if self.period < 1:
            raise ValueError(f"{self.name}: period must be positive")
        if not self.terms:
            raise ValueError(f"{self.name}: at least one term is required")
        offsets = [c for _, c in self.terms]
        if any(b <= a for a, b in zip(offsets, offsets[1:])):
            raise ValueError(f"{self.name}: offsets must be strictly increasing")
        if offsets[0] <= 0 or offsets[-1] > self.period:
            raise ValueError(f"{self.name}: offsets must lie in 1..period")

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.ratio_num, self.ratio_den)

    def integer_base(self) -> int | None:
        """Digit base ``b`` when the ratio is ``1/b``, else None."""
        return self.ratio_den if self.ratio_num == 1 else None

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "prefactor": [self.prefactor.numerator, self.prefactor.denominator],
            "sign_alternates": self.sign_alternates,
            "ratio": [self.ratio_num, self.ratio_den],
            "period": self.period,
            "terms": [[a, c] for a, c in self.terms],
            "target": self.target.value,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "SeriesSpec":
        try:
            pnum, pden = doc["prefactor"]
            rnum, rden = doc["ratio"]
            return cls(
                name=str(doc["name"]),
                prefactor=Fraction(int(pnum), int(pden)),
                sign_alternates=bool(doc["sign_alternates"]),
                ratio_num=int(rnum),
                ratio_den=int(rden),
                period=int(doc["period"]),
                terms=tuple((int(a), int(c)) for a, c in doc["terms"]),
                target=Target(doc["target"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"invalid series spec document: {exc}") from exc


def load_spec(path: str | Path) -> SeriesSpec:
    with open(path, encoding="utf-8") as fh:
        return SeriesSpec.from_json(json.load(fh))


def dump_spec(spec: SeriesSpec) -> str:
    return json.dumps(spec.to_json(), indent=2)


PI_BASE4 = SeriesSpec(
    "PI_BASE4", Fraction(1), True, 1, 4, 4, ((2, 1), (2, 2), (1, 3)), Target.PI
)
PISQRT3_BASE8 = SeriesSpec(
    "PISQRT3_BASE8", Fraction(9, 8), True, 1, 8, 3, ((4, 1), (2, 2)), Target.PI_SQRT3
)
PISQRT3_2764 = SeriesSpec(
    "PISQRT3_2764",
    Fraction(9, 64),
    True,
    27,
    64,
    6,
    ((16, 1), (24, 2), (24, 3), (18, 4), (9, 5)),
    Target.PI_SQRT3,
)
BBP16 = SeriesSpec(
    "BBP16", Fraction(1), False, 1, 16, 8, ((4, 1), (-2, 4), (-1, 5), (-1, 6)), Target.PI
)

_BUILTINS = (PI_BASE4, PISQRT3_BASE8, PISQRT3_2764, BBP16)


def builtin_specs() -> list[SeriesSpec]:
    return list(_BUILTINS)


def get_spec(name: str) -> SeriesSpec:
    for spec in _BUILTINS:
        if spec.name == name:
            return spec
    known = ", ".join(s.name for s in _BUILTINS)
    raise KeyError(f"unknown series {name!r}; built-ins: {known}")


def tail_majorant(spec: SeriesSpec, n_terms: int) -> Fraction:
    """Exact geometric majorant of the series tail from block ``n_terms`` on."""
    r = spec.ratio
    c_min = min(c for _, c in spec.terms)
    inner = Fraction(sum(abs(a) for a, _ in spec.terms), c_min)
    return abs(spec.prefactor) * r**n_terms * inner / (1 - r)


def partial_sum(
    spec: SeriesSpec, N: int, ctx: PrecisionContext, tol: FixedPoint | None = None
) -> SeriesEvaluation:
    """Blocks n = 0..N, each term as one truncating integer division."""
    if N < 0:
        raise ValueError("N must be non-negative")
    n_terms = (N + 1) * len(spec.terms)
    work = ctx.working_bits + n_terms.bit_length()
    acc = 0
    rpow_num, rpow_den = 1, 1
    m = spec.period
    for n in range(N + 1):
        block = 0
        for a, c in spec.terms:
            block += tdiv((a * rpow_num) << work, rpow_den * (m * n + c))
        acc += -block if spec.sign_alternates and n % 2 else block
        rpow_num *= spec.ratio_num
        rpow_den *= spec.ratio_den
    acc = tdiv(acc * spec.prefactor.numerator, spec.prefactor.denominator)
    value = FixedPoint(acc, work).rescale(ctx.scale_bits)
    tail = ceil_fraction(tail_majorant(spec, N + 1), ctx.scale_bits)
    tail = FixedPoint(tail.mantissa + 2, ctx.scale_bits)
    converged = tol is not None and tail <= tol.rescale(ctx.scale_bits)
    return SeriesEvaluation(value, N + 1, tail, converged)


def blocks_for_tolerance(spec: SeriesSpec, tol: Fraction, scale_bits: int) -> int:
    """Smallest N whose reported tail bound (majorant + 2 ulps) is <= tol."""
    limit = (tol.numerator << scale_bits) // tol.denominator
    if limit <= 2:
        raise ValueError("tolerance is below the resolution of the working precision")
    n = 0
    while ceil_fraction(tail_majorant(spec, n + 1), scale_bits).mantissa + 2 > limit:
        n += 1
    return n


def sum_to_tolerance(spec: SeriesSpec, tol: Fraction, ctx: PrecisionContext) -> SeriesEvaluation:
    tol = Fraction(tol)
    N = blocks_for_tolerance(spec, tol, ctx.scale_bits)
    limit = FixedPoint((tol.numerator << ctx.scale_bits) // tol.denominator, ctx.scale_bits)
    return partial_sum(spec, N, ctx, tol=limit)


# --- exact sine tables -----------------------------------------------------

@dataclass(frozen=True)
class ExactSine:
    """``multiple * unit`` with unit one of 1, 1/sqrt(2), sqrt(3)/2."""

    multiple: Fraction
    unit: str = "1"

    def to_fixed(self, ctx: PrecisionContext) -> FixedPoint:
        work = ctx.working_bits
        wctx = ctx.with_scale(work)
        if self.unit == "1":
            u = FixedPoint.one(work)
        elif self.unit == "1/sqrt2":
            u = sqrt_int(2, wctx).div_int(2)
        else:
            u = sqrt_int(3, wctx).div_int(2)
        v = u.mul_int(self.multiple.numerator).div_int(self.multiple.denominator)
        return v.rescale(ctx.scale_bits)

    def to_float(self) -> float:
        base = {"1": 1.0, "1/sqrt2": 2**-0.5, "sqrt3/2": 3**0.5 / 2}[self.unit]
        return float(self.multiple) * base


def _e(k, unit="1"):
    return ExactSine(Fraction(k), unit)


@dataclass(frozen=True)
class SinCaseTable:
    denominator: int
    values: dict = field(hash=False)

    @property
    def period(self) -> int:
        return 2 * self.denominator

    def __call__(self, n: int) -> ExactSine:
        return self.values[n % self.period]


SIN_TABLES = {
    4: SinCaseTable(4, {
        0: _e(0), 1: _e(1, "1/sqrt2"), 2: _e(1), 3: _e(1, "1/sqrt2"),
        4: _e(0), 5: _e(-1, "1/sqrt2"), 6: _e(-1), 7: _e(-1, "1/sqrt2"),
    }),
    3: SinCaseTable(3, {
        0: _e(0), 1: _e(1, "sqrt3/2"), 2: _e(1, "sqrt3/2"),
        3: _e(0), 4: _e(-1, "sqrt3/2"), 5: _e(-1, "sqrt3/2"),
    }),
    6: SinCaseTable(6, {
        0: _e(0), 1: _e(Fraction(1, 2)), 2: _e(1, "sqrt3/2"), 3: _e(1),
        4: _e(1, "sqrt3/2"), 5: _e(Fraction(1, 2)), 6: _e(0),
        7: _e(Fraction(-1, 2)), 8: _e(-1, "sqrt3/2"), 9: _e(-1),
        10: _e(-1, "sqrt3/2"), 11: _e(Fraction(-1, 2)),
    }),
}


def sin_case(denominator: int, n: int) -> ExactSine:
    """Exact sin(n pi / denominator) for denominator in {4, 3, 6}."""
    if denominator not in SIN_TABLES:
        raise ValueError(f"unsupported denominator {denominator}; expected 4, 3 or 6")
    if n < 1:
        raise ValueError("n must be >= 1")
    return SIN_TABLES[denominator](n)


# --- special angles and regrouping ------------------------------------------

THETA_CHOICES = ("PI_4", "PI_3", "PI_6")


def special_frame(choice: str, ctx: PrecisionContext) -> ThetaFrame:
    """Exact-surd sin/cos of pi/4, pi/3, pi/6 (and pi/2) at ``ctx.scale_bits``."""
    s = ctx.scale_bits
    half = FixedPoint(1 << (s - 1), s)
    if choice == "PI_4":
        r2 = sqrt_int(2, ctx).div_int(2)
        return ThetaFrame(r2, r2)
    if choice == "PI_3":
        return ThetaFrame(sqrt_int(3, ctx).div_int(2), half)
    if choice == "PI_6":
        return ThetaFrame(half, sqrt_int(3, ctx).div_int(2))
    if choice == "PI_2":
        return ThetaFrame(FixedPoint.one(s), FixedPoint.zero(s))
    raise ValueError(f"unknown theta choice {choice!r}")


# theta choice -> (spec, generator terms per block, blocks of the spec per generator period)
_REGROUP = {
    "PI_4": (PI_BASE4, 8, 2),
    "PI_3": (PISQRT3_BASE8, 6, 2),
    "PI_6": (PISQRT3_2764, 12, 2),
}


def _generator_to_target(choice: str, g: FixedPoint, ctx: PrecisionContext) -> FixedPoint:
    # PI_4: g -> pi/4; PI_3: g -> pi/6; PI_6: g -> pi/3
    if choice == "PI_4":
        return g.mul_int(4)
    root3 = sqrt_int(3, ctx)
    return mul(g, root3).mul_int(6 if choice == "PI_3" else 3)


@dataclass(frozen=True)
class RegroupResult:
    passed: bool
    max_deviation: FixedPoint
    tolerance: FixedPoint


def regroup_check(choice: str, blocks: int, ctx: PrecisionContext) -> RegroupResult:
    """Compare generator partial sums against the regrouped spec, block by block.

    For each b in 1..blocks the generator is truncated after ``b`` full sign
    periods and scaled to the spec's constant; it must match the spec's
    partial sum over the corresponding number of blocks.
    """
    if choice not in _REGROUP:
        raise ValueError(f"unknown theta choice {choice!r}; expected one of {THETA_CHOICES}")
    if blocks < 1:
        raise ValueError("blocks must be >= 1")
    spec, period_terms, spec_blocks = _REGROUP[choice]
    work = ctx.working_bits
    wctx = ctx.with_scale(work)
    frame = special_frame(choice, wctx)
    zero = FixedPoint.zero(work)
    worst = FixedPoint.zero(ctx.scale_bits)
    for b in range(1, blocks + 1):
        g = generator_sum(frame, tol=zero, max_terms=b * period_terms).value
        lhs = _generator_to_target(choice, g, wctx).rescale(ctx.scale_bits)
        rhs = partial_sum(spec, b * spec_blocks - 1, ctx).value
        worst = max(worst, abs(lhs - rhs))
    tol = FixedPoint(1 << 8, ctx.scale_bits)
    return RegroupResult(worst <= tol, worst, tol)


# --- independent reference ------------------------------------------------


@lru_cache(maxsize=64)
def reference_pi_evaluation(ctx: PrecisionContext) -> SeriesEvaluation:
    """pi = 16 arctan(1/5) - 4 arctan(1/239), both by the Euler-transformed series."""
    inner = PrecisionContext(ctx.scale_bits + 16, ctx.guard_bits)
    a5 = euler_arctan_rational(1, 5, inner)
    a239 = euler_arctan_rational(1, 239, inner)
    value = (a5.value.mul_int(16) - a239.value.mul_int(4)).rescale(ctx.scale_bits)
    err = a5.tail_bound.mul_int(16) + a239.tail_bound.mul_int(4)
    err = FixedPoint(-((-err.mantissa) >> 16) + 1, ctx.scale_bits)
    return SeriesEvaluation(value, a5.terms_used + a239.terms_used, err, True)


def reference_pi(ctx: PrecisionContext) -> FixedPoint:
    return reference_pi_evaluation(ctx).value


def reference_constant(target: Target, ctx: PrecisionContext) -> FixedPoint:
    """pi or pi*sqrt(3) at ``ctx``, accurate to a few ulps."""
    target = Target(target)
    if target is Target.PI:
        return reference_pi(ctx)
    wctx = PrecisionContext(ctx.scale_bits + 16, ctx.guard_bits)
    return mul(reference_pi(wctx), sqrt_int(3, wctx)).rescale(ctx.scale_bits)


def exact_partial_sum(spec: SeriesSpec, N: int) -> Fraction:
    """Exact rational partial sum; slow, used as an oracle in tests and docs."""
    total = Fraction(0)
    for n in range(N + 1):
        block = sum(Fraction(a, spec.period * n + c) for a, c in spec.terms)
        sign = -1 if spec.sign_alternates and n % 2 else 1
        total += sign * spec.ratio**n * block
    return spec.prefactor * total


__all__ = [
    "BBP16",
    "ExactSine",
    "PISQRT3_2764",
    "PISQRT3_BASE8",
    "PI_BASE4",
    "RegroupResult",
    "SeriesSpec",
    "SinCaseTable",
    "Target",
    "blocks_for_tolerance",
    "builtin_specs",
    "dump_spec",
    "exact_partial_sum",
    "get_spec",
    "load_spec",
    "partial_sum",
    "reference_constant",
    "reference_pi",
    "reference_pi_evaluation",
    "regroup_check",
    "sin_case",
    "special_frame",
    "sum_to_tolerance",
    "tail_majorant",
]
