"""Isolated base-b digits of a BBP-type constant.

With ``S = (p/q) sum_n s_n b^-n sum_j a_j / (m n + c_j)`` and ``s_n = +-1``,
the digits from position ``d`` on are those of ``frac(b^(d-1) S)``.  Terms
with ``n <= d-1`` have integer numerators ``p s_n a_j b^(d-1-n)``, so only
their residues modulo ``q (m n + c_j)`` matter; those go through the head
kernel in :mod:`arctanpi._kernels`.  Residues are reduced after the sign is
applied, so alternating series need no special casing in the kernel.  The
remaining terms shrink geometrically and are summed directly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .bignum import DIGIT_CHARS, tdiv
from .pi_formulas import SeriesSpec

MAX_COUNT = 16
STABILITY_LIMBS = 4  # extra limbs tried before giving up on a carry boundary


class UnsupportedSpecError(ValueError):
    pass


class PrecisionError(ArithmeticError):
    pass


@dataclass(frozen=True)
class DigitRequest:
    spec: SeriesSpec
    position: int
    count: int = 8

    def __post_init__(self):
        if self.spec.integer_base() is None:
            raise UnsupportedSpecError(
                f"{self.spec.name} has ratio {self.spec.ratio_num}/{self.spec.ratio_den}, "
                "not 1/b for an integer base b; it is not BBP-type and admits no "
                "digit extraction"
            )
        if not 2 <= self.spec.ratio_den <= 16:
            raise UnsupportedSpecError("digit base must be between 2 and 16")
        if self.position < 1:
            raise ValueError("position must be >= 1")
        if not 1 <= self.count <= MAX_COUNT:
            raise ValueError(f"count must be in 1..{MAX_COUNT}")

    @property
    def base(self) -> int:
        return self.spec.ratio_den


def mod_pow(b: int, e: int, m: int) -> int:
    """``b**e % m`` by left-to-right binary powering."""
    if m <= 0:
        raise ValueError("modulus must be positive")
    if e < 0:
        raise ValueError("exponent must be non-negative")
    if m == 1:
        return 0
    b %= m
    r = 1
    for bit in bin(e)[2:] if e else "":
        r = r * r % m
        if bit == "1":
            r = r * b % m
    return r


def head_arrays(spec: SeriesSpec, position: int):
    """Per-term (multiplier, exponent, modulus) arrays for n = 0..position-1."""
    p, q = spec.prefactor.numerator, spec.prefactor.denominator
    n = np.arange(position, dtype=np.int64)
    exps = position - 1 - n
    sign = np.where(n % 2 == 1, -1, 1) if spec.sign_alternates else np.ones_like(n)
    mults, expos, mods = [], [], []
    for a, c in spec.terms:
        mod = q * (spec.period * n + c)
        mults.append((p * a * sign) % mod)
        expos.append(exps)
        mods.append(mod)
    return np.concatenate(mults), np.concatenate(expos), np.concatenate(mods)


def _head_arrays_python(spec: SeriesSpec, position: int):
    p, q = spec.prefactor.numerator, spec.prefactor.denominator
    mults, expos, mods = [], [], []
    for a, c in spec.terms:
        for n in range(position):
            mod = q * (spec.period * n + c)
            s = -1 if spec.sign_alternates and n % 2 else 1
            mults.append((p * a * s) % mod)
            expos.append(position - 1 - n)
            mods.append(mod)
    return mults, expos, mods


def _tail(spec: SeriesSpec, position: int, bits: int) -> int:
    """sum over n >= position of the terms of b^(d-1) S, at ``bits`` fractional bits."""
    b = spec.ratio_den
    p, q = spec.prefactor.numerator, spec.prefactor.denominator
    weight = abs(p) * sum(abs(a) for a, _ in spec.terms) << bits
    acc = 0
    n = position
    scale = b  # b^(n - d + 1)
    while scale * q <= weight:
        s = -1 if spec.sign_alternates and n % 2 else 1
        for a, c in spec.terms:
            acc += tdiv((s * p * a) << bits, q * (spec.period * n + c) * scale)
        n += 1
        scale *= b
    return acc


def _digits(frac: int, bits: int, base: int, count: int) -> str:
    mask = (1 << bits) - 1
    out = []
    for _ in range(count):
        frac *= base
        out.append(DIGIT_CHARS[frac >> bits])
        frac &= mask
    return "".join(out)


def base_limbs(count: int, position: int, n_families: int) -> int:
    # 64 + 8k guard bits, plus headroom for one truncation per summed term
    bits = 64 + 8 * count + (position * n_families + 64).bit_length()
    return -(-bits // _kernels.LIMB_BITS)


def extract_digits(req: DigitRequest, backend: str | None = None) -> str:
    """Digits ``position .. position+count-1`` of the spec's constant in base b.

    The fractional accumulator is evaluated at increasing limb counts until
    the first ``count + 1`` digits agree at two consecutive precisions.
    """
    spec, d, k = req.spec, req.position, req.count
    base = req.base
    backend = backend or _kernels.active_backend()
    limbs = base_limbs(k, d, len(spec.terms))
    total_limbs = limbs + 1 + STABILITY_LIMBS
    if backend == "python":
        mult, exps, mods = _head_arrays_python(spec, d)
    else:
        mult, exps, mods = head_arrays(spec, d)
    sums = _kernels.head_limb_sums(mult, base, exps, mods, total_limbs, backend=backend)

    def at(nl: int) -> str:
        bits = _kernels.LIMB_BITS * nl
        head = _kernels.combine_limbs(sums, nl)
        frac = (head + _tail(spec, d, bits)) % (1 << bits)
        return _digits(frac, bits, base, k + 1)

    prev = at(limbs)
    for nl in range(limbs + 1, total_limbs + 1):
        cur = at(nl)
        if cur == prev:
            return cur[:k]
        prev = cur
    raise PrecisionError(
        f"digits at position {d} did not stabilise within {STABILITY_LIMBS} extra limbs; "
        "request fewer digits or raise the guard precision"
    )


def extract_range(spec: SeriesSpec, start: int, count: int, chunk: int = 8,
                  backend: str | None = None) -> str:
    """Concatenate extractions of ``chunk`` digits to cover ``count`` digits."""
    out = []
    pos = start
    end = start + count
    while pos < end:
        k = min(chunk, end - pos)
        out.append(extract_digits(DigitRequest(spec, pos, k), backend=backend))
        pos += k
    return "".join(out)
