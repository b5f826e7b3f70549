"""Head-sum kernel for digit extraction.

For term i the kernel forms ``r_i = mult_i * base^exp_i mod mod_i`` and the
first ``nlimbs`` 32-bit limbs of ``r_i / mod_i`` by long division, then sums
each limb column over all terms.  Column sums fit in int64 as long as the
moduli stay below 2**31 and there are fewer than 2**31 terms.

Backends, chosen by the ``ARCTANPI_KERNEL`` environment variable:

``numba``   jitted scalar loop (default when numba imports)
``numpy``   vectorised binary powering over whole arrays
``python``  plain integers, no modulus limit; the reference path
"""
from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

KERNEL_ENV = "ARCTANPI_KERNEL"
BACKENDS = ("numba", "numpy", "python")
MAX_ARRAY_MODULUS = 1 << 31
LIMB_BITS = 32


def active_backend() -> str:
    name = os.environ.get(KERNEL_ENV, "").strip().lower()
    if not name:
        return "numba" if numba is not None else "numpy"
    if name not in BACKENDS:
        raise ValueError(f"{KERNEL_ENV}={name!r}; expected one of {BACKENDS}")
    if name == "numba" and numba is None:
        return "numpy"
    return name


def _head_limbs_loop(mult, base, exps, mods, nlimbs):
    acc = np.zeros(nlimbs, dtype=np.int64)
    for i in range(mods.shape[0]):
        m = mods[i]
        if m == 1:
            continue
        b = base % m
        e = exps[i]
        r = 1
        top = 1
        while top <= e:
            top <<= 1
        top >>= 1
        while top > 0:
            r = (r * r) % m
            if e & top:
                r = (r * b) % m
            top >>= 1
        r = (mult[i] * r) % m
        for k in range(nlimbs):
            r <<= 32
            acc[k] += r // m
            r %= m
    return acc


if numba is not None:
    _head_limbs_numba = numba.njit(cache=True, nogil=True)(_head_limbs_loop)
else:  # pragma: no cover
    _head_limbs_numba = None


def _head_limbs_numpy(mult, base, exps, mods, nlimbs):
    acc = np.zeros(nlimbs, dtype=np.int64)
    if mods.size == 0:
        return acc
    b = np.int64(base) % mods
    r = np.ones_like(mods)
    top = int(exps.max()).bit_length()
    for k in range(top - 1, -1, -1):
        r = (r * r) % mods
        bit = ((exps >> k) & 1).astype(bool)
        r = np.where(bit, (r * b) % mods, r)
    r = (mult * r) % mods
    for k in range(nlimbs):
        r = r << 32
        acc[k] = (r // mods).sum()
        r = r % mods
    return acc


def _head_limbs_python(mult, base, exps, mods, nlimbs):
    from .digit_extract import mod_pow

    bits = LIMB_BITS * nlimbs
    mask = (1 << LIMB_BITS) - 1
    total = [0] * nlimbs
    for a, e, m in zip(mult, exps, mods):
        r = (a * mod_pow(base, e, m)) % m
        q = (r << bits) // m
        for k in range(nlimbs):
            total[nlimbs - 1 - k] += (q >> (LIMB_BITS * k)) & mask
    return total


def head_limb_sums(mult, base: int, exps, mods, nlimbs: int, backend: str | None = None):
    """Column sums of the limb expansions of ``frac(mult * base^exp / mod)``.

    Returns a sequence of ``nlimbs`` integers, most significant limb first.
    """
    backend = backend or active_backend()
    if backend == "python":
        return [int(v) for v in _head_limbs_python(
            [int(v) for v in mult], base, [int(v) for v in exps], [int(v) for v in mods], nlimbs
        )]
    mult = np.asarray(mult, dtype=np.int64)
    exps = np.asarray(exps, dtype=np.int64)
    mods = np.asarray(mods, dtype=np.int64)
    if mods.size and int(mods.max()) >= MAX_ARRAY_MODULUS:
        raise OverflowError(
            f"modulus {int(mods.max())} exceeds the {backend} kernel range; "
            f"set {KERNEL_ENV}=python for this position"
        )
    if backend == "numba":
        if _head_limbs_numba is None:  # pragma: no cover
            raise RuntimeError("numba backend requested but numba is unavailable")
        out = _head_limbs_numba(mult, np.int64(base), exps, mods, nlimbs)
    elif backend == "numpy":
        out = _head_limbs_numpy(mult, base, exps, mods, nlimbs)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    return [int(v) for v in out]


def combine_limbs(sums, nlimbs: int) -> int:
    """Fold column sums (most significant first) into one integer, ``nlimbs*32`` bits."""
    value = 0
    for v in sums[:nlimbs]:
        value = (value << LIMB_BITS) + int(v)
    return value
