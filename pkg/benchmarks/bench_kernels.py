"""Time the digit-extraction head kernel on each backend.

    python3 benchmarks/bench_kernels.py [--positions 1000 10000 100000] [--repeat 5]

The first numba call compiles (or loads from the on-disk cache); it is run
once before timing so only steady-state cost is reported.
"""
import argparse
import time

from arctanpi import _kernels
from arctanpi.digit_extract import head_arrays
from arctanpi.pi_formulas import BBP16, PI_BASE4


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--positions", type=int, nargs="+", default=[1000, 10000, 100000])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--limbs", type=int, default=4)
    ap.add_argument("--python-max", type=int, default=10000, help="skip the pure python backend above this position")
    args = ap.parse_args()

    backends = [b for b in _kernels.BACKENDS if b != "numba" or _kernels.numba is not None]
    mult, exps, mods = head_arrays(PI_BASE4, 16)
    for b in backends:
        _kernels.head_limb_sums(mult, 4, exps, mods, args.limbs, backend=b)

    print("best-of times in ms; speedup is numpy / numba")
    print(f"{'spec':10} {'position':>9} {'terms':>8} " + " ".join(f"{b:>10}" for b in backends) + "   speedup")
    for spec in (PI_BASE4, BBP16):
        base = spec.integer_base()
        for d in args.positions:
            mult, exps, mods = head_arrays(spec, d)
            times, ref = {}, None
            for b in backends:
                if b == "python" and d > args.python_max:
                    continue
                t, out = best_of(lambda: _kernels.head_limb_sums(mult, base, exps, mods, args.limbs, backend=b), args.repeat)
                times[b] = t
                ref = ref or out
                assert out == ref, f"{b} disagrees at position {d}"
            cols = " ".join(f"{times[b] * 1e3:10.2f}" if b in times else f"{'-':>10}" for b in backends)
            speedup = times["numpy"] / times["numba"] if "numba" in times else float("nan")
            print(f"{spec.name:10} {d:>9} {len(mods):>8} {cols}   {speedup:6.1f}x")


if __name__ == "__main__":
    main()
