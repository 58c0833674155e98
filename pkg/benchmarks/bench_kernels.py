#!/usr/bin/env python3
"""Benchmark the JIT kernels against the pure-numpy fallback.

Runs both code paths in-process (the env flag GECSCORE_NUMBA only selects the
default dispatch; the underlying implementations are importable directly), so
one invocation prints a side-by-side table:

    python3 benchmarks/bench_kernels.py
"""

import random
import time

import numpy as np

from gecscore import _kernels

SIZES = [50, 200, 800, 2000]
REPEATS = {50: 200, 200: 50, 800: 10, 2000: 3}


def _random_codes(rng, n):
    return np.array([rng.randrange(26) for _ in range(n)], dtype=np.int32)


def _time(fn, pairs, repeats):
    best = float("inf")
    for _ in range(3):
        start = time.perf_counter()
        for _ in range(repeats):
            for a, b in pairs:
                fn(a, b)
        best = min(best, (time.perf_counter() - start) / (repeats * len(pairs)))
    return best


def main():
    rng = random.Random(0)
    if not _kernels.NUMBA_ENABLED:
        print("numba path unavailable (GECSCORE_NUMBA=0 or numba missing); "
              "benchmarking the numpy fallback only")
    print(f"{'kernel':14s} {'n':>6s} {'numpy (ms)':>12s} {'numba (ms)':>12s} {'speedup':>9s}")
    for n in SIZES:
        pairs = [(_random_codes(rng, n), _random_codes(rng, n)) for _ in range(3)]
        repeats = REPEATS[n]
        for name, np_fn, jit_name in (
            ("levenshtein", _kernels._levenshtein_np, "_levenshtein_jit"),
            ("lcs", _kernels._lcs_np, "_lcs_jit"),
        ):
            t_np = _time(np_fn, pairs, repeats)
            if _kernels.NUMBA_ENABLED:
                jit_fn = getattr(_kernels, jit_name)
                jit_fn(*pairs[0])  # compile outside the timed region
                t_jit = _time(jit_fn, pairs, repeats)
                print(f"{name:14s} {n:6d} {t_np * 1e3:12.3f} {t_jit * 1e3:12.3f} "
                      f"{t_np / t_jit:8.1f}x")
            else:
                print(f"{name:14s} {n:6d} {t_np * 1e3:12.3f} {'-':>12s} {'-':>9s}")
    # sanity: both paths agree
    a, b = _random_codes(rng, 300), _random_codes(rng, 320)
    if _kernels.NUMBA_ENABLED:
        assert _kernels._levenshtein_np(a, b) == int(_kernels._levenshtein_jit(a, b))
        assert _kernels._lcs_np(a, b) == int(_kernels._lcs_jit(a, b))
        print("agreement check: numpy and numba paths identical")


if __name__ == "__main__":
    main()
