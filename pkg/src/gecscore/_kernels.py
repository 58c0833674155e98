"""Hot DP kernels (Levenshtein, LCS) with numba JIT and a pure-numpy fallback.

The JIT path is used when numba imports cleanly and the environment variable
GECSCORE_NUMBA is unset or truthy.  Set GECSCORE_NUMBA=0 to force the numpy
fallback (benchmarks/bench_kernels.py compares both).  Both paths are exact
and bit-identical; only throughput differs.
"""

import os

import numpy as np

_flag = os.environ.get("GECSCORE_NUMBA", "1").strip().lower()
NUMBA_REQUESTED = _flag not in {"0", "false", "no", "off"}

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    NUMBA_AVAILABLE = False

NUMBA_ENABLED = NUMBA_REQUESTED and NUMBA_AVAILABLE


def backend_name() -> str:
    return "numba" if NUMBA_ENABLED else "numpy"


def str_to_codes(s: str) -> np.ndarray:
    """Unicode scalar values of `s` as an int32 array."""
    if not s:
        return np.empty(0, dtype=np.int32)
    return np.frombuffer(s.encode("utf-32-le"), dtype=np.uint32).astype(np.int32)


def tokens_to_ids(*token_lists):
    """Map tokens to shared integer ids; returns one int32 array per input list."""
    vocab: dict[str, int] = {}
    out = []
    for tokens in token_lists:
        ids = np.empty(len(tokens), dtype=np.int32)
        for i, tok in enumerate(tokens):
            ids[i] = vocab.setdefault(tok, len(vocab))
        out.append(ids)
    return out


def _levenshtein_np(a: np.ndarray, b: np.ndarray) -> int:
    # Row DP over the shorter sequence; the deletion chain is an exact
    # min-plus scan: row[j] = min_{k<=j} cand[k] + (j - k).
    if len(a) < len(b):
        a, b = b, a
    if len(b) == 0:
        return len(a)
    idx = np.arange(len(b) + 1, dtype=np.int64)
    prev = idx.copy()
    cand = np.empty_like(prev)
    for ca in a:
        cand[0] = prev[0] + 1
        np.minimum(prev[1:] + 1, prev[:-1] + (b != ca), out=cand[1:])
        prev = np.minimum.accumulate(cand - idx) + idx
        cand = np.empty_like(prev)
    return int(prev[-1])


def _lcs_np(a: np.ndarray, b: np.ndarray) -> int:
    if len(a) == 0 or len(b) == 0:
        return 0
    if len(a) < len(b):
        a, b = b, a
    prev = np.zeros(len(b) + 1, dtype=np.int64)
    cand = np.empty_like(prev)
    for ca in a:
        cand[0] = 0
        np.maximum(prev[1:], prev[:-1] + (b == ca), out=cand[1:])
        prev = np.maximum.accumulate(cand)
        cand = np.empty_like(prev)
    return int(prev[-1])


if NUMBA_ENABLED:

    @njit(cache=True)
    def _levenshtein_jit(a, b):  # pragma: no cover - exercised via dispatch
        n, m = len(a), len(b)
        if n == 0:
            return m
        if m == 0:
            return n
        prev = np.arange(m + 1)
        cur = np.empty(m + 1, dtype=np.int64)
        for i in range(1, n + 1):
            cur[0] = i
            ai = a[i - 1]
            for j in range(1, m + 1):
                cost = 0 if ai == b[j - 1] else 1
                best = prev[j - 1] + cost
                if prev[j] + 1 < best:
                    best = prev[j] + 1
                if cur[j - 1] + 1 < best:
                    best = cur[j - 1] + 1
                cur[j] = best
            prev, cur = cur, prev
        return prev[m]

    @njit(cache=True)
    def _lcs_jit(a, b):  # pragma: no cover - exercised via dispatch
        n, m = len(a), len(b)
        if n == 0 or m == 0:
            return 0
        prev = np.zeros(m + 1, dtype=np.int64)
        cur = np.empty(m + 1, dtype=np.int64)
        for i in range(1, n + 1):
            cur[0] = 0
            ai = a[i - 1]
            for j in range(1, m + 1):
                if ai == b[j - 1]:
                    cur[j] = prev[j - 1] + 1
                else:
                    cur[j] = prev[j] if prev[j] >= cur[j - 1] else cur[j - 1]
            prev, cur = cur, prev
        return prev[m]


def levenshtein_codes(a: np.ndarray, b: np.ndarray) -> int:
    """Unit-cost edit distance between two int32 code arrays."""
    a = np.ascontiguousarray(a, dtype=np.int32)
    b = np.ascontiguousarray(b, dtype=np.int32)
    if NUMBA_ENABLED:
        return int(_levenshtein_jit(a, b))
    return _levenshtein_np(a, b)


def lcs_codes(a: np.ndarray, b: np.ndarray) -> int:
    """Length of the longest common subsequence of two int32 code arrays."""
    a = np.ascontiguousarray(a, dtype=np.int32)
    b = np.ascontiguousarray(b, dtype=np.int32)
    if NUMBA_ENABLED:
        return int(_lcs_jit(a, b))
    return _lcs_np(a, b)
