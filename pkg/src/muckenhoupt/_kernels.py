"""Prefix-sum kernels over per-center distance orders."""

from __future__ import annotations

import numpy as np

# rows of centers processed per block; bounds temporaries to ~32 MB each
_BLOCK_ELEMS = 1 << 22


def _blocks(n: int):
    step = max(1, _BLOCK_ELEMS // n)
    for lo in range(0, n, step):
        yield lo, min(n, lo + step)


def ball_averages_max(space, values: np.ndarray, masses: np.ndarray) -> np.ndarray:
    """``out[x] = max`` over open balls ``B`` containing ``x`` of
    ``sum_B values * masses / sum_B masses``.

    For a center ``c`` the balls are prefixes of ``order[c]``; the point at
    rank ``j`` lies in every prefix of length ``> j``, so its best ball at
    ``c`` is a suffix maximum of the prefix averages.  Cost is the cached
    argsort plus ``O(n^2)``.
    """
    n = space.n
    order, ends = space.order, space.ball_ends
    out = np.full(n, -np.inf)
    vm = values * masses
    for lo, hi in _blocks(n):
        o = order[lo:hi]
        num = np.cumsum(vm[o], axis=1)
        den = np.cumsum(masses[o], axis=1)
        avg = np.where(ends[lo:hi], num / den, -np.inf)
        best = np.maximum.accumulate(avg[:, ::-1], axis=1)[:, ::-1]
        scattered = np.empty_like(best)
        np.put_along_axis(scattered, o, best, axis=1)
        np.maximum(out, scattered.max(axis=0), out=out)
    return out
