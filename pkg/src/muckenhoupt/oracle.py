"""Brute-force reference implementations.

These loop over centers and critical radii and rebuild every ball from the
distance matrix.  They share no code with the prefix-sum kernels and are
meant for equivalence checks on spaces of at most a few hundred points.
"""

from __future__ import annotations

import numpy as np
from scipy.special import logsumexp

from .space import critical_radii

__all__ = ["ap_constant_oracle", "maximal_oracle", "maximal_weighted_oracle", "doubling_oracle"]


def _ball_masks(space, center):
    radii = critical_radii(space, center)
    return space.dist[center][None, :] < radii[:, None]


def ap_constant_oracle(space, w, p: float) -> float:
    w = np.asarray(w, dtype=float)
    mu = space.measure
    e = 1.0 / (1.0 - p)
    lw, ls, lm = np.log(w), e * np.log(w), np.log(mu)
    best = -np.inf
    for c in range(space.n):
        for mask in _ball_masks(space, c):
            log_mass = logsumexp(lm[mask])
            log_avg_w = logsumexp(lw[mask] + lm[mask]) - log_mass
            log_avg_s = logsumexp(ls[mask] + lm[mask]) - log_mass
            best = max(best, log_avg_w + (p - 1) * log_avg_s)
    return float(np.exp(best))


def maximal_weighted_oracle(space, w, f) -> np.ndarray:
    f = np.abs(np.asarray(f, dtype=float))
    m = np.asarray(w, dtype=float) * space.measure
    out = np.zeros(space.n)
    for c in range(space.n):
        for mask in _ball_masks(space, c):
            avg = (f[mask] * m[mask]).sum() / m[mask].sum()
            out[mask] = np.maximum(out[mask], avg)
    return out


def maximal_oracle(space, f) -> np.ndarray:
    return maximal_weighted_oracle(space, np.ones(space.n), f)


def doubling_oracle(space, radii_per_center: int = 1000, masses=None, include_breakpoints: bool = False) -> float:
    """Doubling ratio maximized over ``radii_per_center`` evenly spaced radii.

    Radii run over ``(0, max distance]``; the ratio is 1 beyond that.  A
    subsampled supremum, so never above the exact constant, and equal to it
    once every breakpoint interval contains a sample.
    """
    m = space.measure if masses is None else np.asarray(masses, dtype=float)
    best = 1.0
    for c in range(space.n):
        d = space.dist[c]
        radii = d.max() * np.arange(1, radii_per_center + 1) / radii_per_center
        if include_breakpoints:
            pos = d[d > 0]
            radii = np.concatenate([radii, pos, pos / 2])
        inner = (d[None, :] < radii[:, None]) @ m
        outer = (d[None, :] < 2 * radii[:, None]) @ m
        best = max(best, float((outer / inner).max()))
    return best
