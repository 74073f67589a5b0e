"""Muckenhoupt weights on finite spaces.

The A_p functional of a weight on a ball ``B`` is

    avg_B(w) * avg_B(w ** (1 / (1 - p))) ** (p - 1)

and ``[w]_{A_p}`` is its maximum over all open balls.  It depends only on the
member set of ``B``, so the maximum runs over the prefix balls of every
center.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ._kernels import ball_averages_max
from .space import Ball, FiniteMetricMeasureSpace, _as_index, doubling_constant, enumerate_distinct_balls

__all__ = [
    "ApReport",
    "HolderReport",
    "WeightDoublingReport",
    "WitnessReport",
    "as_weight",
    "weight_measure",
    "ap_functional_matrix",
    "ap_constant",
    "dual_weight",
    "conjugate",
    "weighted_holder_check",
    "weight_doubling_check",
    "ap_lower_bound_witness",
    "witness_function",
    "power_weight",
    "lognormal_weight",
]

# beyond this spread of log(w ** (1/(1-p))) plain exponentials would
# underflow, and the averages switch to cumulative log-sum-exp
_LINEAR_LOG_SPAN = 600.0


def as_weight(w, n: Optional[int] = None) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.ndim != 1 or (n is not None and w.shape[0] != n):
        raise ValueError("weight must be a vector with one value per point")
    if not np.all(np.isfinite(w)) or not np.all(w > 0):
        raise ValueError("weight values must be finite and strictly positive")
    return w


def _check_p(p: float) -> float:
    p = float(p)
    if not (1.0 < p < math.inf):
        raise ValueError(f"exponent must satisfy 1 < p < inf, got {p}")
    return p


def conjugate(p: float) -> float:
    p = _check_p(p)
    return p / (p - 1.0)


@dataclass
class ApReport:
    p: float
    constant: float
    witness: Ball
    per_ball: Optional[np.ndarray] = field(default=None, repr=False)

    def to_dict(self) -> dict:
        d = {"p": self.p, "constant": self.constant, "witness": self.witness.to_dict()}
        if self.per_ball is not None:
            d["per_ball"] = self.per_ball.tolist()
        return d


def weight_measure(space: FiniteMetricMeasureSpace, w, E) -> float:
    """``w(E)``: sum of ``w * mu`` over the points of ``E``."""
    w = as_weight(w, space.n)
    idx = _as_index(E, space.n)
    return float((w[idx] * space.measure[idx]).sum())


def _log_prefix_avg(space, logv: np.ndarray, log_cum_mu: np.ndarray) -> np.ndarray:
    """``log`` of prefix averages of ``exp(logv)`` along each center order."""
    lm = np.log(space.measure)
    terms = (logv + lm)[space.order]
    return np.logaddexp.accumulate(terms, axis=1) - log_cum_mu


def ap_functional_matrix(space: FiniteMetricMeasureSpace, w, p: float, v=None) -> np.ndarray:
    """A_p functional on every prefix ball, as an ``(n, n)`` array.

    Entry ``[c, k]`` belongs to the ``k + 1`` points nearest ``c``; entries
    that are not ball ends are ``nan``.  With ``v`` given, the second
    average uses ``v ** (1 / (1 - p))`` instead of ``w ** (1 / (1 - p))``
    (the shifted family ``v = eps + w`` of the witness argument).
    """
    p = _check_p(p)
    w = as_weight(w, space.n)
    v = w if v is None else as_weight(v, space.n)
    e = 1.0 / (1.0 - p)
    # the functional is 0-homogeneous in (w, v) jointly; normalize by min(v)
    scale = v.min()
    lw = np.log(w) - np.log(scale)
    lv = np.log(v) - np.log(scale)
    ls = e * lv
    cum_mu = np.cumsum(space.measure[space.order], axis=1)
    if np.ptp(ls) < _LINEAR_LOG_SPAN and np.ptp(lw) < _LINEAR_LOG_SPAN:
        # log(v/scale) >= 0 so v_scaled**e <= 1; no overflow, no underflow
        mu = space.measure
        ws = (w / scale * mu)[space.order]
        ss = (np.power(v / scale, e) * mu)[space.order]
        log_avg_w = np.log(np.cumsum(ws, axis=1) / cum_mu)
        log_avg_s = np.log(np.cumsum(ss, axis=1) / cum_mu)
    else:
        log_cum_mu = np.log(cum_mu)
        log_avg_w = _log_prefix_avg(space, lw, log_cum_mu)
        log_avg_s = _log_prefix_avg(space, ls, log_cum_mu)
    F = np.exp(log_avg_w + (p - 1.0) * log_avg_s)
    return np.where(space.ball_ends, F, np.nan)


def ap_constant(space: FiniteMetricMeasureSpace, w, p: float, per_ball: bool = False) -> ApReport:
    """``[w]_{A_p}`` with the ball attaining it.

    With ``per_ball`` the report also carries the functional on every ball
    of :func:`enumerate_distinct_balls`, in that order.
    """
    p = _check_p(p)
    F = ap_functional_matrix(space, w, p)
    flat = int(np.nanargmax(F))
    c, k = divmod(flat, space.n)
    witness = space.prefix_ball(c, k + 1)
    values = None
    if per_ball:
        family = enumerate_distinct_balls(space)
        values = np.array([F[b.center, len(b) - 1] for b in family])
    return ApReport(p, float(F[c, k]), witness, values)


def dual_weight(w, p: float) -> np.ndarray:
    """``sigma = w ** (1 - p')``, which lies in ``A_{p'}`` iff ``w`` is in ``A_p``."""
    p = _check_p(p)
    return np.power(as_weight(w), 1.0 / (1.0 - p))


@dataclass
class HolderReport:
    lhs: float
    rhs: float
    slack: float
    ok: bool


def weighted_holder_check(space, w, p: float, ball: Ball, f, constant: Optional[float] = None,
                          rtol: float = 1e-9) -> HolderReport:
    """Compare ``avg_B f`` with ``[w]^(1/p) * (w(B)^-1 int_B f^p w)^(1/p)``.

    ``constant`` defaults to ``[w]_{A_p}`` from :func:`ap_constant`.
    """
    p = _check_p(p)
    w = as_weight(w, space.n)
    f = np.asarray(f, dtype=float)
    idx = ball.indices()
    if np.any(f[idx] < 0):
        raise ValueError("f must be nonnegative on the ball")
    if constant is None:
        constant = ap_constant(space, w, p).constant
    mu = space.measure[idx]
    lhs = float((f[idx] * mu).sum() / mu.sum())
    wmu = w[idx] * mu
    rhs = float(constant ** (1 / p) * ((f[idx] ** p * wmu).sum() / wmu.sum()) ** (1 / p))
    slack = rhs - lhs
    return HolderReport(lhs, rhs, slack, bool(slack >= -rtol * rhs))


@dataclass
class WeightDoublingReport:
    c_w_measured: float
    bound: float
    c_mu: float
    ap: float
    ok: bool


def weight_doubling_check(space, w, p: float, rtol: float = 1e-9) -> WeightDoublingReport:
    """Measured doubling constant of ``w dmu`` against ``c_mu**p * [w]_{A_p}``."""
    p = _check_p(p)
    w = as_weight(w, space.n)
    c_w = doubling_constant(space, w * space.measure)
    c_mu = doubling_constant(space)
    ap = ap_constant(space, w, p).constant
    bound = c_mu ** p * ap
    return WeightDoublingReport(c_w, bound, c_mu, ap, bool(c_w <= bound * (1 + rtol)))


def witness_function(space, w, p: float, ball: Ball, eps: float) -> np.ndarray:
    """``(eps + w) ** (1/(1-p))`` on ``ball`` and 0 elsewhere."""
    p = _check_p(p)
    f = np.zeros(space.n)
    idx = ball.indices()
    f[idx] = np.power(eps + np.asarray(w, dtype=float)[idx], 1.0 / (1.0 - p))
    return f


@dataclass
class WitnessReport:
    p: float
    eps: np.ndarray
    lower: np.ndarray
    ratio_sup: np.ndarray
    ap: float
    per_ball_ok: bool
    monotone: bool
    below_constant: bool
    ok: bool


def ap_lower_bound_witness(space, w, p: float, eps_list: Sequence[float],
                           balls=None, rtol: float = 1e-9) -> WitnessReport:
    """Test the maximal-inequality route to the A_p bound with witness functions.

    For each ``eps`` and each ball ``B``, ``f = (eps + w) ** (1/(1-p)) * 1_B``
    satisfies

        avg_B(w) * avg_B((eps + w) ** (1/(1-p))) ** (p - 1)
            <= int (Mf)^p w dmu / int f^p w dmu,

    so the shifted functional ``L(eps)`` (its maximum over balls) is below
    the largest measured norm ratio.  ``L`` increases to ``[w]_{A_p}`` as
    ``eps`` decreases.  ``balls`` defaults to all distinct balls.
    """
    p = _check_p(p)
    w = as_weight(w, space.n)
    eps = np.asarray(sorted(eps_list, reverse=True), dtype=float)
    if eps.size == 0 or np.any(eps <= 0):
        raise ValueError("eps_list must hold positive values")
    if balls is None:
        balls = enumerate_distinct_balls(space).balls
    balls = list(balls)
    ap = ap_constant(space, w, p).constant
    wmu = w * space.measure
    lower, ratio_sup = [], []
    per_ball_ok = True
    for e in eps:
        F = ap_functional_matrix(space, w, p, v=e + w)
        lower.append(float(np.nanmax(F)))
        best = 0.0
        for b in balls:
            f = witness_function(space, w, p, b, e)
            Mf = ball_averages_max(space, f, space.measure)
            ratio = float((Mf ** p * wmu).sum() / (f ** p * wmu).sum())
            best = max(best, ratio)
            if F[b.center, len(b) - 1] > ratio * (1 + rtol):
                per_ball_ok = False
        ratio_sup.append(best)
    lower = np.array(lower)
    ratio_sup = np.array(ratio_sup)
    monotone = bool(np.all(np.diff(lower) >= -rtol * lower[1:]))
    below = bool(np.all(lower <= ap * (1 + rtol)))
    return WitnessReport(p, eps, lower, ratio_sup, ap, per_ball_ok, monotone, below,
                         per_ball_ok and monotone and below)


def power_weight(space: FiniteMetricMeasureSpace, alpha: float) -> np.ndarray:
    """``|x| ** alpha`` on a space with one-dimensional coordinates."""
    if space.coords is None or space.coords.shape[1] != 1:
        raise ValueError("power weights need one-dimensional coordinates")
    x = np.abs(space.coords[:, 0])
    if np.any(x == 0):
        raise ValueError("a point sits at the origin; use a cell-centred grid")
    return x ** float(alpha)


def lognormal_weight(n: int, seed: int = 0, sigma: float = 1.0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return np.exp(rng.normal(0.0, sigma, n))
