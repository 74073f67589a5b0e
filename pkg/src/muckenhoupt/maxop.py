"""Noncentered Hardy-Littlewood maximal operators and weighted norm ratios."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ._kernels import ball_averages_max
from .oracle import maximal_oracle
from .space import FiniteMetricMeasureSpace
from .weights import _check_p, ap_constant, as_weight, dual_weight

__all__ = [
    "maximal",
    "maximal_weighted",
    "maximal_oracle",
    "lerner_pointwise_check",
    "LernerReport",
    "norm_ratio",
    "NormRatioReport",
    "weighted_norm",
]

log = logging.getLogger(__name__)


def _field(f, n: int) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.shape != (n,):
        raise ValueError(f"function must have shape ({n},), got {f.shape}")
    if not np.all(np.isfinite(f)):
        raise ValueError("function values must be finite")
    return f


def maximal(space: FiniteMetricMeasureSpace, f) -> np.ndarray:
    """Noncentered maximal function: best average of ``|f|`` over balls containing each point."""
    f = _field(f, space.n)
    return ball_averages_max(space, np.abs(f), space.measure)


def maximal_weighted(space: FiniteMetricMeasureSpace, w, f) -> np.ndarray:
    """Maximal function with averages taken against ``w dmu``.

    Equal to :func:`maximal` bit for bit when ``w`` is identically 1.
    """
    w = as_weight(w, space.n)
    f = _field(f, space.n)
    return ball_averages_max(space, np.abs(f), w * space.measure)


@dataclass
class LernerReport:
    lhs: np.ndarray
    rhs: np.ndarray
    slack: np.ndarray
    ap: float
    ok: bool

    @property
    def min_relative_slack(self) -> float:
        return float(np.min(self.slack / self.rhs))


def lerner_pointwise_check(space, w, p: float, f, rtol: float = 1e-9) -> LernerReport:
    """Pointwise comparison of ``Mf`` with the composed weighted maximal bound.

        Mf <= [w]^(1/(p-1)) * M^w( (M^sigma(f / sigma))^(p-1) / w ) ^ (1/(p-1))

    with ``sigma = w ** (1/(1-p))``.
    """
    p = _check_p(p)
    w = as_weight(w, space.n)
    f = _field(f, space.n)
    sigma = dual_weight(w, p)
    ap = ap_constant(space, w, p).constant
    inner = maximal_weighted(space, sigma, f / sigma)
    outer = maximal_weighted(space, w, inner ** (p - 1) / w)
    rhs = ap ** (1 / (p - 1)) * outer ** (1 / (p - 1))
    lhs = maximal(space, f)
    slack = rhs - lhs
    return LernerReport(lhs, rhs, slack, ap, bool(np.all(slack >= -rtol * rhs)))


def weighted_norm(space, w, f, q: float) -> float:
    """``(sum |f|^q w mu)^(1/q)``."""
    return float((np.abs(f) ** q * w * space.measure).sum() ** (1 / q))


@dataclass
class NormRatioReport:
    q: float
    ratios: np.ndarray
    norms_f: np.ndarray = field(repr=False)
    norms_Mf: np.ndarray = field(repr=False)
    sup_ratio: float
    skipped: list = field(default_factory=list)

    @property
    def integral_constant(self) -> float:
        """Smallest ``C`` with ``int (Mf)^q w <= C int |f|^q w`` on the family."""
        return self.sup_ratio ** self.q

    def rows(self) -> list:
        return [
            {"q": self.q, "norm_f": nf, "norm_Mf": nm, "ratio": r}
            for nf, nm, r in zip(self.norms_f.tolist(), self.norms_Mf.tolist(), self.ratios.tolist())
        ]


def norm_ratio(space, w, q: float, family: Sequence, maximals: Optional[Sequence] = None) -> NormRatioReport:
    """Ratios ``||Mf|| / ||f||`` in ``L^q(w dmu)`` over a family of functions.

    Zero functions are skipped (and logged).  ``maximals`` may supply
    precomputed ``Mf`` for each member.
    """
    q = float(q)
    if q < 1:
        raise ValueError("q must be at least 1")
    w = as_weight(w, space.n)
    if len(family) == 0:
        raise ValueError("function family is empty")
    nf, nm, skipped = [], [], []
    for i, f in enumerate(family):
        f = _field(f, space.n)
        if not np.any(f):
            skipped.append(i)
            log.info("skipping zero function %d in norm ratio", i)
            continue
        Mf = maximal(space, f) if maximals is None else maximals[i]
        nf.append(weighted_norm(space, w, f, q))
        nm.append(weighted_norm(space, w, Mf, q))
    if not nf:
        raise ValueError("function family has no nonzero member")
    nf, nm = np.array(nf), np.array(nm)
    ratios = nm / nf
    return NormRatioReport(q, ratios, nf, nm, float(ratios.max()), skipped)
