"""Level sets of the maximal function, Whitney covers and the truncation ``f_t``.

A Whitney cover of a proper subset ``omega`` uses balls ``B(x, r_x)`` with
``r_x = dist(x, X \\ omega) / 8``.  Selection is greedy by decreasing radius
with pairwise disjoint fifth-radius balls, followed by a completion sweep
that adds ``B(x, r_x)`` for any point still uncovered.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .maxop import _field, maximal
from .space import Ball, FiniteMetricMeasureSpace, _as_index, doubling_constant

__all__ = [
    "WhitneyCover",
    "TruncationResult",
    "TruncationCheck",
    "ThresholdTooLowError",
    "level_set",
    "whitney_radii",
    "whitney_cover",
    "truncate",
    "check_truncation_bounds",
]

WHITNEY_FRACTION = 1.0 / 8.0
SEPARATION_FRACTION = 1.0 / 5.0


class ThresholdTooLowError(ValueError):
    """The level set ``E_t`` is the whole space."""


def _mask(points, n: int) -> np.ndarray:
    m = np.zeros(n, dtype=bool)
    m[_as_index(points, n)] = True
    return m


@dataclass
class WhitneyCover:
    omega: np.ndarray
    balls: list
    greedy: np.ndarray
    membership: np.ndarray = field(repr=False)
    overlap_max: int

    @property
    def centers(self) -> np.ndarray:
        return np.array([b.center for b in self.balls], dtype=int)

    @property
    def radii(self) -> np.ndarray:
        return np.array([b.radius for b in self.balls])

    def overlap(self) -> np.ndarray:
        """Number of cover balls containing each point."""
        return self.membership.sum(axis=0)

    def to_dict(self) -> dict:
        return {
            "omega": np.flatnonzero(self.omega).tolist(),
            "balls": [dict(b.to_dict(), greedy=bool(g)) for b, g in zip(self.balls, self.greedy)],
            "overlap_max": self.overlap_max,
        }


def level_set(space: FiniteMetricMeasureSpace, f, t: float, Mf: Optional[np.ndarray] = None) -> np.ndarray:
    """Boolean mask of ``E_t = {x : Mf(x) > t}``."""
    if not t > 0:
        raise ValueError("threshold must be positive")
    if Mf is None:
        Mf = maximal(space, f)
    return Mf > t


def whitney_radii(space: FiniteMetricMeasureSpace, omega) -> np.ndarray:
    """``dist(x, X \\ omega) / 8`` for each point of ``omega`` (0 elsewhere)."""
    om = _mask(omega, space.n)
    to_complement = space.dist[:, ~om].min(axis=1)
    return np.where(om, to_complement * WHITNEY_FRACTION, 0.0)


def whitney_cover(space: FiniteMetricMeasureSpace, omega) -> WhitneyCover:
    om = _mask(omega, space.n)
    if not om.any():
        raise ValueError("omega must be nonempty")
    if om.all():
        raise ValueError("omega must have a nonempty complement")
    dist = space.dist
    r = whitney_radii(space, om)
    cand = np.flatnonzero(om)
    # decreasing radius, ties by index
    cand = cand[np.argsort(-r[cand], kind="stable")]

    fifth = dist[cand] < (SEPARATION_FRACTION * r[cand])[:, None]
    meets = (fifth.astype(np.int32) @ fifth.T.astype(np.int32)) > 0
    blocked = np.zeros(len(cand), dtype=bool)
    chosen = []
    for i in range(len(cand)):
        if not blocked[i]:
            chosen.append(i)
            blocked |= meets[i]

    centers = [int(cand[i]) for i in chosen]
    greedy = [True] * len(centers)
    covered = np.zeros(space.n, dtype=bool)
    for c in centers:
        covered |= dist[c] < r[c]
    for x in np.flatnonzero(om):
        if not covered[x]:
            centers.append(int(x))
            greedy.append(False)
            covered |= dist[x] < r[x]

    centers = np.array(centers, dtype=int)
    membership = dist[centers] < r[centers][:, None]
    balls = [
        Ball(int(c), float(r[c]), frozenset(int(u) for u in np.flatnonzero(row)))
        for c, row in zip(centers, membership)
    ]
    overlap_max = int(membership.sum(axis=0)[om].max())
    return WhitneyCover(om, balls, np.array(greedy), membership, overlap_max)


@dataclass
class TruncationResult:
    t: float
    level_set: np.ndarray
    f_t: np.ndarray
    cover: Optional[WhitneyCover]
    Mf: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        d = {"t": self.t, "level_set": np.flatnonzero(self.level_set).tolist(), "f_t": self.f_t.tolist()}
        if self.cover is not None:
            d["cover"] = self.cover.to_dict()
        return d


def truncate(space: FiniteMetricMeasureSpace, f, t: float, Mf: Optional[np.ndarray] = None) -> TruncationResult:
    """Replace ``f`` on ``E_t`` by the largest Whitney-ball average of ``f``.

    Off ``E_t`` the function is unchanged; with ``E_t`` empty ``f_t = f``.
    """
    f = _field(f, space.n)
    if np.any(f < 0):
        raise ValueError("truncation needs a nonnegative function")
    if Mf is None:
        Mf = maximal(space, f)
    E = level_set(space, f, t, Mf)
    if E.all():
        raise ThresholdTooLowError(f"E_t = X at t = {t}: threshold below min Mf = {Mf.min()}")
    f_t = f.copy()
    cover = None
    if E.any():
        cover = whitney_cover(space, E)
        mem = cover.membership
        mu = space.measure
        avgs = (mem * (f * mu)).sum(axis=1) / (mem * mu).sum(axis=1)
        sup = np.where(mem, avgs[:, None], -np.inf).max(axis=0)
        f_t[E] = sup[E]
    return TruncationResult(float(t), E, f_t, cover, Mf)


@dataclass
class TruncationCheck:
    """Slack of the two pointwise bounds satisfied by ``f_t``.

    ``off_level`` and ``on_level`` are ``f_t <= t`` off ``E_t`` and
    ``f_t <= c_mu**4 t`` on ``E_t``; ``domination`` is
    ``Mf <= max(1, N) c_mu Mf_t`` off ``E_t``, with ``N`` the cover overlap.
    ``mass`` compares ``int_B f`` with ``int_B f_t`` on each cover ball.
    """

    t: float
    c_mu: float
    overlap: int
    domination_constant: float
    off_level: bool
    on_level: bool
    domination: bool
    mass: bool
    worst_on_level_ratio: float
    worst_domination_ratio: float

    @property
    def ok(self) -> bool:
        return self.off_level and self.on_level and self.domination and self.mass


def check_truncation_bounds(space, f, t: float, result: TruncationResult,
                            c_mu: Optional[float] = None, rtol: float = 1e-9) -> TruncationCheck:
    f = _field(f, space.n)
    if c_mu is None:
        c_mu = doubling_constant(space)
    E, f_t = result.level_set, result.f_t
    off = ~E
    off_ok = bool(np.all(f_t[off] <= t * (1 + rtol)))
    on_bound = c_mu ** 4 * t
    on_ok = bool(np.all(f_t[E] <= on_bound * (1 + rtol)))
    worst_on = float(f_t[E].max() / on_bound) if E.any() else 0.0

    N = result.cover.overlap_max if result.cover is not None else 0
    K = max(1, N) * c_mu
    Mf = result.Mf
    Mft = maximal(space, f_t)
    dom_ok = bool(np.all(Mf[off] <= K * Mft[off] * (1 + rtol)))
    a, b = Mf[off], K * Mft[off]
    if np.any((b == 0) & (a > 0)):
        worst_dom = np.inf
    else:
        pos = b > 0
        worst_dom = float((a[pos] / b[pos]).max()) if pos.any() else 0.0

    mass_ok = True
    if result.cover is not None:
        mu = space.measure
        mem = result.cover.membership
        mf = (mem * (f * mu)).sum(axis=1)
        mft = (mem * (f_t * mu)).sum(axis=1)
        mass_ok = bool(np.all(mf <= mft * (1 + rtol)))
    return TruncationCheck(float(t), float(c_mu), int(N), float(K), off_ok, on_ok, dom_ok, mass_ok,
                           worst_on, worst_dom)
