"""Finite metric measure spaces, exact ball enumeration and doubling constants.

A finite space is a distance matrix together with strictly positive point
masses.  Every supremum over radii becomes a maximum over finitely many
breakpoints: the open ball ``B(x, r) = {y : d(x, y) < r}`` only changes when
``r`` crosses a distance value from ``x``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np
from scipy.spatial.distance import pdist, squareform

__all__ = [
    "FiniteMetricMeasureSpace",
    "Ball",
    "BallFamily",
    "ValidationReport",
    "InvalidSpaceError",
    "validate_metric",
    "critical_radii",
    "enumerate_distinct_balls",
    "doubling_constant",
    "doubling_scan",
    "generate",
]

# relative slack for the triangle inequality; Euclidean distances of
# collinear points can break it by an ulp
TRIANGLE_RTOL = 1e-12
# construction-time triangle checks are skipped above this size (cubic cost)
TRIANGLE_CHECK_MAX = 512


class InvalidSpaceError(ValueError):
    """Raised when a distance matrix or measure fails the metric axioms."""

    def __init__(self, report: "ValidationReport"):
        super().__init__(f"invalid metric measure space: {report.axiom} at {report.witness}")
        self.report = report


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    axiom: Optional[str] = None
    witness: tuple = ()

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True, eq=False)
class FiniteMetricMeasureSpace:
    """Finite set of points with a metric and strictly positive masses.

    Parameters
    ----------
    dist : array_like, shape (n, n)
        Symmetric distance matrix with zero diagonal.
    measure : array_like, shape (n,)
        Point masses, all strictly positive.
    labels : sequence of str, optional
    coords : array_like, shape (n, k), optional
        Embedding coordinates, kept only for generators and power weights.
    check : bool
        Run :func:`validate_metric` and raise :class:`InvalidSpaceError` on
        failure.  The triangle check is cubic in ``n`` and only runs here
        for ``n <= TRIANGLE_CHECK_MAX``.
    """

    dist: np.ndarray
    measure: np.ndarray
    labels: Optional[tuple] = None
    coords: Optional[np.ndarray] = None
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        dist = np.array(self.dist, dtype=float)
        measure = np.array(self.measure, dtype=float)
        coords = None if self.coords is None else np.array(self.coords, dtype=float)
        if coords is not None and coords.ndim == 1:
            coords = coords[:, None]
        for a in (dist, measure, coords):
            if a is not None:
                a.setflags(write=False)
        object.__setattr__(self, "dist", dist)
        object.__setattr__(self, "measure", measure)
        object.__setattr__(self, "coords", coords)
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(str(s) for s in self.labels))
        if self.check:
            report = validate_metric(dist, measure, triangle=dist.shape[0] <= TRIANGLE_CHECK_MAX)
            if not report:
                raise InvalidSpaceError(report)
        if self.labels is not None and len(self.labels) != self.n:
            raise ValueError("labels must have one entry per point")
        if coords is not None and coords.shape[0] != self.n:
            raise ValueError("coords must have one row per point")

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    @property
    def total_mass(self) -> float:
        return float(self.measure.sum())

    # Per-center distance orders.  Row c of ``order`` lists points by
    # increasing distance from c (stable, so ties keep index order); the open
    # balls centred at c are exactly the prefixes ending where the sorted
    # distance strictly increases.

    @cached_property
    def order(self) -> np.ndarray:
        order = np.argsort(self.dist, axis=1, kind="stable")
        order.setflags(write=False)
        return order

    @cached_property
    def sorted_dist(self) -> np.ndarray:
        sd = np.take_along_axis(self.dist, self.order, axis=1)
        sd.setflags(write=False)
        return sd

    @cached_property
    def ball_ends(self) -> np.ndarray:
        """Boolean ``(n, n)``; ``[c, k]`` is set when the first ``k + 1``
        points of ``order[c]`` form an open ball."""
        sd = self.sorted_dist
        ends = np.ones_like(sd, dtype=bool)
        ends[:, :-1] = sd[:, 1:] != sd[:, :-1]
        ends.setflags(write=False)
        return ends

    def ball(self, center: int, radius: float) -> "Ball":
        members = np.flatnonzero(self.dist[center] < radius)
        return Ball(int(center), float(radius), frozenset(int(u) for u in members))

    def prefix_ball(self, center: int, k: int) -> "Ball":
        """Open ball formed by the ``k`` points closest to ``center``.

        ``k`` must be a ball size, i.e. ``ball_ends[center, k - 1]`` holds.
        """
        sd = self.sorted_dist[center]
        radius = sd[k] if k < self.n else sd[-1] + 1.0
        members = frozenset(int(u) for u in self.order[center, :k])
        return Ball(int(center), float(radius), members)

    def dilate(self, ball: "Ball", factor: float) -> "Ball":
        return self.ball(ball.center, factor * ball.radius)

    def mass(self, points, masses: Optional[np.ndarray] = None) -> float:
        m = self.measure if masses is None else masses
        idx = _as_index(points, self.n)
        return float(m[idx].sum())


@dataclass(frozen=True)
class Ball:
    center: int
    radius: float
    members: frozenset

    def __contains__(self, point) -> bool:
        return int(point) in self.members

    def __len__(self) -> int:
        return len(self.members)

    def indices(self) -> np.ndarray:
        return np.array(sorted(self.members), dtype=int)

    def to_dict(self) -> dict:
        return {"center": self.center, "radius": self.radius, "members": sorted(self.members)}


@dataclass
class BallFamily:
    balls: list
    dedup: bool = True

    def __len__(self) -> int:
        return len(self.balls)

    def __iter__(self):
        return iter(self.balls)

    def member_sets(self) -> set:
        return {b.members for b in self.balls}


def _as_index(points, n: int) -> np.ndarray:
    a = np.asarray(points)
    if a.dtype == bool:
        if a.shape != (n,):
            raise IndexError("boolean point mask has the wrong length")
        return np.flatnonzero(a)
    if isinstance(points, (set, frozenset)):
        a = np.array(sorted(points), dtype=int)
    a = np.asarray(a, dtype=int).ravel()
    if a.size and (a.min() < 0 or a.max() >= n):
        raise IndexError("point index out of range")
    return a


def validate_metric(space, measure=None, triangle: bool = True) -> ValidationReport:
    """Check the metric measure space axioms.

    Accepts either a :class:`FiniteMetricMeasureSpace` or a raw distance
    matrix plus measure.  Returns a passing report, or the first violated
    axiom together with the witnessing indices.
    """
    if isinstance(space, FiniteMetricMeasureSpace):
        dist, measure = space.dist, space.measure
    else:
        dist = np.asarray(space, dtype=float)
        measure = np.ones(dist.shape[0]) if measure is None else np.asarray(measure, dtype=float)

    if dist.ndim != 2 or dist.shape[0] != dist.shape[1]:
        return ValidationReport(False, "shape", dist.shape)
    n = dist.shape[0]
    if n < 2:
        return ValidationReport(False, "size", (n,))
    if measure.shape != (n,):
        return ValidationReport(False, "measure_shape", measure.shape)
    if not np.all(np.isfinite(dist)):
        i, j = np.argwhere(~np.isfinite(dist))[0]
        return ValidationReport(False, "finite", (int(i), int(j)))
    bad = np.flatnonzero(np.diag(dist) != 0)
    if bad.size:
        return ValidationReport(False, "identity", (int(bad[0]), int(bad[0])))
    asym = np.argwhere(dist != dist.T)
    if asym.size:
        i, j = sorted(asym[0])
        return ValidationReport(False, "symmetry", (int(i), int(j)))
    off = ~np.eye(n, dtype=bool)
    nonpos = np.argwhere(off & ~(dist > 0))
    if nonpos.size:
        i, j = nonpos[0]
        return ValidationReport(False, "positivity", (int(i), int(j)))
    badm = np.flatnonzero(~(measure > 0) | ~np.isfinite(measure))
    if badm.size:
        return ValidationReport(False, "measure", (int(badm[0]),))
    for j in range(n if triangle else 0):
        # d(i, k) <= d(i, j) + d(j, k) for all i, k
        via = dist[:, j][:, None] + dist[j][None, :]
        viol = dist > via * (1 + TRIANGLE_RTOL)
        if viol.any():
            i, k = np.argwhere(viol)[0]
            return ValidationReport(False, "triangle", (int(i), int(j), int(k)))
    return ValidationReport(True)


def critical_radii(space: FiniteMetricMeasureSpace, center: int) -> np.ndarray:
    """Radii giving every distinct open ball at ``center``.

    The distinct positive distances from ``center`` plus one radius beyond
    the largest, where the ball is the whole space.
    """
    d = np.unique(space.dist[center])
    d = d[d > 0]
    return np.append(d, d[-1] + 1.0)


def enumerate_distinct_balls(space: FiniteMetricMeasureSpace) -> BallFamily:
    """All open balls of the space, one per distinct member set.

    Scans centers in index order and each center's balls by increasing
    radius; the first ball realizing a member set is kept.
    """
    seen = set()
    balls = []
    ends = space.ball_ends
    for c in range(space.n):
        for k in np.flatnonzero(ends[c]) + 1:
            ball = space.prefix_ball(c, int(k))
            if ball.members not in seen:
                seen.add(ball.members)
                balls.append(ball)
    return BallFamily(balls, dedup=True)


def doubling_scan(space: FiniteMetricMeasureSpace, masses: Optional[np.ndarray] = None):
    """Exact ``sup m(B(x, 2r)) / m(B(x, r))`` with its maximizing ball.

    The ratio is piecewise constant in ``r`` with jumps at distances ``D``
    (inner ball) and ``D / 2`` (outer ball), and the value on each interval
    ``(b_k, b_{k+1}]`` is attained at ``b_{k+1}``.  Beyond the largest
    distance both balls are the whole space and the ratio is 1.

    Returns
    -------
    value, center, radius
    """
    m = space.measure if masses is None else np.asarray(masses, dtype=float)
    best, best_c, best_r = 1.0, 0, float(space.sorted_dist[0, -1]) + 1.0
    for c in range(space.n):
        sd = space.sorted_dist[c]
        cm = np.cumsum(m[space.order[c]])
        d = np.unique(sd[1:])
        r = np.unique(np.concatenate([d, d / 2]))
        inner = cm[np.searchsorted(sd, r, side="left") - 1]
        outer = cm[np.searchsorted(sd, 2 * r, side="left") - 1]
        ratio = outer / inner
        k = int(np.argmax(ratio))
        if ratio[k] > best:
            best, best_c, best_r = float(ratio[k]), c, float(r[k])
    return best, best_c, best_r


def doubling_constant(space: FiniteMetricMeasureSpace, masses: Optional[np.ndarray] = None) -> float:
    """Doubling constant ``c_mu`` of the point masses (or of ``masses``)."""
    return doubling_scan(space, masses)[0]


# -- generators ---------------------------------------------------------------


def _measure(kind_or_values, n: int, rng: np.random.Generator) -> np.ndarray:
    if kind_or_values is None or (isinstance(kind_or_values, str) and kind_or_values == "uniform"):
        return np.ones(n)
    if isinstance(kind_or_values, str):
        if kind_or_values == "random":
            return np.exp(rng.normal(0.0, 1.0, n))
        raise ValueError(f"unknown measure kind {kind_or_values!r}")
    values = np.asarray(kind_or_values, dtype=float)
    if values.shape != (n,):
        raise ValueError(f"supplied measure must have length {n}")
    return values


def generate(kind: str, seed: int = 0, measure="uniform", **params) -> FiniteMetricMeasureSpace:
    """Build a standard test space.

    Kinds
    -----
    ``grid1d(n, a=0, b=n-1, cell_centered=False)``
        ``n`` equally spaced points on ``[a, b]``; with ``cell_centered`` the
        points are the midpoints of ``n`` equal cells, so a symmetric
        interval never puts a node at the origin.
    ``grid2d(nx, ny)``
        Integer lattice with Euclidean distance.
    ``random_euclidean(n, dim)``
        Uniform points in the unit cube.
    ``ultrametric(branching, depth)``
        Leaves of a complete tree; ``d = 2**(depth - common prefix)``.

    ``measure`` is ``"uniform"``, ``"random"`` (seeded log-normal) or an
    explicit vector.  Output is deterministic in ``seed``.
    """
    rng = np.random.default_rng(seed)
    if kind == "grid1d":
        n = int(params.pop("n"))
        a = float(params.pop("a", 0.0))
        b = float(params.pop("b", n - 1))
        centered = bool(params.pop("cell_centered", False))
        if n < 2 or not b > a:
            raise ValueError("grid1d needs n >= 2 and b > a")
        if centered:
            h = (b - a) / n
            x = a + (np.arange(n) + 0.5) * h
        else:
            h = (b - a) / (n - 1)
            x = a + np.arange(n) * h
        idx = np.arange(n)
        # |i - j| * h keeps distances translation invariant and exact for
        # dyadic spacings
        dist = np.abs(idx[:, None] - idx[None, :]) * h
        coords = x[:, None]
    elif kind == "grid2d":
        nx, ny = int(params.pop("nx")), int(params.pop("ny"))
        if nx < 1 or ny < 1 or nx * ny < 2:
            raise ValueError("grid2d needs at least two points")
        coords = np.array(list(itertools.product(range(nx), range(ny))), dtype=float)
        dist = squareform(pdist(coords))
    elif kind == "random_euclidean":
        n, dim = int(params.pop("n")), int(params.pop("dim", 2))
        if n < 2 or dim < 1:
            raise ValueError("random_euclidean needs n >= 2 and dim >= 1")
        coords = rng.random((n, dim))
        dist = squareform(pdist(coords))
    elif kind == "ultrametric":
        branching, depth = int(params.pop("branching")), int(params.pop("depth"))
        if branching < 2 or depth < 1:
            raise ValueError("ultrametric needs branching >= 2 and depth >= 1")
        digits = np.array(list(itertools.product(range(branching), repeat=depth)))
        n = len(digits)
        differ = digits[:, None, :] != digits[None, :, :]
        # first differing digit position; equal rows get depth
        first = np.where(differ.any(axis=2), differ.argmax(axis=2), depth)
        dist = np.where(first < depth, 2.0 ** (depth - first), 0.0)
        coords = None
    else:
        raise ValueError(f"unknown space kind {kind!r}")
    if params:
        raise ValueError(f"unexpected parameters for {kind}: {sorted(params)}")
    mu = _measure(measure, dist.shape[0], rng)
    return FiniteMetricMeasureSpace(dist, mu, coords=coords)


def from_points(points: Sequence, measure=None) -> FiniteMetricMeasureSpace:
    """Euclidean space on the given coordinates."""
    coords = np.asarray(points, dtype=float)
    if coords.ndim == 1:
        coords = coords[:, None]
    dist = squareform(pdist(coords))
    mu = np.ones(len(coords)) if measure is None else measure
    return FiniteMetricMeasureSpace(dist, mu, coords=coords)
