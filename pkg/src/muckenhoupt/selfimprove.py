"""Lowering the exponent of a weighted maximal inequality.

Given ``int (Mf)^p w <= C1 int f^p w``, the truncation ``f_t`` yields for every
threshold ``t`` with ``E_t != X``

    int_{X \\ E_t} (Mf)^p w  <=  C2 * ( int_{X \\ E_t} f^p w + t^p w(E_t) ),

and integrating against ``t^(-1-eps) dt`` over ``[t0, inf)`` turns this into
an inequality whose last term can be absorbed once ``C2 eps / (p - eps) <= 1/2``.
Letting ``t0 -> 0`` gives the inequality at exponent ``p - eps`` with
constant ``2 C2``.

On a finite space every step is a finite sum.  ``C2`` is measured as the
largest ratio of the two sides above, and the absorption and limit steps
are checked literally.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .maxop import _field, lerner_pointwise_check, maximal, norm_ratio
from .space import FiniteMetricMeasureSpace, doubling_constant
from .weights import _check_p, ap_constant, ap_functional_matrix, as_weight, witness_function
from .whitney import check_truncation_bounds, truncate

__all__ = [
    "SelfImprovementConfig",
    "SelfImprovementReport",
    "SelfImprovementFailure",
    "LayerCakeReport",
    "AbsorptionReport",
    "estar_constant",
    "estar_profile",
    "layer_cake_identity_check",
    "absorption_check",
    "epsilon_from_constants",
    "standard_family",
    "threshold_quantiles",
    "self_improve",
    "epsilon_search",
]

log = logging.getLogger(__name__)


# -- the truncated inequality ---------------------------------------------------


def _estar_sides(Mf, f, wmu, p, t, E):
    off = ~E
    lhs = float((Mf[off] ** p * wmu[off]).sum())
    rhs = float((f[off] ** p * wmu[off]).sum() + t ** p * wmu[E].sum())
    return lhs, rhs


def estar_constant(space: FiniteMetricMeasureSpace, w, p: float, f, t: float) -> float:
    """Smallest ``C`` in the truncated inequality at threshold ``t``.

    Builds ``E_t`` and ``f_t`` through :func:`truncate`; returns 0 when both
    sides vanish (``f = 0``).
    """
    p = _check_p(p)
    w = as_weight(w, space.n)
    res = truncate(space, f, t)
    lhs, rhs = _estar_sides(res.Mf, np.asarray(f, dtype=float), w * space.measure, p, t, res.level_set)
    if rhs == 0.0:
        return 0.0
    return lhs / rhs


def estar_profile(space, w, p: float, f, Mf: Optional[np.ndarray] = None):
    """Truncated-inequality ratio at every threshold where it can peak.

    ``E_t`` only changes at values of ``Mf``, and on ``[v_k, v_{k+1})`` the
    left side is constant while the right side grows with ``t``; the
    supremum over all admissible ``t`` is the maximum over ``t = v_k``.

    Returns
    -------
    thresholds, ratios : ndarray
    """
    p = _check_p(p)
    w = as_weight(w, space.n)
    f = _field(f, space.n)
    if Mf is None:
        Mf = maximal(space, f)
    wmu = w * space.measure
    order = np.argsort(Mf, kind="stable")
    sMf = Mf[order]
    lhs_cum = np.cumsum(sMf ** p * wmu[order])
    f_cum = np.cumsum(f[order] ** p * wmu[order])
    w_cum = np.cumsum(wmu[order])
    ts = np.unique(sMf)
    ts = ts[ts > 0]
    k = np.searchsorted(sMf, ts, side="right") - 1
    lhs = lhs_cum[k]
    rhs = f_cum[k] + ts ** p * (w_cum[-1] - w_cum[k])
    ratios = np.divide(lhs, rhs, out=np.zeros_like(lhs), where=rhs > 0)
    return ts, ratios


# -- layer cake -------------------------------------------------------------------


@dataclass
class LayerCakeReport:
    """Relative residuals of the three exact t-integral identities."""

    eps: float
    t0: float
    maximal_residual: float
    function_residual: float
    level_residual: float
    maximal_side: float
    function_side: float
    level_side: float
    function_bound: float
    level_bound: float
    chain_ok: bool

    @property
    def residual(self) -> float:
        return max(self.maximal_residual, self.function_residual, self.level_residual)


def _rel(a: float, b: float) -> float:
    if a == b:
        return 0.0
    return abs(a - b) / max(abs(a), abs(b))


def layer_cake_identity_check(space, w, f, eps: float, t0: float, p: float,
                              Mf: Optional[np.ndarray] = None) -> LayerCakeReport:
    """Integrate the level-set quantities in ``t`` piece by piece.

    ``E_t = {Mf > t}`` is constant between consecutive values of ``Mf``, so
    each t-integral is a finite sum of power-function integrals.  The
    results are compared with the pointwise forms

        int_{t0}^inf t^(-1-eps) int_{Mf <= t} g w dt = (1/eps) int g max(t0, Mf)^(-eps) w
        int_{t0}^inf t^(p-1-eps) w(E_t) dt = int_{E_t0} (Mf^(p-eps) - t0^(p-eps)) / (p - eps) w

    for ``g = (Mf)^p`` and ``g = f^p``.  ``chain_ok`` covers the two
    inequalities that follow these identities in the absorption argument.
    """
    p = float(p)
    eps, t0 = float(eps), float(t0)
    if not eps > 0 or not t0 > 0:
        raise ValueError("eps and t0 must be positive")
    if not eps < p:
        raise ValueError("eps must be below p")
    w = as_weight(w, space.n)
    f = _field(f, space.n)
    if Mf is None:
        Mf = maximal(space, f)
    wmu = w * space.measure
    gM = Mf ** p * wmu
    gf = np.abs(f) ** p * wmu

    # left endpoints of the pieces [a_k, a_{k+1}); last piece is unbounded
    a = np.concatenate([[t0], np.unique(Mf[Mf > t0])])
    b = np.append(a[1:], np.inf)
    below = Mf[None, :] <= a[:, None]
    pieces_minus = (a ** -eps - b ** -eps) / eps
    s = p - eps
    pieces_level = (b ** s - a ** s) / s
    pieces_level[-1] = 0.0  # w(E_t) = 0 beyond max Mf
    lhs_M = float((below @ gM) @ pieces_minus)
    lhs_f = float((below @ gf) @ pieces_minus)
    lhs_E = float(((~below) @ wmu)[:-1] @ pieces_level[:-1])

    cap = np.maximum(t0, Mf) ** -eps
    rhs_M = float((gM * cap).sum() / eps)
    rhs_f = float((gf * cap).sum() / eps)
    E0 = Mf > t0
    rhs_E = float(((Mf[E0] ** s - t0 ** s) * wmu[E0]).sum() / s)

    f_bound = float((np.abs(f) ** s * wmu).sum() / eps)
    E_bound = float((Mf[E0] ** s * wmu[E0]).sum() / s)
    chain = (rhs_f <= f_bound * (1 + 1e-12) and rhs_E <= E_bound * (1 + 1e-12)
             and E_bound <= rhs_M * eps / s * (1 + 1e-12))
    return LayerCakeReport(eps, t0, _rel(lhs_M, rhs_M), _rel(lhs_f, rhs_f), _rel(lhs_E, rhs_E),
                           rhs_M, rhs_f, rhs_E, f_bound, E_bound, bool(chain))


# -- absorption -----------------------------------------------------------------


def epsilon_from_constants(C2: float, p: float, safety: float = 0.9) -> float:
    """Exponent drop with ``C2 * eps / (p - eps) <= 1/2``.

    ``eps = safety * min(p - 1, p / (1 + 2 C2))``.
    """
    p = _check_p(p)
    if not C2 > 0:
        raise ValueError("C2 must be positive")
    if not 0 < safety <= 1:
        raise ValueError("safety must lie in (0, 1]")
    return safety * min(p - 1.0, p / (1.0 + 2.0 * C2))


@dataclass
class AbsorptionReport:
    t0: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    limit: float
    ok: bool
    monotone: bool
    reaches_limit: bool


def absorption_check(space, w, p: float, f, eps: float, C2: float, t0_grid: Sequence[float],
                     Mf: Optional[np.ndarray] = None, rtol: float = 1e-9) -> AbsorptionReport:
    """Check the pre-absorption inequality at each ``t0`` and the ``t0 -> 0`` limit.

    With ``L(t0) = int (Mf)^p max(t0, Mf)^(-eps) w``:

        L(t0) <= C2 int f^(p-eps) w + C2 eps / (p - eps) L(t0),

    ``L`` is nonincreasing in ``t0`` and equals ``int (Mf)^(p-eps) w`` once
    ``t0 <= min Mf``.  ``t0_grid`` is traversed in decreasing order.
    """
    w = as_weight(w, space.n)
    f = _field(f, space.n)
    if Mf is None:
        Mf = maximal(space, f)
    wmu = w * space.measure
    t0 = np.sort(np.asarray(t0_grid, dtype=float))[::-1]
    s = p - eps
    F = float((np.abs(f) ** s * wmu).sum())
    L = np.array([(Mf ** p * np.maximum(t, Mf) ** -eps * wmu).sum() for t in t0])
    rhs = C2 * F + C2 * eps / s * L
    limit = float((Mf ** s * wmu).sum())
    ok = bool(np.all(L <= rhs * (1 + rtol)))
    monotone = bool(np.all(np.diff(L) >= -rtol * L[1:]))
    reaches = bool(t0[-1] > Mf.min() or abs(L[-1] - limit) <= rtol * limit)
    return AbsorptionReport(t0, L, rhs, limit, ok, monotone, reaches)


# -- test families ------------------------------------------------------------------


def standard_family(space: FiniteMetricMeasureSpace, w, p: float, seed: int = 0, n_random: int = 16,
                    n_centers: int = 8, n_radii: int = 4, witness_eps: float = 1e-6):
    """Nonnegative test functions used by the pipeline.

    Indicators of ``n_centers x n_radii`` balls (centers evenly spread over
    the index range, radii spread over the critical radii), the A_p witness
    functions ``(eps + w)^(1/(1-p)) 1_B`` on the same balls plus the ball
    attaining ``[w]_{A_p}``, seeded uniform random fields, and Gaussian
    bumps when the space has coordinates.

    Returns
    -------
    functions : list of ndarray
    labels : list of str
    """
    w = as_weight(w, space.n)
    rng = np.random.default_rng(seed)
    funcs, labels = [], []
    balls = []
    centers = np.unique(np.linspace(0, space.n - 1, min(n_centers, space.n)).round().astype(int))
    for c in centers:
        ends = np.flatnonzero(space.ball_ends[c]) + 1
        picks = np.unique(np.linspace(0, len(ends) - 1, min(n_radii, len(ends))).round().astype(int))
        for k in ends[picks]:
            balls.append(space.prefix_ball(int(c), int(k)))
    balls.append(ap_constant(space, w, p).witness)
    seen = set()
    eps = witness_eps * float(w.min())
    for b in balls:
        if b.members in seen:
            continue
        seen.add(b.members)
        ind = np.zeros(space.n)
        ind[b.indices()] = 1.0
        funcs.append(ind)
        labels.append(f"ball(c={b.center},r={b.radius:g})")
        funcs.append(witness_function(space, w, p, b, eps))
        labels.append(f"witness(c={b.center},r={b.radius:g})")
    for i in range(n_random):
        funcs.append(rng.random(space.n))
        labels.append(f"random[{i}]")
    if space.coords is not None:
        x = space.coords
        span = float(np.ptp(x, axis=0).max()) or 1.0
        for i in range(4):
            c = x[rng.integers(space.n)]
            width = span * (0.02 + 0.1 * rng.random())
            funcs.append(np.exp(-((x - c) ** 2).sum(axis=1) / (2 * width ** 2)))
            labels.append(f"bump[{i}]")
    return funcs, labels


def threshold_quantiles(Mf: np.ndarray, k: int = 9) -> np.ndarray:
    """``k`` interior quantiles of ``Mf``, kept at or above ``min Mf`` so ``E_t != X``."""
    qs = np.quantile(Mf, np.arange(1, k + 1) / (k + 1))
    qs = np.unique(np.maximum(qs, Mf.min()))
    return qs[qs > 0]


# -- pipeline ---------------------------------------------------------------------


@dataclass
class SelfImprovementConfig:
    """Pipeline parameters.

    ``t_grid`` selects the thresholds for ``C2``: ``None`` uses every value
    of ``Mf`` (the exact supremum over ``t``), an int ``k`` uses ``k``
    quantiles, and a sequence is used as given.  ``check_quantiles``
    thresholds per function are used for the truncation-bound diagnostics,
    and ``t0_fractions`` (times ``max Mf``) for the absorption checks.
    """

    p: float = 2.0
    t_grid: Union[None, int, Sequence[float]] = None
    t0_fractions: Sequence[float] = tuple(2.0 ** -np.arange(-1, 16))
    family: Optional[list] = None
    family_labels: Optional[list] = None
    safety: float = 0.9
    check_quantiles: int = 9
    seed: int = 0
    n_random: int = 16
    check_truncation: bool = True
    check_lerner: bool = True

    def __post_init__(self):
        _check_p(self.p)
        if not 0 < self.safety <= 1:
            raise ValueError("safety must lie in (0, 1]")
        if any(not t > 0 for t in self.t0_fractions):
            raise ValueError("t0 values must be positive")


class SelfImprovementFailure(RuntimeError):
    def __init__(self, message: str, report: "SelfImprovementReport", witness: np.ndarray):
        super().__init__(message)
        self.report = report
        self.witness = witness


@dataclass
class SelfImprovementReport:
    p: float
    C1: float
    C2: float
    N: int
    c_mu: float
    epsilon: float
    final_constant: float
    ap_p: float
    ap_p_minus_eps: float
    ratios: np.ndarray = field(repr=False)
    per_function: list = field(repr=False, default_factory=list)
    absorption_ok: bool = True
    limit_ok: bool = True
    improved_ok: bool = True
    truncation_ok: Optional[bool] = None
    lerner_ok: Optional[bool] = None
    roundtrip: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def q(self) -> float:
        return self.p - self.epsilon

    @property
    def ok(self) -> bool:
        flags = [self.absorption_ok, self.limit_ok, self.improved_ok, self.truncation_ok, self.lerner_ok]
        return all(f is not False for f in flags)

    def to_dict(self) -> dict:
        d = {k: v for k, v in asdict(self).items() if k != "ratios"}
        d["ratios"] = np.asarray(self.ratios).tolist()
        d["q"] = self.q
        d["ok"] = self.ok
        return d


def _quantile_grid(Mf, t_grid):
    if t_grid is None:
        return None
    if isinstance(t_grid, (int, np.integer)):
        return threshold_quantiles(Mf, int(t_grid))
    t = np.asarray(t_grid, dtype=float)
    return t[(t >= Mf.min()) & (t > 0)]


def _class_steps(space, w, q, family, report, config, wmu, final):
    ap_q = ap_constant(space, w, q)
    report.ap_p_minus_eps = ap_q.constant
    if config.check_lerner:
        report.lerner_ok = all(lerner_pointwise_check(space, w, q, f).ok for f in family)

    # witness argument at the lowered exponent, on the ball attaining [w]_{A_q}
    ball = ap_q.witness
    we = 1e-9 * float(w.min())
    g = witness_function(space, w, q, ball, we)
    Mg = maximal(space, g)
    R = float((Mg ** q * wmu).sum() / (g ** q * wmu).sum())
    L = float(ap_functional_matrix(space, w, q, v=we + w)[ball.center, len(ball) - 1])
    report.roundtrip = {"ball": ball.to_dict(), "lower": L, "ratio": R,
                        "lower_le_ratio": bool(L <= R * (1 + 1e-9)), "ratio_le_final": bool(R <= final * (1 + 1e-9))}
    if report.ap_p_minus_eps > final:
        report.notes.append("[w]_{A_(p-eps)} exceeds 2*C2: the family does not certify the lowered class bound")


def self_improve(space: FiniteMetricMeasureSpace, w, config: Optional[SelfImprovementConfig] = None,
                 raise_on_failure: bool = True) -> SelfImprovementReport:
    """Run the exponent-lowering argument on a finite space.

    1. ``C1``: largest ``int (Mf)^p w / int f^p w`` over the family.
    2. ``C2``: largest truncated-inequality ratio over family and thresholds.
    3. ``eps`` from :func:`epsilon_from_constants`.
    4. ``int (Mf)^(p-eps) w <= 2 C2 int f^(p-eps) w`` for every member, plus
       the literal absorption and ``t0 -> 0`` checks.
    5. ``[w]_{A_p}`` and ``[w]_{A_(p-eps)}``.

    Raises :class:`SelfImprovementFailure` (with the offending function) if a
    member violates step 4, unless ``raise_on_failure`` is false.
    """
    config = config or SelfImprovementConfig()
    p = _check_p(config.p)
    w = as_weight(w, space.n)
    if config.family is None:
        family, labels = standard_family(space, w, p, seed=config.seed, n_random=config.n_random)
    else:
        family = [np.asarray(f, dtype=float) for f in config.family]
        labels = config.family_labels or [f"f[{i}]" for i in range(len(family))]
    for f in family:
        if np.any(_field(f, space.n) < 0):
            raise ValueError("family members must be nonnegative")
    keep = [i for i, f in enumerate(family) if np.any(f)]
    if not keep:
        raise ValueError("function family has no nonzero member")
    family = [family[i] for i in keep]
    labels = [labels[i] for i in keep]
    wmu = w * space.measure
    maximals = [maximal(space, f) for f in family]

    # 1
    C1 = norm_ratio(space, w, p, family, maximals).integral_constant
    # 2
    c2_per = []
    for f, Mf in zip(family, maximals):
        grid = _quantile_grid(Mf, config.t_grid)
        if grid is None:
            _, ratios = estar_profile(space, w, p, f, Mf)
            c2_per.append(float(ratios.max()))
        else:
            sides = [_estar_sides(Mf, f, wmu, p, t, Mf > t) for t in grid]
            c2_per.append(max((lhs / rhs if rhs > 0 else 0.0) for lhs, rhs in sides))
    C2 = max(c2_per)
    # 3
    eps = epsilon_from_constants(C2, p, config.safety)
    q = p - eps
    final = 2.0 * C2

    c_mu = doubling_constant(space)
    report = SelfImprovementReport(p, C1, C2, 0, c_mu, eps, final, 0.0, 0.0, np.array([]))

    # 4
    ratios_q = norm_ratio(space, w, q, family, maximals)
    report.ratios = ratios_q.ratios
    absorption_ok = limit_ok = improved_ok = True
    failure = None
    for label, f, Mf, c2f, rq in zip(labels, family, maximals, c2_per, ratios_q.ratios):
        lhs = float((Mf ** q * wmu).sum())
        rhs = float((f ** q * wmu).sum())
        improved = lhs <= final * rhs * (1 + 1e-9)
        ab = absorption_check(space, w, p, f, eps, C2, np.asarray(config.t0_fractions) * Mf.max(), Mf)
        absorption_ok &= ab.ok
        limit_ok &= ab.monotone and ab.reaches_limit
        improved_ok &= improved
        report.per_function.append({
            "label": label, "C2": c2f, "integral_ratio_q": lhs / rhs, "norm_ratio_q": float(rq),
            "improved_ok": bool(improved), "absorption_ok": ab.ok,
        })
        if not improved and failure is None:
            failure = (label, f)
    report.absorption_ok, report.limit_ok, report.improved_ok = absorption_ok, limit_ok, improved_ok

    # truncation lemma diagnostics on the quantile thresholds
    if config.check_truncation:
        N, trunc_ok = 0, True
        for f, Mf in zip(family, maximals):
            for t in threshold_quantiles(Mf, config.check_quantiles):
                if not (Mf > t).all():
                    res = truncate(space, f, t, Mf)
                    chk = check_truncation_bounds(space, f, t, res, c_mu=c_mu)
                    trunc_ok &= chk.ok
                    N = max(N, chk.overlap)
        report.N, report.truncation_ok = N, trunc_ok

    # 5
    report.ap_p = ap_constant(space, w, p).constant
    if q <= 1.0:
        # safety = 1 with a small C2 lowers the exponent all the way to 1
        report.ap_p_minus_eps = float("nan")
        report.notes.append("q = 1: A_q and the Lerner bound are not defined there; steps skipped")
    else:
        _class_steps(space, w, q, family, report, config, wmu, final)

    if failure is not None and raise_on_failure:
        raise SelfImprovementFailure(f"improved inequality fails for {failure[0]}", report, failure[1])
    return report


def epsilon_search(space, w, p: float, family: Sequence, budget: int = 20, cap: Optional[float] = None) -> float:
    """Largest exponent drop found by bisection on ``q`` in ``(1, p)``.

    ``q`` is feasible when ``sup_f int (Mf)^q w / int f^q w <= cap`` over the
    family.  ``cap`` defaults to ``2 C2`` of the family at ``p``.  Returns
    ``p - q`` for the smallest feasible ``q`` reached after ``budget`` steps.
    """
    p = _check_p(p)
    if budget < 8:
        raise ValueError("budget must allow at least 8 bisection steps")
    w = as_weight(w, space.n)
    family = [np.asarray(f, dtype=float) for f in family if np.any(f)]
    if not family:
        raise ValueError("function family has no nonzero member")
    maximals = [maximal(space, f) for f in family]
    if cap is None:
        cap = 2.0 * max(float(estar_profile(space, w, p, f, Mf)[1].max()) for f, Mf in zip(family, maximals))

    def feasible(q):
        return norm_ratio(space, w, q, family, maximals).integral_constant <= cap

    lo, hi = 1.0, p
    if not feasible(hi):
        return 0.0
    for _ in range(budget):
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return p - hi
