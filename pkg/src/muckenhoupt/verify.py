"""Inequality suites over a seeded corpus of spaces, weights and functions.

Each suite returns a list of :class:`Check` records, one per asserted
inequality or identity, with the measured slack.  ``run_suite("all")`` is
what the ``verify all`` command executes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import oracle
from .maxop import lerner_pointwise_check, maximal
from .selfimprove import layer_cake_identity_check
from .space import doubling_constant, enumerate_distinct_balls, generate, validate_metric
from .weights import (
    ap_constant,
    conjugate,
    dual_weight,
    lognormal_weight,
    weight_doubling_check,
    weighted_holder_check,
)
from .whitney import check_truncation_bounds, truncate

__all__ = ["Check", "standard_corpus", "random_space", "run_suite", "fixture_checks", "SUITES"]


@dataclass
class Check:
    suite: str
    case: str
    ok: bool
    slack: float
    detail: str = ""


def standard_corpus(max_n: int = 128, seed: int = 0) -> list:
    """Named spaces with at most ``max_n`` points covering every generator."""
    specs = [
        ("grid1d-8", "grid1d", dict(n=8)),
        ("grid1d-16", "grid1d", dict(n=16)),
        ("grid1d-64", "grid1d", dict(n=64)),
        ("grid1d-128", "grid1d", dict(n=128)),
        ("grid1d-centered-32", "grid1d", dict(n=32, a=-1, b=1, cell_centered=True)),
        ("grid2d-4x4", "grid2d", dict(nx=4, ny=4)),
        ("grid2d-8x8", "grid2d", dict(nx=8, ny=8)),
        ("grid2d-5x7-random-mu", "grid2d", dict(nx=5, ny=7, measure="random")),
        ("random-16-1d", "random_euclidean", dict(n=16, dim=1)),
        ("random-32-2d", "random_euclidean", dict(n=32, dim=2)),
        ("random-64-3d-random-mu", "random_euclidean", dict(n=64, dim=3, measure="random")),
        ("random-128-2d", "random_euclidean", dict(n=128, dim=2)),
        ("ultra-2-3", "ultrametric", dict(branching=2, depth=3)),
        ("ultra-3-3", "ultrametric", dict(branching=3, depth=3)),
        ("ultra-2-6-random-mu", "ultrametric", dict(branching=2, depth=6, measure="random")),
        ("ultra-2-7", "ultrametric", dict(branching=2, depth=7)),
    ]
    out = []
    for i, (name, kind, params) in enumerate(specs):
        space = generate(kind, seed=seed + i, **params)
        if space.n <= max_n:
            out.append((name, space))
    return out


def random_space(rng: np.random.Generator, max_n: int = 64):
    """One seeded space drawn from the generator kinds (random measure)."""
    kind = rng.integers(4)
    seed = int(rng.integers(2**31))
    if kind == 0:
        return generate("grid1d", n=int(rng.integers(2, max_n + 1)), seed=seed, measure="random")
    if kind == 1:
        side = int(rng.integers(2, int(np.sqrt(max_n)) + 1))
        return generate("grid2d", nx=side, ny=side, seed=seed, measure="random")
    if kind == 2:
        return generate("random_euclidean", n=int(rng.integers(2, max_n + 1)),
                        dim=int(rng.integers(1, 4)), seed=seed, measure="random")
    depth = int(rng.integers(1, 7))
    return generate("ultrametric", branching=2, depth=depth, seed=seed, measure="random")


def _cases(seed: int, trials: int, max_n: int):
    rng = np.random.default_rng(seed)
    for i in range(trials):
        space = random_space(rng, max_n)
        w = lognormal_weight(space.n, seed=int(rng.integers(2**31)))
        f = rng.random(space.n)
        yield i, space, w, f, rng


def suite_metric(seed=0, trials=0, max_n=128):
    return [Check("metric", name, bool(validate_metric(s)), 0.0) for name, s in standard_corpus(max_n, seed)]


def suite_duality(seed=0, trials=50, max_n=64):
    checks = []
    for i, space, w, _, _ in _cases(seed, trials, max_n):
        for p in (1.5, 2.0, 3.0):
            a = ap_constant(space, w, p).constant ** (1 / (p - 1))
            b = ap_constant(space, dual_weight(w, p), conjugate(p)).constant
            rel = abs(a - b) / a
            checks.append(Check("duality", f"case{i}-p{p}", rel <= 1e-9, 1e-9 - rel))
    return checks


def suite_holder(seed=0, trials=100, max_n=64):
    checks = []
    for i, space, w, f, rng in _cases(seed, trials, max_n):
        p = float(rng.choice([1.5, 2.0, 3.0]))
        ap = ap_constant(space, w, p).constant
        balls = enumerate_distinct_balls(space).balls
        ball = balls[int(rng.integers(len(balls)))]
        h = weighted_holder_check(space, w, p, ball, f, constant=ap)
        checks.append(Check("holder", f"case{i}-p{p}", h.ok, h.slack / h.rhs))
        d = weight_doubling_check(space, w, p)
        checks.append(Check("doubling", f"case{i}-p{p}", d.ok, 1 - d.c_w_measured / d.bound))
    return checks


def suite_lerner(seed=0, trials=20, max_n=64):
    checks = []
    for i, space, w, f, rng in _cases(seed, trials, max_n):
        p = float(rng.choice([1.5, 2.0, 3.0]))
        r = lerner_pointwise_check(space, w, p, f)
        checks.append(Check("lerner", f"case{i}-p{p}", r.ok, r.min_relative_slack))
    return checks


def suite_whitney(seed=0, trials=10, max_n=64):
    checks = []
    rng = np.random.default_rng(seed)
    spaces = [("grid1d-64", generate("grid1d", n=64)), ("grid2d-8x8", generate("grid2d", nx=8, ny=8))]
    for name, space in spaces:
        c_mu = doubling_constant(space)
        for j in range(trials):
            f = rng.random(space.n) * (rng.random(space.n) < 0.5)
            if not f.any():
                f[0] = 1.0
            Mf = maximal(space, f)
            for qtl in (0.5, 0.7, 0.9):
                t = float(np.quantile(Mf, qtl))
                if (Mf > t).all():
                    continue
                res = truncate(space, f, t, Mf)
                chk = check_truncation_bounds(space, f, t, res, c_mu=c_mu)
                checks.append(Check("whitney", f"{name}-f{j}-q{qtl}", chk.ok,
                                    1 - max(chk.worst_on_level_ratio, chk.worst_domination_ratio)))
                if res.cover is not None:
                    cov = res.cover
                    r8 = space.dist[cov.centers][:, ~res.level_set].min(axis=1) / 8
                    structural = (np.array_equal(r8, cov.radii)
                                  and np.array_equal(cov.membership.any(axis=0), res.level_set))
                    checks.append(Check("whitney-cover", f"{name}-f{j}-q{qtl}", bool(structural), 0.0,
                                        f"overlap={cov.overlap_max}"))
    return checks


def suite_layercake(seed=0, trials=20, max_n=64):
    checks = []
    for i, space, w, f, rng in _cases(seed, trials, max_n):
        p = float(rng.choice([1.5, 2.0, 3.0]))
        eps = float(rng.uniform(0.05, 0.9) * (p - 1))
        Mf = maximal(space, f)
        t0 = float(rng.uniform(0.2, 1.2) * np.median(Mf))
        r = layer_cake_identity_check(space, w, f, eps, t0, p, Mf)
        checks.append(Check("layercake", f"case{i}", r.residual <= 1e-9 and r.chain_ok, 1e-9 - r.residual))
    return checks


def suite_oracle(seed=0, trials=5, max_n=128):
    checks = []
    rng = np.random.default_rng(seed)
    for name, space in standard_corpus(max_n, seed):
        w = lognormal_weight(space.n, seed=int(rng.integers(2**31)))
        a, b = ap_constant(space, w, 2.0).constant, oracle.ap_constant_oracle(space, w, 2.0)
        checks.append(Check("oracle-ap", name, abs(a - b) <= 1e-12 * b, 0.0))
        a, b = doubling_constant(space), oracle.doubling_oracle(space, include_breakpoints=True)
        checks.append(Check("oracle-doubling", name, abs(a - b) <= 1e-12 * b, 0.0))
        for j in range(trials):
            f = rng.normal(size=space.n)
            a, b = maximal(space, f), oracle.maximal_oracle(space, f)
            err = float(np.max(np.abs(a - b) / np.abs(b)))
            checks.append(Check("oracle-maximal", f"{name}-f{j}", err <= 1e-12, 1e-12 - err))
    return checks


SUITES = {
    "metric": suite_metric,
    "duality": suite_duality,
    "holder": suite_holder,
    "lerner": suite_lerner,
    "whitney": suite_whitney,
    "layercake": suite_layercake,
    "oracle": suite_oracle,
}


def run_suite(name: str, seed: int = 0) -> list:
    if name == "all":
        return [c for key in SUITES for c in SUITES[key](seed=seed)]
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES) + ['all']}")
    return SUITES[name](seed=seed)


def fixture_checks(space, w, p: float, suite: str = "all", seed: int = 0) -> list:
    """Run the suites on one given space and weight instead of the corpus."""
    rng = np.random.default_rng(seed)
    f = rng.random(space.n)
    checks = []
    want = (lambda s: suite in ("all", s))
    if want("metric"):
        checks.append(Check("metric", "fixture", bool(validate_metric(space)), 0.0))
    if want("duality"):
        a = ap_constant(space, w, p).constant ** (1 / (p - 1))
        b = ap_constant(space, dual_weight(w, p), conjugate(p)).constant
        rel = abs(a - b) / a
        checks.append(Check("duality", "fixture", rel <= 1e-9, 1e-9 - rel))
    if want("holder"):
        ap = ap_constant(space, w, p).constant
        for k, ball in enumerate(enumerate_distinct_balls(space)):
            h = weighted_holder_check(space, w, p, ball, f, constant=ap)
            checks.append(Check("holder", f"ball{k}", h.ok, h.slack / h.rhs))
        d = weight_doubling_check(space, w, p)
        checks.append(Check("doubling", "fixture", d.ok, 1 - d.c_w_measured / d.bound))
    if want("lerner"):
        r = lerner_pointwise_check(space, w, p, f)
        checks.append(Check("lerner", "fixture", r.ok, r.min_relative_slack))
    if want("layercake"):
        Mf = maximal(space, f)
        r = layer_cake_identity_check(space, w, f, 0.5 * (p - 1), float(np.median(Mf)), p, Mf)
        checks.append(Check("layercake", "fixture", r.residual <= 1e-9 and r.chain_ok, 1e-9 - r.residual))
    if want("whitney"):
        Mf = maximal(space, f)
        for qtl in (0.5, 0.7, 0.9):
            t = float(np.quantile(Mf, qtl))
            if (Mf > t).all():
                continue
            res = truncate(space, f, t, Mf)
            chk = check_truncation_bounds(space, f, t, res)
            checks.append(Check("whitney", f"q{qtl}", chk.ok, 1 - max(chk.worst_on_level_ratio, chk.worst_domination_ratio)))
    if want("oracle"):
        a, b = ap_constant(space, w, p).constant, oracle.ap_constant_oracle(space, w, p)
        checks.append(Check("oracle-ap", "fixture", abs(a - b) <= 1e-12 * b, 0.0))
        a, b = maximal(space, f), oracle.maximal_oracle(space, f)
        err = float(np.max(np.abs(a - b) / np.abs(b)))
        checks.append(Check("oracle-maximal", "fixture", err <= 1e-12, 1e-12 - err))
    return checks
