"""Batch command line front end.

Exit codes: 0 success, 1 a verified inequality failed, 2 usage or
configuration error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import io
from .maxop import maximal, maximal_weighted, norm_ratio
from .selfimprove import SelfImprovementConfig, SelfImprovementFailure, self_improve, standard_family
from .space import doubling_scan, generate
from .verify import SUITES, fixture_checks, run_suite
from .weights import ap_constant, ap_functional_matrix, lognormal_weight, power_weight
from .whitney import ThresholdTooLowError, truncate, whitney_cover

DEFAULT_SEED = 0


class UsageError(Exception):
    pass


def _emit(text: str, out) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _inputs(args) -> dict:
    hashes = {}
    for key in ("space", "weight", "function"):
        path = getattr(args, key, None)
        if path:
            hashes[key] = {"path": path, "sha256": io.file_hash(path)}
    return hashes


def _need(args, *names):
    for name in names:
        if getattr(args, name, None) is None:
            raise UsageError(f"--{name.replace('_', '-')} is required for this command")


def _space(args):
    _need(args, "space")
    return io.load_space(args.space)


def _weight(args, space):
    if args.weight is None:
        return np.ones(space.n)
    w = io.load_values(args.weight)
    if w.shape != (space.n,):
        raise UsageError("weight length does not match the space")
    return w


def _function(args, space):
    _need(args, "function")
    f = io.load_values(args.function)
    if f.shape != (space.n,):
        raise UsageError("function length does not match the space")
    return f


def _p(args) -> float:
    _need(args, "p")
    if not 1 < args.p < np.inf:
        raise UsageError("--p must satisfy 1 < p < inf")
    return args.p


# -- commands ------------------------------------------------------------------


def cmd_generate(args) -> int:
    kind = args.kind
    if kind in ("power-weight", "lognormal-weight", "random-function"):
        space = _space(args)
        if kind == "power-weight":
            _need(args, "alpha")
            values = power_weight(space, args.alpha)
        elif kind == "lognormal-weight":
            values = lognormal_weight(space.n, seed=args.seed, sigma=args.sigma)
        else:
            values = np.random.default_rng(args.seed).random(space.n)
        _emit(io.dumps_report({"values": values}), args.out)
        return 0
    params = {}
    if kind == "grid1d":
        _need(args, "n")
        params = dict(n=args.n, cell_centered=args.cell_centered)
        if args.a is not None:
            params["a"] = args.a
        if args.b is not None:
            params["b"] = args.b
    elif kind == "grid2d":
        _need(args, "nx", "ny")
        params = dict(nx=args.nx, ny=args.ny)
    elif kind == "random_euclidean":
        _need(args, "n")
        params = dict(n=args.n, dim=args.dim)
    elif kind == "ultrametric":
        _need(args, "branching", "depth")
        params = dict(branching=args.branching, depth=args.depth)
    try:
        space = generate(kind, seed=args.seed, measure=args.measure, **params)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _emit(io.dumps_report(io.space_to_dict(space)), args.out)
    return 0


def cmd_compute(args) -> int:
    space = _space(args)
    report = {"command": f"compute {args.what}", "inputs": _inputs(args), "seed": args.seed}
    rows = None
    if args.what == "ap":
        p = _p(args)
        w = _weight(args, space)
        res = ap_constant(space, w, p)
        report.update(res.to_dict())
        if args.eps is not None:
            if not args.eps > 0:
                raise UsageError("--eps must be positive")
            report["shifted_constant"] = {"eps": args.eps,
                                          "value": float(np.nanmax(ap_functional_matrix(space, w, p, v=args.eps + w)))}
        rows = [{"p": p, "constant": res.constant, "witness_center": res.witness.center,
                 "witness_radius": res.witness.radius}]
    elif args.what == "doubling":
        w = _weight(args, space)
        value, c, r = doubling_scan(space, w * space.measure)
        report.update(doubling_constant=value, witness={"center": c, "radius": r})
        rows = [{"doubling_constant": value, "center": c, "radius": r}]
    elif args.what == "maximal":
        f = _function(args, space)
        Mf = maximal(space, f) if args.weight is None else maximal_weighted(space, _weight(args, space), f)
        report["values"] = Mf
        rows = [{"point": i, "f": a, "Mf": b} for i, (a, b) in enumerate(zip(f.tolist(), Mf.tolist()))]
    elif args.what in ("whitney", "truncate"):
        f = _function(args, space)
        _need(args, "t")
        try:
            res = truncate(space, f, args.t)
        except ThresholdTooLowError as exc:
            raise UsageError(f"E_t = X: {exc}") from exc
        if args.what == "whitney":
            if res.cover is None:
                raise UsageError("E_t is empty; there is nothing to cover")
            cover = whitney_cover(space, res.level_set)
            report.update(t=args.t, **cover.to_dict())
            rows = [dict(b.to_dict(), greedy=bool(g), members=" ".join(map(str, sorted(b.members))))
                    for b, g in zip(cover.balls, cover.greedy)]
        else:
            report.update(res.to_dict())
            rows = [{"point": i, "f": a, "f_t": b, "in_level_set": bool(e)}
                    for i, (a, b, e) in enumerate(zip(f.tolist(), res.f_t.tolist(), res.level_set.tolist()))]
    _emit(io.dumps_report(report, args.format, rows), args.out)
    return 0


def cmd_verify(args) -> int:
    if args.p is not None and not 1 < args.p < np.inf:
        raise UsageError("--p must satisfy 1 < p < inf")
    if args.space:
        space = _space(args)
        w = _weight(args, space)
        p = 2.0 if args.p is None else args.p
        checks = fixture_checks(space, w, p, suite=args.suite, seed=args.seed)
    else:
        checks = run_suite(args.suite, seed=args.seed)
    failed = [c for c in checks if not c.ok]
    report = {"command": f"verify {args.suite}", "inputs": _inputs(args), "seed": args.seed, "passed": len(checks) - len(failed),
              "failed": len(failed), "checks": checks}
    rows = [{"suite": c.suite, "case": c.case, "ok": c.ok, "slack": c.slack, "detail": c.detail} for c in checks]
    _emit(io.dumps_report(report, args.format, rows), args.out)
    return 1 if failed else 0


def cmd_selfimprove(args) -> int:
    space = _space(args)
    w = _weight(args, space)
    p = _p(args)
    config = SelfImprovementConfig(p=p, seed=args.seed, t_grid=args.t_grid, safety=args.safety)
    code = 0
    try:
        report = self_improve(space, w, config)
    except SelfImprovementFailure as exc:
        report, code = exc.report, 1
        report.notes.append("witness function: " + " ".join(f"{v:.17g}" for v in exc.witness))
    out = dict(report.to_dict(), inputs=_inputs(args), seed=args.seed)
    rows = None
    if args.format == "csv":
        family, _ = standard_family(space, w, p, seed=args.seed)
        qs = np.unique(np.append(np.linspace(1 + (p - 1) / 10, p, 10), report.q))
        rows = [{"q": q, "sup_ratio": norm_ratio(space, w, q, family).sup_ratio} for q in qs]
    _emit(io.dumps_report(out, args.format, rows), args.out)
    return code


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--space")
    common.add_argument("--weight")
    common.add_argument("--function")
    common.add_argument("--p", type=float)
    common.add_argument("--t", type=float)
    common.add_argument("--eps", type=float)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out")

    parser = argparse.ArgumentParser(prog="muckenhoupt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="write a space, weight or function file")
    g.add_argument("kind", choices=("grid1d", "grid2d", "random_euclidean", "ultrametric",
                                    "power-weight", "lognormal-weight", "random-function"))
    g.add_argument("--n", type=int)
    g.add_argument("--a", type=float)
    g.add_argument("--b", type=float)
    g.add_argument("--cell-centered", action="store_true")
    g.add_argument("--nx", type=int)
    g.add_argument("--ny", type=int)
    g.add_argument("--dim", type=int, default=2)
    g.add_argument("--branching", type=int)
    g.add_argument("--depth", type=int)
    g.add_argument("--measure", choices=("uniform", "random"), default="uniform")
    g.add_argument("--alpha", type=float)
    g.add_argument("--sigma", type=float, default=1.0)
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("compute", parents=[common], help="compute a constant or operator")
    c.add_argument("what", choices=("ap", "doubling", "maximal", "whitney", "truncate"))
    c.set_defaults(func=cmd_compute)

    v = sub.add_parser("verify", parents=[common], help="run inequality suites")
    v.add_argument("suite", choices=sorted(SUITES) + ["all"])
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("selfimprove", parents=[common], help="run the exponent-lowering pipeline")
    s.add_argument("--t-grid", type=int, default=None,
                   help="number of quantile thresholds for C2 (default: every value of Mf)")
    s.add_argument("--safety", type=float, default=0.9)
    s.set_defaults(func=cmd_selfimprove)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
