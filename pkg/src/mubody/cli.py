"""Command-line front end: ``mubody {compute|measure|verify|convergence}``.

Exit codes: 0 success, 1 gated verification failure, 2 bad input or
configuration, 3 numeric degeneracy. Summary lines on stdout are
``key=value`` pairs separated by spaces.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from .bodies import Ball, BodyError, body_from_json, convex_hull, cross_polytope, simplex_2d, unit_square
from .functionals import context, dual_mixed, lp_mixed_mu, lp_mixed_volume, mu_measure, mu_of_polar
from .measures import DensityError, cone, density_from_json, lebesgue, radial_power
from .sphgrid import GridMismatchError, MIN_RESOLUTION, build_grid
from .surfmeas import SurfaceMeasureError, surface_measure
from .transforms import (DegenerateTransformError, centroid_body_tau, polar_of, proj_body_tau)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_DEGENERATE = 0, 1, 2, 3
OPS = ("proj", "proj-polar", "centroid", "centroid-polar")
QUANTITIES = ("mu", "mu-proj", "mu-proj-polar", "mu-centroid", "mu-centroid-polar")
FUNCTIONALS = ("mu", "mu_p", "V", "Vt")
PAIR_FUNCTIONALS = ("mu_p", "V", "Vt")
ENV_GRID = "MUBODY_DEFAULT_GRID"


class InputError(Exception):
    pass


# --------------------------------------------------------------------------
# inputs

_BUILTIN_BODIES = {
    "square": lambda: unit_square(),
    "simplex": lambda: simplex_2d(),
    "cross": lambda: cross_polytope(2),
    "disk": lambda: Ball(2, 1.0, ident="disk"),
    "cube": lambda: convex_hull([[x, y, z] for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)],
                                3, ident="cube"),
    "octahedron": lambda: cross_polytope(3),
    "ball3": lambda: Ball(3, 1.0, ident="ball3"),
}


def _read_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def load_body(spec: str):
    """A JSON file path or ``builtin:<name>``."""
    if spec.startswith("builtin:"):
        name = spec.split(":", 1)[1]
        if name not in _BUILTIN_BODIES:
            raise InputError(f"unknown builtin body {name!r}; known: {', '.join(_BUILTIN_BODIES)}")
        return _BUILTIN_BODIES[name]()
    data = _read_json(spec)
    if not isinstance(data, dict):
        raise InputError(f"{spec}: body description must be a JSON object")
    return body_from_json(data)


def load_density(spec: str, dim: int):
    """A JSON file path, or ``lebesgue``, ``power:<q>``, ``cone:<q>`` (axis e_n)."""
    if spec == "lebesgue":
        return lebesgue(dim)
    if spec.startswith("power:"):
        return radial_power(dim, float(spec.split(":", 1)[1]))
    if spec.startswith("cone:"):
        e = np.zeros(dim)
        e[-1] = 1.0
        return cone(dim, e, float(spec.split(":", 1)[1]))
    data = _read_json(spec)
    if not isinstance(data, dict):
        raise InputError(f"{spec}: density description must be a JSON object")
    w = density_from_json(data)
    if w.dim != dim:
        raise InputError(f"density dimension {w.dim} differs from body dimension {dim}")
    return w


def body_dim(body) -> int:
    return getattr(body, "dim", None) or body.grid.dim


def default_resolution(dim: int) -> int:
    env = os.environ.get(ENV_GRID)
    if env:
        parts = env.split(",")
        try:
            vals = [int(x) for x in parts]
        except ValueError as exc:
            raise InputError(f"{ENV_GRID}={env!r} is not an integer or a pair of integers") from exc
        return vals[0] if len(vals) == 1 or dim == 2 else vals[1]
    return 2048 if dim == 2 else 96


def _resolution(args, dim: int) -> int:
    M = args.grid if args.grid is not None else default_resolution(dim)
    if M < MIN_RESOLUTION:
        raise InputError(f"grid resolution must be at least {MIN_RESOLUTION}")
    return M


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _summary(**kw) -> str:
    return " ".join(f"{k}={_fmt(v)}" for k, v in kw.items())


def _write(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)


def _table(rows: list[dict], fmt: str) -> str:
    if not rows:
        return ""
    keys = list(rows[0])
    if fmt == "json":
        return json.dumps(rows, sort_keys=True, indent=1) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, keys, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: _fmt(v) for k, v in r.items()})
        return buf.getvalue()
    lines = ["| " + " | ".join(keys) + " |", "|---" * len(keys) + "|"]
    lines += ["| " + " | ".join(_fmt(r[k]) for k in keys) + " |" for r in rows]
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# commands


def _transform(op: str, body, w, p: float, tau: float, grid):
    ctx = context(w, grid)
    if op.startswith("proj"):
        S = surface_measure(body, w, p, grid)
        res = proj_body_tau(S, grid, tau, ctx)
    else:
        res = centroid_body_tau(body, ctx, p, tau, grid)
    return polar_of(res) if op.endswith("polar") else res


def cmd_compute(args) -> int:
    body = load_body(args.body)
    dim = body_dim(body)
    w = load_density(args.density, dim)
    grid = build_grid(dim, _resolution(args, dim))
    res = _transform(args.op, body, w, args.p, args.tau, grid)
    ctx = context(w, grid)
    mu_body = mu_measure(ctx, body)
    mu_res = mu_measure(ctx, res.field)
    out = res.to_json()
    out["summary"] = {"mu_body": mu_body, "mu_result": mu_res}
    text = json.dumps(out, sort_keys=True) + "\n"
    _write(text, args.out)
    print(_summary(command="compute", op=args.op, body=getattr(body, "ident", "body"), density=w.ident,
                   p=args.p, tau=args.tau, grid=grid.resolution, nodes=grid.size,
                   h_min=float(np.min(res.values)), h_max=float(np.max(res.values)),
                   mu_body=mu_body, mu_result=mu_res, out=args.out or "-"))
    return EXIT_OK


def _measure_rows(K, L, w, p: float, M: int, functionals) -> list[dict]:
    dim = body_dim(K)
    rows = []

    def value(name, grid):
        ctx = context(w, grid)
        if name == "mu":
            return mu_measure(ctx, K)
        if name == "mu(L)":
            return mu_measure(ctx, L)
        if name == "Vt":
            return dual_mixed(ctx, K, L, p)
        S = surface_measure(K, w, p, grid)
        if name == "mu_p":
            return lp_mixed_mu(ctx, S, L, p)
        return lp_mixed_volume(ctx, S, L, p)

    names = list(functionals)
    if L is not None and "mu" in names:
        names.insert(names.index("mu") + 1, "mu(L)")
    fine, coarse = build_grid(dim, M), build_grid(dim, max(MIN_RESOLUTION, M // 2))
    for name in names:
        v = value(name, fine)
        err = abs(v - value(name, coarse)) if coarse.resolution < M else 0.0
        rows.append({"functional": name if name != "mu" else "mu(K)", "value": v,
                     "refinement_error": err, "p": p, "grid": M})
    return rows


def cmd_measure(args) -> int:
    K = load_body(args.body)
    dim = body_dim(K)
    L = load_body(args.body2) if args.body2 else None
    if L is not None and body_dim(L) != dim:
        raise InputError("bodies have different dimensions")
    w = load_density(args.density, dim)
    if args.quantity:
        funcs = [f.strip() for f in args.quantity.split(",")]
        bad = [f for f in funcs if f not in FUNCTIONALS]
        if bad:
            raise InputError(f"unknown functional(s) {bad}; known: {', '.join(FUNCTIONALS)}")
    else:
        funcs = list(FUNCTIONALS) if L is not None else ["mu"]
    if L is None and any(f in PAIR_FUNCTIONALS for f in funcs):
        raise InputError("pair functionals need --body2")
    rows = _measure_rows(K, L, w, args.p, _resolution(args, dim), funcs)
    _write(_table(rows, args.format), args.out)
    for r in rows:
        print(_summary(functional=r["functional"], value=r["value"], error=r["refinement_error"]))
    return EXIT_OK


def _verify_config(args):
    from .verify import SuiteConfig, VERIFY_GRID
    cfg = {}
    if args.config:
        cfg = _read_json(args.config)
        if not isinstance(cfg, dict):
            raise InputError("config file must hold a JSON object")
    known = {"seed", "suites", "dims", "grid", "corpus_size", "cases", "tol", "threads"}
    unknown = set(cfg) - known
    if unknown:
        raise InputError(f"unknown config keys: {sorted(unknown)}")
    sc = SuiteConfig()
    grid = dict(VERIFY_GRID)
    env = os.environ.get(ENV_GRID)
    if env:
        vals = [int(x) for x in env.split(",")]
        grid[2] = vals[0]
        if len(vals) > 1:
            grid[3] = vals[1]
    for k, v in cfg.items():
        if k == "grid":
            grid.update({int(d): int(m) for d, m in v.items()})
        elif k == "cases":
            sc.cases = {int(d): int(n) for d, n in v.items()}
        elif k in ("suites", "dims"):
            setattr(sc, k, tuple(v) if isinstance(v, list) else (v,))
        else:
            setattr(sc, k, v)
    if args.seed is not None:
        sc.seed = args.seed
    if args.suite:
        sc.suites = tuple(s.strip() for s in args.suite.split(","))
    if args.dim:
        sc.dims = (args.dim,)
    if args.grid is not None:
        for d in sc.dims:
            grid[d] = args.grid
    if args.cases is not None:
        sc.cases = {d: args.cases for d in (2, 3)}
    if args.tol is not None:
        sc.tol = args.tol
    if args.threads is not None:
        sc.threads = args.threads
    sc.grid = {d: grid[d] for d in sc.dims}
    sc.dims = tuple(int(d) for d in sc.dims)
    for d, m in sc.grid.items():
        if m < 2 * MIN_RESOLUTION:
            raise InputError(f"verification grid for n={d} must be at least {2 * MIN_RESOLUTION}")
    if any(d not in (2, 3) for d in sc.dims):
        raise InputError("dims must be 2 or 3")
    return sc


def cmd_verify(args) -> int:
    from .verify import UnknownSuiteError, run_suite
    sc = _verify_config(args)
    try:
        rep = run_suite(sc)
    except UnknownSuiteError as exc:
        raise InputError(str(exc.args[0])) from exc
    if args.format == "json":
        text = rep.dumps()
    elif args.format == "csv":
        text = rep.to_csv()
    else:
        text = rep.to_markdown()
    _write(text, args.out)
    c = rep.counts
    print(_summary(command="verify", suite=rep.suite, seed=rep.seed, total=c["total"], passed=c["pass"],
                   equality=c["equality"], fail=c["fail"], exploratory=c["exploratory"],
                   skipped=c["skipped"], strict=c["strict"], out=args.out or "-"))
    for case in rep.failures:
        print(_summary(failed=case.case_id, slack=case.slack, budget=case.budget))
    print(_summary(wall_time=round(rep.wall_time, 3)))
    return EXIT_OK if rep.ok else EXIT_FAIL


def _quantity(name: str, body, w, p: float, tau: float, grid) -> float:
    ctx = context(w, grid)
    if name == "mu":
        return mu_measure(ctx, body)
    op = {"mu-proj": "proj", "mu-proj-polar": "proj", "mu-centroid": "centroid",
          "mu-centroid-polar": "centroid"}[name]
    res = _transform(op, body, w, p, tau, grid)
    if name.endswith("polar"):
        return mu_of_polar(ctx, res.values)
    return mu_measure(ctx, res.field)


def cmd_convergence(args) -> int:
    name = args.quantity or "mu"
    if name not in QUANTITIES:
        raise InputError(f"unknown quantity {name!r}; known: {', '.join(QUANTITIES)}")
    body = load_body(args.body)
    dim = body_dim(body)
    w = load_density(args.density, dim)
    M0 = _resolution(args, dim) if args.grid is not None else (256 if dim == 2 else 16)
    if args.levels < 2:
        raise InputError("convergence needs at least two levels")
    rows = []
    prev = prev_delta = None
    for k in range(args.levels):
        M = M0 * 2 ** k
        v = _quantity(name, body, w, args.p, args.tau, build_grid(dim, M))
        delta = abs(v - prev) if prev is not None else math.nan
        order = math.log2(prev_delta / delta) if prev_delta and delta and delta > 0 else math.nan
        rows.append({"quantity": name, "grid": M, "value": v, "delta": delta, "order": order})
        prev, prev_delta = v, (delta if not math.isnan(delta) else None)
    _write(_table(rows, args.format), args.out)
    deltas = [r["delta"] for r in rows[1:]]
    mono = all(b < a for a, b in zip(deltas, deltas[1:]))
    for r in rows:
        print(_summary(grid=r["grid"], value=r["value"], delta=r["delta"], order=r["order"]))
    print(_summary(command="convergence", quantity=name, monotone=mono, out=args.out or "-"))
    return EXIT_OK


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mubody", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, body=True):
        if body:
            p.add_argument("--body", required=True, help="body JSON file or builtin:<name>")
            p.add_argument("--density", default="lebesgue",
                           help="density JSON file, or lebesgue | power:<q> | cone:<q>")
        p.add_argument("--grid", type=int, default=None, help="grid resolution M")
        p.add_argument("--format", choices=("json", "csv", "md"), default="json")
        p.add_argument("--out", default=None)
        p.add_argument("--threads", type=int, default=None)

    pc = sub.add_parser("compute", help="projection / centroid bodies and their polars")
    common(pc)
    pc.add_argument("--op", choices=OPS, required=True)
    pc.add_argument("--p", type=float, default=1.0)
    pc.add_argument("--tau", type=float, default=0.0)

    pm = sub.add_parser("measure", help="mu, mu_p, V_{mu,p} and dual mixed measure")
    common(pm)
    pm.add_argument("--body2", default=None)
    pm.add_argument("--p", type=float, default=1.0)
    pm.add_argument("--quantity", default=None, help="comma list from " + ",".join(FUNCTIONALS))
    pm.set_defaults(format="csv")

    pv = sub.add_parser("verify", help="run verification suites")
    common(pv, body=False)
    pv.add_argument("--seed", type=int, default=None)
    pv.add_argument("--suite", default=None, help="comma list of suite names or statement globs")
    pv.add_argument("--tol", type=float, default=None, help="override every base tolerance")
    pv.add_argument("--dim", type=int, choices=(2, 3), default=None)
    pv.add_argument("--cases", type=int, default=None, help="cases per statement and dimension")
    pv.add_argument("--config", default=None, help="JSON config; flags take precedence")

    pg = sub.add_parser("convergence", help="grid-doubling study of a scalar")
    common(pg)
    pg.add_argument("--quantity", default="mu", help="one of " + ", ".join(QUANTITIES))
    pg.add_argument("--p", type=float, default=1.0)
    pg.add_argument("--tau", type=float, default=0.0)
    pg.add_argument("--levels", type=int, default=4)
    pg.set_defaults(format="csv")
    return ap


COMMANDS = {"compute": cmd_compute, "measure": cmd_measure, "verify": cmd_verify,
            "convergence": cmd_convergence}


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        if getattr(args, "p", 1.0) is not None and args.command != "verify" and not args.p > 0:
            raise InputError("p must be positive")
        if hasattr(args, "tau") and not -1 <= args.tau <= 1:
            raise InputError("tau must lie in [-1, 1]")
        return COMMANDS[args.command](args)
    except DegenerateTransformError as exc:
        print(_summary(error="degenerate", detail=json.dumps(str(exc))), file=sys.stderr)
        return EXIT_DEGENERATE
    except (InputError, BodyError, DensityError, SurfaceMeasureError, GridMismatchError,
            KeyError, TypeError, ValueError) as exc:
        print(_summary(error="input", detail=json.dumps(str(exc))), file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
