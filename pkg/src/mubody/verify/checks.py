"""Statement registry: case builders and evaluators for every checked statement.

Each evaluator returns ``(lhs, rhs)`` oriented so that ``lhs <= rhs`` is the
claim (inequalities), or two arrays/scalars that must agree (identities,
optionally with an explicit scale as third entry). The runner evaluates at
resolution ``M`` and again at ``M/2``; the change of each side enters the
tolerance budget.
"""

from __future__ import annotations

import math
import traceback
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..bodies import Body, BodyError, Polytope, RadialField, StarBody, SupportField, convex_hull
from ..functionals import lp_power, mu_from_radial
from ..measures import (HomogeneousDensity, alpha_np_tau, c_np, c_np_tau, g_pair, psi_tau)
from ..sphgrid import MIN_RESOLUTION, integrate
from ..surfmeas import ContinuousSurfaceMeasure, blaschke_add
from ..transforms import DegenerateTransformError, _checked_root, proj_power
from .cases import HypothesisError, PropertyCase, SkipCase, classify, oriented_slack
from .corpus import CorpusBody, P_VALUES, TAU_VALUES
from .engine import Engine, has_surface_measure, named

VERIFY_GRID = {2: 2048, 3: 64}
BASE_TOL = 1e-6
ALGEBRAIC_TOL = 1e-12
CONTAIN_TOL = 1e-9
CHAIN_TAUS = (-1.0, -0.6, 0.0, 0.3, 0.5, 1.0)


@dataclass(frozen=True)
class Pool:
    dim: int
    bodies: tuple[CorpusBody, ...]
    densities: tuple[HomogeneousDensity, ...]

    def pick(self, rng, kind: str = "any") -> Body:
        if kind == "convex":
            items = [b for b in self.bodies if b.convex]
        elif kind == "polytope":
            items = [b for b in self.bodies if b.kind == "polytope"]
        elif kind == "symmetric":
            items = [b for b in self.bodies if b.symmetric]
        elif kind == "symmetric-convex":
            items = [b for b in self.bodies if b.symmetric and b.convex]
        else:
            items = list(self.bodies)
        return items[int(rng.integers(len(items)))].body

    def density(self, rng) -> HomogeneousDensity:
        return self.densities[int(rng.integers(len(self.densities)))]


@dataclass(frozen=True)
class Statement:
    sid: str
    kind: str
    flags: tuple[str, ...]
    build: Callable
    evaluate: Callable
    # a float, or a per-dimension dict
    base_tol: float | dict | None = None
    refine: bool = True
    exploratory: bool = False
    doc: str = ""


REGISTRY: dict[str, Statement] = {}


def register(sid, kind, flags, build, evaluate, **kw):
    if sid in REGISTRY:
        raise ValueError(f"duplicate statement {sid}")
    REGISTRY[sid] = Statement(sid, kind, tuple(flags), build, evaluate, **kw)


def _choice(rng, seq):
    return seq[int(rng.integers(len(seq)))]


def _std(rng, pool, **extra) -> dict:
    out = {"density": pool.density(rng), "p": _choice(rng, P_VALUES), "tau": _choice(rng, TAU_VALUES)}
    out.update(extra)
    return out


def _inv_s(dens) -> float:
    return 1.0 / dens.s


# ==========================================================================
# runner


def flags_present(stmt: Statement, params: dict) -> tuple[str, ...]:
    dens = params.get("density")
    out = set(dens.flags) if dens is not None else set()
    p = params.get("p")
    if dens is not None and p is not None and abs(p - _inv_s(dens)) > 1e-12:
        out.add("p!=1/s")
    if p is not None and p >= 1:
        out.add("p>=1")
    return tuple(sorted(out))


def _inputs_json(params: dict, M: int, dim: int) -> dict:
    out = {"grid": M, "dim": dim}
    for k, v in params.items():
        if isinstance(v, Body):
            out[k] = v.ident
        elif isinstance(v, HomogeneousDensity):
            out[k] = v.ident
        elif isinstance(v, (np.floating, np.integer)):
            out[k] = v.item()
        elif isinstance(v, np.ndarray):
            out[k] = v.tolist()
        else:
            out[k] = v
    return out


def _summarize(stmt: Statement, res):
    """Reduce an evaluation to ``(lhs, rhs, slack, scale)``."""
    if stmt.kind == "inequality":
        lhs, rhs = float(res[0]), float(res[1])
        return lhs, rhs, oriented_slack(lhs, rhs), max(abs(lhs), abs(rhs))
    a, b = np.atleast_1d(np.asarray(res[0], dtype=np.float64)), np.atleast_1d(np.asarray(res[1], dtype=np.float64))
    scale = float(res[2]) if len(res) > 2 else max(float(np.max(np.abs(a))), float(np.max(np.abs(b))))
    diff = float(np.max(np.abs(a - b)))
    slack = -diff / scale if scale > 0 else -diff
    if a.size == 1:
        return float(a[0]), float(b[0]), slack, scale
    return float(np.max(np.abs(a))), float(np.max(np.abs(b))), slack, scale


def run_case(stmt: Statement, params: dict, engine: Engine, M: int, case_id: str = "",
             tol: float | None = None) -> PropertyCase:
    present = flags_present(stmt, params)
    case = PropertyCase(case_id or stmt.sid, stmt.sid, stmt.kind, _inputs_json(params, M, engine.dim),
                        stmt.flags, present)
    gated = case.gated and not stmt.exploratory
    if stmt.exploratory:
        case.note = "probe outside the gated statements"
    elif not case.gated:
        case.note = "missing hypotheses: " + ",".join(case.missing_flags)
    base = tol if tol is not None else (stmt.base_tol if stmt.base_tol is not None else BASE_TOL)
    if isinstance(base, dict):
        base = base[engine.dim]
    try:
        fine = stmt.evaluate(engine, params, M)
        lhs, rhs, slack, scale = _summarize(stmt, fine)
        ref = 0.0
        coarse_M = max(MIN_RESOLUTION, M // 2)
        if stmt.refine and coarse_M < M:
            c_lhs, c_rhs, _, _ = _summarize(stmt, stmt.evaluate(engine, params, coarse_M))
            d_l, d_r = abs(lhs - c_lhs), abs(rhs - c_rhs)
            ref = (d_l + d_r) / scale if scale > 0 else d_l + d_r
            case.refinement = {"coarse_grid": coarse_M, "lhs_delta": d_l, "rhs_delta": d_r}
    except SkipCase as exc:
        case.note = _join(case.note, f"skipped: {exc}")
        return case
    except DegenerateTransformError as exc:
        case.note = _join(case.note, f"skipped, degenerate transform: {exc}")
        return case
    except Exception as exc:  # noqa: BLE001 - a crash must not pass silently
        case.verdict = "fail" if gated else "exploratory"
        case.raw_verdict = "error"
        case.note = _join(case.note, f"error: {type(exc).__name__}: {exc} "
                          f"[{traceback.format_exc(limit=2).splitlines()[-1]}]")
        return case
    case.lhs, case.rhs, case.slack = lhs, rhs, slack
    case.budget = base + ref
    case.raw_verdict = classify(slack, case.budget, True)[0]
    case.verdict, case.strict = classify(slack, case.budget, gated)
    return case


def _join(a: str, b: str) -> str:
    return f"{a}; {b}" if a else b


def check(statement_id: str, params: dict, engine: Engine | None = None, M: int | None = None,
          tol: float | None = None) -> PropertyCase:
    """Run a single statement on explicit inputs."""
    stmt = REGISTRY[statement_id]
    dim = _dim_of(params)
    engine = engine or Engine(dim)
    return run_case(stmt, params, engine, M or VERIFY_GRID[dim], statement_id, tol)


def _dim_of(params: dict) -> int:
    for v in params.values():
        if isinstance(v, HomogeneousDensity):
            return v.dim
        if isinstance(v, Body):
            return v.dim if hasattr(v, "dim") else v.grid.dim
    return int(params.get("dim", 2))


# ==========================================================================
# algebraic identities


def _b_params(rng, pool):
    return {"p": float(_choice(rng, P_VALUES + (rng.uniform(1.0, 4.0),))),
            "tau": float(rng.uniform(-1, 1)), "t_seed": int(rng.integers(2 ** 31)), "dim": pool.dim}


def _ev_psi_split(eng, c, M):
    t = np.random.default_rng(c["t_seed"]).uniform(-2, 2, 64)
    p, tau = c["p"], c["tau"]
    lhs = psi_tau(t, tau) ** p
    rhs = (1 + tau) ** p * np.maximum(t, 0) ** p + (1 - tau) ** p * np.maximum(-t, 0) ** p
    return lhs, rhs


def _ev_g_pair(eng, c, M):
    p, tau = c["p"], c["tau"]
    g, gm = g_pair(p, tau), g_pair(p, -tau)
    return np.array([g.g1 + g.g2, gm.g1, gm.g2]), np.array([1.0, g.g2, g.g1])


def _ev_alpha_c(eng, c, M):
    n = c["dim"]
    p, tau = c["p"], c["tau"]
    return alpha_np_tau(n, p, tau) * c_np_tau(n, p, tau), c_np(n, p) ** 2


def _ev_cosine_norm(eng, c, M):
    g = eng.grid(M)
    v = np.eye(g.dim)[0]
    return c_np(g.dim, c["p"]) * integrate(g, np.abs(g.nodes @ v) ** c["p"]), 2.0


register("Ident.psi-split", "identity", (), _b_params, _ev_psi_split, base_tol=ALGEBRAIC_TOL,
         refine=False, doc="psi_tau(t)^p = (1+tau)^p t_+^p + (1-tau)^p t_-^p")
register("Ident.g-pair", "identity", (), _b_params, _ev_g_pair, base_tol=ALGEBRAIC_TOL,
         refine=False, doc="g1+g2=1 and g1(-tau)=g2(tau)")
register("Ident.alpha-c", "identity", (), _b_params, _ev_alpha_c, base_tol=ALGEBRAIC_TOL,
         refine=False, doc="alpha_{n,p}(tau) c_{n,p}(tau) = c_{n,p}^2")
register("Ident.cosine-norm", "identity", (),
         lambda rng, pool: {"p": float(_choice(rng, P_VALUES)), "dim": pool.dim},
         _ev_cosine_norm, base_tol={2: 1e-6, 3: 1e-3}, refine=False, doc="c_{n,p} int |u.v|^p du = 2 (grid-limited)")


# ==========================================================================
# identities on bodies


def _one_body(kind="any", **extra):
    def build(rng, pool):
        return _std(rng, pool, K=pool.pick(rng, kind), **extra)
    return build


def _ev_vkk(eng, c, M):
    K, dens, p = c["K"], c["density"], c["p"]
    S = eng.surface(K, dens, p, M)
    u, sigma = S.atoms()
    V = dens.s * float(np.sum(lp_power(K.support(u), p) * sigma))
    return V, eng.mu(K, dens, M)


def _ev_dual_vkk(eng, c, M):
    K, dens, p = c["K"], c["density"], c["p"]
    ctx = eng.ctx(dens, M)
    rho = eng.rho(K, M)
    Vt = ctx.s * float(np.sum(rho ** ((1 - ctx.s * p) / ctx.s) * rho ** p * ctx.sphere_weights))
    return Vt, eng.mu(K, dens, M)


register("Ident.VKK", "identity", ("I",), _one_body("convex"), _ev_vkk, base_tol=1e-3, refine=False,
         doc="V_{mu,p}(K,K) = mu(K)")
register("Ident.dualVKK", "identity", ("I",), _one_body(), _ev_dual_vkk, base_tol=1e-10,
         refine=False, doc="Vt_{mu,p}(K,K) = mu(K)")


def _scaled_build(kind):
    def build(rng, pool):
        return _std(rng, pool, K=pool.pick(rng, kind), lam=float(rng.uniform(0.5, 2.0)))
    return build


def _lamK(c):
    return c["K"].scaled(c["lam"])


def _ev_scale_mu(eng, c, M):
    dens = c["density"]
    return eng.mu(_lamK(c), dens, M), c["lam"] ** (1 / dens.s) * eng.mu(c["K"], dens, M)


def _ev_scale_S(eng, c, M):
    dens, p, lam = c["density"], c["p"], c["lam"]
    S1 = eng.surface(_lamK(c), dens, p, M)
    S0 = eng.surface(c["K"], dens, p, M)
    return S1.atoms()[1], lam ** ((1 - dens.s * p) / dens.s) * S0.atoms()[1]


def _ev_scale_pi(eng, c, M):
    dens, p, lam, tau = c["density"], c["p"], c["lam"], c["tau"]
    e = (1 - dens.s * p) / (dens.s * p)
    return eng.proj(_lamK(c), dens, p, tau, M), lam ** e * eng.proj(c["K"], dens, p, tau, M)


def _ev_scale_gamma(eng, c, M):
    dens, p, lam, tau = c["density"], c["p"], c["lam"], c["tau"]
    return eng.cent(_lamK(c), dens, p, tau, M), lam * eng.cent(c["K"], dens, p, tau, M)


register("Ident.scaling-mu", "identity", ("I",), _scaled_build("any"), _ev_scale_mu,
         base_tol=1e-10, refine=False, doc="mu(lam K) = lam^{1/s} mu(K)")
register("Ident.scaling-S", "identity", ("I",), _scaled_build("convex"), _ev_scale_S,
         base_tol=1e-10, refine=False, doc="S_{mu,p}(lam K) = lam^{(1-sp)/s} S_{mu,p}(K)")
register("Ident.scaling-Pi", "identity", ("I",), _scaled_build("convex"), _ev_scale_pi,
         base_tol=1e-10, refine=False, doc="Pi^tau(lam K) = lam^{(1-sp)/(sp)} Pi^tau K")
register("Ident.scaling-Gamma", "identity", ("I",), _scaled_build("any"), _ev_scale_gamma,
         base_tol=1e-10, refine=False, doc="Gamma^tau(lam K) = lam Gamma^tau K")


def _ev_route_pi(eng, c, M):
    a = (c["K"], c["density"], c["p"], c["tau"], M)
    return eng.proj_pow(*a, route="direct"), eng.proj_pow(*a, route="pm")


def _ev_route_gamma(eng, c, M):
    a = (c["K"], c["density"], c["p"], c["tau"], M)
    return eng.cent_pow(*a, route="direct"), eng.cent_pow(*a, route="pm")


register("Ident.route-Pi", "identity", ("I",), _one_body("convex"), _ev_route_pi,
         base_tol=ALGEBRAIC_TOL, refine=False, doc="direct psi_tau kernel = g1 Pi^+ + g2 Pi^- route")
register("Ident.route-Gamma", "identity", ("I",), _one_body(), _ev_route_gamma,
         base_tol=ALGEBRAIC_TOL, refine=False, doc="direct psi_tau kernel = g1 Gamma^+ + g2 Gamma^- route")


def _blaschke_measure(eng, K, L, dens, p, M):
    S_K, S_L = eng.surface(K, dens, p, M), eng.surface(L, dens, p, M)
    if type(S_K) is not type(S_L):
        S_K = S_K.as_discrete() if isinstance(S_K, ContinuousSurfaceMeasure) else S_K
        S_L = S_L.as_discrete() if isinstance(S_L, ContinuousSurfaceMeasure) else S_L
    return blaschke_add(S_K, S_L)


def _pair(kind_K="convex", kind_L="convex", **extra):
    def build(rng, pool):
        return _std(rng, pool, K=pool.pick(rng, kind_K), L=pool.pick(rng, kind_L), **extra)
    return build


def _ev_blaschke_proj(eng, c, M):
    K, L, dens, p, tau = c["K"], c["L"], c["density"], c["p"], c["tau"]
    S = _blaschke_measure(eng, K, L, dens, p, M)
    lhs = proj_power(S, eng.grid(M).nodes, tau)
    return lhs, eng.proj_pow(K, dens, p, tau, M) + eng.proj_pow(L, dens, p, tau, M)


register("Ident.blaschke-proj", "identity", ("I",), _pair(), _ev_blaschke_proj,
         base_tol=ALGEBRAIC_TOL, refine=False,
         doc="h(Pi^tau(K # L))^p = h(Pi^tau K)^p + h(Pi^tau L)^p")


# ==========================================================================
# identities shared by both families (Pi and Gamma)


def _family(fam):
    return (lambda e, *a, **k: e.proj(*a, **k)) if fam == "Pi" else (lambda e, *a, **k: e.cent(*a, **k))


def _family_pow(fam):
    return (lambda e, *a, **k: e.proj_pow(*a, **k)) if fam == "Pi" else (lambda e, *a, **k: e.cent_pow(*a, **k))


def _ev_prop41(fam):
    f = _family(fam)

    def ev(eng, c, M):
        K, dens, p, tau = c["K"], c["density"], c["p"], c["tau"]
        anti = eng.grid(M).antipode
        return f(eng, K, dens, p, -tau, M), f(eng, K, dens, p, tau, M)[anti]
    return ev


def _ev_prop42(fam):
    f = _family_pow(fam)

    def ev(eng, c, M):
        K, dens, p, tau = c["K"], c["density"], c["p"], c["tau"]
        ht, hm = f(eng, K, dens, p, tau, M), f(eng, K, dens, p, -tau, M)
        hp, hn = f(eng, K, dens, p, "+", M), f(eng, K, dens, p, "-", M)
        g = g_pair(p, tau)
        scale = max(float(np.max(ht)), float(np.max(hm)))
        return ht - hm, (g.g1 - g.g2) * (hp - hn), scale
    return ev


def _ev_prop43(fam):
    f = _family_pow(fam)

    def ev(eng, c, M):
        K, dens, p, tau = c["K"], c["density"], c["p"], c["tau"]
        return (f(eng, K, dens, p, tau, M) + f(eng, K, dens, p, -tau, M),
                f(eng, K, dens, p, "+", M) + f(eng, K, dens, p, "-", M))
    return ev


def _nonzero_tau_build(kind):
    def build(rng, pool):
        return _std(rng, pool, K=pool.pick(rng, kind), tau=_choice(rng, (-1.0, -0.6, 0.3, 0.5, 1.0)))
    return build


def _ev_tau_reflection(eng, c, M):
    K, dens, p, tau = c["K"], c["density"], c["p"], c["tau"]
    mp = [eng.mu_polar(eng.proj(K, dens, p, t, M), dens, M) for t in (tau, -tau)]
    mg = [eng.mu_polar(eng.cent(K, dens, p, t, M), dens, M) for t in (tau, -tau)]
    return np.array([mp[0], mg[0]]), np.array([mp[1], mg[1]])


for _fam, _kind in (("Pi", "convex"), ("Gamma", "any")):
    register(f"Prop4.1-{_fam}", "identity", ("I",), _one_body(_kind), _ev_prop41(_fam),
             base_tol=ALGEBRAIC_TOL, refine=False, doc=f"{_fam}^(-tau) K = -{_fam}^tau K")
    register(f"Prop4.2-{_fam}", "identity", ("I",), _nonzero_tau_build(_kind), _ev_prop42(_fam),
             base_tol=1e-10, refine=False,
             doc=f"h({_fam}^tau)^p - h({_fam}^-tau)^p = (g1-g2)(h({_fam}^+)^p - h({_fam}^-)^p)")
    register(f"Prop4.3-{_fam}", "identity", ("I",), _one_body(_kind), _ev_prop43(_fam),
             base_tol=ALGEBRAIC_TOL, refine=False,
             doc=f"h({_fam}^tau)^p + h({_fam}^-tau)^p = h({_fam}^+)^p + h({_fam}^-)^p")
register("Ident.tau-reflection", "identity", ("I", "even"), _one_body("convex"), _ev_tau_reflection,
         base_tol=1e-10, refine=False, doc="mu(Pi^{tau,*}K) = mu(Pi^{-tau,*}K) for even densities")


# ==========================================================================
# functional inequalities


def _ev_lemma21(eng, c, M):
    K, L, dens, p, a, b = c["K"], c["L"], c["density"], c["p"], c["alpha"], c["beta"]
    nodes = eng.grid(M).nodes
    hc = (a * lp_power(K.support(nodes), p) + b * lp_power(L.support(nodes), p)) ** (1 / p)
    ident = f"({a!r}.{K.ident}+{p!r} {b!r}.{L.ident})"
    s = dens.s
    m = eng.mu_wulff(hc, dens, M, ident)
    lhs = a * eng.mu(K, dens, M) ** s + b * eng.mu(L, dens, M) ** s
    return lhs, (1 + (a + b) * (p - 1)) / p * m ** s


def _b_lemma21(rng, pool):
    c = _pair()(rng, pool)
    c.update(alpha=float(rng.uniform(0.1, 1.5)), beta=float(rng.uniform(0.1, 1.5)))
    if rng.random() < 0.25:
        c["L"] = c["K"].scaled(float(rng.uniform(0.5, 1.5)))
    return c


register("Lemma2.1", "inequality", ("I", "II", "p>=1"), _b_lemma21, _ev_lemma21,
         doc="((1+(a+b)(p-1))/p) mu(a.K +_p b.L)^s >= a mu(K)^s + b mu(L)^s")


def _ev_minkowski(eng, c, M):
    K, L, dens, p = c["K"], c["L"], c["density"], c["p"]
    S = eng.surface(K, dens, p, M)
    u, sigma = S.atoms()
    V = dens.s * float(np.sum(lp_power(L.support(u), p) * sigma))
    s = dens.s
    mK, mL = eng.mu(K, dens, M), eng.mu(L, dens, M)
    return p * mK ** (1 - s) * mL ** s + (1 - p) * mK, V


def _b_minkowski(rng, pool):
    c = _pair()(rng, pool)
    mode = _choice(rng, ("random", "random", "equal", "dilate"))
    if mode == "equal":
        c["L"] = c["K"]
    elif mode == "dilate":
        c["L"] = c["K"].scaled(float(rng.uniform(0.5, 1.5)))
    c["mode"] = mode
    return c


register("Ineq.Minkowski", "inequality", ("I", "II", "p>=1"), _b_minkowski, _ev_minkowski,
         doc="V_{mu,p}(K,L) >= p mu(K)^{1-s} mu(L)^s + (1-p) mu(K)")


def _b_dual_lemma(rng, pool):
    dens = pool.density(rng)
    inv_s = _inv_s(dens)
    inside = [p for p in (0.5, 1.0, 1.5, 2.0, 3.0) if p < inv_s]
    outside = [-1.0, -0.5, inv_s + 0.5, inv_s + 2.0]
    p = float(_choice(rng, inside if rng.random() < 0.5 else outside))
    K = pool.pick(rng)
    mode = _choice(rng, ("random", "random", "dilate"))
    L = K.scaled(float(rng.uniform(0.5, 1.8))) if mode == "dilate" else pool.pick(rng)
    return {"density": dens, "p": p, "K": K, "L": L, "mode": mode,
            "alpha": float(rng.uniform(0.2, 2.0)), "beta": float(rng.uniform(0.2, 2.0))}


def _regular(dens, p) -> bool:
    return 0 < p < _inv_s(dens)


def _ev_lemma23(eng, c, M):
    K, L, dens, p = c["K"], c["L"], c["density"], c["p"]
    ctx = eng.ctx(dens, M)
    rK, rL = eng.rho(K, M), eng.rho(L, M)
    eps = 1e-4

    def mu_comb(e):
        return mu_from_radial(ctx, (rK ** p + e * rL ** p) ** (1 / p))
    fd = dens.s * p * (mu_comb(eps) - mu_comb(-eps)) / (2 * eps)
    formula = ctx.s * float(np.sum(rK ** ((1 - ctx.s * p) / ctx.s) * rL ** p * ctx.sphere_weights))
    return fd, formula


register("Lemma2.3", "identity", ("I",), _b_dual_lemma, _ev_lemma23, refine=False,
         doc="Vt_{mu,p}(K,L) = s p d/de mu(K +~_p e.L) at e=0 equals the radial integral")


def _ev_lemma24(eng, c, M):
    K, L, dens, p = c["K"], c["L"], c["density"], c["p"]
    ctx = eng.ctx(dens, M)
    s = ctx.s
    rK, rL = eng.rho(K, M), eng.rho(L, M)
    Vt = s * float(np.sum(rK ** ((1 - s * p) / s) * rL ** p * ctx.sphere_weights))
    bound = eng.mu(K, dens, M) ** (1 - s * p) * eng.mu(L, dens, M) ** (s * p)
    return (Vt, bound) if _regular(dens, p) else (bound, Vt)


def _ev_lemma25(eng, c, M):
    K, L, dens, p, a, b = c["K"], c["L"], c["density"], c["p"], c["alpha"], c["beta"]
    ctx = eng.ctx(dens, M)
    sp = ctx.s * p
    rK, rL = eng.rho(K, M), eng.rho(L, M)
    comb = mu_from_radial(ctx, (a * rK ** p + b * rL ** p) ** (1 / p)) ** sp
    other = a * eng.mu(K, dens, M) ** sp + b * eng.mu(L, dens, M) ** sp
    return (comb, other) if _regular(dens, p) else (other, comb)


register("Lemma2.4", "inequality", ("I",), _b_dual_lemma, _ev_lemma24,
         doc="Vt_{mu,p}(K,L) <= mu(K)^{1-sp} mu(L)^{sp} for 0<p<1/s, reversed for p<0 or p>1/s")
register("Lemma2.5", "inequality", ("I",), _b_dual_lemma, _ev_lemma25,
         doc="mu(a o K +~_p b o L)^{sp} <= a mu(K)^{sp} + b mu(L)^{sp} for 0<p<1/s, reversed outside")


def _ev_mup_probe(eng, c, M):
    K, L, dens, p = c["K"], c["L"], c["density"], c["p"]
    nodes = eng.grid(M).nodes
    hK, hL = lp_power(K.support(nodes), p), lp_power(L.support(nodes), p)
    eps = 1e-3

    def m(e):
        return eng.mu_wulff((hK + e * hL) ** (1 / p), dens, M, f"{K.ident}+{p!r}[{e!r}]{L.ident}")
    fd = (m(eps) - m(-eps)) / (2 * eps)
    S = eng.surface(K, dens, p, M)
    u, sigma = S.atoms()
    return fd, float(np.sum(lp_power(L.support(u), p) * sigma)) / p


register("Probe.mu_p-variation", "identity", ("I",), _pair(), _ev_mup_probe, base_tol=1e-3,
         refine=False, exploratory=True,
         doc="mu_p(K,L) against the first variation of mu(K +_p e.L) through Wulff shapes")


# ==========================================================================
# projection-body identities


def _ev_prop31(eng, c, M):
    K, L, dens, p, tau = c["K"], c["L"], c["density"], c["p"], c["tau"]
    uK, sK = eng.surface(K, dens, p, M).atoms()
    uL, sL = eng.surface(L, dens, p, M).atoms()
    lhs = dens.s * float(np.sum(eng.proj_at(L, dens, p, tau, M, uK) * sK))
    rhs = dens.s * float(np.sum(eng.proj_at(K, dens, p, tau, M, uL) * sL))
    return lhs, rhs


def _b_pair_equal(kind_K, kind_L):
    def build(rng, pool):
        c = _pair(kind_K, kind_L)(rng, pool)
        if rng.random() < 0.2 and (kind_K == kind_L or kind_L == "any"):
            c["L"] = c["K"]
        return c
    return build


def _ev_prop32(eng, c, M):
    K, L, dens, p, tau = c["K"], c["L"], c["density"], c["p"], c["tau"]
    n, s = eng.dim, dens.s
    uK, sK = eng.surface(K, dens, p, M).atoms()
    lhs = s * float(np.sum(eng.cent_at(L, dens, p, tau, M, uK) * sK))
    ctx = eng.ctx(dens, M)
    rL = eng.rho(L, M)
    # Vt_{mu,-p}(L, Pi^{tau,*}K) with rho(Pi^{tau,*}K)^{-p} = h(Pi^tau K)^p
    vt = s * float(np.sum(rL ** ((1 + s * p) / s) * eng.proj_pow(K, dens, p, tau, M) * ctx.sphere_weights))
    factor = 2.0 / (c_np_tau(n, p, tau) * alpha_np_tau(n, p, tau) * (p + 1 / s) * eng.mu(L, dens, M))
    return lhs, factor * vt


def _vt_neg_gamma(eng, A, B, dens, p, tau, M):
    """``Vt_{mu,-p}(A, Gamma^{tau,*}B) / mu(A)``."""
    ctx = eng.ctx(dens, M)
    s = ctx.s
    rA = eng.rho(A, M)
    return s * float(np.sum(rA ** ((1 + s * p) / s) * eng.cent_pow(B, dens, p, tau, M)
                            * ctx.sphere_weights)) / eng.mu(A, dens, M)


def _ev_prop35(eng, c, M):
    K, L, dens, p, tau = c["K"], c["L"], c["density"], c["p"], c["tau"]
    return _vt_neg_gamma(eng, K, L, dens, p, tau, M), _vt_neg_gamma(eng, L, K, dens, p, tau, M)


register("Prop3.1", "identity", ("I",), _b_pair_equal("convex", "convex"), _ev_prop31, base_tol=1e-9,
         doc="V_{mu,p}(K, Pi^tau L) = V_{mu,p}(L, Pi^tau K)")
register("Prop3.2", "identity", ("I",), _b_pair_equal("convex", "any"), _ev_prop32, base_tol=1e-9,
         doc="V_{mu,p}(K, Gamma^tau L) = 2/(c_tau alpha (p+1/s) mu(L)) Vt_{mu,-p}(L, Pi^{tau,*}K)")
register("Prop3.5", "identity", ("I",), _b_pair_equal("any", "any"), _ev_prop35, base_tol=1e-9,
         doc="Vt_{mu,-p}(K, Gamma^{tau,*}L)/mu(K) = Vt_{mu,-p}(L, Gamma^{tau,*}K)/mu(L)")


# ==========================================================================
# comparison theorems (constructive containment)


def _b_comparison(src_kind, other_kind, fixed=None):
    def build(rng, pool):
        c = _std(rng, pool)
        if fixed:
            c.update(fixed)
        c["src"] = pool.pick(rng, src_kind)
        c["mode"] = _choice(rng, ("equal", "dilate", "other", "other"))
        c["lam"] = float(rng.uniform(0.6, 0.95))
        c["margin"] = float(rng.uniform(0.9, 0.99))
        if c["mode"] == "other":
            c["Q"] = pool.pick(rng, other_kind)
        return c
    return build


def _contained(h_in, h_out):
    return bool(np.all(h_in <= h_out * (1 + CONTAIN_TOL)))


def _ev_thm33(variant, corollary=False):
    def ev(eng, c, M):
        if eng.dim != 2:
            raise SkipCase("Pi of a sampled support function needs the n=2 surface-measure route")
        dens, p, tau = c["density"], c["p"], c["tau"]
        s = dens.s
        if variant == "a":
            L = eng.proj_field(c["src"], dens, p, tau, M)
        else:
            L = eng.cent_field(c["src"], dens, p, tau, M)
        hL = eng.proj(L, dens, p, tau, M)
        e = (1 - s * p) / (s * p)
        mode = c["mode"]
        if mode == "equal":
            K = L
        elif mode == "dilate":
            lam = c["lam"] if e >= 0 else 1 / c["lam"]
            K = L.scaled(lam)
        else:
            Q = c["Q"]
            t = float(np.min(hL / eng.proj(Q, dens, p, tau, M)))
            if abs(e) < 1e-12:
                if t < 1:
                    raise SkipCase("containment fails and Pi^tau is scale invariant here")
                K = Q
            else:
                K = Q.scaled((c["margin"] * t) ** (1 / e))
        if not _contained(eng.proj(K, dens, p, tau, M), hL):
            raise SkipCase("containment Pi^tau K in Pi^tau L does not hold on the grid")
        mK, mL = eng.mu(K, dens, M), eng.mu(L, dens, M)
        if corollary:
            return mK, mL
        r = mK / mL
        return p * r ** (1 - s) + (1 - p) * r, 1.0
    return ev


def _ev_thm36(variant, corollary=False):
    def ev(eng, c, M):
        dens, p, tau = c["density"], c["p"], c["tau"]
        if variant == "a":
            L = eng.polar_field(eng.proj_field(c["src"], dens, p, tau, M))
        else:
            L = eng.polar_field(eng.cent_field(c["src"], dens, p, tau, M))
        hL = eng.cent(L, dens, p, tau, M)
        mode = c["mode"]
        if mode == "equal":
            K = L
        elif mode == "dilate":
            K = L.scaled(c["lam"])
        else:
            Q = c["Q"]
            t = float(np.min(hL / eng.cent(Q, dens, p, tau, M)))
            K = Q.scaled(c["margin"] * t)
        if not _contained(eng.cent(K, dens, p, tau, M), hL):
            raise SkipCase("containment Gamma^tau K in Gamma^tau L does not hold on the grid")
        return eng.mu(K, dens, M), eng.mu(L, dens, M)
    return ev


_COR = {"p": 1.0, "tau": 0.0}
register("Thm3.3a", "inequality", ("I", "II"), _b_comparison("convex", "convex"), _ev_thm33("a"),
         doc="Pi^tau K in Pi^tau L, L = Pi^tau M  =>  1 >= p r^{1-s} + (1-p) r, r = mu(K)/mu(L)")
register("Thm3.3b", "inequality", ("I", "II"), _b_comparison("any", "convex"), _ev_thm33("b"),
         doc="Pi^{tau,*}K contains Pi^{tau,*}L, L = Gamma^tau N  =>  1 >= p r^{1-s} + (1-p) r")
register("Cor3.4a", "inequality", ("I", "II"), _b_comparison("convex", "convex", _COR),
         _ev_thm33("a", True), doc="Pi K in Pi L, L a projection body  =>  mu(K) <= mu(L)")
register("Cor3.4b", "inequality", ("I", "II"), _b_comparison("any", "convex", _COR),
         _ev_thm33("b", True), doc="Pi^* K contains Pi^* L, L a centroid body  =>  mu(K) <= mu(L)")
register("Thm3.6a", "inequality", ("I",), _b_comparison("convex", "any"), _ev_thm36("a"),
         doc="Gamma^tau K in Gamma^tau L, L = Pi^{tau,*}Q  =>  mu(K) <= mu(L)")
register("Thm3.6b", "inequality", ("I",), _b_comparison("any", "any"), _ev_thm36("b"),
         doc="Gamma^{tau,*}K contains Gamma^{tau,*}L, L = Gamma^{tau,*}M  =>  mu(K) <= mu(L)")
register("Cor3.7a", "inequality", ("I",), _b_comparison("convex", "any", _COR), _ev_thm36("a"),
         doc="Gamma K in Gamma L, L a polar projection body  =>  mu(K) <= mu(L)")
register("Cor3.7b", "inequality", ("I",), _b_comparison("any", "any", _COR), _ev_thm36("b"),
         doc="Gamma^* K contains Gamma^* L, L a polar centroid body  =>  mu(K) <= mu(L)")


# ==========================================================================
# extremal chains


def _b_chain(kind):
    def build(rng, pool):
        K = pool.pick(rng, "symmetric-convex" if kind == "convex" and rng.random() < 0.3 else kind)
        return _std(rng, pool, K=K, tau=_choice(rng, CHAIN_TAUS))
    return build


def _chain_values(eng, c, M, fam, polar):
    K, dens, p, tau = c["K"], c["density"], c["p"], c["tau"]
    f = _family(fam)
    out = []
    for t in (0.0, tau, "+"):
        h = f(eng, K, dens, p, t, M)
        if polar:
            out.append(eng.mu_polar(h, dens, M))
        else:
            out.append(eng.mu_wulff(h, dens, M, f"{fam}[{dens.ident},{p!r},{t!r}]({K.ident})"))
    return out


def _ev_chain(fam, polar, side):
    def ev(eng, c, M):
        m0, mt, mpm = _chain_values(eng, c, M, fam, polar)
        if polar:
            return (m0, mt) if side == "left" else (mt, mpm)
        return (mt, m0) if side == "left" else (mpm, mt)
    return ev


_CHAINS = {"Thm4.4": ("Pi", True, ("I", "even"), "convex"),
           "Thm4.5": ("Pi", False, ("I", "II", "even"), "convex"),
           "Thm4.6": ("Gamma", True, ("I", "even"), "any"),
           "Thm4.7": ("Gamma", False, ("I", "II", "even"), "any")}
for _sid, (_fam, _polar, _flags, _kind) in _CHAINS.items():
    _op = f"mu({_fam}^{{tau{',*' if _polar else ''}}} K)"
    for _side in ("left", "right"):
        if _polar:
            _doc = ("mu(%s^{0,*}K) <= %s" % (_fam, _op)) if _side == "left" else f"{_op} <= mu({_fam}^{{+,*}}K)"
        else:
            _doc = (f"mu({_fam} K) >= {_op}") if _side == "left" else f"{_op} >= mu({_fam}^+ K)"
        register(f"{_sid}-{_side}", "inequality", _flags, _b_chain(_kind),
                 _ev_chain(_fam, _polar, _side), doc=_doc)


# ==========================================================================
# Blaschke sums and monotonicity


def _b_blaschke(fixed=None):
    def build(rng, pool):
        c = _pair()(rng, pool)
        if fixed:
            c.update(fixed)
        if rng.random() < 0.25:
            c["L"] = c["K"]
        return c
    return build


def _blaschke_mus(eng, c, M, polar):
    K, L, dens, p, tau = c["K"], c["L"], c["density"], c["p"], c["tau"]
    g = eng.grid(M)
    S = _blaschke_measure(eng, K, L, dens, p, M)
    hKL = _checked_root(proj_power(S, g.nodes, tau), p, "Pi^tau of a Blaschke sum", g.nodes)
    hK, hL = eng.proj(K, dens, p, tau, M), eng.proj(L, dens, p, tau, M)
    if polar:
        return [eng.mu_polar(h, dens, M) for h in (hK, hL, hKL)]
    ids = [f"Pi[{dens.ident},{p!r},{tau!r}]({x})" for x in (K.ident, L.ident, f"{K.ident}#{L.ident}")]
    return [eng.mu_wulff(h, dens, M, i) for h, i in zip((hK, hL, hKL), ids)]


def _ev_thm51(corollary=False):
    def ev(eng, c, M):
        s, p = c["density"].s, c["p"]
        mK, mL, mKL = _blaschke_mus(eng, c, M, polar=False)
        factor = 1.0 if corollary else 2 - 1 / p
        return mK ** s + mL ** s, factor * mKL ** s
    return ev


def _ev_thm53(corollary=False):
    def ev(eng, c, M):
        s, p = c["density"].s, c["p"]
        e = -s * (1.0 if corollary else p)
        mK, mL, mKL = _blaschke_mus(eng, c, M, polar=True)
        return mK ** e + mL ** e, mKL ** e
    return ev


_BFLAGS = ("I", "II", "even", "p>=1", "p!=1/s")
register("Thm5.1", "inequality", _BFLAGS, _b_blaschke(), _ev_thm51(),
         doc="(2-1/p) mu(Pi^tau(K # L))^s >= mu(Pi^tau K)^s + mu(Pi^tau L)^s")
register("Cor5.2", "inequality", _BFLAGS, _b_blaschke(_COR), _ev_thm51(True),
         doc="mu(Pi(K # L))^s >= mu(Pi K)^s + mu(Pi L)^s")
register("Thm5.3", "inequality", _BFLAGS, _b_blaschke(), _ev_thm53(),
         doc="mu(Pi^{tau,*}(K # L))^{-sp} >= mu(Pi^{tau,*}K)^{-sp} + mu(Pi^{tau,*}L)^{-sp}")
register("Cor5.4", "inequality", _BFLAGS, _b_blaschke(_COR), _ev_thm53(True),
         doc="mu(Pi^*(K # L))^{-s} >= mu(Pi^* K)^{-s} + mu(Pi^* L)^{-s}")


def shrink_toward(P: Polytope, lam: float, center) -> Polytope:
    """``c + lam (P - c)``; contained in ``P`` for ``c`` in ``P``."""
    return convex_hull(center + lam * (P.vertices - center), P.dim,
                       ident=f"shrink({P.ident},{lam!r},{np.round(center, 12).tolist()})")


def nested_pair(rng, L: Body, mode: str) -> Body:
    """A body ``K`` contained in ``L`` built according to ``mode``."""
    if mode == "equal":
        return L
    if mode == "half":
        return L.scaled(0.5)
    if mode == "dilate":
        return L.scaled(float(rng.uniform(0.6, 0.95)))
    if mode == "toward" and isinstance(L, Polytope):
        lam = float(rng.uniform(0.5, 0.9))
        for _ in range(20):
            c = rng.uniform(-0.05, 0.05, size=L.dim)
            try:
                return shrink_toward(L, lam, c)
            except BodyError:
                continue
        return L.scaled(lam)
    # pointwise shrink rho_K = rho_L * phi with phi in [0.6, 0.95]
    dim = L.dim
    from .corpus import random_star
    phi = random_star(rng, dim, False, "phi")
    return StarBody(dim, phi.coeffs, phi.degree, amp=0.175, offset=0.775, base=L,
                    ident=f"shrink({L.ident},{int(rng.integers(1 << 30))})")


def _b_monotone(fixed=None):
    def build(rng, pool):
        c = _std(rng, pool)
        if fixed:
            c.update(fixed)
        L = pool.pick(rng)
        mode = _choice(rng, ("equal", "half", "dilate", "toward", "pointwise"))
        c.update(L=L, K=nested_pair(rng, L, mode), mode=mode)
        return c
    return build


def _ev_thm55a(corollary=False):
    def ev(eng, c, M):
        K, L, dens, p, tau = c["K"], c["L"], c["density"], c["p"], c["tau"]
        s = dens.s
        mK, mL = eng.mu(K, dens, M), eng.mu(L, dens, M)
        gK = eng.mu_wulff(eng.cent(K, dens, p, tau, M), dens, M, f"Gamma[{dens.ident},{p!r},{tau!r}]({K.ident})")
        gL = eng.mu_wulff(eng.cent(L, dens, p, tau, M), dens, M, f"Gamma[{dens.ident},{p!r},{tau!r}]({L.ident})")
        return p * mK * gK ** s, (mL + (p - 1) * mK) * gL ** s
    return ev


def _ev_thm55b(corollary=False):
    def ev(eng, c, M):
        K, L, dens, p, tau = c["K"], c["L"], c["density"], c["p"], c["tau"]
        sp = dens.s * p
        gK = eng.mu_polar(eng.cent(K, dens, p, tau, M), dens, M)
        gL = eng.mu_polar(eng.cent(L, dens, p, tau, M), dens, M)
        return gL ** sp / eng.mu(L, dens, M), gK ** sp / eng.mu(K, dens, M)
    return ev


register("Thm5.5a", "inequality", ("I", "II"), _b_monotone(), _ev_thm55a(),
         doc="K in L  =>  p mu(K) mu(Gamma^tau K)^s <= (mu(L)+(p-1)mu(K)) mu(Gamma^tau L)^s")
register("Thm5.5b", "inequality", ("I",), _b_monotone(), _ev_thm55b(),
         doc="K in L  =>  mu(Gamma^{tau,*}K)^{sp}/mu(K) >= mu(Gamma^{tau,*}L)^{sp}/mu(L)")
register("Cor5.6a", "inequality", ("I", "II"), _b_monotone(_COR), _ev_thm55a(True),
         doc="K in L  =>  mu(K) mu(Gamma K)^s <= mu(L) mu(Gamma L)^s")
register("Cor5.6b", "inequality", ("I",), _b_monotone(_COR), _ev_thm55b(True),
         doc="K in L  =>  mu(Gamma^* K)^s/mu(K) >= mu(Gamma^* L)^s/mu(L)")


# ==========================================================================
# named entry points


def check_fubini_symmetry(params: dict, **kw) -> PropertyCase:
    return check("Prop3.1", params, **kw)


def check_proj_centroid_duality(params: dict, **kw) -> PropertyCase:
    return check("Prop3.2", params, **kw)


def check_centroid_reciprocity(params: dict, **kw) -> PropertyCase:
    return check("Prop3.5", params, **kw)


def check_measure_comparison(params: dict, variant: str, **kw) -> PropertyCase:
    if variant not in ("Thm3.3a", "Thm3.3b", "Thm3.6a", "Thm3.6b"):
        raise ValueError(f"unknown variant {variant!r}")
    return check(variant, params, **kw)


def check_extreme_chain(params: dict, family: str, **kw) -> tuple[PropertyCase, PropertyCase]:
    if family not in _CHAINS:
        raise ValueError(f"unknown family {family!r}")
    return check(f"{family}-left", params, **kw), check(f"{family}-right", params, **kw)


def check_blaschke(params: dict, variant: str, exploratory: bool = False, **kw) -> PropertyCase:
    """Thm 5.1 / 5.3; ``p = 1/s`` is rejected unless run as exploratory."""
    if variant not in ("Thm5.1", "Thm5.3"):
        raise ValueError(f"unknown variant {variant!r}")
    dens, p = params["density"], params["p"]
    if p < 1:
        raise HypothesisError("p>=1", f"p={p}")
    if abs(p - 1 / dens.s) <= 1e-12 and not exploratory:
        raise HypothesisError("p!=1/s", f"p={p} equals 1/s for {dens.ident}")
    return check(variant, params, **kw)


def check_monotone_centroid(params: dict, variant: str, **kw) -> PropertyCase:
    if variant not in ("Thm5.5a", "Thm5.5b"):
        raise ValueError(f"unknown variant {variant!r}")
    return check(variant, params, **kw)
