"""Acceptance criteria 1-9; one summary line per criterion is printed at the end of the run."""

import json
import math

import numpy as np
import pytest

from mubody import cli
from mubody.bodies import Ball, simplex_2d, unit_square
from mubody.functionals import context, dual_mixed, lp_mixed_volume, mu_measure, mu_measure_mc
from mubody.measures import c_np, lebesgue, radial_power
from mubody.sphgrid import build_grid, integrate
from mubody.surfmeas import surface_measure
from mubody.transforms import centroid_body_tau, centroid_body_tau_mc, proj_body_plus
from mubody.verify import Engine, check, check_blaschke, check_extreme_chain, gen_bodies
from mubody.verify.corpus import P_VALUES, TAU_VALUES, corpus_densities

DEFAULT_M = {2: 2048, 3: 96}
SEEDS = (7, 42, 1337)


def _detail(request, text):
    request.node.user_properties.append(("detail", text))


def _cases(report, prefixes):
    return [c for c in report["cases"] if c["statement"].startswith(prefixes)]


# ---------------------------------------------------------------- 1


@pytest.mark.criterion(1)
@pytest.mark.parametrize("dim,M,tol", [(2, 4096, 1e-6), (3, 128, 1e-3)])
def test_c1_constant_identity(request, dim, M, tol):
    # absolute error at the resolutions the grid contract names for this identity; for p=1
    # the kinks of |u.v| limit the plane rule to c_{2,1} 4 pi^2 / (3 M^2), 1.6e-6 at M=2048
    g = build_grid(dim, M)
    rng = np.random.default_rng(0)
    v = rng.normal(size=(5, dim))
    v = np.vstack([np.eye(dim)[0], v / np.linalg.norm(v, axis=1, keepdims=True)])
    errs = {p: max(abs(c_np(dim, p) * integrate(g, np.abs(g.nodes @ e) ** p) - 2.0) for e in v)
            for p in P_VALUES}
    _detail(request, f"n={dim} M={M} " + ", ".join(f"p={p:g}: {e:.1e}" for p, e in errs.items()) + f" (tol {tol:g})")
    assert max(errs.values()) <= tol


# ---------------------------------------------------------------- 2


@pytest.mark.criterion(2)
def test_c2_mu_disk_power_density(request):
    ctx = context(radial_power(2, 1.0), build_grid(2, DEFAULT_M[2]))
    err = abs(mu_measure(ctx, Ball(2, 1.0)) - 2 * math.pi / 3)
    _detail(request, f"|mu - 2pi/3| = {err:.1e}")
    assert err <= 1e-6


@pytest.mark.criterion(2)
def test_c2_centroid_of_disk_every_tau(request):
    ctx = context(lebesgue(2), build_grid(2, DEFAULT_M[2]))
    worst = max(float(np.max(np.abs(centroid_body_tau(Ball(2, 1.0), ctx, 1.0, t).values - 8 / (3 * math.pi))))
                for t in TAU_VALUES)
    _detail(request, f"max |h - 8/(3pi)| = {worst:.1e}")
    assert worst <= 1e-5


@pytest.mark.criterion(2)
def test_c2_proj_plus_of_square(request):
    g = build_grid(2, DEFAULT_M[2])
    S = surface_measure(unit_square(), lebesgue(2), 1.0, g)
    err = float(np.max(np.abs(proj_body_plus(S, g).values - np.abs(g.nodes).sum(axis=1))))
    _detail(request, f"max nodewise error {err:.1e}")
    assert err <= 1e-6


# ---------------------------------------------------------------- 3

ALGEBRAIC = ("Ident.psi-split", "Ident.g-pair", "Ident.alpha-c", "Ident.tau-reflection", "Prop4.3-",
             "Ident.route-", "Ident.scaling-", "Prop4.1-", "Prop4.2-")


@pytest.mark.criterion(3)
def test_c3_identity_suites(request, reports):
    _, _, rep = reports(7)
    cases = [c for c in _cases(rep, ALGEBRAIC) if c["slack"] is not None]
    worst = max(abs(c["slack"]) for c in cases)
    stmts = {c["statement"] for c in cases}
    _detail(request, f"{len(cases)} cases over {len(stmts)} statements, max |slack| {worst:.1e}")
    assert len(stmts) >= 14
    assert worst <= 1e-10


# ---------------------------------------------------------------- 4


@pytest.mark.criterion(4)
@pytest.mark.parametrize("dim", [2, 3])
def test_c4_V_and_dual_V_of_K_K(request, dim):
    g = build_grid(dim, DEFAULT_M[dim])
    worst_v = worst_vt = 0.0
    n = 0
    for cb in gen_bodies(7, dim, 40):
        for w in corpus_densities(dim):
            ctx = context(w, g)
            m = mu_measure(ctx, cb.body)
            for p in (1.0, 2.0):
                worst_vt = max(worst_vt, abs(dual_mixed(ctx, cb.body, cb.body, p) / m - 1))
                if cb.convex:
                    S = surface_measure(cb.body, w, p, g)
                    worst_v = max(worst_v, abs(lp_mixed_volume(ctx, S, cb.body, p) / m - 1))
                    n += 1
    _detail(request, f"n={dim}: {n} V cases, max rel err V {worst_v:.1e}, Vt {worst_vt:.1e}")
    assert worst_v <= 1e-3 and worst_vt <= 1e-3


@pytest.mark.criterion(4)
def test_c4_duality_propositions(request, reports):
    _, _, rep = reports(7)
    cases = [c for c in _cases(rep, ("Prop3.1", "Prop3.2", "Prop3.5")) if c["verdict"] != "skipped"]
    bad = [c["id"] for c in cases if c["verdict"] == "fail" or abs(c["slack"]) > c["budget"]]
    b2 = sorted(c["budget"] for c in cases if c["inputs"]["dim"] == 2)
    _detail(request, f"{len(cases)} cases, median n=2 budget {b2[len(b2) // 2]:.1e}, "
                     f"max |slack| {max(abs(c['slack']) for c in cases):.1e}")
    assert cases and not bad
    assert b2[len(b2) // 2] <= 1e-5


# ---------------------------------------------------------------- 5

GATED_STATEMENTS = ("Lemma2.1", "Ineq.Minkowski", "Lemma2.4", "Lemma2.5", "Thm3.3", "Thm3.6", "Thm4.4",
                    "Thm4.5", "Thm4.6", "Thm4.7", "Thm5.1", "Thm5.3", "Thm5.5")


@pytest.mark.criterion(5)
@pytest.mark.parametrize("seed", SEEDS)
def test_c5_inequality_suites(request, reports, seed):
    code, _, rep = reports(seed)
    ineq = [c for c in rep["cases"] if c["kind"] == "inequality"]
    failed = [c["id"] for c in rep["cases"] if c["verdict"] == "fail"]
    gated = [c for c in ineq if c["verdict"] in ("pass", "equality")]
    covered = {s for s in GATED_STATEMENTS if any(c["statement"].startswith(s) for c in gated)}
    # a large refinement budget would make a check vacuous; sides that are bitwise equal
    # (tau=0 in a chain) do not depend on it
    loose = [c["id"] for c in gated if c["budget"] > 0.05 and c["lhs"] != c["rhs"]]
    _detail(request, f"seed {seed}: {len(gated)} gated inequality cases, {len(failed)} gated failures, "
                     f"{len(covered)}/{len(GATED_STATEMENTS)} statements with gated cases")
    assert not failed, failed
    assert code == 0
    assert not loose, loose
    # Thm4.5/4.7 are gated only for Lebesgue (the only even r-concave corpus density); allow a
    # seed to miss at most those two
    assert len(covered) >= len(GATED_STATEMENTS) - 2, set(GATED_STATEMENTS) - covered


# ---------------------------------------------------------------- 6


@pytest.mark.criterion(6)
def test_c6_symmetric_bodies_collapse_chains(request):
    eng = Engine(2)
    sym = [cb.body for cb in gen_bodies(7, 2, 40) if cb.symmetric and cb.convex][:4]
    worst = 0.0
    for K in sym:
        for w in (lebesgue(2), radial_power(2, 2.0)):
            for tau in (-0.6, 0.3, 1.0):
                params = {"density": w, "p": 1.5, "tau": tau, "K": K}
                for fam in ("Thm4.4", "Thm4.6"):
                    for case in check_extreme_chain(params, fam, engine=eng, M=1024):
                        worst = max(worst, abs(case.slack))
    _detail(request, f"{len(sym)} symmetric bodies, max |slack| {worst:.1e}")
    assert worst <= 1e-6


@pytest.mark.criterion(6)
def test_c6_dilates_give_equality_in_dual_lemmas(request):
    eng = Engine(2)
    bodies = [cb.body for cb in gen_bodies(7, 2, 40)][:6]
    worst = 0.0
    for i, K in enumerate(bodies):
        w = corpus_densities(2)[i % 4]
        for p in (0.5, 1.5, -1.0, 1 / w.s + 0.5):
            params = {"density": w, "p": p, "K": K, "L": K.scaled(1.4), "alpha": 0.7, "beta": 1.3}
            for sid in ("Lemma2.4", "Lemma2.5"):
                worst = max(worst, abs(check(sid, params, engine=eng, M=1024).slack))
    _detail(request, f"max |slack| {worst:.1e}")
    assert worst <= 1e-6


@pytest.mark.criterion(6)
def test_c6_K_equal_L_equalities(request):
    eng = Engine(2)
    verdicts = []
    for i, cb in enumerate(gen_bodies(7, 2, 40)[:6]):
        w = corpus_densities(2)[i % 2]
        for p, tau in ((1.0, 0.0), (2.0, 0.3)):
            c36 = check("Thm3.6a" if cb.convex else "Thm3.6b", {"density": w, "p": p, "tau": tau, "src": cb.body, "mode": "equal",
                                    "lam": 0.8, "margin": 0.95}, engine=eng, M=1024)
            c55 = check("Thm5.5b", {"density": w, "p": p, "tau": tau, "K": cb.body, "L": cb.body,
                                    "mode": "equal"}, engine=eng, M=1024)
            verdicts += [c36.verdict, c55.verdict]
    _detail(request, f"{len(verdicts)} cases: {sorted(set(verdicts))}")
    assert set(verdicts) == {"equality"}


@pytest.mark.criterion(6)
def test_c6_blaschke_p1_self_sum(request):
    eng = Engine(2)
    worst = 0.0
    for i, cb in enumerate(b for b in gen_bodies(7, 2, 40) if b.convex):
        if i == 6:
            break
        for w in (lebesgue(2), radial_power(2, 0.5)):
            params = {"density": w, "p": 1.0, "tau": 0.3, "K": cb.body, "L": cb.body}
            worst = max(worst, abs(check_blaschke(params, "Thm5.1", engine=eng, M=1024).slack))
    _detail(request, f"max |slack| {worst:.1e}")
    assert worst <= 1e-9


# ---------------------------------------------------------------- 7


@pytest.mark.criterion(7)
def test_c7_mu_against_monte_carlo(request):
    picks = [(2, cb) for cb in gen_bodies(7, 2, 40)[:7]] + [(3, cb) for cb in gen_bodies(7, 3, 40)[:3]]
    zs = []
    for k, (dim, cb) in enumerate(picks):
        w = corpus_densities(dim)[k % 4]
        quad = mu_measure(context(w, build_grid(dim, DEFAULT_M[dim])), cb.body)
        val, se = mu_measure_mc(w, cb.body, 1_000_000, seed=7, case_id=k)
        zs.append(abs(val - quad) / se)
    _detail(request, f"10 bodies, max |z| {max(zs):.2f}")
    assert max(zs) <= 3.0


@pytest.mark.criterion(7)
def test_c7_centroid_against_monte_carlo(request):
    dirs = build_grid(2, 16)
    zs = []
    for k, cb in enumerate(gen_bodies(7, 2, 40)[:3]):
        w = corpus_densities(2)[k]
        h = centroid_body_tau(cb.body, context(w, build_grid(2, DEFAULT_M[2])), 1.5, 0.3, grid=dirs)
        h_mc, se = centroid_body_tau_mc(cb.body, w, 1.5, 0.3, 1_000_000, seed=7, grid=dirs, case_id=k)
        zs.append(float(np.max(np.abs(h.values - h_mc.values) / se)))
    _detail(request, f"3 bodies x 16 directions, max nodewise |z| {max(zs):.2f}")
    assert max(zs) <= 3.0


# ---------------------------------------------------------------- 8


def _without_timing(text):
    data = json.loads(text)
    data.pop("wall_time", None)
    return json.dumps(data, sort_keys=True)


@pytest.mark.criterion(8)
def test_c8_determinism_and_exit_code(request, reports):
    code1, text1, _ = reports(7, 0)
    code2, text2, _ = reports(7, 1)
    same = _without_timing(text1) == _without_timing(text2)
    _detail(request, f"exit codes {code1},{code2}; identical apart from wall_time: {same}")
    assert code1 == code2 == 0
    assert same


# ---------------------------------------------------------------- 9


@pytest.mark.criterion(9)
def test_c9_convergence_of_polar_projection_of_simplex(request, capsys):
    code = cli.main(["convergence", "--body", "builtin:simplex", "--quantity", "mu-proj-polar", "--p", "1",
                     "--tau", "0", "--grid", "256", "--levels", "4"])
    rows = [dict(t.split("=", 1) for t in line.split()) for line in capsys.readouterr().out.splitlines()]
    deltas = [float(r["delta"]) for r in rows if "delta" in r][1:]
    _detail(request, "deltas " + ", ".join(f"{d:.2e}" for d in deltas))
    assert code == 0 and len(deltas) == 3
    assert all(b < a for a, b in zip(deltas, deltas[1:]))
