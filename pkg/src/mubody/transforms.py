"""General L_p mu-projection and mu-centroid bodies.

Both operators are psi_tau-weighted cosine transforms of a finite measure on
the sphere, with ``psi_tau(t) = |t| + tau t``:

* projection: ``h(Pi^tau K, u)^p = c_{n,p}(tau) sum_i psi_tau(u.u_i)^p sigma_i``
  over the atoms of ``S_{mu,p}(K, .)``;
* centroid: ``h(Gamma^tau K, u)^p = 2 / (alpha_{n,p}(tau) (p + 1/s) mu(K))
  sum_j psi_tau(u.v_j)^p rho_K(v_j)^{p+1/s} a(v_j) w_j``.

Support values can be requested at arbitrary directions, so mixed
functionals can evaluate them exactly at the atoms of another measure.
The ``"pm"`` route recombines ``g1 h(Pi^+)^p + g2 h(Pi^-)^p`` from the
one-sided kernels and serves as an independent cross-check of the direct
``"direct"`` route.

For Lebesgue measure, ``c_{n,p}^{-1/p} Gamma^tau`` is the classical
normalisation of the L_p moment body; no separate operator is provided.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bodies import Body, RadialField, SupportField
from .functionals import (MeasureContext, lp_power, mc_stream, mu_from_radial, radial_on,
                          sample_box, weighted_inside, MC_MIN_SAMPLES)
from .measures import HomogeneousDensity, alpha_np_tau, c_np, c_np_tau, g_pair, _check_tau
from .sphgrid import SphereGrid, build_grid

ROUTES = ("direct", "pm", "spatial-mc")
_BLOCK = 1 << 20
# h^p below this fraction of its maximum counts as zero (the polar would be unbounded)
DEGENERATE_RTOL = 1e-12


class DegenerateTransformError(ArithmeticError):
    """A transform produced a nonpositive support value."""

    def __init__(self, what: str, node: int, direction, value: float):
        self.node = node
        super().__init__(f"{what}: h^p = {value:.3g} <= 0 at node {node} "
                         f"(direction {np.round(np.asarray(direction), 6).tolist()})")


@dataclass(frozen=True, eq=False)
class TransformResult:
    field: SupportField | RadialField
    params: dict
    route: str = "direct"

    @property
    def values(self) -> np.ndarray:
        return self.field.values

    def to_json(self) -> dict:
        out = self.field.to_json()
        out["params"] = dict(self.params, route=self.route)
        return out


def _kernel_sum(directions: np.ndarray, normals: np.ndarray, masses: np.ndarray,
                kernel, p: float) -> np.ndarray:
    """``sum_j kernel(u.v_j)^p m_j`` for each direction ``u``, in row blocks."""
    keep = masses > 0
    normals, masses = normals[keep], masses[keep]
    out = np.empty(directions.shape[0])
    rows = max(1, _BLOCK // max(1, normals.shape[0]))
    for start in range(0, directions.shape[0], rows):
        t = directions[start:start + rows] @ normals.T
        out[start:start + rows] = lp_power(kernel(t), p) @ masses
    return out


def _psi(tau):
    if tau == 0:
        return np.abs
    return lambda t: np.abs(t) + tau * t


def _plus(t):
    return np.maximum(t, 0.0)


def _minus(t):
    return np.maximum(-t, 0.0)


def _checked_root(hp: np.ndarray, p: float, what: str, directions: np.ndarray) -> np.ndarray:
    top = float(np.max(hp)) if hp.size else 0.0
    bad = np.flatnonzero(~(hp > DEGENERATE_RTOL * max(top, 0.0)) | ~(hp > 0))
    if bad.size:
        k = int(bad[0])
        raise DegenerateTransformError(what, k, directions[k], float(hp[k]))
    return hp if p == 1 else hp ** (1.0 / p)


# --------------------------------------------------------------------------
# projection bodies


def proj_power(S, directions: np.ndarray, tau: float, route: str = "direct") -> np.ndarray:
    """``h(Pi^tau K, u)^p`` at ``directions`` from the measure ``S = S_{mu,p}(K)``."""
    _check_tau(tau)
    u, m = S.atoms()
    p, n = S.p, S.dim
    directions = np.atleast_2d(directions)
    if route == "direct":
        return c_np_tau(n, p, tau) * _kernel_sum(directions, u, m, _psi(tau), p)
    if route == "pm":
        g = g_pair(p, tau)
        c = c_np(n, p)
        out = np.zeros(directions.shape[0])
        if g.g1 > 0:
            out += g.g1 * c * _kernel_sum(directions, u, m, _plus, p)
        if g.g2 > 0:
            out += g.g2 * c * _kernel_sum(directions, u, m, _minus, p)
        return out
    raise ValueError(f"unknown route {route!r}")


def proj_support(S, directions: np.ndarray, tau: float, route: str = "direct") -> np.ndarray:
    directions = np.atleast_2d(directions)
    if S.is_degenerate():
        raise DegenerateTransformError("surface measure concentrated on a line", 0, directions[0], 0.0)
    return _checked_root(proj_power(S, directions, tau, route), S.p,
                         f"Pi^{tau:g} of {S.body_id}", directions)


def _proj_result(S, grid: SphereGrid, tau: float, route: str, op: str) -> TransformResult:
    h = proj_support(S, grid.nodes, tau, route)
    ident = f"{op}({S.body_id})"
    params = {"op": op, "p": S.p, "tau": tau, "density": S.density_id,
              "grid": list(grid.key), "source": S.body_id}
    return TransformResult(SupportField(grid, h, ident=ident), params, route)


def proj_body_tau(S, grid: SphereGrid, tau: float, ctx: MeasureContext | None = None,
                  route: str = "direct") -> TransformResult:
    return _proj_result(S, grid, tau, route, f"Pi^{tau:g}")


def proj_body_plus(S, grid: SphereGrid, ctx: MeasureContext | None = None) -> TransformResult:
    """One-sided kernel ``c_{n,p} (u.v)_+^p``."""
    u, m = S.atoms()
    h = _checked_root(c_np(S.dim, S.p) * _kernel_sum(grid.nodes, u, m, _plus, S.p), S.p,
                      f"Pi^+ of {S.body_id}", grid.nodes)
    params = {"op": "Pi^+", "p": S.p, "tau": 1.0, "density": S.density_id,
              "grid": list(grid.key), "source": S.body_id}
    return TransformResult(SupportField(grid, h, ident=f"Pi^+({S.body_id})"), params, "direct")


def proj_body_minus(S, grid: SphereGrid, ctx: MeasureContext | None = None) -> TransformResult:
    """One-sided kernel ``c_{n,p} (u.v)_-^p``."""
    u, m = S.atoms()
    h = _checked_root(c_np(S.dim, S.p) * _kernel_sum(grid.nodes, u, m, _minus, S.p), S.p,
                      f"Pi^- of {S.body_id}", grid.nodes)
    params = {"op": "Pi^-", "p": S.p, "tau": -1.0, "density": S.density_id,
              "grid": list(grid.key), "source": S.body_id}
    return TransformResult(SupportField(grid, h, ident=f"Pi^-({S.body_id})"), params, "direct")


# --------------------------------------------------------------------------
# centroid bodies


@dataclass(frozen=True, eq=False)
class CentroidSource:
    """Sphere-form data of a star body: node masses ``rho^{p+1/s} a w`` and ``mu(K)``."""

    ctx: MeasureContext
    rho: np.ndarray
    p: float
    mu: float
    masses: np.ndarray = field(repr=False)
    body_id: str = ""


def centroid_source(body: Body | np.ndarray, ctx: MeasureContext, p: float,
                    body_id: str | None = None) -> CentroidSource:
    rho = body if isinstance(body, np.ndarray) else radial_on(body, ctx.grid)
    mu = mu_from_radial(ctx, rho)
    if not mu > 0:
        raise DegenerateTransformError("zero measure", 0, ctx.grid.nodes[0], mu)
    masses = rho ** (p + 1.0 / ctx.s) * ctx.sphere_weights
    ident = body_id if body_id is not None else getattr(body, "ident", "body")
    return CentroidSource(ctx, rho, p, mu, masses, ident)


def centroid_power(src: CentroidSource, directions: np.ndarray, tau: float,
                   route: str = "direct") -> np.ndarray:
    _check_tau(tau)
    p, n, s = src.p, src.ctx.dim, src.ctx.s
    directions = np.atleast_2d(directions)
    v = src.ctx.grid.nodes
    if route == "direct":
        factor = 2.0 / (alpha_np_tau(n, p, tau) * (p + 1.0 / s) * src.mu)
        return factor * _kernel_sum(directions, v, src.masses, _psi(tau), p)
    if route == "pm":
        g = g_pair(p, tau)
        factor = 2.0 / (c_np(n, p) * (p + 1.0 / s) * src.mu)
        out = np.zeros(directions.shape[0])
        if g.g1 > 0:
            out += g.g1 * factor * _kernel_sum(directions, v, src.masses, _plus, p)
        if g.g2 > 0:
            out += g.g2 * factor * _kernel_sum(directions, v, src.masses, _minus, p)
        return out
    raise ValueError(f"unknown route {route!r}")


def centroid_support(src: CentroidSource, directions: np.ndarray, tau: float,
                     route: str = "direct") -> np.ndarray:
    directions = np.atleast_2d(directions)
    return _checked_root(centroid_power(src, directions, tau, route), src.p,
                         f"Gamma^{tau:g} of {src.body_id}", directions)


def centroid_body_tau(body: Body, ctx: MeasureContext, p: float, tau: float,
                      grid: SphereGrid | None = None, route: str = "direct") -> TransformResult:
    """Sphere form; ``mu(K)`` is taken on the same grid as the outer sum."""
    if p < 1:
        raise ValueError("centroid bodies need p >= 1")
    grid = grid or ctx.grid
    src = centroid_source(body, ctx, p)
    h = centroid_support(src, grid.nodes, tau, route)
    params = {"op": f"Gamma^{tau:g}", "p": p, "tau": tau, "density": ctx.density.ident,
              "grid": list(grid.key), "source": src.body_id, "mu_source": src.mu}
    return TransformResult(SupportField(grid, h, ident=f"Gamma^{tau:g}({src.body_id})"), params, route)


def centroid_body_tau_mc(body: Body, w: HomogeneousDensity, p: float, tau: float,
                         n_samples: int, seed: int, grid: SphereGrid | None = None,
                         case_id: int = 0) -> tuple[SupportField, np.ndarray]:
    """Spatial form ``2/(alpha mu(K)) int_K psi_tau(u.x)^p dmu(x)`` by Monte Carlo.

    Returns the field on ``grid`` (default: 64 directions in the plane,
    8 x 16 in space) and the nodewise standard error of ``h``, from the
    delta method applied to the ratio of the two sample means.
    """
    _check_tau(tau)
    if n_samples < MC_MIN_SAMPLES:
        raise ValueError(f"need at least {MC_MIN_SAMPLES} samples")
    grid = grid or build_grid(w.dim, 64 if w.dim == 2 else 8)
    dirs = grid.nodes
    k = dirs.shape[0]
    sf = sff = 0.0
    sg = np.zeros(k)
    sgg = np.zeros(k)
    sfg = np.zeros(k)
    kern = _psi(tau)
    for x, _ in sample_box(body, n_samples, seed, case_id):
        f = weighted_inside(w, body, x)
        inside = f > 0
        xf, ff = x[inside], f[inside]
        g = lp_power(kern(xf @ dirs.T), p) * ff[:, None]
        sf += float(np.sum(ff))
        sff += float(np.sum(ff * ff))
        sg += g.sum(axis=0)
        sgg += np.sum(g * g, axis=0)
        sfg += g.T @ ff
    N = float(n_samples)
    mf, mg = sf / N, sg / N
    ratio = mg / mf
    # var of mean(g - R f) / mean(f)^2
    var_num = (sgg - 2 * ratio * sfg + ratio ** 2 * sff) / N
    se_ratio = np.sqrt(np.maximum(var_num, 0.0) / (N - 1)) / mf
    factor = 2.0 / alpha_np_tau(w.dim, p, tau)
    hp = factor * ratio
    h = _checked_root(hp, p, "Monte Carlo centroid", dirs)
    se_h = factor * se_ratio / (p * h ** (p - 1.0))
    return SupportField(grid, h, ident=f"Gamma^{tau:g}_mc({getattr(body, 'ident', 'body')})"), se_h


def polar_of(result: TransformResult) -> TransformResult:
    """Nodewise reciprocal, switching between support and radial fields."""
    f = result.field
    op = result.params.get("op", "")
    if isinstance(f, SupportField):
        polar = RadialField(f.grid, 1.0 / f.values, ident=f"{f.ident}*")
        op = op + "*"
    else:
        polar = SupportField(f.grid, 1.0 / f.values, ident=f.ident.rstrip("*"))
        op = op.rstrip("*")
    return TransformResult(polar, dict(result.params, op=op), result.route)
