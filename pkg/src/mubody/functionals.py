"""Scalar functionals of bodies under a homogeneous measure.

With ``dmu(u) = a(u) du`` on the sphere, the polar-coordinate formula gives
``mu(K) = s int rho_K^{1/s} dmu``. The mixed functionals are

* ``mu_p(K, L) = (1/p) int h_L^p dS_{mu,p}(K)`` and ``V_{mu,p} = s p mu_p``,
* ``Vt_{mu,p}(K, L) = s int rho_K^{(1-sp)/s} rho_L^p dmu`` (dual mixed).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .bodies import Body, BodyError, RadialField, SupportField, _wulff_radial
from .measures import HomogeneousDensity
from .sphgrid import SphereGrid, build_grid, interpolate

MC_MIN_SAMPLES = 1000
MC_CHUNK = 1 << 16


class Estimate(NamedTuple):
    value: float
    error: float
    resolution: int


def lp_power(x: np.ndarray, p: float) -> np.ndarray:
    """``x**p`` for ``x >= 0`` with cheap paths for the common exponents."""
    if p == 1:
        return x
    if p == 2:
        return x * x
    if p == 3:
        return x * x * x
    if p == 1.5:
        return x * np.sqrt(x)
    return x ** p


@dataclass(frozen=True, eq=False)
class MeasureContext:
    density: HomogeneousDensity
    grid: SphereGrid

    def __post_init__(self):
        if self.density.dim != self.grid.dim:
            raise ValueError("density and grid dimensions differ")
        sw = self.density.angular(self.grid.nodes) * self.grid.weights
        if np.any(sw < 0) or not np.sum(sw) > 0:
            raise ValueError("angular profile has no positive mass on this grid")
        sw.flags.writeable = False
        object.__setattr__(self, "sphere_weights", sw)
        object.__setattr__(self, "s", self.density.s)

    @property
    def dim(self) -> int:
        return self.grid.dim

    def coarse(self) -> "MeasureContext":
        return context(self.density, self.grid.coarsened())


_CTX: dict = {}


def context(density: HomogeneousDensity, grid: SphereGrid) -> MeasureContext:
    key = (id(density), grid.key)
    ctx = _CTX.get(key)
    if ctx is None or ctx.density is not density:
        ctx = MeasureContext(density, grid)
        _CTX[key] = ctx
    return ctx


def radial_on(body: Body, grid: SphereGrid) -> np.ndarray:
    """Radial function of ``body`` at the nodes of ``grid``."""
    if isinstance(body, RadialField):
        if body.grid.key == grid.key:
            return body.values
        return interpolate(body.grid, body.values, grid.nodes)
    if isinstance(body, SupportField):
        if body.grid.key == grid.key:
            return body.radial_values()
        return _wulff_radial(body.grid.nodes, body.values, grid.nodes)
    return body.radial(grid.nodes)


def support_on(body, directions: np.ndarray, grid: SphereGrid | None = None) -> np.ndarray:
    """Support values at ``directions``; node values are used verbatim when
    ``body`` is a field living on ``grid`` and ``directions`` are its nodes."""
    if isinstance(body, SupportField) and grid is not None and body.grid.key == grid.key \
            and directions is grid.nodes:
        return body.values
    if isinstance(body, np.ndarray):
        return body
    if callable(body) and not isinstance(body, Body):
        return np.asarray(body(directions), dtype=np.float64)
    return body.support(directions)


def mu_from_radial(ctx: MeasureContext, rho: np.ndarray) -> float:
    if np.any(rho <= 0):
        raise BodyError("radial function must be positive")
    return float(ctx.s * np.sum(rho ** (1.0 / ctx.s) * ctx.sphere_weights))


def mu_measure(ctx: MeasureContext, body: Body) -> float:
    """``s sum rho^{1/s} a(u) w``."""
    return mu_from_radial(ctx, radial_on(body, ctx.grid))


def mu_of_polar(ctx: MeasureContext, h: np.ndarray) -> float:
    """``mu(K*)`` from node support values of ``K``, using ``rho* = 1/h``."""
    if np.any(h <= 0):
        raise BodyError("support values must be positive")
    return float(ctx.s * np.sum(h ** (-1.0 / ctx.s) * ctx.sphere_weights))


def with_refinement(fn: Callable[[SphereGrid], float], grid: SphereGrid) -> Estimate:
    """Value on ``grid`` with ``|v(M) - v(M/2)|`` as error estimate."""
    fine = fn(grid)
    coarse_grid = grid.coarsened()
    if coarse_grid.resolution == grid.resolution:
        return Estimate(fine, 0.0, grid.resolution)
    return Estimate(fine, abs(fine - fn(coarse_grid)), grid.resolution)


def mu_measure_refined(density: HomogeneousDensity, body: Body, grid: SphereGrid) -> Estimate:
    return with_refinement(lambda g: mu_measure(context(density, g), body), grid)


def lp_mixed_mu(ctx: MeasureContext | None, S_K, h_L, p: float) -> float:
    """``(1/p) sum_i h_L(u_i)^p sigma_i`` over the atoms of ``S_K``.

    ``h_L`` may be a body, a callable on ``(N, dim)`` directions, or an
    array of support values already evaluated at the atoms.
    """
    if S_K.p != p:
        raise ValueError(f"surface measure built for p={S_K.p}, functional asked for p={p}")
    u, sigma = S_K.atoms()
    grid = getattr(S_K, "grid", None)
    h = support_on(h_L, u, grid)
    if h.shape != sigma.shape:
        raise ValueError("support values do not match the atoms")
    return float(np.sum(lp_power(h, p) * sigma) / p)


def lp_mixed_volume(ctx: MeasureContext, S_K, h_L, p: float) -> float:
    return ctx.s * p * lp_mixed_mu(ctx, S_K, h_L, p)


def dual_mixed_radial(ctx: MeasureContext, rho_K: np.ndarray, rho_L: np.ndarray, p: float) -> float:
    if p == 0:
        raise ValueError("dual mixed measure needs p != 0")
    e = (1.0 - ctx.s * p) / ctx.s
    if (e < 0 and np.any(rho_K <= 0)) or (p < 0 and np.any(rho_L <= 0)):
        raise BodyError("zero radial value with a negative exponent")
    return float(ctx.s * np.sum(rho_K ** e * rho_L ** p * ctx.sphere_weights))


def dual_mixed(ctx: MeasureContext, K: Body, L: Body, p: float) -> float:
    """``s sum rho_K^{(1-sp)/s} rho_L^p a(u) w``."""
    return dual_mixed_radial(ctx, radial_on(K, ctx.grid), radial_on(L, ctx.grid), p)


# --------------------------------------------------------------------------
# Monte Carlo


def mc_stream(seed: int, case_id: int, chunk: int) -> np.random.Generator:
    """Counter-based stream for one chunk of one case."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, case_id, chunk])))


def sample_box(body: Body, n_samples: int, seed: int, case_id: int = 0):
    """Yield ``(points, box_volume)`` chunks of uniform samples in the bounding box."""
    lo, hi = body.bounding_box()
    lo, hi = np.asarray(lo, dtype=np.float64), np.asarray(hi, dtype=np.float64)
    vol = float(np.prod(hi - lo))
    done, chunk = 0, 0
    while done < n_samples:
        m = min(MC_CHUNK, n_samples - done)
        x = lo + (hi - lo) * mc_stream(seed, case_id, chunk).random((m, lo.shape[0]))
        yield x, vol
        done += m
        chunk += 1


def weighted_inside(w: HomogeneousDensity, body: Body, x: np.ndarray) -> np.ndarray:
    f = np.zeros(x.shape[0])
    inside = body.contains(x) & np.any(x != 0, axis=1)
    if np.any(inside):
        f[inside] = w(x[inside])
    return f


def mu_measure_mc(w: HomogeneousDensity, body: Body, n_samples: int, seed: int,
                  case_id: int = 0) -> tuple[float, float]:
    """Box-rejection estimate of ``int_K omega dx`` and its standard error."""
    if n_samples < MC_MIN_SAMPLES:
        raise ValueError(f"need at least {MC_MIN_SAMPLES} samples")
    s1 = s2 = 0.0
    vol = 0.0
    for x, vol in sample_box(body, n_samples, seed, case_id):
        f = weighted_inside(w, body, x)
        s1 += float(np.sum(f))
        s2 += float(np.sum(f * f))
    mean = s1 / n_samples
    var = max(s2 / n_samples - mean * mean, 0.0) * n_samples / (n_samples - 1)
    return vol * mean, vol * np.sqrt(var / n_samples)


def default_grid(dim: int, resolution: int | None = None) -> SphereGrid:
    if resolution is None:
        resolution = 2048 if dim == 2 else 96
    return build_grid(dim, resolution)
