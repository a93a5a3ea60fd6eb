"""Memoized evaluation of measures, transforms and functionals for the suites.

Everything is keyed by body identifier, density identifier, parameters and
grid resolution, so the same ``Engine`` can serve many cases; identifiers of
derived bodies must therefore encode how they were built.
"""

from __future__ import annotations

import dataclasses
import threading

import numpy as np

from ..bodies import Body, Ellipsoid, Ball, Polytope, RadialField, SupportField, _wulff_radial
from ..functionals import MeasureContext, context, mu_from_radial, mu_of_polar, radial_on
from ..measures import HomogeneousDensity
from ..sphgrid import SphereGrid, build_grid
from ..surfmeas import (ContinuousSurfaceMeasure, lp_surface_ellipsoid, lp_surface_from_raw,
                        surface_mu_from_support_field_2d, surface_mu_polytope)
from ..transforms import (CentroidSource, _checked_root, _kernel_sum, _minus, _plus,
                          centroid_power, centroid_source, proj_power)
from ..measures import c_np
from .cases import SkipCase


def named(body: Body, ident: str) -> Body:
    return dataclasses.replace(body, ident=ident)


def has_surface_measure(body: Body) -> bool:
    return isinstance(body, (Polytope, Ellipsoid, Ball, SupportField))


class Engine:
    def __init__(self, dim: int):
        self.dim = dim
        self._cache: dict = {}
        self._lock = threading.Lock()

    def _memo(self, key, fn):
        try:
            return self._cache[key]
        except KeyError:
            pass
        val = fn()
        with self._lock:
            self._cache.setdefault(key, val)
        return val

    def grid(self, M: int) -> SphereGrid:
        return build_grid(self.dim, M)

    def ctx(self, dens: HomogeneousDensity, M: int) -> MeasureContext:
        return context(dens, self.grid(M))

    # ---------------------------------------------------------------- radial / mu

    def rho(self, body: Body, M: int) -> np.ndarray:
        return self._memo(("rho", body.ident, M), lambda: radial_on(body, self.grid(M)))

    def mu(self, body: Body, dens: HomogeneousDensity, M: int) -> float:
        return self._memo(("mu", body.ident, dens.ident, M),
                          lambda: mu_from_radial(self.ctx(dens, M), self.rho(body, M)))

    def wulff_rho(self, h: np.ndarray, M: int, ident: str) -> np.ndarray:
        g = self.grid(M)
        return self._memo(("wulff", ident, M), lambda: _wulff_radial(g.nodes, h, g.nodes))

    def mu_wulff(self, h: np.ndarray, dens: HomogeneousDensity, M: int, ident: str) -> float:
        """``mu`` of the Wulff shape of node support values ``h`` on grid ``M``."""
        return mu_from_radial(self.ctx(dens, M), self.wulff_rho(h, M, ident))

    def mu_polar(self, h: np.ndarray, dens: HomogeneousDensity, M: int) -> float:
        return mu_of_polar(self.ctx(dens, M), h)

    # ---------------------------------------------------------------- surface measures

    def surface(self, body: Body, dens: HomogeneousDensity, p: float, M: int):
        if isinstance(body, Polytope):
            # exact facet integrals: independent of the grid
            return self._memo(("S", body.ident, dens.ident, p),
                              lambda: lp_surface_from_raw(surface_mu_polytope(body, dens), body, p))
        if isinstance(body, (Ellipsoid, Ball)):
            return self._memo(("S", body.ident, dens.ident, p, M),
                              lambda: lp_surface_ellipsoid(body, dens, p, self.grid(M)))
        if isinstance(body, SupportField):
            if body.grid.dim != 2:
                raise SkipCase("surface measures of sampled support functions need n=2")
            return self._memo(("S", body.ident, dens.ident, p),
                              lambda: surface_mu_from_support_field_2d(
                                  body, dens, p, check=False, method="wulff"))
        raise SkipCase(f"no surface measure for {type(body).__name__} {body.ident}")

    # ---------------------------------------------------------------- projection bodies

    def proj_pow(self, body: Body, dens: HomogeneousDensity, p: float, tau, M: int,
                 route: str = "direct") -> np.ndarray:
        """``h(Pi^tau K)^p`` at the nodes of grid ``M``; ``tau`` may be ``"+"`` or ``"-"``."""
        def run():
            S = self.surface(body, dens, p, M)
            nodes = self.grid(M).nodes
            if tau in ("+", "-"):
                u, m = S.atoms()
                return c_np(S.dim, p) * _kernel_sum(nodes, u, m, _plus if tau == "+" else _minus, p)
            return proj_power(S, nodes, float(tau), route)
        return self._memo(("Pp", body.ident, dens.ident, p, tau, M, route), run)

    def proj(self, body, dens, p, tau, M, route="direct") -> np.ndarray:
        g = self.grid(M)
        return self._memo(("P", body.ident, dens.ident, p, tau, M, route),
                          lambda: _checked_root(self.proj_pow(body, dens, p, tau, M, route), p,
                                                f"Pi^{tau} of {body.ident}", g.nodes))

    def proj_at(self, body, dens, p, tau, M, directions) -> np.ndarray:
        """``h(Pi^tau K)^p`` at arbitrary directions (not cached)."""
        return proj_power(self.surface(body, dens, p, M), directions, float(tau))

    def proj_field(self, body, dens, p, tau, M) -> SupportField:
        h = self.proj(body, dens, p, tau, M)
        return SupportField(self.grid(M), h,
                            ident=f"Pi[{dens.ident},{p!r},{tau!r}]({body.ident})@{M}")

    # ---------------------------------------------------------------- centroid bodies

    def source(self, body: Body, dens: HomogeneousDensity, p: float, M: int) -> CentroidSource:
        return self._memo(("src", body.ident, dens.ident, p, M),
                          lambda: centroid_source(self.rho(body, M), self.ctx(dens, M), p,
                                                  body_id=body.ident))

    def cent_pow(self, body, dens, p, tau, M, route="direct") -> np.ndarray:
        def run():
            src = self.source(body, dens, p, M)
            nodes = self.grid(M).nodes
            if tau in ("+", "-"):
                return centroid_power(src, nodes, 1.0 if tau == "+" else -1.0, "pm")
            return centroid_power(src, nodes, float(tau), route)
        return self._memo(("Gp", body.ident, dens.ident, p, tau, M, route), run)

    def cent(self, body, dens, p, tau, M, route="direct") -> np.ndarray:
        g = self.grid(M)
        return self._memo(("G", body.ident, dens.ident, p, tau, M, route),
                          lambda: _checked_root(self.cent_pow(body, dens, p, tau, M, route), p,
                                                f"Gamma^{tau} of {body.ident}", g.nodes))

    def cent_at(self, body, dens, p, tau, M, directions) -> np.ndarray:
        return centroid_power(self.source(body, dens, p, M), directions, float(tau))

    def cent_field(self, body, dens, p, tau, M) -> SupportField:
        h = self.cent(body, dens, p, tau, M)
        return SupportField(self.grid(M), h,
                            ident=f"Gamma[{dens.ident},{p!r},{tau!r}]({body.ident})@{M}")

    @staticmethod
    def polar_field(f: SupportField) -> RadialField:
        return RadialField(f.grid, 1.0 / f.values, ident=f"{f.ident}*")
