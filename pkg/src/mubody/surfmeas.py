"""L_p surface mu-area measures of polytopes, ellipsoids and planar support fields.

Two representations share one interface (``atoms()`` returning normals and
masses) so transforms and functionals never branch on the kind:

* :class:`DiscreteSurfaceMeasure` - point masses at facet normals, weight
  ``int_F omega dH^{n-1}`` rescaled by ``h_K(u_i)^{1-p}``.
* :class:`ContinuousSurfaceMeasure` - a density ``g`` on a grid, so the
  masses are ``g_k w_k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bodies import Ball, BodyError, Ellipsoid, Polytope, SupportField, is_support_consistent
from .measures import HomogeneousDensity
from .sphgrid import GridMismatchError, SphereGrid

GL_POINTS = 16
TRI_LEVELS = 2

_gl_x, _gl_w = np.polynomial.legendre.leggauss(GL_POINTS)
GL_NODES = 0.5 * (_gl_x + 1.0)
GL_WEIGHTS = 0.5 * _gl_w

# 7-point degree-5 rule on the reference triangle (barycentric, weights sum to 1)
_r15 = math.sqrt(15.0)
_b1, _b2 = (6.0 + _r15) / 21.0, (6.0 - _r15) / 21.0
TRI_BARY = np.array([
    [1 / 3, 1 / 3, 1 / 3],
    [_b1, _b1, 1 - 2 * _b1], [_b1, 1 - 2 * _b1, _b1], [1 - 2 * _b1, _b1, _b1],
    [_b2, _b2, 1 - 2 * _b2], [_b2, 1 - 2 * _b2, _b2], [1 - 2 * _b2, _b2, _b2],
])
TRI_WEIGHTS = np.array([9 / 40] + [(155 + _r15) / 1200] * 3 + [(155 - _r15) / 1200] * 3)


class SurfaceMeasureError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class DiscreteSurfaceMeasure:
    dim: int
    normals: np.ndarray
    weights: np.ndarray
    p: float = 1.0
    density_id: str = ""
    body_id: str = ""
    kind: str = "raw"

    def __post_init__(self):
        u = np.array(self.normals, dtype=np.float64).reshape(-1, self.dim)
        w = np.array(self.weights, dtype=np.float64).reshape(-1)
        if u.shape[0] != w.shape[0]:
            raise SurfaceMeasureError("normals and weights differ in length")
        if np.any(np.abs(np.linalg.norm(u, axis=1) - 1.0) > 1e-9):
            raise SurfaceMeasureError("atom normals must be unit vectors")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise SurfaceMeasureError("atom weights must be finite and nonnegative")
        u.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "normals", u)
        object.__setattr__(self, "weights", w)

    def atoms(self) -> tuple[np.ndarray, np.ndarray]:
        return self.normals, self.weights

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.weights))

    def is_degenerate(self) -> bool:
        """True when all positive mass sits on a single line through the origin."""
        u = self.normals[self.weights > 0]
        if u.shape[0] == 0:
            return True
        return bool(np.all(np.abs(np.abs(u @ u[0]) - 1.0) <= 1e-12))

    def with_weights(self, weights, **changes) -> "DiscreteSurfaceMeasure":
        kw = dict(dim=self.dim, normals=self.normals, weights=weights, p=self.p,
                  density_id=self.density_id, body_id=self.body_id, kind=self.kind)
        kw.update(changes)
        return DiscreteSurfaceMeasure(**kw)

    def to_json(self) -> dict:
        return {"dim": self.dim, "p": self.p, "density": self.density_id, "body": self.body_id,
                "atoms": [{"normal": u.tolist(), "weight": float(w)}
                          for u, w in zip(self.normals, self.weights)]}


@dataclass(frozen=True, eq=False)
class ContinuousSurfaceMeasure:
    grid: SphereGrid
    values: np.ndarray
    p: float = 1.0
    density_id: str = ""
    body_id: str = ""
    # mass removed by clamping negative curvature samples (support-field route)
    clamped_mass: float = 0.0
    kind: str = "lp"

    def __post_init__(self):
        g = np.array(self.values, dtype=np.float64)
        if g.shape != (self.grid.size,):
            raise GridMismatchError(f"density has {g.shape} values, grid has {self.grid.size} nodes")
        if np.any(g < 0) or not np.all(np.isfinite(g)):
            raise SurfaceMeasureError("surface density must be finite and nonnegative")
        g.flags.writeable = False
        object.__setattr__(self, "values", g)

    @property
    def dim(self) -> int:
        return self.grid.dim

    def atoms(self) -> tuple[np.ndarray, np.ndarray]:
        return self.grid.nodes, self.grid.weights * self.values

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.grid.weights * self.values))

    def is_degenerate(self) -> bool:
        u, w = self.atoms()
        u = u[w > 0]
        if u.shape[0] == 0:
            return True
        return bool(np.all(np.abs(np.abs(u @ u[0]) - 1.0) <= 1e-12))

    def as_discrete(self) -> DiscreteSurfaceMeasure:
        """Atoms at the nodes; used to add a smooth measure to a polytope one."""
        u, m = self.atoms()
        return DiscreteSurfaceMeasure(self.dim, u, m, p=self.p, density_id=self.density_id,
                                      body_id=self.body_id, kind="lp")

    def with_values(self, values, **changes) -> "ContinuousSurfaceMeasure":
        kw = dict(grid=self.grid, values=values, p=self.p, density_id=self.density_id,
                  body_id=self.body_id, clamped_mass=self.clamped_mass, kind=self.kind)
        kw.update(changes)
        return ContinuousSurfaceMeasure(**kw)

    def to_json(self) -> dict:
        return {"dim": self.dim, "p": self.p, "density": self.density_id, "body": self.body_id,
                "resolution": self.grid.resolution, "values": self.values.tolist(),
                "clamped_mass": self.clamped_mass}


SurfaceMeasure = DiscreteSurfaceMeasure | ContinuousSurfaceMeasure


# --------------------------------------------------------------------------
# polytopes


def _edge_integral(a: np.ndarray, b: np.ndarray, w: HomogeneousDensity) -> float:
    length = float(np.linalg.norm(b - a))
    if w.kind == "constant" and w.q == 0:
        return w.c * length
    t0, t1 = 0.0, 1.0
    if w.kind == "cone":
        # the profile vanishes on one side of the cone boundary; integrate
        # only over the part of the edge where it is positive
        e = np.asarray(w.axis)
        da, db = a @ e, b @ e
        if da <= 0 and db <= 0:
            return 0.0
        if da * db < 0:
            cut = da / (da - db)
            t0, t1 = (0.0, cut) if da > 0 else (cut, 1.0)
    t = t0 + (t1 - t0) * GL_NODES
    pts = a[None, :] + t[:, None] * (b - a)[None, :]
    return (t1 - t0) * float(np.dot(GL_WEIGHTS, _density_at(w, pts))) * length


def _clip_triangle(tri: np.ndarray, e: np.ndarray) -> list[np.ndarray]:
    """Part of a triangle in the half-space ``x.e >= 0``, as triangles."""
    d = tri @ e
    if np.all(d >= 0):
        return [tri]
    if np.all(d <= 0):
        return []
    poly = []
    for i in range(3):
        p, q = tri[i], tri[(i + 1) % 3]
        dp, dq = d[i], d[(i + 1) % 3]
        if dp >= 0:
            poly.append(p)
        if dp * dq < 0:
            poly.append(p + dp / (dp - dq) * (q - p))
    return [np.array([poly[0], poly[k], poly[k + 1]]) for k in range(1, len(poly) - 1)]


def _subdivide(tri: np.ndarray, levels: int) -> np.ndarray:
    tris = tri[None]
    for _ in range(levels):
        a, b, c = tris[:, 0], tris[:, 1], tris[:, 2]
        ab, bc, ca = 0.5 * (a + b), 0.5 * (b + c), 0.5 * (c + a)
        tris = np.concatenate([
            np.stack([a, ab, ca], 1), np.stack([ab, b, bc], 1),
            np.stack([ca, bc, c], 1), np.stack([ab, bc, ca], 1)])
    return tris


def _triangle_integral(tri: np.ndarray, w: HomogeneousDensity, levels: int) -> float:
    tris = _subdivide(tri, levels)
    areas = 0.5 * np.linalg.norm(np.cross(tris[:, 1] - tris[:, 0], tris[:, 2] - tris[:, 0]), axis=1)
    pts = np.einsum("qk,tkd->tqd", TRI_BARY, tris).reshape(-1, 3)
    vals = w(pts).reshape(len(tris), -1)
    return float(np.sum(areas * (vals @ TRI_WEIGHTS)))


def _facet_integral(loop: np.ndarray, w: HomogeneousDensity, levels: int) -> float:
    c = loop.mean(axis=0)
    tris = [np.array([c, loop[k], loop[(k + 1) % len(loop)]]) for k in range(len(loop))]
    if w.kind == "constant" and w.q == 0:
        return w.c * sum(0.5 * float(np.linalg.norm(np.cross(t[1] - t[0], t[2] - t[0]))) for t in tris)
    if w.kind == "cone":
        e = np.asarray(w.axis)
        tris = [piece for t in tris for piece in _clip_triangle(t, e)]
    return sum(_triangle_integral(t, w, levels) for t in tris)


def surface_mu_polytope(K: Polytope, w: HomogeneousDensity,
                        levels: int = TRI_LEVELS) -> DiscreteSurfaceMeasure:
    """One atom per facet with weight ``int_F omega dH^{n-1}``."""
    if w.dim != K.dim:
        raise SurfaceMeasureError(f"density dim {w.dim} does not match body dim {K.dim}")
    weights = np.empty(len(K.facets))
    for i, f in enumerate(K.facets):
        loop = K.vertices[list(f)]
        if K.dim == 2:
            weights[i] = _edge_integral(loop[0], loop[1], w)
        else:
            weights[i] = _facet_integral(loop, w, levels)
    return DiscreteSurfaceMeasure(K.dim, K.normals, weights, p=1.0, density_id=w.ident,
                                  body_id=K.ident, kind="raw")


def lp_surface_from_raw(S: DiscreteSurfaceMeasure, K: Polytope, p: float) -> DiscreteSurfaceMeasure:
    """Reweight by ``h_K(u_i)^{1-p}``."""
    if p < 1:
        raise SurfaceMeasureError("L_p surface measures need p >= 1")
    if S.kind != "raw":
        raise SurfaceMeasureError("expected a raw (p=1) surface measure")
    h = K.support(S.normals)
    return S.with_weights(h ** (1.0 - p) * S.weights, p=float(p), kind="lp")


# --------------------------------------------------------------------------
# smooth bodies


def lp_surface_ellipsoid(E: Ellipsoid | Ball, w: HomogeneousDensity, p: float,
                         grid: SphereGrid) -> ContinuousSurfaceMeasure:
    """``g = h^{1-p} f omega(grad h)`` with ``f = det(A)^2 / |A^T u|^{n+1}``."""
    if w.dim != E.dim or grid.dim != E.dim:
        raise SurfaceMeasureError("density, grid and body dimensions differ")
    A = E.matrix
    u = grid.nodes
    h = E.support(u)
    f = np.linalg.det(A) ** 2 / h ** (E.dim + 1)
    g = h ** (1.0 - p) * f * w(E.support_gradient(u))
    return ContinuousSurfaceMeasure(grid, g, p=float(p), density_id=w.ident, body_id=E.ident)


def jackson_factors(m: int) -> np.ndarray:
    """Jackson damping of the rfft modes 0..m//2 (positive trigonometric kernel)."""
    n = m // 2
    k = np.arange(n + 1)
    a = np.pi / (n + 1)
    return ((n - k + 1) * np.cos(a * k) + np.sin(a * k) / np.tan(a)) / (n + 1)


def surface_mu_from_support_field_2d(h: SupportField, w: HomogeneousDensity, p: float,
                                     tol: float = 1e-2, check: bool = True,
                                     method: str = "spectral") -> ContinuousSurfaceMeasure:
    """Planar route ``g = h^{1-p} (h'' + h) omega(h u + h' u')``.

    ``method="spectral"``: derivatives are spectral, damped by the Jackson
    kernel so that the curvature measure ``h'' + h`` of a polygon (a sum of
    point masses) comes out as a smooth bump rather than a ringing series.
    Aliasing of kinks still leaves some negative samples; they are clamped
    to zero and the removed mass is stored in ``clamped_mass``.

    ``method="wulff"``: the exact measure of the Wulff polygon of the
    samples. Node ``k`` carries the edge with normal ``u_k`` between the
    neighbouring vertices and ``omega`` is integrated along it, so the
    result describes the same body as the Wulff radial function.
    """
    grid = h.grid
    if grid.dim != 2:
        raise SurfaceMeasureError("the support-field route is planar only")
    if w.dim != 2:
        raise SurfaceMeasureError("density must be planar")
    if check:
        ok, defect = is_support_consistent(h, tol)
        if not ok:
            raise BodyError(f"support field is not consistent (defect {defect:.3g} > {tol})")
    if method == "wulff":
        return _wulff_polygon_measure(h, w, p)
    if method != "spectral":
        raise ValueError(f"unknown method {method!r}")
    m = grid.size
    vals = h.values
    coef = np.fft.rfft(vals) * jackson_factors(m)
    k = np.arange(coef.shape[0])
    if m % 2 == 0:
        # the Nyquist mode has no well-defined derivative
        coef_d = coef.copy()
        coef_d[-1] = 0.0
    else:
        coef_d = coef
    dh = np.fft.irfft(1j * k * coef_d, n=m)
    curv = np.fft.irfft((1.0 - k * k) * coef, n=m)

    neg = curv < 0
    clamped = float(np.sum(-curv[neg]) * grid.weights[0])
    curv = np.where(neg, 0.0, curv)
    u = grid.nodes
    u_perp = np.column_stack([-u[:, 1], u[:, 0]])
    gamma = vals[:, None] * u + dh[:, None] * u_perp
    g = vals ** (1.0 - p) * curv * _density_at(w, gamma)
    return ContinuousSurfaceMeasure(grid, g, p=float(p), density_id=w.ident, body_id=h.ident,
                                    clamped_mass=clamped)


def _wulff_polygon_measure(h: SupportField, w: HomogeneousDensity, p: float) -> ContinuousSurfaceMeasure:
    grid = h.grid
    m = grid.size
    dt = 2.0 * np.pi / m
    c, s = math.cos(dt), math.sin(dt)
    hk = h.values
    t_lo = (hk * c - np.roll(hk, 1)) / s
    t_hi = (np.roll(hk, -1) - hk * c) / s
    length = t_hi - t_lo
    neg = length < 0
    clamped = float(np.sum(-length[neg]))
    t_hi = np.where(neg, t_lo, t_hi)
    u = grid.nodes
    u_perp = np.column_stack([-u[:, 1], u[:, 0]])
    if w.kind == "constant" and w.q == 0:
        sigma = w.c * (t_hi - t_lo)
    else:
        if w.kind == "cone":
            # keep only the part of each edge where the profile is positive
            e = np.asarray(w.axis)
            a, b = hk * (u @ e), u_perp @ e
            with np.errstate(divide="ignore", invalid="ignore"):
                t0 = -a / b
            t_lo = np.where(b > 0, np.maximum(t_lo, t0), t_lo)
            t_hi = np.where(b < 0, np.minimum(t_hi, t0), t_hi)
            t_hi = np.where((b == 0) & (a <= 0), t_lo, t_hi)
            t_hi = np.maximum(t_hi, t_lo)
        t = t_lo[:, None] + (t_hi - t_lo)[:, None] * GL_NODES[None, :]
        pts = hk[:, None, None] * u[:, None, :] + t[:, :, None] * u_perp[:, None, :]
        vals = _density_at(w, pts.reshape(-1, 2)).reshape(m, -1)
        sigma = (t_hi - t_lo) * (vals @ GL_WEIGHTS)
    g = hk ** (1.0 - p) * sigma / grid.weights
    return ContinuousSurfaceMeasure(grid, g, p=float(p), density_id=w.ident, body_id=h.ident,
                                    clamped_mass=clamped, kind="lp-wulff")


def _density_at(w: HomogeneousDensity, x: np.ndarray) -> np.ndarray:
    r = np.linalg.norm(x, axis=1)
    out = np.zeros(x.shape[0])
    nz = r > 0
    out[nz] = w(x[nz])
    return out


def surface_measure(body, w: HomogeneousDensity, p: float, grid: SphereGrid | None = None,
                    method: str = "spectral"):
    """Dispatch to the route matching the body representation."""
    if isinstance(body, Polytope):
        raw = surface_mu_polytope(body, w)
        return lp_surface_from_raw(raw, body, p)
    if isinstance(body, (Ellipsoid, Ball)):
        if grid is None:
            raise SurfaceMeasureError("smooth bodies need a grid")
        return lp_surface_ellipsoid(body, w, p, grid)
    if isinstance(body, SupportField):
        return surface_mu_from_support_field_2d(body, w, p, method=method)
    raise SurfaceMeasureError(f"no surface-measure route for {type(body).__name__}")


# --------------------------------------------------------------------------
# algebra


def _compatible(S1, S2):
    if type(S1) is not type(S2):
        raise SurfaceMeasureError("cannot add discrete and continuous measures")
    if S1.dim != S2.dim or S1.p != S2.p or S1.density_id != S2.density_id:
        raise SurfaceMeasureError(
            f"measures differ: dim {S1.dim}/{S2.dim}, p {S1.p}/{S2.p}, "
            f"density {S1.density_id}/{S2.density_id}")


def blaschke_add(S1: SurfaceMeasure, S2: SurfaceMeasure) -> SurfaceMeasure:
    """Sum of two measures; bit-identical normals are merged."""
    _compatible(S1, S2)
    body_id = f"{S1.body_id}#{S2.body_id}"
    if isinstance(S1, ContinuousSurfaceMeasure):
        if S1.grid.key != S2.grid.key:
            raise GridMismatchError("continuous measures live on different grids")
        return S1.with_values(S1.values + S2.values, body_id=body_id,
                              clamped_mass=S1.clamped_mass + S2.clamped_mass)
    normals = np.vstack([S1.normals, S2.normals])
    weights = np.concatenate([S1.weights, S2.weights])
    keys = np.ascontiguousarray(normals).view(np.dtype((np.void, normals.dtype.itemsize * S1.dim))).ravel()
    _, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
    order = np.argsort(first)
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    merged = np.zeros(len(first))
    np.add.at(merged, rank[inverse.ravel()], weights)
    return DiscreteSurfaceMeasure(S1.dim, normals[first[order]], merged, p=S1.p,
                                  density_id=S1.density_id, body_id=body_id, kind=S1.kind)


def scale_surface_measure(S: SurfaceMeasure, lam: float, s: float, p: float) -> SurfaceMeasure:
    """Measure of ``lam K`` from that of ``K``: weights times ``lam^{(1-sp)/s}``."""
    if not lam > 0:
        raise SurfaceMeasureError("scale factor must be positive")
    factor = lam ** ((1.0 - s * p) / s)
    if isinstance(S, ContinuousSurfaceMeasure):
        return S.with_values(factor * S.values, clamped_mass=factor * S.clamped_mass)
    return S.with_weights(factor * S.weights)


def surface_measure_from_json(data: dict) -> DiscreteSurfaceMeasure:
    atoms = data["atoms"]
    return DiscreteSurfaceMeasure(int(data["dim"]), [a["normal"] for a in atoms],
                                  [a["weight"] for a in atoms], p=float(data.get("p", 1.0)),
                                  density_id=data.get("density", ""), body_id=data.get("body", ""),
                                  kind="raw" if float(data.get("p", 1.0)) == 1.0 else "lp")
