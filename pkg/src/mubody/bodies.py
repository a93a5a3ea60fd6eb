"""Convex and star bodies: exact representations and grid-sampled fields.

Exact bodies (:class:`Polytope`, :class:`Ellipsoid`, :class:`Ball`) evaluate
support and radial functions in closed form at any direction. Fields
(:class:`SupportField`, :class:`RadialField`) hold node samples on a
:class:`~mubody.sphgrid.SphereGrid` and are what every transform produces.

A support field stands for the Wulff shape ``{x : x.v <= h(v) for all nodes v}``
of its samples, a radial field for the star body ``{t u : 0 <= t <= rho(u)}``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .sphgrid import GridMismatchError, SphereGrid, build_grid, interpolate

log = logging.getLogger(__name__)

WULFF_DELTA = 1e-9
FACET_TOL = 1e-9
_CHUNK = 256


class BodyError(ValueError):
    pass


def _unit_rows(u) -> np.ndarray:
    return np.atleast_2d(np.asarray(u, dtype=np.float64))


class Body:
    """Common interface. ``support``/``radial`` take ``(N, dim)`` unit vectors."""

    dim: int
    ident: str = "body"

    def support(self, u) -> np.ndarray:
        raise NotImplementedError

    def radial(self, u) -> np.ndarray:
        raise NotImplementedError

    def contains(self, x) -> np.ndarray:
        x = _unit_rows(x)
        r = np.linalg.norm(x, axis=1)
        inside = r == 0
        nz = ~inside
        if np.any(nz):
            inside[nz] = r[nz] <= self.radial(x[nz] / r[nz, None])
        return inside

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        eye = np.eye(self.dim)
        return -self.support(-eye), self.support(eye)

    def scaled(self, lam: float) -> "Body":
        raise NotImplementedError

    def negated(self) -> "Body":
        raise NotImplementedError

    @property
    def is_convex(self) -> bool:
        return True


@dataclass(frozen=True, eq=False)
class Polytope(Body):
    """Convex polytope with the origin in its interior.

    ``facets[i]`` lists the vertex indices of facet ``i`` in cyclic order
    (for ``dim=2`` an edge ``(a, b)`` in counter-clockwise order).
    """

    vertices: np.ndarray
    normals: np.ndarray
    offsets: np.ndarray
    facets: tuple[tuple[int, ...], ...]
    ident: str = "polytope"

    def __post_init__(self):
        for name in ("vertices", "normals", "offsets"):
            a = np.array(getattr(self, name), dtype=np.float64)
            a.flags.writeable = False
            object.__setattr__(self, name, a)
        if np.any(self.offsets <= 0):
            raise BodyError("origin is not interior to the polytope")

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    def support(self, u) -> np.ndarray:
        return np.max(_unit_rows(u) @ self.vertices.T, axis=1)

    def radial(self, u) -> np.ndarray:
        d = _unit_rows(u) @ self.normals.T
        ratio = np.full(d.shape, np.inf)
        np.divide(self.offsets, d, out=ratio, where=d > 0)
        out = ratio.min(axis=1)
        if not np.all(np.isfinite(out)):
            raise BodyError("unbounded ray: no facet faces the query direction")
        return out

    def contains(self, x) -> np.ndarray:
        return np.all(_unit_rows(x) @ self.normals.T <= self.offsets, axis=1)

    def bounding_box(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def scaled(self, lam: float) -> "Polytope":
        _check_scale(lam)
        return Polytope(lam * self.vertices, self.normals, lam * self.offsets,
                        self.facets, ident=f"{lam!r}*{self.ident}")

    def negated(self) -> "Polytope":
        # in 3D the point reflection flips loop orientation; only the
        # vertex sets matter downstream
        return Polytope(-self.vertices, -self.normals, self.offsets, self.facets,
                        ident=f"-{self.ident}")

    def to_json(self) -> dict:
        return {"type": "polytope", "vertices": self.vertices.tolist()}


@dataclass(frozen=True, eq=False)
class Ellipsoid(Body):
    """The image ``A B^n`` of the unit ball under a nonsingular matrix."""

    matrix: np.ndarray
    ident: str = "ellipsoid"

    def __post_init__(self):
        a = np.array(self.matrix, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] not in (2, 3):
            raise BodyError("ellipsoid matrix must be 2x2 or 3x3")
        if abs(np.linalg.det(a)) < 1e-14:
            raise BodyError("ellipsoid matrix is singular")
        a.flags.writeable = False
        object.__setattr__(self, "matrix", a)
        inv = np.linalg.inv(a)
        inv.flags.writeable = False
        object.__setattr__(self, "_inv", inv)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def support(self, u) -> np.ndarray:
        return np.linalg.norm(_unit_rows(u) @ self.matrix, axis=1)

    def support_gradient(self, u) -> np.ndarray:
        u = _unit_rows(u)
        atu = u @ self.matrix
        return (atu @ self.matrix.T) / np.linalg.norm(atu, axis=1)[:, None]

    def radial(self, u) -> np.ndarray:
        return 1.0 / np.linalg.norm(_unit_rows(u) @ self._inv.T, axis=1)

    def contains(self, x) -> np.ndarray:
        return np.linalg.norm(_unit_rows(x) @ self._inv.T, axis=1) <= 1.0

    def scaled(self, lam: float) -> "Ellipsoid":
        _check_scale(lam)
        return Ellipsoid(lam * self.matrix, ident=f"{lam!r}*{self.ident}")

    def negated(self) -> "Ellipsoid":
        return Ellipsoid(-self.matrix, ident=f"-{self.ident}")

    def to_json(self) -> dict:
        return {"type": "ellipsoid", "matrix": self.matrix.tolist()}


@dataclass(frozen=True, eq=False)
class Ball(Body):
    dim: int
    radius: float = 1.0
    ident: str = "ball"

    def __post_init__(self):
        if self.radius <= 0:
            raise BodyError("ball radius must be positive")

    def support(self, u) -> np.ndarray:
        return np.full(_unit_rows(u).shape[0], float(self.radius))

    radial = support

    def support_gradient(self, u) -> np.ndarray:
        return self.radius * _unit_rows(u)

    @property
    def matrix(self) -> np.ndarray:
        return self.radius * np.eye(self.dim)

    def contains(self, x) -> np.ndarray:
        return np.linalg.norm(_unit_rows(x), axis=1) <= self.radius

    def scaled(self, lam: float) -> "Ball":
        _check_scale(lam)
        return Ball(self.dim, lam * self.radius, ident=f"{lam!r}*{self.ident}")

    def negated(self) -> "Ball":
        return self

    def to_json(self) -> dict:
        return {"type": "ball", "dim": self.dim, "radius": self.radius}


def _star_modes(u: np.ndarray, dim: int, degree: int) -> np.ndarray:
    """Real trigonometric (n=2) or monomial (n=3) modes of total degree 1..degree."""
    if dim == 2:
        th = np.arctan2(u[:, 1], u[:, 0])
        cols = []
        for k in range(1, degree + 1):
            cols += [np.cos(k * th), np.sin(k * th)]
        return np.column_stack(cols)
    cols = []
    for d in range(1, degree + 1):
        for i in range(d + 1):
            for j in range(d + 1 - i):
                cols.append(u[:, 0] ** i * u[:, 1] ** j * u[:, 2] ** (d - i - j))
    return np.column_stack(cols)


def _mode_degrees(dim: int, degree: int) -> np.ndarray:
    if dim == 2:
        return np.repeat(np.arange(1, degree + 1), 2)
    return np.array([d for d in range(1, degree + 1) for i in range(d + 1) for _ in range(d + 1 - i)])


def _mode_parity(dim: int, degree: int) -> np.ndarray:
    return _mode_degrees(dim, degree) % 2


@dataclass(frozen=True, eq=False)
class StarBody(Body):
    """Star body ``rho(u) = base(u) * (offset + amp * P(u) / max|P|)``.

    ``P`` is a fixed combination of low-degree modes; even modes only give
    an origin-symmetric body. ``base`` is 1 or the radial function of
    another body, which makes pointwise shrinking of any body available.
    """

    dim: int
    coeffs: np.ndarray
    degree: int = 4
    amp: float = 0.3
    offset: float = 1.0
    base: Body | None = None
    ident: str = "star"

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.float64)
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)
        probe = build_grid(self.dim, 256 if self.dim == 2 else 48).nodes
        peak = float(np.max(np.abs(_star_modes(probe, self.dim, self.degree) @ c)))
        object.__setattr__(self, "_norm", peak if peak > 0 else 1.0)
        if self.offset - self.amp <= 0:
            raise BodyError("star body radial function must stay positive")

    @property
    def symmetric(self) -> bool:
        odd = _mode_parity(self.dim, self.degree) == 1
        base_sym = self.base is None or getattr(self.base, "symmetric", False)
        return bool(base_sym and np.all(self.coeffs[odd] == 0))

    @property
    def is_convex(self) -> bool:
        return False

    def radial(self, u) -> np.ndarray:
        u = _unit_rows(u)
        p = np.clip(_star_modes(u, self.dim, self.degree) @ self.coeffs / self._norm, -1.0, 1.0)
        r = self.offset + self.amp * p
        if self.base is not None:
            r = r * self.base.radial(u)
        return r

    def support(self, u) -> np.ndarray:
        pts = build_grid(self.dim, 1024 if self.dim == 2 else 48).nodes
        return _hull_support(pts, self.radial(pts), _unit_rows(u))

    def bounding_box(self):
        r = (self.offset + self.amp) * (1.0 if self.base is None else
                                        float(np.max(np.abs(np.concatenate(self.base.bounding_box())))) * np.sqrt(self.dim))
        return np.full(self.dim, -r), np.full(self.dim, r)

    def scaled(self, lam: float) -> "StarBody":
        _check_scale(lam)
        return StarBody(self.dim, self.coeffs, self.degree, lam * self.amp, lam * self.offset,
                        self.base, ident=f"{lam!r}*{self.ident}")

    def negated(self) -> "StarBody":
        flip = np.where(_mode_parity(self.dim, self.degree) == 1, -1.0, 1.0)
        base = None if self.base is None else self.base.negated()
        return StarBody(self.dim, self.coeffs * flip, self.degree, self.amp, self.offset, base,
                        ident=f"-{self.ident}")

    def to_json(self) -> dict:
        out = {"type": "star", "dim": self.dim, "degree": self.degree, "coeffs": self.coeffs.tolist(),
               "amp": self.amp, "offset": self.offset}
        if self.base is not None:
            out["base"] = self.base.to_json()
        return out


def _positive_values(values, grid: SphereGrid, what: str) -> np.ndarray:
    v = np.array(values, dtype=np.float64)
    if v.shape != (grid.size,):
        raise GridMismatchError(f"{what} has {v.shape} values, grid has {grid.size} nodes")
    if not np.all(np.isfinite(v)) or np.any(v <= 0):
        bad = int(np.argmin(np.where(np.isfinite(v), v, -np.inf)))
        raise BodyError(f"{what} must be positive and finite (node {bad}: {v[bad]!r})")
    v.flags.writeable = False
    return v


@dataclass(frozen=True, eq=False)
class SupportField(Body):
    """Support-function samples; the body is the Wulff shape of the samples."""

    grid: SphereGrid
    values: np.ndarray
    ident: str = "support_field"
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "values", _positive_values(self.values, self.grid, "support field"))

    @property
    def dim(self) -> int:
        return self.grid.dim

    def support(self, u) -> np.ndarray:
        return interpolate(self.grid, self.values, _unit_rows(u))

    def radial_values(self) -> np.ndarray:
        if "radial" not in self._cache:
            self._cache["radial"] = _wulff_radial(self.grid.nodes, self.values, self.grid.nodes)
        return self._cache["radial"]

    def radial(self, u) -> np.ndarray:
        return interpolate(self.grid, self.radial_values(), _unit_rows(u))

    def bounding_box(self):
        r = float(np.max(self.values))
        return np.full(self.dim, -r), np.full(self.dim, r)

    def scaled(self, lam: float) -> "SupportField":
        _check_scale(lam)
        return SupportField(self.grid, lam * self.values, ident=f"{lam!r}*{self.ident}")

    def negated(self) -> "SupportField":
        return SupportField(self.grid, self.values[_antipode(self.grid)], ident=f"-{self.ident}")

    def to_json(self) -> dict:
        return {"type": "support_field", "dim": self.dim, "resolution": self.grid.resolution,
                "values": self.values.tolist()}


@dataclass(frozen=True, eq=False)
class RadialField(Body):
    """Radial-function samples of a star body."""

    grid: SphereGrid
    values: np.ndarray
    ident: str = "radial_field"

    def __post_init__(self):
        object.__setattr__(self, "values", _positive_values(self.values, self.grid, "radial field"))

    @property
    def dim(self) -> int:
        return self.grid.dim

    def radial(self, u) -> np.ndarray:
        return interpolate(self.grid, self.values, _unit_rows(u))

    def support(self, u) -> np.ndarray:
        # support of the hull of the sampled boundary points
        return _hull_support(self.grid.nodes, self.values, _unit_rows(u))

    def bounding_box(self):
        r = float(np.max(self.values))
        return np.full(self.dim, -r), np.full(self.dim, r)

    def scaled(self, lam: float) -> "RadialField":
        _check_scale(lam)
        return RadialField(self.grid, lam * self.values, ident=f"{lam!r}*{self.ident}")

    def negated(self) -> "RadialField":
        return RadialField(self.grid, self.values[_antipode(self.grid)], ident=f"-{self.ident}")

    @property
    def is_convex(self) -> bool:
        return False

    def to_json(self) -> dict:
        return {"type": "radial_field", "dim": self.dim, "resolution": self.grid.resolution,
                "values": self.values.tolist()}


def _antipode(grid: SphereGrid) -> np.ndarray:
    if not grid.antipodal_closed:
        raise BodyError("negating a field needs an antipodally closed grid")
    return grid.antipode


def _check_scale(lam: float):
    if not lam > 0:
        raise BodyError(f"scale factor must be positive, got {lam}")


def _wulff_radial(nodes: np.ndarray, h: np.ndarray, targets: np.ndarray,
                  delta: float = WULFF_DELTA) -> np.ndarray:
    out = np.empty(targets.shape[0])
    for start in range(0, targets.shape[0], _CHUNK):
        d = targets[start:start + _CHUNK] @ nodes.T
        ratio = np.full(d.shape, np.inf)
        np.divide(h, d, out=ratio, where=d > delta)
        out[start:start + _CHUNK] = ratio.min(axis=1)
    if not np.all(np.isfinite(out)):
        raise BodyError("no admissible node for a Wulff-shape ray")
    return out


def _hull_support(nodes: np.ndarray, rho: np.ndarray, targets: np.ndarray) -> np.ndarray:
    pts = nodes * rho[:, None]
    out = np.empty(targets.shape[0])
    for start in range(0, targets.shape[0], _CHUNK):
        out[start:start + _CHUNK] = np.max(targets[start:start + _CHUNK] @ pts.T, axis=1)
    return out


# --------------------------------------------------------------------------
# evaluation and sampling


def support(body: Body, u) -> np.ndarray | float:
    u = np.asarray(u, dtype=np.float64)
    out = body.support(u)
    return float(out[0]) if u.ndim == 1 else out


def radial(body: Body, u) -> np.ndarray | float:
    u = np.asarray(u, dtype=np.float64)
    out = body.radial(u)
    return float(out[0]) if u.ndim == 1 else out


def support_field(body: Body, grid: SphereGrid) -> SupportField:
    """Sample the support function of a convex body on ``grid``."""
    if isinstance(body, SupportField):
        if body.grid.key == grid.key:
            return body
        return SupportField(grid, body.support(grid.nodes), ident=body.ident)
    if not body.is_convex:
        raise BodyError(f"{body.ident} is not a convex body")
    return SupportField(grid, body.support(grid.nodes), ident=body.ident)


def radial_field(body: Body, grid: SphereGrid) -> RadialField:
    """Sample the radial function of a star body on ``grid``."""
    if isinstance(body, RadialField) and body.grid.key == grid.key:
        return body
    if isinstance(body, SupportField) and body.grid.key == grid.key:
        return RadialField(grid, body.radial_values(), ident=body.ident)
    return RadialField(grid, body.radial(grid.nodes), ident=body.ident)


def radial_from_support_field(h: SupportField) -> RadialField:
    """Radial function of the Wulff shape: ``min_{v.u > delta} h(v)/(u.v)``."""
    return RadialField(h.grid, h.radial_values(), ident=f"wulff({h.ident})")


def is_support_consistent(h: SupportField, tol: float) -> tuple[bool, float]:
    """Compare samples with the support of their own Wulff shape.

    Returns ``(defect <= tol, defect)`` with the maximal relative nodewise
    gap between ``h`` and the reconstructed support.
    """
    rho = h.radial_values()
    h_hat = _hull_support(h.grid.nodes, rho, h.grid.nodes)
    defect = float(np.max(np.abs(h_hat - h.values) / h.values))
    return defect <= tol, defect


def polar_field(h: SupportField) -> RadialField:
    return RadialField(h.grid, 1.0 / h.values, ident=f"polar({h.ident})")


def polar_radial(r: RadialField, tol: float = 1e-2) -> SupportField:
    """Reciprocal of a radial field, read as a support field.

    Only meaningful when the star body is convex. Inputs whose reciprocal
    fails :func:`is_support_consistent` are logged, not rejected; the
    defect is kept in the returned field's cache under ``"defect"``.
    """
    out = SupportField(r.grid, 1.0 / r.values, ident=f"polar({r.ident})")
    ok, defect = is_support_consistent(out, tol)
    out._cache["defect"] = defect
    if not ok:
        log.warning("polar of %s is not a consistent support field (defect %.3g)", r.ident, defect)
    return out


def _same_grid(a, b):
    if a.grid.key != b.grid.key:
        raise GridMismatchError(f"fields live on different grids {a.grid.key} and {b.grid.key}")


def lp_minkowski_combine(alpha: float, K: SupportField, beta: float, L: SupportField,
                         p: float) -> SupportField:
    """``h^p = alpha h_K^p + beta h_L^p`` nodewise."""
    _same_grid(K, L)
    if p < 1:
        raise ValueError("L_p Minkowski combination needs p >= 1")
    if alpha < 0 or beta < 0 or alpha + beta <= 0:
        raise ValueError("coefficients must be nonnegative and not both zero")
    hp = alpha * K.values ** p + beta * L.values ** p
    return SupportField(K.grid, hp ** (1.0 / p), ident=f"({alpha:g}.{K.ident} +{p:g} {beta:g}.{L.ident})")


def lp_radial_combine(alpha: float, K: RadialField, beta: float, L: RadialField,
                      p: float) -> RadialField:
    """``rho^p = alpha rho_K^p + beta rho_L^p`` nodewise, ``p != 0``."""
    _same_grid(K, L)
    if p == 0:
        raise ValueError("radial combination needs p != 0")
    if alpha < 0 or beta < 0 or alpha + beta <= 0:
        raise ValueError("coefficients must be nonnegative and not both zero")
    # fields are strictly positive by construction, so negative p is safe
    rp = alpha * K.values ** p + beta * L.values ** p
    return RadialField(K.grid, rp ** (1.0 / p), ident=f"({alpha:g}o{K.ident} ~+{p:g} {beta:g}o{L.ident})")


def scale_body(body: Body, lam: float) -> Body:
    return body.scaled(lam)


def negate_body(body: Body) -> Body:
    return body.negated()


# --------------------------------------------------------------------------
# convex hulls


def convex_hull(points, dim: int | None = None, merge_coplanar: bool = True,
                ident: str = "polytope") -> Polytope:
    """Convex hull as a :class:`Polytope` with outward normals.

    2D uses an angular sort plus Graham scan; 3D delegates to Qhull and
    optionally merges coplanar triangles (normal tolerance 1e-9).
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2:
        raise BodyError("points must be a 2-d array")
    dim = dim or pts.shape[1]
    if pts.shape[1] != dim or dim not in (2, 3):
        raise BodyError("hulls are available in dimensions 2 and 3")
    if pts.shape[0] < dim + 1:
        raise BodyError(f"need at least {dim + 1} points")
    if dim == 2:
        return _hull_2d(pts, ident)
    return _hull_3d(pts, merge_coplanar, ident)


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _hull_2d(pts: np.ndarray, ident: str) -> Polytope:
    pivot = int(np.lexsort((pts[:, 0], pts[:, 1]))[0])
    p0 = pts[pivot]
    rest = np.delete(np.arange(len(pts)), pivot)
    rel = pts[rest] - p0
    ang = np.arctan2(rel[:, 1], rel[:, 0])
    dist = np.hypot(rel[:, 0], rel[:, 1])
    keep = dist > 0
    order = rest[keep][np.lexsort((dist[keep], ang[keep]))]
    stack = [pivot]
    for idx in order:
        while len(stack) > 1 and _cross(pts[stack[-2]], pts[stack[-1]], pts[idx]) <= 0:
            stack.pop()
        stack.append(int(idx))
    if len(stack) < 3:
        raise BodyError("degenerate point set: hull has empty interior")
    verts = pts[stack]
    edges = np.roll(verts, -1, axis=0) - verts
    normals = np.column_stack([edges[:, 1], -edges[:, 0]])
    normals /= np.linalg.norm(normals, axis=1)[:, None]
    offsets = np.einsum("ij,ij->i", normals, verts)
    if np.any(offsets <= 0):
        raise BodyError("origin is not interior to the hull")
    m = len(verts)
    facets = tuple((i, (i + 1) % m) for i in range(m))
    return Polytope(verts, normals, offsets, facets, ident=ident)


def _hull_3d(pts: np.ndarray, merge: bool, ident: str) -> Polytope:
    from scipy.spatial import ConvexHull, QhullError

    try:
        hull = ConvexHull(pts)
    except QhullError as exc:
        raise BodyError(f"degenerate point set: {exc}") from exc
    used = np.unique(hull.simplices)
    remap = -np.ones(len(pts), dtype=np.int64)
    remap[used] = np.arange(len(used))
    verts = pts[used]
    normals = hull.equations[:, :3]
    offsets = -hull.equations[:, 3]
    if np.any(offsets <= 0):
        raise BodyError("origin is not interior to the hull")

    groups: list[list[int]] = []
    if merge:
        for i, n in enumerate(normals):
            for g in groups:
                if np.max(np.abs(normals[g[0]] - n)) <= FACET_TOL and \
                        abs(offsets[g[0]] - offsets[i]) <= FACET_TOL * max(1.0, offsets[i]):
                    g.append(i)
                    break
            else:
                groups.append([i])
    else:
        groups = [[i] for i in range(len(normals))]

    out_normals, out_offsets, facets = [], [], []
    for g in groups:
        n = normals[g].mean(axis=0)
        n /= np.linalg.norm(n)
        idx = np.unique(remap[hull.simplices[g].ravel()])
        facets.append(tuple(int(i) for i in _order_loop(verts, idx, n)))
        out_normals.append(n)
        out_offsets.append(float(np.mean(verts[idx] @ n)))
    return Polytope(verts, np.array(out_normals), np.array(out_offsets), tuple(facets), ident=ident)


def _order_loop(verts: np.ndarray, idx: np.ndarray, normal: np.ndarray) -> np.ndarray:
    """Counter-clockwise order (seen from outside) of coplanar vertices."""
    c = verts[idx].mean(axis=0)
    a = np.cross(normal, [1.0, 0.0, 0.0])
    if np.linalg.norm(a) < 1e-6:
        a = np.cross(normal, [0.0, 1.0, 0.0])
    a /= np.linalg.norm(a)
    b = np.cross(normal, a)
    rel = verts[idx] - c
    ang = np.arctan2(rel @ b, rel @ a)
    return idx[np.argsort(ang)]


# --------------------------------------------------------------------------
# JSON


def body_from_json(data: dict) -> Body:
    try:
        kind = data["type"]
        if kind == "polytope":
            pts = np.asarray(data["vertices"], dtype=np.float64)
            return convex_hull(pts, pts.shape[1], ident=data.get("id", "polytope"))
        if kind == "ellipsoid":
            return Ellipsoid(np.asarray(data["matrix"], dtype=np.float64),
                             ident=data.get("id", "ellipsoid"))
        if kind == "ball":
            return Ball(int(data.get("dim", 2)), float(data["radius"]), ident=data.get("id", "ball"))
        if kind == "star":
            base = body_from_json(data["base"]) if "base" in data else None
            return StarBody(int(data["dim"]), np.asarray(data["coeffs"], dtype=np.float64),
                            int(data.get("degree", 4)), float(data.get("amp", 0.3)),
                            float(data.get("offset", 1.0)), base, ident=data.get("id", "star"))
        if kind in ("support_field", "radial_field"):
            grid = build_grid(int(data.get("dim", 2)), int(data["resolution"]))
            cls = SupportField if kind == "support_field" else RadialField
            return cls(grid, data["values"], ident=data.get("id", kind))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, BodyError):
            raise
        raise BodyError(f"malformed body description: {exc}") from exc
    raise BodyError(f"unknown body type {kind!r}")


def unit_square(half_width: float = 1.0) -> Polytope:
    w = half_width
    return convex_hull([[w, w], [-w, w], [-w, -w], [w, -w]], ident="square")


def cross_polytope(dim: int = 2, radius: float = 1.0) -> Polytope:
    pts = np.vstack([radius * np.eye(dim), -radius * np.eye(dim)])
    return convex_hull(pts, dim, ident="cross")


def simplex_2d() -> Polytope:
    return convex_hull([[-0.3, -0.3], [1.0, -0.3], [-0.3, 1.0]], ident="simplex")


def ball_volume(n: int) -> float:
    return math.pi ** (n / 2) / math.gamma(1 + n / 2)
