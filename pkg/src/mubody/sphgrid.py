"""Quadrature grids on the unit circle and the unit 2-sphere.

Two rules are provided:

* ``dim=2``: the periodic trapezoid rule on ``M`` equally spaced angles.
* ``dim=3``: a product rule, Gauss-Legendre in ``cos(polar)`` times the
  trapezoid rule in azimuth (``N`` polar rings by ``2N`` azimuths).

Grids are immutable and cached, so ``build_grid(d, M) is build_grid(d, M)``.
When the rule allows it the node set is closed under negation, and the
antipodal nodes are stored as the exact negatives of their partners.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

MIN_RESOLUTION = 4
SPHERE_AREA = {2: 2.0 * np.pi, 3: 4.0 * np.pi}


class GridMismatchError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SphereGrid:
    dim: int
    resolution: int
    nodes: np.ndarray
    weights: np.ndarray
    antipode: np.ndarray | None
    # dim=3 only: polar angles of the rings and the azimuth count
    polar: np.ndarray | None = field(default=None, repr=False)
    n_azimuth: int = 0

    @property
    def size(self) -> int:
        return self.nodes.shape[0]

    @property
    def antipodal_closed(self) -> bool:
        return self.antipode is not None

    @property
    def key(self) -> tuple[int, int]:
        return (self.dim, self.resolution)

    def refined(self) -> "SphereGrid":
        return build_grid(self.dim, 2 * self.resolution)

    def coarsened(self) -> "SphereGrid":
        return build_grid(self.dim, max(MIN_RESOLUTION, self.resolution // 2))

    def field(self, values) -> "NodeField":
        return NodeField(self, values)

    def sample(self, fn: Callable[[np.ndarray], np.ndarray]) -> "NodeField":
        return NodeField(self, fn(self.nodes))


@dataclass(frozen=True, eq=False)
class NodeField:
    grid: SphereGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.shape != (self.grid.size,):
            raise GridMismatchError(
                f"field has {values.shape} values, grid has {self.grid.size} nodes")
        if not np.all(np.isfinite(values)):
            raise ValueError("node field contains non-finite values")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.flags.writeable = False
    return a


def _circle_grid(m: int) -> SphereGrid:
    theta = 2.0 * np.pi * np.arange(m) / m
    nodes = np.column_stack([np.cos(theta), np.sin(theta)])
    antipode = None
    if m % 2 == 0:
        half = m // 2
        nodes[half:] = -nodes[:half]
        antipode = (np.arange(m) + half) % m
    weights = np.full(m, 2.0 * np.pi / m)
    return SphereGrid(2, m, _frozen(nodes), _frozen(weights), antipode)


def _sphere_grid(n: int) -> SphereGrid:
    x, w = np.polynomial.legendre.leggauss(n)
    # exact mirror symmetry of the polar rule
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    n_az = 2 * n
    phi = 2.0 * np.pi * np.arange(n_az) / n_az
    sin_t = np.sqrt(np.clip(1.0 - x * x, 0.0, None))

    ring = np.repeat(np.arange(n), n_az)
    az = np.tile(np.arange(n_az), n)
    nodes = np.column_stack([
        sin_t[ring] * np.cos(phi[az]),
        sin_t[ring] * np.sin(phi[az]),
        x[ring],
    ])
    weights = w[ring] * (2.0 * np.pi / n_az)

    anti_ring = n - 1 - ring
    anti_az = (az + n) % n_az
    antipode = anti_ring * n_az + anti_az
    lead = np.arange(nodes.shape[0]) < antipode
    nodes[antipode[lead]] = -nodes[lead]
    polar = np.arccos(np.clip(x, -1.0, 1.0))
    return SphereGrid(3, n, _frozen(nodes), _frozen(weights), antipode,
                      polar=_frozen(polar), n_azimuth=n_az)


@lru_cache(maxsize=64)
def build_grid(dim: int, resolution: int) -> SphereGrid:
    """Quadrature grid on S^{dim-1}.

    For ``dim=2`` the grid has ``resolution`` nodes; for ``dim=3`` it has
    ``resolution`` polar rings of ``2*resolution`` azimuths each.
    """
    if dim not in (2, 3):
        raise ValueError(f"unsupported dimension {dim}; only 2 and 3 are available")
    resolution = int(resolution)
    if resolution < MIN_RESOLUTION:
        raise ValueError(f"resolution {resolution} below minimum {MIN_RESOLUTION}")
    if dim == 2:
        return _circle_grid(resolution)
    return _sphere_grid(resolution)


def _values_on(grid: SphereGrid, f) -> np.ndarray:
    if isinstance(f, NodeField):
        if f.grid is not grid and f.grid.key != grid.key:
            raise GridMismatchError(f"field lives on grid {f.grid.key}, not {grid.key}")
        return f.values
    values = np.asarray(f, dtype=np.float64)
    if values.shape != (grid.size,):
        raise GridMismatchError(
            f"expected {grid.size} node values, got shape {values.shape}")
    return values


def integrate(grid: SphereGrid, f) -> float:
    """Quadrature sum ``sum_k w_k f_k``.

    ``np.sum`` reduces pairwise in a fixed order, so the result is
    reproducible bit-for-bit for a given grid.
    """
    return float(np.sum(grid.weights * _values_on(grid, f)))


def integrate_with_error(grid: SphereGrid, evaluator) -> tuple[float, float]:
    """Integrate ``evaluator`` on ``grid`` and on the doubled grid.

    Returns the finer value and the absolute difference as the error
    estimate. ``evaluator`` maps an ``(N, dim)`` array of unit vectors to
    ``N`` values.
    """
    coarse = integrate(grid, evaluator(grid.nodes))
    fine_grid = grid.refined()
    fine = integrate(fine_grid, evaluator(fine_grid.nodes))
    return fine, abs(fine - coarse)


def interpolate(grid: SphereGrid, values, directions) -> np.ndarray:
    """Evaluate node samples at arbitrary unit directions.

    Linear in angle on the circle. On the sphere, each (polar, azimuth)
    cell is split into two triangles and interpolated barycentrically in
    angle coordinates; caps beyond the outermost rings interpolate toward
    the ring mean at the pole.
    """
    values = _values_on(grid, values)
    u = np.atleast_2d(np.asarray(directions, dtype=np.float64))
    if u.shape[1] != grid.dim:
        raise ValueError(f"directions must have {grid.dim} components")
    if grid.dim == 2:
        m = grid.size
        theta = np.mod(np.arctan2(u[:, 1], u[:, 0]), 2.0 * np.pi)
        pos = theta * (m / (2.0 * np.pi))
        i0 = np.floor(pos).astype(np.int64) % m
        t = pos - np.floor(pos)
        return (1.0 - t) * values[i0] + t * values[(i0 + 1) % m]
    return _interp_sphere(grid, values, u)


def _interp_sphere(grid: SphereGrid, values: np.ndarray, u: np.ndarray) -> np.ndarray:
    n, n_az = grid.resolution, grid.n_azimuth
    table = values.reshape(n, n_az)
    # rings sorted north to south
    theta_rows = grid.polar
    order = np.argsort(theta_rows)
    th_sorted = theta_rows[order]
    table = table[order]

    theta = np.arccos(np.clip(u[:, 2] / np.linalg.norm(u, axis=1), -1.0, 1.0))
    phi = np.mod(np.arctan2(u[:, 1], u[:, 0]), 2.0 * np.pi)
    dphi = 2.0 * np.pi / n_az
    apos = phi / dphi
    j0 = np.floor(apos).astype(np.int64) % n_az
    j1 = (j0 + 1) % n_az
    b = apos - np.floor(apos)

    pole_n = table[0].mean()
    pole_s = table[-1].mean()
    out = np.empty(u.shape[0])

    k = np.searchsorted(th_sorted, theta) - 1
    north = k < 0
    south = k >= n - 1
    mid = ~(north | south)

    if np.any(north):
        row = (1.0 - b[north]) * table[0, j0[north]] + b[north] * table[0, j1[north]]
        t = theta[north] / th_sorted[0]
        out[north] = (1.0 - t) * pole_n + t * row
    if np.any(south):
        row = (1.0 - b[south]) * table[-1, j0[south]] + b[south] * table[-1, j1[south]]
        t = (np.pi - theta[south]) / (np.pi - th_sorted[-1])
        out[south] = (1.0 - t) * pole_s + t * row
    if np.any(mid):
        km = k[mid]
        a = (theta[mid] - th_sorted[km]) / (th_sorted[km + 1] - th_sorted[km])
        bm = b[mid]
        f00 = table[km, j0[mid]]
        f01 = table[km, j1[mid]]
        f10 = table[km + 1, j0[mid]]
        f11 = table[km + 1, j1[mid]]
        lower = a <= bm
        # triangle (00, 01, 11) when a <= b, else (00, 10, 11)
        out_mid = np.where(
            lower,
            f00 + bm * (f01 - f00) + a * (f11 - f01),
            f00 + a * (f10 - f00) + bm * (f11 - f10),
        )
        out[mid] = out_mid
    return out
