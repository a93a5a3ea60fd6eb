"""Positively homogeneous densities and the scalar constants built on them.

A density has the form ``omega(x) = a(x/|x|) * |x|**q`` with ``q >= 0``.
The measure ``mu`` with density ``omega`` is then ``1/s``-homogeneous with
``s = 1/(n + q)``; ``q = 0`` is the Lebesgue-type case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .sphgrid import SphereGrid, build_grid, interpolate


class DensityError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class HomogeneousDensity:
    """Homogeneous density ``a(x/|x|) |x|**q`` on R^dim.

    Use the constructors :func:`lebesgue`, :func:`radial_power`,
    :func:`cone` and :func:`tabulated` rather than instantiating directly;
    they set the hypothesis flags per profile kind.
    """

    dim: int
    q: float
    kind: str
    c: float = 1.0
    axis: tuple[float, ...] | None = None
    table: np.ndarray | None = field(default=None, repr=False)
    table_grid: SphereGrid | None = field(default=None, repr=False)
    is_even: bool = True
    is_r_concave: bool = True

    @property
    def s(self) -> float:
        return 1.0 / (self.dim + self.q)

    @property
    def ident(self) -> str:
        if self.kind == "constant":
            if self.q == 0 and self.c == 1.0:
                return "lebesgue"
            return f"power(q={self.q:g},c={self.c:g})"
        if self.kind == "cone":
            axis = ",".join(f"{a:g}" for a in self.axis)
            return f"cone(q={self.q:g},e=[{axis}])"
        return f"table(q={self.q:g},M={self.table_grid.resolution})"

    @property
    def flags(self) -> frozenset[str]:
        """Hypothesis flags carried by this density.

        ``I`` (homogeneity) always holds, ``II`` is the declared
        r-concavity, ``even`` is symmetry under ``x -> -x``.
        """
        out = {"I"}
        if self.is_r_concave:
            out.add("II")
        if self.is_even:
            out.add("even")
        return frozenset(out)

    def angular(self, u) -> np.ndarray:
        """Angular profile ``a(u)`` at unit vectors ``u`` (shape ``(N, dim)``)."""
        u = np.atleast_2d(np.asarray(u, dtype=np.float64))
        if self.kind == "constant":
            return np.full(u.shape[0], self.c)
        if self.kind == "cone":
            t = np.maximum(u @ np.asarray(self.axis), 0.0)
            return t ** self.q
        return interpolate(self.table_grid, self.table, u)

    def __call__(self, x) -> np.ndarray:
        return density_eval(self, x)

    def to_json(self) -> dict:
        if self.kind == "constant":
            angular = {"kind": "constant", "c": self.c}
        elif self.kind == "cone":
            angular = {"kind": "cone", "axis": list(self.axis)}
        else:
            angular = {"kind": "table", "grid_resolution": self.table_grid.resolution,
                       "values": self.table.tolist()}
        return {"dim": self.dim, "q": self.q, "angular": angular}


def lebesgue(dim: int) -> HomogeneousDensity:
    return HomogeneousDensity(dim, 0.0, "constant")


def radial_power(dim: int, q: float, c: float = 1.0) -> HomogeneousDensity:
    """``c |x|**q``; r-concave only for ``q = 0`` (``|x|`` is convex)."""
    if q < 0:
        raise DensityError("homogeneity degree q must be >= 0")
    if c <= 0:
        raise DensityError("constant profile must be positive")
    return HomogeneousDensity(dim, float(q), "constant", c=float(c),
                              is_even=True, is_r_concave=(q == 0))


def cone(dim: int, axis, q: float = 1.0) -> HomogeneousDensity:
    """``((x . e)_+)**q``: supported on a half-space, r-concave, not even."""
    e = np.asarray(axis, dtype=np.float64)
    if e.shape != (dim,) or not np.any(e):
        raise DensityError("cone axis must be a nonzero vector of length dim")
    if q <= 0:
        raise DensityError("cone densities need q > 0")
    e = e / np.linalg.norm(e)
    return HomogeneousDensity(dim, float(q), "cone", axis=tuple(float(a) for a in e),
                              is_even=False, is_r_concave=True)


def tabulated(grid: SphereGrid, values, q: float) -> HomogeneousDensity:
    """Even, positive angular profile sampled on an antipodally closed grid."""
    v = np.array(values, dtype=np.float64)
    if v.shape != (grid.size,):
        raise DensityError(f"table needs {grid.size} values")
    if np.any(v < 0) or not np.any(v > 0):
        raise DensityError("tabulated profile must be nonnegative and not identically zero")
    if not grid.antipodal_closed:
        raise DensityError("tabulated profiles need an antipodally closed grid")
    if np.max(np.abs(v - v[grid.antipode])) > 1e-12 * np.max(v):
        raise DensityError("tabulated profile is not even")
    if q < 0:
        raise DensityError("homogeneity degree q must be >= 0")
    v.flags.writeable = False
    return HomogeneousDensity(grid.dim, float(q), "table", table=v, table_grid=grid,
                              is_even=True, is_r_concave=False)


def density_from_json(data: dict) -> HomogeneousDensity:
    try:
        dim = int(data["dim"])
        q = float(data.get("q", 0.0))
        ang = data.get("angular", {"kind": "constant", "c": 1.0})
        kind = ang["kind"]
        if kind == "constant":
            return radial_power(dim, q, float(ang.get("c", 1.0)))
        if kind == "cone":
            return cone(dim, ang["axis"], q)
        if kind == "table":
            return tabulated(build_grid(dim, int(ang["grid_resolution"])), ang["values"], q)
    except (KeyError, TypeError) as exc:
        raise DensityError(f"malformed density description: {exc}") from exc
    raise DensityError(f"unknown angular profile kind {kind!r}")


def density_eval(w: HomogeneousDensity, x) -> np.ndarray | float:
    """``omega(x) = a(x/|x|) |x|**q``; the origin is rejected."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    r = np.linalg.norm(pts, axis=1)
    if np.any(r == 0):
        raise DensityError("density is not evaluated at the origin")
    vals = w.angular(pts / r[:, None]) * r ** w.q
    return float(vals[0]) if single else vals


def s_exponent(w: HomogeneousDensity) -> float:
    return 1.0 / (w.dim + w.q)


def c_np(n: int, p: float) -> float:
    """Gamma((n+p)/2) / (pi**((n-1)/2) Gamma((1+p)/2)).

    With this normalisation ``c_np * int_{S^{n-1}} |u.v|**p dv = 2``.
    """
    return math.exp(math.lgamma((n + p) / 2.0) - math.lgamma((1.0 + p) / 2.0)) \
        / math.pi ** ((n - 1) / 2.0)


def _check_tau(tau: float):
    if not -1.0 <= tau <= 1.0:
        raise ValueError(f"tau={tau} outside [-1, 1]")


def tau_denominator(p: float, tau: float) -> float:
    _check_tau(tau)
    return (1.0 + tau) ** p + (1.0 - tau) ** p


def c_np_tau(n: int, p: float, tau: float) -> float:
    return c_np(n, p) / tau_denominator(p, tau)


def alpha_np_tau(n: int, p: float, tau: float) -> float:
    return c_np(n, p) * tau_denominator(p, tau)


class TauWeights(NamedTuple):
    tau: float
    p: float
    g1: float
    g2: float


def g_pair(p: float, tau: float) -> TauWeights:
    d = tau_denominator(p, tau)
    return TauWeights(tau, p, (1.0 + tau) ** p / d, (1.0 - tau) ** p / d)


def psi_tau(t, tau: float):
    """``|t| + tau t``, nonnegative for tau in [-1, 1]."""
    _check_tau(tau)
    t = np.asarray(t, dtype=np.float64)
    out = np.abs(t) + tau * t
    return float(out) if out.ndim == 0 else out
