"""Seeded random corpus of bodies, densities and parameters."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..bodies import (Body, BodyError, Ellipsoid, Polytope, StarBody, _mode_degrees, convex_hull)
from ..measures import HomogeneousDensity, cone, lebesgue, radial_power

P_VALUES = (1.0, 1.5, 2.0, 3.0)
TAU_VALUES = (-1.0, -0.6, 0.0, 0.3, 1.0)
KINDS = ("polytope", "ellipsoid", "star")
ORIGIN_MARGIN = 0.05


@dataclass(frozen=True, eq=False)
class CorpusBody:
    body: Body
    kind: str
    symmetric: bool

    @property
    def ident(self) -> str:
        return self.body.ident

    @property
    def convex(self) -> bool:
        return self.kind in ("polytope", "ellipsoid")

    def to_json(self) -> dict:
        return {"id": self.ident, "kind": self.kind, "symmetric": self.symmetric,
                "body": self.body.to_json()}


@dataclass(frozen=True)
class CorpusEntry:
    body: CorpusBody
    density: HomogeneousDensity
    p: float
    tau: float

    def to_json(self) -> dict:
        return {"body": self.body.to_json(), "density": self.density.ident,
                "p": self.p, "tau": self.tau}


def corpus_densities(dim: int) -> list[HomogeneousDensity]:
    e = np.zeros(dim)
    e[-1] = 1.0
    return [lebesgue(dim), radial_power(dim, 0.5), radial_power(dim, 2.0), cone(dim, e, 1.0)]


def random_polytope(rng: np.random.Generator, dim: int, symmetric: bool, ident: str) -> Polytope:
    for _ in range(100):
        k = int(rng.integers(5, 21))
        d = rng.normal(size=(k, dim))
        d /= np.linalg.norm(d, axis=1, keepdims=True)
        pts = d * rng.uniform(0.5, 1.5, size=(k, 1))
        pts -= pts.mean(axis=0)
        if symmetric:
            pts = np.vstack([pts, -pts])
        try:
            P = convex_hull(pts, dim, ident=ident)
        except BodyError:
            continue
        if np.min(P.offsets) >= ORIGIN_MARGIN:
            return P
    raise BodyError("could not draw a polytope with the required origin margin")


def _rotation(rng: np.random.Generator, dim: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(dim, dim)))
    return q * np.sign(np.diag(r))


def random_ellipsoid(rng: np.random.Generator, dim: int, ident: str) -> Ellipsoid:
    # axes in [0.4, 1.6] keep the condition number below 4
    axes = rng.uniform(0.4, 1.6, size=dim)
    return Ellipsoid(_rotation(rng, dim) @ np.diag(axes), ident=ident)


def random_star(rng: np.random.Generator, dim: int, symmetric: bool, ident: str,
                degree: int | None = None) -> StarBody:
    degree = degree or (4 if dim == 2 else 3)
    deg = _mode_degrees(dim, degree)
    parity = deg % 2
    coeffs = rng.normal(size=deg.shape[0]) / deg
    if symmetric:
        coeffs = np.where(parity == 0, coeffs, 0.0)
    return StarBody(dim, coeffs, degree, ident=ident)


def gen_bodies(seed: int, dim: int, count: int, kinds=KINDS) -> list[CorpusBody]:
    """``count`` bodies cycling through ``kinds``; every other one symmetric."""
    if dim not in (2, 3):
        raise ValueError("corpus dimension must be 2 or 3")
    kinds = tuple(kinds)
    for k in kinds:
        if k not in KINDS:
            raise ValueError(f"unknown body kind {k!r}")
    rng = np.random.default_rng(np.random.SeedSequence([seed, dim, 0xB0D1]))
    out = []
    for i in range(count):
        kind = kinds[i % len(kinds)]
        sym = kind == "ellipsoid" or (i // len(kinds)) % 2 == 1
        ident = f"{kind[0].upper()}{dim}-{i:02d}{'s' if sym else ''}"
        if kind == "polytope":
            b = random_polytope(rng, dim, sym, ident)
        elif kind == "ellipsoid":
            b = random_ellipsoid(rng, dim, ident)
        else:
            b = random_star(rng, dim, sym, ident)
        out.append(CorpusBody(b, kind, sym))
    return out


def gen_corpus(seed: int, dim: int, count: int, kinds=KINDS) -> list[CorpusEntry]:
    """``count`` (body, density, p, tau) tuples drawn from the seeded corpus."""
    bodies = gen_bodies(seed, dim, count, kinds)
    dens = corpus_densities(dim)
    rng = np.random.default_rng(np.random.SeedSequence([seed, dim, 0xC0DE]))
    out = []
    for b in bodies:
        out.append(CorpusEntry(b, dens[int(rng.integers(len(dens)))],
                               P_VALUES[int(rng.integers(len(P_VALUES)))],
                               TAU_VALUES[int(rng.integers(len(TAU_VALUES)))]))
    return out
