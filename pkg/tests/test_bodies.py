import json

import numpy as np
import pytest

from mubody.bodies import (Ball, BodyError, Ellipsoid, Polytope, RadialField, StarBody, SupportField,
                           body_from_json, convex_hull, cross_polytope, is_support_consistent,
                           lp_minkowski_combine, lp_radial_combine, polar_field, radial_field,
                           simplex_2d, support_field, unit_square)
from mubody.sphgrid import build_grid


def _dirs(dim, n=200, seed=0):
    u = np.random.default_rng(seed).normal(size=(n, dim))
    return u / np.linalg.norm(u, axis=1, keepdims=True)


def test_square_support_and_radial():
    K = unit_square()
    u = _dirs(2)
    assert np.allclose(K.support(u), np.abs(u).sum(axis=1), atol=1e-14)
    assert np.allclose(K.radial(u), 1 / np.abs(u).max(axis=1), atol=1e-14)
    assert len(K.facets) == 4
    assert np.allclose(K.offsets, 1.0)


def test_cube_hull_merges_coplanar_triangles():
    pts = [[x, y, z] for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)]
    C = convex_hull(pts, 3)
    assert len(C.facets) == 6
    u = _dirs(3)
    assert np.allclose(C.support(u), np.abs(u).sum(axis=1), atol=1e-12)
    assert np.allclose(C.radial(u), 1 / np.abs(u).max(axis=1), atol=1e-12)


def test_hull_against_scipy_volume():
    from scipy.spatial import ConvexHull
    rng = np.random.default_rng(3)
    pts = rng.normal(size=(30, 2))
    pts -= pts.mean(axis=0)
    P = convex_hull(pts)
    # shoelace area from our ordered vertices
    v = P.vertices[[f[0] for f in P.facets]]
    area = 0.5 * abs(np.sum(v[:, 0] * np.roll(v[:, 1], -1) - v[:, 1] * np.roll(v[:, 0], -1)))
    assert area == pytest.approx(ConvexHull(pts).volume, rel=1e-12)
    assert np.all(P.contains(pts * (1 - 1e-9)))


def test_origin_outside_rejected():
    with pytest.raises(BodyError):
        convex_hull([[1, 1], [2, 1], [1, 2]])
    with pytest.raises(BodyError):
        convex_hull([[0, 0], [1, 1]])


def test_ellipsoid_support_radial():
    A = np.array([[2.0, 0.3], [0.0, 0.5]])
    E = Ellipsoid(A)
    u = _dirs(2)
    assert np.allclose(E.support(u), np.linalg.norm(u @ A, axis=1))
    x = E.radial(u)[:, None] * u
    # boundary points satisfy |A^{-1} x| = 1
    assert np.allclose(np.linalg.norm(x @ np.linalg.inv(A).T, axis=1), 1.0)


def test_ball():
    B = Ball(3, 2.0)
    u = _dirs(3)
    assert np.allclose(B.support(u), 2.0) and np.allclose(B.radial(u), 2.0)
    assert B.negated() is B


@pytest.mark.parametrize("body", [unit_square(), simplex_2d(), cross_polytope(3),
                                  Ellipsoid(np.diag([1.0, 0.5, 1.4]))])
def test_support_dominates_radial_and_scaling(body):
    u = _dirs(body.dim)
    assert np.all(body.support(u) >= body.radial(u) - 1e-12)
    S = body.scaled(1.7)
    assert np.allclose(S.support(u), 1.7 * body.support(u))
    assert np.allclose(body.negated().support(u), body.support(-u))


def test_star_body_symmetry_and_scaling():
    rng = np.random.default_rng(5)
    coeffs = rng.normal(size=8)
    K = StarBody(2, coeffs)
    u = _dirs(2)
    r = K.radial(u)
    assert np.all(r >= 0.7 - 1e-9) and np.all(r <= 1.3 + 1e-9)
    assert np.allclose(K.negated().radial(u), K.radial(-u))
    assert np.allclose(K.scaled(2.0).radial(u), 2 * r)
    assert not K.is_convex
    # modes are (cos k theta, sin k theta) for k = 1..4; odd k flip under u -> -u
    Ks = StarBody(2, np.where(np.repeat(np.arange(1, 5) % 2, 2) == 1, 0.0, coeffs))
    assert Ks.symmetric
    assert np.allclose(Ks.radial(u), Ks.radial(-u))


def test_star_body_with_base_shrinks_pointwise():
    L = unit_square()
    K = StarBody(2, np.ones(8), amp=0.175, offset=0.775, base=L)
    u = _dirs(2)
    ratio = K.radial(u) / L.radial(u)
    assert np.all(ratio >= 0.6 - 1e-9) and np.all(ratio <= 0.95 + 1e-9)


@pytest.mark.parametrize("body", [unit_square(), cross_polytope(3), Ellipsoid(np.diag([1.0, 0.5])),
                                  Ball(3, 1.5), StarBody(3, np.arange(19) / 10.0, degree=3)])
def test_json_roundtrip(body):
    b2 = body_from_json(json.loads(json.dumps(body.to_json())))
    u = _dirs(body.dim)
    assert np.allclose(b2.radial(u), body.radial(u), atol=1e-12)


@pytest.mark.parametrize("bad", [{"type": "polytope"}, {"type": "blob"},
                                 {"type": "ball", "radius": -1}, {"type": "polytope", "vertices": [[1, 1]]}])
def test_malformed_body_json(bad):
    with pytest.raises(BodyError):
        body_from_json(bad)


def test_fields_and_wulff():
    g = build_grid(2, 512)
    K = unit_square()
    h = support_field(K, g)
    ok, defect = is_support_consistent(h, 1e-6)
    assert ok and defect < 1e-9
    r = radial_field(h, g)
    assert np.allclose(r.values, K.radial(g.nodes), rtol=1e-6)
    assert np.allclose(polar_field(h).values, 1 / h.values)
    with pytest.raises(BodyError):
        support_field(StarBody(2, np.ones(8)), g)
    with pytest.raises(BodyError):
        SupportField(g, -np.ones(g.size))


def test_combinations():
    g = build_grid(2, 64)
    h = support_field(unit_square(), g)
    two = lp_minkowski_combine(1.0, h, 1.0, h, 2.0)
    assert np.allclose(two.values, np.sqrt(2) * h.values)
    r = RadialField(g, np.ones(g.size))
    assert np.allclose(lp_radial_combine(1.0, r, 3.0, r, -1.0).values, 0.25)
    with pytest.raises(ValueError):
        lp_minkowski_combine(1.0, h, 1.0, h, 0.5)
