import math

import numpy as np
import pytest

from mubody.bodies import Ball, Ellipsoid, SupportField, simplex_2d, unit_square
from mubody.functionals import context
from mubody.measures import cone, lebesgue, radial_power
from mubody.sphgrid import build_grid
from mubody.surfmeas import DiscreteSurfaceMeasure, surface_measure
from mubody.transforms import (DegenerateTransformError, centroid_body_tau, centroid_body_tau_mc,
                               centroid_power, centroid_source, polar_of, proj_body_minus,
                               proj_body_plus, proj_body_tau, proj_power)

TAUS = (-1.0, -0.6, 0.0, 0.3, 1.0)


def test_proj_of_square():
    g = build_grid(2, 256)
    S = surface_measure(unit_square(), lebesgue(2), 1.0, g)
    expect = np.abs(g.nodes).sum(axis=1)
    for res in (proj_body_plus(S, g), proj_body_minus(S, g), proj_body_tau(S, g, 0.3)):
        assert np.allclose(res.values, expect, atol=1e-12)


@pytest.mark.parametrize("tau", TAUS)
def test_centroid_of_disk(tau):
    g = build_grid(2, 2048)
    res = centroid_body_tau(Ball(2, 1.0), context(lebesgue(2), g), 1.0, tau)
    assert np.allclose(res.values, 8 / (3 * math.pi), atol=1e-6)


def test_centroid_of_ball_3d():
    g = build_grid(3, 64)
    res = centroid_body_tau(Ball(3, 1.0), context(lebesgue(3), g), 1.0, 0.0)
    assert np.allclose(res.values, 3 * math.pi / 8, rtol=1e-3)


@pytest.mark.parametrize("tau", [0.3, 1.0])
def test_reflection_in_tau(tau):
    g = build_grid(2, 512)
    K = simplex_2d()
    w = radial_power(2, 0.5)
    S = surface_measure(K, w, 1.5, g)
    a, b = proj_power(S, g.nodes, tau), proj_power(S, -g.nodes, -tau)
    assert np.allclose(a, b, rtol=1e-12)
    ctx = context(w, g)
    src = centroid_source(K, ctx, 1.5)
    assert np.allclose(centroid_power(src, g.nodes, tau), centroid_power(src, -g.nodes, -tau), rtol=1e-12)


@pytest.mark.parametrize("tau", TAUS)
def test_routes_agree(tau):
    g = build_grid(2, 256)
    w = cone(2, [0, 1], 1.0)
    K = Ellipsoid(np.array([[1.0, 0.2], [0.0, 0.7]]))
    S = surface_measure(K, w, 2.0, g)
    assert np.allclose(proj_power(S, g.nodes, tau, "direct"), proj_power(S, g.nodes, tau, "pm"), rtol=1e-11)
    src = centroid_source(K, context(w, g), 2.0)
    assert np.allclose(centroid_power(src, g.nodes, tau, "direct"), centroid_power(src, g.nodes, tau, "pm"),
                       rtol=1e-11)


def test_degenerate_measure_names_node():
    g = build_grid(2, 16)
    S = DiscreteSurfaceMeasure(2, [[1.0, 0.0]], [1.0], p=1.0, kind="lp")
    with pytest.raises(DegenerateTransformError) as exc:
        proj_body_plus(S, g)
    assert exc.value.node >= 0 and "node" in str(exc.value)


def test_polar_roundtrip():
    g = build_grid(2, 64)
    S = surface_measure(unit_square(), lebesgue(2), 1.0, g)
    res = proj_body_tau(S, g, 0.0)
    pol = polar_of(res)
    assert np.allclose(pol.values, 1 / res.values)
    back = polar_of(pol)
    assert isinstance(back.field, SupportField)
    assert np.allclose(back.values, res.values)
    assert res.to_json()["params"]["tau"] == 0.0


def test_centroid_needs_p_at_least_one():
    g = build_grid(2, 64)
    with pytest.raises(ValueError):
        centroid_body_tau(Ball(2, 1.0), context(lebesgue(2), g), 0.5, 0.0)


def test_centroid_monte_carlo_three_sigma():
    g = build_grid(2, 2048)
    K = simplex_2d()
    w = radial_power(2, 1.0)
    dirs = build_grid(2, 16)
    h_mc, se = centroid_body_tau_mc(K, w, 1.0, 0.3, 100_000, seed=3, grid=dirs)
    h = centroid_body_tau(K, context(w, g), 1.0, 0.3, grid=dirs)
    assert np.all(np.abs(h.values - h_mc.values) < 3.5 * se)
