import math

import numpy as np
import pytest
from scipy import integrate as si

from mubody.measures import (DensityError, alpha_np_tau, c_np, c_np_tau, cone, density_eval,
                             density_from_json, g_pair, lebesgue, psi_tau, radial_power, tabulated)
from mubody.sphgrid import build_grid


def _sphere_integral_oracle(n, p):
    # int_{S^{n-1}} |u.e|^p du by one-dimensional quadrature
    if n == 2:
        return si.quad(lambda t: abs(math.cos(t)) ** p, 0, 2 * math.pi, limit=200)[0]
    return 2 * math.pi * si.quad(lambda t: abs(t) ** p, -1, 1)[0]


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("p", [0.5, 1.0, 1.5, 2.0, 3.0, 4.7])
def test_c_np_against_quadrature(n, p):
    assert abs(c_np(n, p) * _sphere_integral_oracle(n, p) - 2.0) < 1e-9


def test_c_np_closed_forms():
    assert c_np(2, 1) == pytest.approx(0.5, abs=1e-15)
    assert c_np(3, 1) == pytest.approx(1 / math.pi, abs=1e-15)
    assert c_np(3, 2) == pytest.approx(3 / (2 * math.pi), abs=1e-15)


def test_tau_constants():
    assert c_np_tau(2, 1, 0) == pytest.approx(c_np(2, 1) / 2)
    assert alpha_np_tau(3, 2, 0.3) * c_np_tau(3, 2, 0.3) == pytest.approx(c_np(3, 2) ** 2, rel=1e-14)
    g = g_pair(1.5, -0.6)
    assert g.g1 + g.g2 == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ValueError):
        c_np_tau(2, 1, 1.5)


def test_psi_tau_values():
    t = np.array([-2.0, -0.5, 0.0, 0.5, 2.0])
    assert np.allclose(psi_tau(t, 0.0), np.abs(t))
    assert np.allclose(psi_tau(t, 1.0), 2 * np.maximum(t, 0))
    assert np.allclose(psi_tau(t, -1.0), 2 * np.maximum(-t, 0))


def test_density_homogeneity_and_values():
    w = radial_power(3, 1.5, c=2.0)
    x = np.array([0.3, -0.4, 1.2])
    assert density_eval(w, 2.5 * x) == pytest.approx(2.5 ** 1.5 * density_eval(w, x))
    assert density_eval(w, x) == pytest.approx(2.0 * np.linalg.norm(x) ** 1.5)
    assert w.s == pytest.approx(1 / 4.5)


def test_cone_density():
    w = cone(2, [0.0, 2.0], 1.0)
    assert w(np.array([0.3, 0.5])) == pytest.approx(0.5)
    assert w(np.array([0.3, -0.5])) == 0.0
    assert w.flags == frozenset({"I", "II"})
    assert lebesgue(2).flags == frozenset({"I", "II", "even"})
    assert radial_power(2, 0.5).flags == frozenset({"I", "even"})


def test_origin_rejected():
    with pytest.raises(DensityError):
        density_eval(lebesgue(2), np.zeros(2))


@pytest.mark.parametrize("w", [lebesgue(2), radial_power(3, 2.0, 0.7), cone(3, [0, 0, 1], 0.5)])
def test_json_roundtrip(w):
    w2 = density_from_json(w.to_json())
    rng = np.random.default_rng(1)
    x = rng.normal(size=(20, w.dim))
    assert np.array_equal(w(x), w2(x))
    assert w2.ident == w.ident


def test_tabulated_profile():
    g = build_grid(2, 64)
    vals = 1 + 0.5 * g.nodes[:, 0] ** 2
    w = tabulated(g, vals, 1.0)
    assert w(g.nodes[3] * 2) == pytest.approx(2 * vals[3])
    with pytest.raises(DensityError):
        tabulated(g, 1 + 0.5 * g.nodes[:, 0], 1.0)


@pytest.mark.parametrize("bad", [{"q": 1}, {"dim": 2, "angular": {"kind": "spiral"}},
                                 {"dim": 2, "q": -1}])
def test_malformed_density_json(bad):
    with pytest.raises(DensityError):
        density_from_json(bad)
