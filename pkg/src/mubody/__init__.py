"""L_p projection and centroid bodies under homogeneous measures.

Submodules: ``sphgrid`` (quadrature on S^{n-1}), ``measures`` (homogeneous
densities and kernel constants), ``bodies`` (convex and star bodies),
``surfmeas`` (L_p mu-surface measures), ``functionals`` (mu and its mixed
variants), ``transforms`` (Pi^tau, Gamma^tau and polars), ``verify``
(seeded property suites) and ``cli``.
"""

from .bodies import (Ball, Body, BodyError, Ellipsoid, Polytope, RadialField, StarBody, SupportField,
                     body_from_json, convex_hull, cross_polytope, simplex_2d, unit_square)
from .functionals import (context, dual_mixed, lp_mixed_mu, lp_mixed_volume, mu_measure,
                          mu_measure_mc, mu_of_polar)
from .measures import HomogeneousDensity, cone, density_from_json, lebesgue, radial_power
from .sphgrid import SphereGrid, build_grid, integrate
from .surfmeas import surface_measure
from .transforms import (DegenerateTransformError, TransformResult, centroid_body_tau,
                         centroid_body_tau_mc, polar_of, proj_body_minus, proj_body_plus, proj_body_tau)

__version__ = "0.1.0"
