"""Parametric finite element schemes for the area-preserving curve shortening flow.

The semi-discrete scheme is the mass-lumped vertex ODE integrated with RK4
(:mod:`apcsf.semidiscrete`); the fully discrete scheme is linearly implicit
with one cyclic block-tridiagonal solve per step (:mod:`apcsf.fullydiscrete`).
"""

from .analysis import (
    area_loss_study,
    audit_structure,
    error_e1,
    error_e2,
    error_e3,
    run_convergence_study,
)
from .curves import circle, ellipse, interpolate, parametric_table, polygon_file, uniform_grid
from .errors import (
    APCSFError,
    ConfigError,
    DegenerateEdge,
    DomainError,
    IncompatibleRefinement,
    InvalidIndex,
    InvalidN,
    SingularSystem,
)
from .fullydiscrete import assemble, evolve_full, solve
from .fullydiscrete import step as step_full
from .geometry import (
    Grid,
    PolygonCurve,
    extended_fan_area,
    geometric_state,
    is_convex,
    oriented_area,
    perp,
    shoelace_area,
    triangle_fan_areas,
)
from .kernels import BACKEND
from .semidiscrete import (
    edge_rate,
    evolve,
    fan_area_rate,
    perimeter_rate,
    rhs,
    step_rk4,
    trig_inequality_f,
)

__version__ = "0.1.0"
