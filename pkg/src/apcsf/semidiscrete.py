"""Vertex ODE of the mass-lumped scheme and its closed-form evolution formulas.

Each vertex obeys

    (q_j + q_{j+1})/2 * dX_j/dt = T_{j+1} - T_j - (pi/L) * perp(X_{j+1} - X_{j-1})

with periodic indices, edge lengths ``q``, unit tangents ``T`` and perimeter
``L``. Setting ``area_preserving=False`` drops the ``pi/L`` term (plain curve
shortening), for A/B comparisons only.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateEdge, DomainError
from .geometry import TWO_PI, PolygonCurve, _as_vertices, check_edges, cross, oriented_area, perp
from .trajectory import Recorder


@dataclass(frozen=True)
class VertexVelocityField:
    """Vertex velocities and the auxiliary field ``R_j``.

    ``R_j = -(2 pi/L) (N_j q_j + N_{j+1} q_{j+1}) / (q_j + q_{j+1})`` so that
    ``velocity - aux == 2 (T_{j+1} - T_j) / (q_j + q_{j+1})``.
    """

    velocity: np.ndarray
    aux: np.ndarray


def _parts(X, eps_q=None):
    q = check_edges(X, eps_q)
    E = X - np.roll(X, 1, axis=0)
    T = E / q[:, None]
    return q, E, T, q.sum()


def velocity(X, area_preserving=True, eps_q=None):
    """Vertex velocities for an ``(N, 2)`` array (hot path, no wrapping)."""
    q, E, T, L = _parts(X, eps_q)
    qn = np.roll(q, -1)
    F = np.roll(T, -1, axis=0) - T
    if area_preserving:
        # X_{j+1} - X_{j-1} = E_{j+1} + E_j
        F -= (math.pi / L) * perp(np.roll(E, -1, axis=0) + E)
    return 2.0 * F / (q + qn)[:, None]


def rhs(curve, area_preserving=True, eps_q=None):
    X = _as_vertices(curve)
    q, E, T, L = _parts(X, eps_q)
    qn = np.roll(q, -1)
    Nrm = perp(T)
    w = q + qn
    c = (2 * math.pi / L) if area_preserving else 0.0
    aux = -c * (Nrm * q[:, None] + np.roll(Nrm, -1, axis=0) * qn[:, None]) / w[:, None]
    vel = velocity(X, area_preserving, eps_q)
    return VertexVelocityField(vel, aux)


def step_rk4(curve, dt, area_preserving=True, eps_q=None):
    """One classical Runge-Kutta step; returns a PolygonCurve."""
    X = _as_vertices(curve)
    return PolygonCurve(_rk4(X, dt, area_preserving, eps_q), orient=False)


def _rk4(X, dt, area_preserving=True, eps_q=None):
    if dt < 0:
        raise ValueError(f"dt must be nonnegative, got {dt}")
    if dt == 0:
        return X.copy()
    f = lambda Y: velocity(Y, area_preserving, eps_q)  # noqa: E731
    k1 = f(X)
    k2 = f(X + 0.5 * dt * k1)
    k3 = f(X + 0.5 * dt * k2)
    k4 = f(X + dt * k3)
    Y = X + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    check_edges(Y, eps_q)
    return Y


def default_dt(curve):
    """Parabolic step heuristic ``0.1 * min_j q_j**2``."""
    return 0.1 * float(check_edges(_as_vertices(curve)).min()) ** 2


def evolve(curve, T, dt=None, record_every=1, area_preserving=True, eps_q=None, period=None):
    """Integrate the vertex ODE to time ``T`` with fixed-step RK4.

    The final step is shortened to land on ``T``. Snapshots are kept every
    ``record_every`` steps plus the final state. Degeneration raises
    :class:`DegenerateEdge` carrying the time of failure.
    """
    X = np.array(_as_vertices(curve), dtype=float)
    if not T > 0:
        raise ValueError(f"T must be positive, got {T}")
    if dt is None:
        dt = default_dt(X)
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    speed = lambda Y: velocity(Y, area_preserving, eps_q)  # noqa: E731
    rec = Recorder(record_every, speed)
    rec.add(0, 0.0, X)
    n = math.ceil(T / dt - 1e-9)
    t = 0.0
    for k in range(1, n + 1):
        h = dt if k < n else T - (n - 1) * dt
        try:
            X = _rk4(X, h, area_preserving, eps_q)
        except DegenerateEdge as exc:
            exc.time = t
            raise
        t = T if k == n else k * dt
        rec.add(k, t, X, force=(k == n))
    return rec.finish("semi", dt, period=TWO_PI if period is None else period,
                      area_preserving=area_preserving)


# ---------------------------------------------------------------------------
# closed-form evolution diagnostics
# ---------------------------------------------------------------------------

def edge_rate(curve, eps_q=None):
    """``dq_j/dt`` in two algebraically equivalent forms.

    Returns ``(tangent_form, velocity_form)``: the first uses
    ``|T_{j+1} - T_j|^2``, the second ``|dX_j/dt - R_j|^2``; both add
    ``T_j . (R_j - R_{j-1})``.
    """
    X = _as_vertices(curve)
    q, _, T, _ = _parts(X, eps_q)
    field_ = rhs(X, eps_q=eps_q)
    R, V = field_.aux, field_.velocity
    qn, qp = np.roll(q, -1), np.roll(q, 1)
    Rp = np.roll(R, 1, axis=0)
    drift = np.einsum("ij,ij->i", T, R - Rp)

    dT_next = np.roll(T, -1, axis=0) - T
    dT_prev = np.roll(T, 1, axis=0) - T
    tangent_form = (
        -np.einsum("ij,ij->i", dT_next, dT_next) / (q + qn)
        - np.einsum("ij,ij->i", dT_prev, dT_prev) / (q + qp)
        + drift
    )
    W = V - R
    Wp = np.roll(W, 1, axis=0)
    velocity_form = (
        -0.25 * (q + qn) * np.einsum("ij,ij->i", W, W)
        - 0.25 * (q + qp) * np.einsum("ij,ij->i", Wp, Wp)
        + drift
    )
    return tangent_form, velocity_form


def fan_area_rate(curve, eps_q=None):
    """``dS_j/dt`` from the expansion in neighbouring fan areas.

    ``-a_j S_j + b_j S_{j+1}^{j-2} + c_j S_j^{j+2}`` plus three ``pi/L``
    inner-product terms.
    """
    X = _as_vertices(curve)
    q, _, _, L = _parts(X, eps_q)
    sh = lambda a, k: np.roll(a, -k, axis=0)  # noqa: E731  sh(a, k)[j] == a[j+k]
    q_m1, q_p1, q_p2 = sh(q, -1), sh(q, 1), sh(q, 2)
    X_m2, X_m1, X_p1, X_p2 = sh(X, -2), sh(X, -1), sh(X, 1), sh(X, 2)

    a = 2 / (q * q_m1) + 2 / (q * q_p1) + 2 / (q_p1 * q_p2)
    b = 2 / (q_m1 * (q_m1 + q))
    c = 2 / (q_p2 * (q_p1 + q_p2))
    S = oriented_area(X_m1, X, X_p1)
    S_b = oriented_area(X, X_p1, X_m2)  # S_{j+1}^{j-2}
    S_c = oriented_area(X_m1, X, X_p2)  # S_j^{j+2}

    dot = lambda u, v: np.einsum("ij,ij->i", u, v)  # noqa: E731
    k = math.pi / L
    return (
        -a * S + b * S_b + c * S_c
        + k * dot(X_p1 - X_m1, X_p1 - X_m1) / (q + q_p1)
        + k * dot(X - X_p1, X - X_m2) / (q_m1 + q)
        + k * dot(X - X_m1, X - X_p2) / (q_p1 + q_p2)
    )


def perimeter_rate(curve, eps_q=None):
    """``dL/dt = -2 sum |T_{j+1}-T_j|^2/(q_j+q_{j+1}) - (2 pi/L) sum T_j . N_{j+1}``."""
    X = _as_vertices(curve)
    q, _, T, L = _parts(X, eps_q)
    Tn = np.roll(T, -1, axis=0)
    d = Tn - T
    bending = np.sum(np.einsum("ij,ij->i", d, d) / (q + np.roll(q, -1)))
    # T_j . perp(T_{j+1}) = -cross(T_j, T_{j+1})
    turning = np.sum(-cross(T, Tn))
    return float(-2 * bending - (2 * math.pi / L) * turning)


def trig_inequality_f(betas):
    """``(sum sin b)^2 - (sum b)(sum sin 2b)/2`` for angles in ``[0, pi/2]``."""
    b = np.asarray(betas, dtype=float)
    if b.ndim != 1 or b.size == 0:
        raise DomainError("betas must be a nonempty 1-D sequence")
    if np.any(b < 0) or np.any(b > math.pi / 2) or not np.all(np.isfinite(b)):
        raise DomainError("every angle must lie in [0, pi/2]")
    # fsum is correctly rounded, so appending a zero angle changes nothing
    s1 = math.fsum(np.sin(b))
    return s1 * s1 - 0.5 * math.fsum(b) * math.fsum(np.sin(2 * b))
