"""Linearly implicit time stepping: one cyclic block-tridiagonal solve per step.

With geometry frozen at the previous level, vertex ``j`` satisfies

    m_j (X_j - X_j^old) - (X_{j+1} - X_j)/q_{j+1} + (X_j - X_{j-1})/q_j
        + (pi/L) perp(X_{j+1} - X_{j-1}) = 0,    m_j = (q_j + q_{j+1}) / (2 tau)
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DegenerateEdge, SingularSystem
from .geometry import TWO_PI, PolygonCurve, _as_vertices, check_edges
from .semidiscrete import velocity
from .trajectory import Recorder

log = logging.getLogger(__name__)

#: matrix of the perp map, ``PERP @ v == perp(v)``
PERP = np.array([[0.0, -1.0], [1.0, 0.0]])
DENSE_MAX_N = 16
DEFAULT_COND_CAP = 1e12


@dataclass(frozen=True)
class CyclicBlockTridiagonalSystem:
    """``L_j x_{j-1} + D_j x_j + U_j x_{j+1} = b_j`` with periodic wraparound.

    ``lower``, ``diag`` and ``upper`` have shape ``(N, 2, 2)``; ``rhs`` is
    ``(N, 2)``. ``lower[0]`` couples row 0 to ``x_{N-1}`` and ``upper[N-1]``
    couples the last row to ``x_0``.
    """

    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray
    rhs: np.ndarray

    @property
    def N(self):
        return self.diag.shape[0]

    def matvec(self, x):
        x = np.asarray(x, dtype=float)
        return (np.einsum("jab,jb->ja", self.diag, x)
                + np.einsum("jab,jb->ja", self.lower, np.roll(x, 1, axis=0))
                + np.einsum("jab,jb->ja", self.upper, np.roll(x, -1, axis=0)))

    def residual(self, x):
        """Relative residual ``||A x - b|| / ||b||`` (absolute if ``b == 0``)."""
        r = np.linalg.norm(self.matvec(x) - self.rhs)
        nb = np.linalg.norm(self.rhs)
        return float(r / nb) if nb > 0 else float(r)

    def to_dense(self):
        N = self.N
        A = np.zeros((2 * N, 2 * N))
        for j in range(N):
            r = slice(2 * j, 2 * j + 2)
            A[r, 2 * j:2 * j + 2] += self.diag[j]
            jm, jp = (j - 1) % N, (j + 1) % N
            A[r, 2 * jm:2 * jm + 2] += self.lower[j]
            A[r, 2 * jp:2 * jp + 2] += self.upper[j]
        return A


def assemble(curve_prev, tau, area_preserving=True, eps_q=None):
    X = _as_vertices(curve_prev)
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    q = check_edges(X, eps_q)
    qn = np.roll(q, -1)
    L = q.sum()
    m = (q + qn) / (2 * tau)
    eye = np.eye(2)
    c = math.pi / L if area_preserving else 0.0
    diag = (m + 1 / q + 1 / qn)[:, None, None] * eye
    upper = (-1 / qn)[:, None, None] * eye + c * PERP
    lower = (-1 / q)[:, None, None] * eye - c * PERP
    return CyclicBlockTridiagonalSystem(lower, diag, upper, m[:, None] * X)


def solve(system, method="auto", cond_cap=DEFAULT_COND_CAP, backend=None):
    """Solve a cyclic block system.

    ``method`` is ``"dense"`` (direct LU on the full matrix), ``"banded"``
    (block Thomas on the acyclic band plus a rank-4 Woodbury correction for
    the two corner blocks) or ``"auto"`` (dense for ``N <= 16``).
    """
    if method == "auto":
        method = "dense" if system.N <= DENSE_MAX_N else "banded"
    if method == "dense":
        return _solve_dense(system, cond_cap)
    if method == "banded":
        return _solve_banded(system, cond_cap, kernels.get_block_thomas(backend))
    raise ValueError(f"unknown method {method!r}")


def _solve_dense(system, cond_cap):
    A = system.to_dense()
    if np.linalg.cond(A) > cond_cap:
        raise SingularSystem("dense system exceeds the condition cap")
    try:
        x = np.linalg.solve(A, system.rhs.reshape(-1))
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc
    return x.reshape(-1, 2)


def _solve_banded(system, cond_cap, thomas):
    N = system.N
    L0 = system.lower[0]
    Ulast = system.upper[N - 1]
    # columns: [b | e_0 (x) I | e_{N-1} (x) I]
    B = np.zeros((N, 2, 5))
    B[:, :, 0] = system.rhs
    B[0, :, 1:3] = np.eye(2)
    B[N - 1, :, 3:5] = np.eye(2)
    Y = thomas(system.lower, system.diag, system.upper, B, cond_cap)
    y, Z = Y[:, :, 0], Y[:, :, 1:]
    # V^T picks (L_0 x_{N-1}, U_{N-1} x_0)
    Vt = lambda v: np.concatenate([L0 @ v[N - 1], Ulast @ v[0]])  # noqa: E731
    C = np.eye(4) + np.column_stack([Vt(Z[:, :, i]) for i in range(4)])
    if np.linalg.cond(C) > cond_cap:
        raise SingularSystem("capacitance matrix of the corner correction is ill-conditioned")
    w = np.linalg.solve(C, Vt(y))
    return y - np.einsum("jai,i->ja", Z, w)


def step(curve_prev, tau, area_preserving=True, eps_q=None, method="auto",
         cond_cap=DEFAULT_COND_CAP):
    """Advance one time level; returns a PolygonCurve."""
    X = _step(_as_vertices(curve_prev), tau, area_preserving, eps_q, method, cond_cap)
    return PolygonCurve(X, orient=False)


def _step(X, tau, area_preserving=True, eps_q=None, method="auto", cond_cap=DEFAULT_COND_CAP):
    return solve(assemble(X, tau, area_preserving, eps_q), method, cond_cap)


def steps_for(T, tau, rtol=1e-9):
    """Integer ``m = T / tau``; raises ValueError if it is not a positive integer."""
    if not (T > 0 and tau > 0):
        raise ValueError(f"T and tau must be positive (T={T}, tau={tau})")
    m = T / tau
    mi = round(m)
    if mi < 1 or abs(m - mi) > rtol * max(1.0, m):
        raise ValueError(f"T/tau = {m!r} is not a positive integer")
    return mi


def evolve_full(curve0, T, tau, record_every=1, area_preserving=True, eps_q=None,
                method="auto", cond_cap=DEFAULT_COND_CAP, period=TWO_PI):
    """Run ``m = T/tau`` steps of the linearly implicit scheme; ``t_k = k tau``."""
    m = steps_for(T, tau)
    tau = T / m
    X = np.array(_as_vertices(curve0), dtype=float)
    rec = Recorder(record_every, lambda Y: velocity(Y, area_preserving, eps_q))
    rec.add(0, 0.0, X)
    for k in range(1, m + 1):
        try:
            X = _step(X, tau, area_preserving, eps_q, method, cond_cap)
            check_edges(X, eps_q)
        except DegenerateEdge as exc:
            exc.time = (k - 1) * tau
            raise
        rec.add(k, k * tau if k < m else T, X, force=(k == m))
    return rec.finish("full", tau, period=period, area_preserving=area_preserving, m=m)
