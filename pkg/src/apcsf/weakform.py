"""Element-by-element assembly of the P1 weak form and exact P1 norms.

This is a second, independent route to the vertex ODE: every term is
integrated per element from the local linear basis, with closed-form
integrals, so identities with the lumped formulation hold to roundoff.
"""

import math
from dataclasses import dataclass

import numpy as np

from .geometry import _as_vertices, check_edges, perp

# integrals of products of the local hat functions over an element of width 1
_MASS = np.array([[1 / 3, 1 / 6], [1 / 6, 1 / 3]])
_LOAD = np.array([0.5, 0.5])
_GRAD = np.array([-1.0, 1.0])  # derivative of (left, right) hats times width


@dataclass(frozen=True)
class WeakFormResidual:
    """Pairings of each weak-form term with the test functions ``(phi_j, 0)`` and ``(0, phi_j)``.

    Every array has shape ``(N, 2)``: row ``j`` holds the two pairings for
    node ``j``. ``total`` is their sum.
    """

    mass: np.ndarray
    stiffness: np.ndarray
    lumping: np.ndarray
    perimeter: np.ndarray

    @property
    def total(self):
        return self.mass + self.stiffness + self.lumping + self.perimeter

    @property
    def scale(self):
        """Largest single-term magnitude, the natural reference for relative checks."""
        terms = np.stack([self.mass, self.stiffness, self.lumping, self.perimeter])
        return float(np.abs(terms).max())

    def relative(self):
        return float(np.abs(self.total).max() / self.scale)


def _scatter(local_left, local_right, N):
    """Add element contributions to nodes ``j-1`` (left) and ``j`` (right) of element ``j``."""
    out = np.array(local_right, dtype=float)
    out += np.roll(local_left, -1, axis=0)
    return out


def assemble_residual(curve, velocity, grid, area_preserving=True, lam=1.0):
    """Weak-form pairings for a P1 curve and a P1 velocity field.

    Element ``j`` spans ``[xi_{j-1}, xi_j]`` with width ``h_j``. On it
    ``|d_xi X| = q_j / h_j`` is constant and the four terms are

    * mass:      ``int |d_xi X| V . phi``
    * stiffness: ``int (d_xi X / |d_xi X|) . d_xi phi``
    * lumping:   ``int h_j^2 |d_xi X| / 6 * d_xi V . d_xi phi``
    * perimeter: ``int (2 pi / L) perp(d_xi X) . phi``

    ``lam`` scales the test functions (the pairings are linear in it).
    """
    X = _as_vertices(curve)
    V = np.asarray(getattr(velocity, "velocity", velocity), dtype=float)
    N = len(X)
    if grid.N != N or V.shape != (N, 2):
        raise ValueError(f"grid has {grid.N} intervals, curve {N} vertices, velocity {V.shape}")
    q = check_edges(X)
    L = q.sum()
    h = np.asarray(grid.h)
    dX = (X - np.roll(X, 1, axis=0)) / h[:, None]  # d_xi X on each element
    speed = q / h
    Vl, Vr = np.roll(V, 1, axis=0), V  # element end values

    # mass: speed * h * MASS @ (Vl, Vr)
    w = (speed * h)[:, None]
    mass_l = w * (_MASS[0, 0] * Vl + _MASS[0, 1] * Vr)
    mass_r = w * (_MASS[1, 0] * Vl + _MASS[1, 1] * Vr)

    # d_xi phi = GRAD / h on the element, integrated over width h
    unit_t = dX / speed[:, None]
    stiff_l = _GRAD[0] * unit_t
    stiff_r = _GRAD[1] * unit_t

    dV = (Vr - Vl) / h[:, None]
    coef = (h**2 * speed / 6.0)[:, None] * dV
    lump_l = coef * _GRAD[0]
    lump_r = coef * _GRAD[1]

    c = (2 * math.pi / L) if area_preserving else 0.0
    f = c * perp(dX) * h[:, None]
    per_l = f * _LOAD[0]
    per_r = f * _LOAD[1]

    return WeakFormResidual(
        mass=lam * _scatter(mass_l, mass_r, N),
        stiffness=lam * _scatter(stiff_l, stiff_r, N),
        lumping=lam * _scatter(lump_l, lump_r, N),
        perimeter=lam * _scatter(per_l, per_r, N),
    )


# ---------------------------------------------------------------------------
# piecewise-linear periodic functions and exact norms
# ---------------------------------------------------------------------------

class PiecewiseLinear:
    """Periodic continuous P1 function given by node values.

    ``nodes`` has ``M + 1`` entries spanning one period; ``values`` has ``M``
    rows (the value at ``nodes[M]`` repeats row 0). Values may be scalar or
    vector valued.
    """

    def __init__(self, nodes, values):
        self.nodes = np.asarray(nodes, dtype=float)
        v = np.asarray(values, dtype=float)
        self.values = v[:, None] if v.ndim == 1 else v
        if self.values.shape[0] != self.nodes.size - 1:
            raise ValueError("need one value per node (period end excluded)")

    @classmethod
    def on_grid(cls, grid, values):
        return cls(grid.nodes, values)

    @property
    def period(self):
        return self.nodes[-1] - self.nodes[0]

    def closed_values(self):
        return np.vstack([self.values, self.values[:1]])

    def __call__(self, xi):
        xi = self.nodes[0] + np.mod(np.asarray(xi, dtype=float) - self.nodes[0], self.period)
        vals = self.closed_values()
        return np.stack([np.interp(xi, self.nodes, vals[:, d]) for d in range(vals.shape[1])], axis=-1)

    def at_nodes(self, nodes):
        """Values at ``nodes`` within one period; exact at own nodes."""
        out = self(nodes)
        idx = np.searchsorted(self.nodes, nodes)
        hit = (idx < self.nodes.size) & (self.nodes[np.minimum(idx, self.nodes.size - 1)] == nodes)
        out[hit] = self.closed_values()[idx[hit]]
        return out


def union_nodes(a, b, tol=1e-14):
    """Sorted merge of two node lists, dropping near-coincident duplicates."""
    allnodes = np.sort(np.concatenate([a, b]))
    scale = max(1.0, float(np.abs(allnodes).max()))
    keep = np.concatenate([[True], np.diff(allnodes) > tol * scale])
    return allnodes[keep]


def _common(f, g):
    if abs(f.period - g.period) > 1e-12 * f.period or abs(f.nodes[0] - g.nodes[0]) > 1e-12:
        raise ValueError("functions are defined on different parameter domains")
    nodes = union_nodes(f.nodes, g.nodes)
    d = f.at_nodes(nodes) - g.at_nodes(nodes)
    return nodes, d


def l2_norm_pl(f, g):
    """Exact ``||f - g||_{L^2}`` over one period, on the union mesh."""
    nodes, d = _common(f, g)
    w = np.diff(nodes)
    a, b = d[:-1], d[1:]
    # int_0^w of a linear function from a to b, squared: w (a^2 + a b + b^2) / 3
    return math.sqrt(float(np.sum(w[:, None] * (a * a + a * b + b * b)) / 3.0))


def h1_seminorm_pl(f, g):
    """Exact ``||d(f - g)/dxi||_{L^2}``; the derivative is piecewise constant."""
    nodes, d = _common(f, g)
    w = np.diff(nodes)
    s = np.diff(d, axis=0) / w[:, None]
    return math.sqrt(float(np.sum(w[:, None] * s * s)))
