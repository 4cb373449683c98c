"""Periodic parameter grids, closed polygons and their derived geometry.

Vertex arrays are ``(N, 2)`` float arrays with periodic indexing: edge ``j``
joins vertex ``j-1`` to vertex ``j``, so ``q[j] = |X[j] - X[j-1]|`` and the
edge ``q[0]`` closes the polygon from ``X[N-1]`` back to ``X[0]``.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateEdge, InvalidIndex, InvalidN

log = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi

#: relative degeneracy floor, multiplied by L_h / N
DEFAULT_EPS_REL = 1e-14


def perp(v):
    """Rotate by +90 degrees: ``(a, b) -> (-b, a)``. Works on ``(..., 2)`` arrays."""
    v = np.asarray(v, dtype=float)
    out = np.empty_like(v)
    out[..., 0] = -v[..., 1]
    out[..., 1] = v[..., 0]
    return out


def cross(u, v):
    """Scalar 2D cross product ``u_x v_y - u_y v_x``, so that ``u . perp(v) = -cross(u, v)``."""
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


# ---------------------------------------------------------------------------
# parameter grid
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridRegularity:
    """Mesh-regularity constants achieved by a partition.

    ``min_ratio`` is ``min_j h_j / h`` and ``jump_ratio`` is
    ``max_j |h_{j+1} - h_j| / h**2``; the partition satisfies the regularity
    assumption for ``(C_p, C_P)`` iff ``min_ratio >= C_p`` and
    ``jump_ratio <= C_P``.
    """

    h: float
    min_ratio: float
    jump_ratio: float
    C_p: float
    C_P: float

    @property
    def ok(self):
        return self.min_ratio >= self.C_p * (1 - 1e-12) and self.jump_ratio <= self.C_P


class Grid:
    """Periodic partition ``xi_0 < xi_1 < ... < xi_N = xi_0 + period``.

    ``h[j]`` is the length of the interval ending at node ``j``, with
    ``h[0] = xi_N - xi_{N-1}`` (node ``N`` is identified with node 0).
    The period is ``2*pi`` unless stated otherwise.
    """

    def __init__(self, nodes, period=TWO_PI):
        nodes = np.array(nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 4:
            raise InvalidN(f"a grid needs at least 3 intervals, got {nodes.size - 1}")
        widths = np.diff(nodes)
        if np.any(widths <= 0):
            raise ValueError("grid nodes must be strictly increasing")
        if abs(widths.sum() - period) > 1e-12 * max(1.0, period):
            raise ValueError(f"grid intervals sum to {widths.sum()!r}, expected {period!r}")
        nodes.setflags(write=False)
        self.nodes = nodes
        self.period = float(period)
        h = np.roll(widths, 1)
        h.setflags(write=False)
        self.h = h

    @property
    def N(self):
        return self.nodes.size - 1

    @property
    def hmax(self):
        return float(self.h.max())

    @property
    def vertex_params(self):
        """Parameter values ``xi_0 .. xi_{N-1}`` carrying the N vertices."""
        return self.nodes[:-1]

    def regularity(self, C_p=1.0, C_P=1.0):
        h = self.hmax
        jumps = np.abs(np.roll(self.h, -1) - self.h)
        return GridRegularity(
            h=h,
            min_ratio=float(self.h.min() / h),
            jump_ratio=float(jumps.max() / h**2),
            C_p=C_p,
            C_P=C_P,
        )

    def __eq__(self, other):
        return (isinstance(other, Grid) and self.period == other.period
                and np.array_equal(self.nodes, other.nodes))

    def __hash__(self):
        return hash((self.period, self.nodes.tobytes()))

    def __repr__(self):
        return f"Grid(N={self.N}, period={self.period:.6g}, h={self.hmax:.4g})"


# ---------------------------------------------------------------------------
# polygons
# ---------------------------------------------------------------------------

def _as_vertices(curve):
    if isinstance(curve, PolygonCurve):
        return curve.vertices
    return np.asarray(curve, dtype=float)


def edge_lengths(X):
    X = _as_vertices(X)
    return np.hypot(*(X - np.roll(X, 1, axis=0)).T)


def shoelace_area(curve):
    """Signed enclosed area; positive for anticlockwise vertex order."""
    X = _as_vertices(curve)
    x, y = X[:, 0], X[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def check_edges(X, eps_q=None, time=None):
    """Return edge lengths of ``X``; raise DegenerateEdge below the floor.

    The default floor is ``1e-14 * L_h / N`` so the guard is scale invariant.
    """
    q = edge_lengths(X)
    L = q.sum()
    floor = DEFAULT_EPS_REL * L / q.size if eps_q is None else eps_q
    j = int(np.argmin(q))
    if not q[j] > floor:
        raise DegenerateEdge(f"edge {j} has length {q[j]:.3e} <= {floor:.3e}",
                             index=j, length=float(q[j]), time=time)
    return q


class PolygonCurve:
    """Closed polygon ``X_1..X_N`` stored as a read-only ``(N, 2)`` array.

    Clockwise input is reversed (keeping the first vertex) with a logged
    warning unless ``orient=False``.
    """

    __slots__ = ("vertices",)

    def __init__(self, vertices, orient=True, eps_q=None):
        X = np.array(vertices, dtype=float)
        if X.ndim != 2 or X.shape[1] != 2:
            raise ValueError(f"vertices must have shape (N, 2), got {X.shape}")
        if X.shape[0] < 3:
            raise InvalidN(f"a polygon needs N >= 3 vertices, got {X.shape[0]}")
        if not np.all(np.isfinite(X)):
            raise ValueError("vertices must be finite")
        check_edges(X, eps_q)
        if orient and shoelace_area(X) < 0:
            log.warning("clockwise polygon with %d vertices reversed to anticlockwise", len(X))
            X = np.roll(X[::-1], 1, axis=0).copy()
        X.setflags(write=False)
        object.__setattr__(self, "vertices", X)

    def __setattr__(self, name, value):
        raise AttributeError("PolygonCurve is immutable")

    @property
    def N(self):
        return self.vertices.shape[0]

    def __len__(self):
        return self.vertices.shape[0]

    def translated(self, c):
        return PolygonCurve(self.vertices + np.asarray(c, dtype=float), orient=False)

    def scaled(self, lam):
        return PolygonCurve(lam * self.vertices, orient=False)

    def rotated(self, theta):
        c, s = math.cos(theta), math.sin(theta)
        return PolygonCurve(self.vertices @ np.array([[c, s], [-s, c]]), orient=False)

    def __repr__(self):
        return f"PolygonCurve(N={self.N}, area={shoelace_area(self):.6g})"


@dataclass(frozen=True)
class GeometricState:
    """Per-edge and per-vertex quantities of a polygon.

    Attributes
    ----------
    q : (N,) edge lengths, ``q[j] = |X[j] - X[j-1]|``
    tangents : (N, 2) unit edge directions
    normals : (N, 2) ``perp(tangents)``, the inner normals for anticlockwise order
    perimeter : float, ``sum(q)``
    fan_areas : (N,) ``S_j = Area(X[j-1], X[j], X[j+1])``
    exterior_angles : (N,) signed turning angle at each vertex, positive for
        left turns
    """

    q: np.ndarray
    tangents: np.ndarray
    normals: np.ndarray
    perimeter: float
    fan_areas: np.ndarray
    exterior_angles: np.ndarray


def geometric_state(curve, eps_q=None):
    X = _as_vertices(curve)
    q = check_edges(X, eps_q)
    E = X - np.roll(X, 1, axis=0)
    T = E / q[:, None]
    Tn = np.roll(T, -1, axis=0)
    # atan2 keeps the sign and stays accurate near 0 and pi
    alpha = np.arctan2(cross(T, Tn), np.einsum("ij,ij->i", T, Tn))
    return GeometricState(
        q=q,
        tangents=T,
        normals=perp(T),
        perimeter=float(q.sum()),
        fan_areas=triangle_fan_areas(X),
        exterior_angles=alpha,
    )


def oriented_area(Y1, Y2, Y3):
    """Half the determinant ``(Y3 - Y2) . perp(Y2 - Y1)``; broadcasts over leading axes."""
    Y1, Y2, Y3 = (np.asarray(Y, dtype=float) for Y in (Y1, Y2, Y3))
    a = Y3 - Y2
    b = Y2 - Y1
    res = 0.5 * (a[..., 1] * b[..., 0] - a[..., 0] * b[..., 1])
    return float(res) if np.ndim(res) == 0 else res


def triangle_fan_areas(curve):
    X = _as_vertices(curve)
    return oriented_area(np.roll(X, 1, axis=0), X, np.roll(X, -1, axis=0))


def extended_fan_area(curve, j, k):
    """``Area(X[j-1], X[j], X[k])`` with periodic indices; ``k`` must differ from ``j-1`` and ``j``."""
    X = _as_vertices(curve)
    N = len(X)
    if k % N in ((j - 1) % N, j % N):
        raise InvalidIndex(f"k={k} coincides with an endpoint of edge j={j} (N={N})")
    return oriented_area(X[(j - 1) % N], X[j % N], X[k % N])


def extended_fan_area_matrix(curve):
    """All ``S_j^k`` as an ``(N, N)`` array, NaN where ``k in {j-1, j}``."""
    X = _as_vertices(curve)
    N = len(X)
    A = np.roll(X, 1, axis=0)[:, None, :]
    B = X[:, None, :]
    S = oriented_area(A, B, X[None, :, :])
    idx = np.arange(N)
    S[idx, idx] = np.nan
    S[idx, (idx - 1) % N] = np.nan
    return S


@dataclass(frozen=True)
class ConvexityWitness:
    """Outcome of :func:`is_convex`.

    ``status`` is ``"convex"``, ``"nonconvex"`` or ``"not_a_polygon"`` (three
    adjacent vertices collinear); ``index`` and ``value`` locate the smallest
    fan area.
    """

    status: str
    index: int
    value: float

    @property
    def convex(self):
        return self.status == "convex"

    def __bool__(self):
        return self.convex


def is_convex(curve, collinear_tol=1e-14):
    X = _as_vertices(curve)
    S = triangle_fan_areas(X)
    q = edge_lengths(X)
    j = int(np.argmin(S))
    # S_j = q_j q_{j+1} sin(alpha_j) / 2
    scale = 0.5 * q * np.roll(q, -1)
    if np.any(np.abs(S) <= collinear_tol * scale):
        jj = int(np.argmin(np.abs(S) / scale))
        return ConvexityWitness("not_a_polygon", jj, float(S[jj]))
    return ConvexityWitness("convex" if S[j] > 0 else "nonconvex", j, float(S[j]))


# ---------------------------------------------------------------------------
# polygon files
# ---------------------------------------------------------------------------

def read_polygon(path):
    """Read one vertex per line (two numbers); ``#`` lines are comments."""
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            parts = s.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected two numbers, got {s!r}")
            rows.append((float(parts[0]), float(parts[1])))
    return np.array(rows, dtype=float).reshape(-1, 2)


def write_polygon(path, curve, header=None):
    X = _as_vertices(curve)
    with open(path, "w") as fh:
        if header:
            for line in header.splitlines():
                fh.write(f"# {line}\n")
        for x, y in X:
            fh.write(f"{float(x)!r} {float(y)!r}\n")
