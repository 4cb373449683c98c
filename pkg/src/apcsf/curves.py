"""Initial curves and their nodal interpolants on a parameter grid."""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, InvalidN
from .geometry import TWO_PI, Grid, PolygonCurve, read_polygon


@dataclass(frozen=True)
class InitialCurve:
    """A closed parametrized curve ``X0(xi)``, periodic in ``xi``.

    ``kind`` is one of ``"ellipse"``, ``"circle"``, ``"polygon-file"`` or
    ``"parametric-table"``. Analytic kinds use the angle ``2*pi*xi/period``;
    tabulated kinds interpolate linearly in the parameter between nodes.
    """

    kind: str
    params: tuple = ()
    table_xi: np.ndarray = field(default=None, repr=False, compare=False)
    table_points: np.ndarray = field(default=None, repr=False, compare=False)
    period: float = TWO_PI

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=float)
        if self.kind in ("ellipse", "circle"):
            a, b = self.params
            theta = TWO_PI * xi / self.period
            return np.stack([a * np.cos(theta), b * np.sin(theta)], axis=-1)
        return self._table_eval(xi)

    def _table_eval(self, xi):
        s = np.mod(xi, self.period)
        nodes = np.append(self.table_xi, self.table_xi[0] + self.period)
        pts = np.vstack([self.table_points, self.table_points[:1]])
        # shift so the table starts at its first node
        s = np.where(s < self.table_xi[0], s + self.period, s)
        x = np.interp(s, nodes, pts[:, 0])
        y = np.interp(s, nodes, pts[:, 1])
        return np.stack([x, y], axis=-1)

    def node_values(self, grid):
        """Exact values at the grid's vertex parameters (no interpolation on table nodes)."""
        xi = grid.vertex_params
        if self.kind in ("ellipse", "circle"):
            return self(xi)
        out = self._table_eval(xi)
        # reproduce table rows bit-for-bit where the grid hits a table node
        pos = np.searchsorted(self.table_xi, xi)
        for i, (p, s) in enumerate(zip(pos, xi)):
            if p < len(self.table_xi) and self.table_xi[p] == s:
                out[i] = self.table_points[p]
        return out


def ellipse(a, b, period=TWO_PI):
    return InitialCurve("ellipse", (float(a), float(b)), period=period)


def circle(r, period=TWO_PI):
    return InitialCurve("circle", (float(r), float(r)), period=period)


def parametric_table(xi, points, period=TWO_PI):
    xi = np.asarray(xi, dtype=float)
    points = np.asarray(points, dtype=float)
    if xi.ndim != 1 or points.shape != (xi.size, 2):
        raise ValueError("parametric table needs matching (M,) parameters and (M, 2) points")
    if np.any(np.diff(xi) <= 0) or xi[0] < 0 or xi[-1] >= xi[0] + period:
        raise ValueError("table parameters must be strictly increasing within one period")
    return InitialCurve("parametric-table", (), xi, points, period)


def polygon_file(path, period=TWO_PI):
    """Polygon vertices placed at uniform parameters ``j * period / M``."""
    pts = read_polygon(path)
    if len(pts) < 3:
        raise InvalidN(f"{path}: need at least 3 vertices, got {len(pts)}")
    xi = period * np.arange(len(pts)) / len(pts)
    return InitialCurve("polygon-file", (str(path),), xi, pts, period)


def uniform_grid(N, period=TWO_PI):
    if int(N) != N or N < 3:
        raise InvalidN(f"N must be an integer >= 3, got {N!r}")
    N = int(N)
    nodes = period * np.arange(N + 1) / N
    nodes[-1] = period
    return Grid(nodes, period=period)


def interpolate(curve, grid, eps_q=None):
    """Nodal interpolant: vertex ``j`` is ``X0(xi_j)``."""
    return PolygonCurve(curve.node_values(grid), eps_q=eps_q)


def parse_curve(descriptor, period=TWO_PI):
    """Parse ``ellipse:a,b``, ``circle:r`` or ``file:PATH``."""
    kind, _, arg = descriptor.partition(":")
    try:
        if kind == "ellipse":
            a, b = (float(v) for v in arg.split(","))
            if not (a > 0 and b > 0):
                raise ValueError("semi-axes must be positive")
            return ellipse(a, b, period)
        if kind == "circle":
            r = float(arg)
            if not r > 0:
                raise ValueError("radius must be positive")
            return circle(r, period)
        if kind == "file":
            if not arg:
                raise ValueError("missing path")
            return polygon_file(arg, period)
    except ValueError as exc:
        raise ConfigError("curve", f"{descriptor!r}: {exc}") from exc
    raise ConfigError("curve", f"unknown curve kind in {descriptor!r}")


def regular_polygon(N, r=1.0, phase=0.0):
    """Vertices ``r * exp(i (phase + 2 pi j / N))``."""
    theta = phase + TWO_PI * np.arange(N) / N
    return PolygonCurve(np.stack([r * np.cos(theta), r * np.sin(theta)], axis=1))


def regular_radial_rate(N, r=1.0):
    """Inward speed of every vertex of the regular N-gon under the lumped flow."""
    s = math.sin(math.pi / N)
    return (2 * s - (TWO_PI / N) * math.cos(math.pi / N)) / (2 * r * s)
