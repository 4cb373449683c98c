"""Recorded time histories of a polygon evolution."""

from dataclasses import dataclass, field

import numpy as np

from .geometry import TWO_PI, PolygonCurve, edge_lengths, shoelace_area, triangle_fan_areas

DIAGNOSTIC_COLUMNS = ("perimeter", "area", "min_edge", "min_fan_area", "max_speed")


def snapshot_diagnostics(X, speed):
    q = edge_lengths(X)
    return (
        float(q.sum()),
        shoelace_area(X),
        float(q.min()),
        float(triangle_fan_areas(X).min()),
        float(np.max(np.hypot(speed[:, 0], speed[:, 1]))),
    )


@dataclass
class TrajectoryRecord:
    """Snapshots ``positions[i]`` taken at step ``steps[i]`` / time ``times[i]``.

    ``diagnostics`` has one row per snapshot with the columns of
    :data:`DIAGNOSTIC_COLUMNS`; ``max_speed`` is the semi-discrete vertex
    speed evaluated at the snapshot. ``dt`` is the nominal step size.
    """

    scheme: str
    dt: float
    times: np.ndarray
    steps: np.ndarray
    positions: np.ndarray
    diagnostics: np.ndarray
    period: float = TWO_PI
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")
        if self.positions.ndim != 3 or self.positions.shape[2] != 2:
            raise ValueError("positions must have shape (K, N, 2)")

    @property
    def N(self):
        return self.positions.shape[1]

    @property
    def n_steps(self):
        return int(self.steps[-1])

    def __len__(self):
        return len(self.times)

    @property
    def snapshots(self):
        return [PolygonCurve(X, orient=False) for X in self.positions]

    @property
    def final(self):
        return PolygonCurve(self.positions[-1], orient=False)

    def column(self, name):
        return self.diagnostics[:, DIAGNOSTIC_COLUMNS.index(name)]

    @property
    def perimeter(self):
        return self.column("perimeter")

    @property
    def area(self):
        return self.column("area")

    @property
    def every_step(self):
        return np.array_equal(self.steps, np.arange(len(self.steps)))


class Recorder:
    """Accumulates snapshots during an integration loop."""

    def __init__(self, record_every, speed_fn):
        if int(record_every) != record_every or record_every < 1:
            raise ValueError(f"record_every must be a positive integer, got {record_every!r}")
        self.record_every = int(record_every)
        self.speed_fn = speed_fn
        self.times, self.steps, self.positions, self.rows = [], [], [], []

    def add(self, step, t, X, force=False):
        if not force and step % self.record_every:
            return
        if self.steps and self.steps[-1] == step:
            return
        self.times.append(t)
        self.steps.append(step)
        self.positions.append(np.array(X))
        self.rows.append(snapshot_diagnostics(X, self.speed_fn(X)))

    def finish(self, scheme, dt, period=TWO_PI, **meta):
        return TrajectoryRecord(
            scheme=scheme,
            dt=dt,
            times=np.array(self.times),
            steps=np.array(self.steps, dtype=int),
            positions=np.array(self.positions),
            diagnostics=np.array(self.rows),
            period=period,
            meta=meta,
        )
