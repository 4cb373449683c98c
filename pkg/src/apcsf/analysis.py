"""Refinement error functionals, convergence studies and structure audits."""

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .curves import interpolate, uniform_grid
from .errors import IncompatibleRefinement
from .fullydiscrete import evolve_full
from .geometry import TWO_PI
from .weakform import PiecewiseLinear, h1_seminorm_pl, l2_norm_pl

log = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# trajectory pair errors
# ---------------------------------------------------------------------------

def _uniform_nodes(N, period):
    nodes = period * np.arange(N + 1) / N
    nodes[-1] = period
    return nodes


def _pairing(coarse, fine, strict):
    """Return the time-index ratio ``r`` so coarse step ``k`` pairs with fine step ``r k``."""
    if not (coarse.every_step and fine.every_step):
        raise IncompatibleRefinement("both trajectories must be recorded at every step")
    if abs(coarse.period - fine.period) > 1e-12 * coarse.period:
        raise IncompatibleRefinement("trajectories use different parameter periods")
    m, mf = coarse.n_steps, fine.n_steps
    if mf % m:
        raise IncompatibleRefinement(f"{mf} fine steps do not refine {m} coarse steps")
    r = mf // m
    if strict and (r != 4 or fine.N != 2 * coarse.N):
        raise IncompatibleRefinement(
            f"expected (2N, 4m) = ({2 * coarse.N}, {4 * m}), got ({fine.N}, {mf})")
    return r


def _pl(traj, values):
    return PiecewiseLinear(_uniform_nodes(len(values), traj.period), values)


def error_e1(coarse, fine, strict=True):
    """``max_{1<=k<=m} ||X^k_h - X^{4k}_{h/2}||_{L^2}``."""
    r = _pairing(coarse, fine, strict)
    return max(l2_norm_pl(_pl(coarse, coarse.positions[k]), _pl(fine, fine.positions[r * k]))
               for k in range(1, coarse.n_steps + 1))


def error_e2(coarse, fine, strict=True):
    """Same pairing as :func:`error_e1` in the ``H^1`` seminorm."""
    r = _pairing(coarse, fine, strict)
    return max(h1_seminorm_pl(_pl(coarse, coarse.positions[k]), _pl(fine, fine.positions[r * k]))
               for k in range(1, coarse.n_steps + 1))


def error_e3(coarse, fine, strict=True):
    """Time-integrated discrete velocity error.

    ``sqrt(sum_k tau ||(X^{k+1} - X^k)/tau - (X^{4k+1} - X^{4k})/(tau/4)||^2)``
    for ``k = 0 .. m-1``, where the fine difference quotient is taken over
    its first sub-step only.
    """
    r = _pairing(coarse, fine, strict)
    m = coarse.n_steps
    tau = coarse.times[-1] / m
    tf = tau / r
    C, F = coarse.positions, fine.positions
    total = 0.0
    for k in range(m):
        vc = (C[k + 1] - C[k]) / tau
        vf = (F[r * k + 1] - F[r * k]) / tf
        total += tau * l2_norm_pl(_pl(coarse, vc), _pl(fine, vf)) ** 2
    return math.sqrt(total)


def order(e_coarse, e_fine):
    return math.log(e_coarse / e_fine) / math.log(2.0)


# ---------------------------------------------------------------------------
# convergence study
# ---------------------------------------------------------------------------

def resolve_tau(N, T, tau_rule="auto", period=TWO_PI):
    """Return ``(tau, m)`` with ``m * tau == T``.

    ``"auto"`` targets ``0.5 h^2`` with ``h = period / N`` and snaps to the
    nearest ``T/m``. A callable maps ``h`` to a nominal step, snapped the
    same way. A number is used as is and must divide ``T``.
    """
    h = period / N
    if tau_rule == "auto":
        nominal = 0.5 * h * h
    elif callable(tau_rule):
        nominal = float(tau_rule(h))
    else:
        tau = float(tau_rule)
        m = T / tau
        if abs(m - round(m)) > 1e-9 * max(1.0, m) or round(m) < 1:
            raise ValueError(f"tau={tau} does not divide T={T}")
        return T / round(m), int(round(m))
    m = max(1, round(T / nominal))
    return T / m, m


@dataclass(frozen=True)
class LevelErrors:
    N: int
    m: int
    tau: float
    E1: float
    E2: float
    E3: float


@dataclass
class ConvergenceReport:
    """Errors per refinement level with consecutive-level orders."""

    levels: list
    config: dict = field(default_factory=dict)

    def errors(self, i):
        return np.array([getattr(lv, f"E{i}") for lv in self.levels])

    def orders(self, i):
        """``log2(E_i(h)/E_i(h/2))`` between consecutive levels (length ``len(levels) - 1``)."""
        e = self.errors(i)
        return np.array([order(a, b) for a, b in zip(e[:-1], e[1:])])

    def rows(self):
        out = []
        for n, lv in enumerate(self.levels):
            row = {"N": lv.N}
            for i in (1, 2, 3):
                row[f"E{i}"] = getattr(lv, f"E{i}")
                row[f"order{i}"] = self.orders(i)[n - 1] if n else None
            out.append(row)
        return out

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["N", "E1", "order1", "E2", "order2", "E3", "order3"])
        for row in self.rows():
            cells = [row["N"]]
            for i in (1, 2, 3):
                cells.append(f"{row[f'E{i}']:.2e}")
                o = row[f"order{i}"]
                cells.append("" if o is None else f"{o:.2f}")
            w.writerow(cells)
        return buf.getvalue()

    def table(self):
        lines = [f"{'N':>5} {'E1':>10} {'Ord1':>6} {'E2':>10} {'Ord2':>6} {'E3':>10} {'Ord3':>6}"]
        for row in self.rows():
            cells = [f"{row['N']:>5}"]
            for i in (1, 2, 3):
                cells.append(f"{row[f'E{i}']:>10.2e}")
                o = row[f"order{i}"]
                cells.append(f"{'-' if o is None else f'{o:.2f}':>6}")
            lines.append(" ".join(cells))
        return "\n".join(lines)


def _run_level(args):
    curve0, N, T, tau, period = args
    X0 = interpolate(curve0, uniform_grid(N, period))
    return evolve_full(X0, T, tau, record_every=1, period=period)


def check_doubling(N_list):
    N_list = [int(n) for n in N_list]
    if not N_list:
        raise ValueError("N_list is empty")
    if any(n < 3 for n in N_list):
        raise ValueError("every N must be >= 3")
    if any(b != 2 * a for a, b in zip(N_list[:-1], N_list[1:])):
        raise ValueError(f"N_list must double at each level, got {N_list}")
    return N_list


def run_convergence_study(curve0, N_list, T=0.25, tau_rule="auto", period=TWO_PI, max_workers=1):
    """Run every level and its ``(2N, tau/4)`` reference and collect E1..E3.

    Each reference run is a separate fully discrete trajectory with exactly
    four times as many steps as its level, so the pairing ``k <-> 4k`` is
    exact even when ``tau`` was snapped to divide ``T``.
    """
    N_list = check_doubling(N_list)
    jobs, meta = [], []
    for N in N_list:
        tau, m = resolve_tau(N, T, tau_rule, period)
        meta.append((N, m, tau))
        jobs.append((curve0, N, T, tau, period))
        jobs.append((curve0, 2 * N, T, tau / 4, period))
    if max_workers and max_workers > 1:
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            runs = list(pool.map(_run_level, jobs))
    else:
        runs = [_run_level(j) for j in jobs]
    levels = []
    for i, (N, m, tau) in enumerate(meta):
        coarse, fine = runs[2 * i], runs[2 * i + 1]
        levels.append(LevelErrors(N, m, tau, error_e1(coarse, fine),
                                  error_e2(coarse, fine), error_e3(coarse, fine)))
        log.info("N=%d m=%d E1=%.3e E2=%.3e E3=%.3e", N, m, *(
            getattr(levels[-1], f"E{k}") for k in (1, 2, 3)))
    config = {"curve": curve0, "T": T, "tau_rule": tau_rule, "period": period}
    return ConvergenceReport(levels, config)


# ---------------------------------------------------------------------------
# structure audits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StructureAudit:
    """Monotonicity, convexity and nondegeneracy extracted from a trajectory.

    ``perimeter_steps_ok[i]`` compares snapshot ``i+1`` with snapshot ``i``
    allowing ``slack * L(0)``.
    """

    perimeter_monotone: bool
    perimeter_steps_ok: np.ndarray
    convex_initially: bool
    convex_throughout: bool
    convex_steps: np.ndarray
    min_fan_area: float
    min_edge: float
    initial_min_edge: float
    area_drift: float
    slack: float

    def summary(self):
        return (f"perimeter monotone={self.perimeter_monotone} convex={self.convex_throughout} "
                f"min S={self.min_fan_area:.3e} min q={self.min_edge:.3e} "
                f"area drift={self.area_drift:.3e}")


def audit_structure(traj, slack=1e-10):
    L = traj.perimeter
    if len(L) == 0:
        raise ValueError("empty trajectory")
    steps_ok = np.diff(L) <= slack * L[0]
    minS = traj.column("min_fan_area")
    minq = traj.column("min_edge")
    convex = minS > 0
    A = traj.area
    return StructureAudit(
        perimeter_monotone=bool(np.all(steps_ok)),
        perimeter_steps_ok=steps_ok,
        convex_initially=bool(convex[0]),
        convex_throughout=bool(np.all(convex)),
        convex_steps=convex,
        min_fan_area=float(minS.min()),
        min_edge=float(minq.min()),
        initial_min_edge=float(minq[0]),
        area_drift=float(abs(A[-1] - A[0])),
        slack=slack,
    )


@dataclass
class AreaLossStudy:
    """Area drift ``|A(T) - A(0)|`` per level with its log-log slope against ``h``."""

    N: list
    h: list
    drift: list

    @property
    def slope(self):
        if len(self.N) < 2:
            return None
        return float(np.polyfit(np.log(self.h), np.log(self.drift), 1)[0])

    @property
    def ratios(self):
        return [a / b for a, b in zip(self.drift[:-1], self.drift[1:])]

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["N", "h", "area_drift", "ratio"])
        for i, (n, h, d) in enumerate(zip(self.N, self.h, self.drift)):
            w.writerow([n, f"{h:.6e}", f"{d:.3e}", f"{self.ratios[i - 1]:.3f}" if i else ""])
        slope = self.slope
        w.writerow(["slope", "", "" if slope is None else f"{slope:.3f}", ""])
        return buf.getvalue()


def area_loss_study(curve0, N_list, T=0.25, tau_rule="auto", period=TWO_PI):
    N_list = check_doubling(N_list)
    drift, hs = [], []
    for N in N_list:
        tau, m = resolve_tau(N, T, tau_rule, period)
        X0 = interpolate(curve0, uniform_grid(N, period))
        traj = evolve_full(X0, T, tau, record_every=m, period=period)
        drift.append(float(abs(traj.area[-1] - traj.area[0])))
        hs.append(period / N)
    return AreaLossStudy(N_list, hs, drift)


__all__ = [
    "AreaLossStudy", "ConvergenceReport", "LevelErrors", "StructureAudit",
    "area_loss_study", "audit_structure", "error_e1", "error_e2", "error_e3",
    "order", "resolve_tau", "run_convergence_study",
]
