"""Randomized property suites, runnable from the command line.

Each suite takes a ``numpy.random.Generator`` and returns a
:class:`SuiteResult`. Seeds are fixed by the caller so runs are reproducible.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import fullydiscrete as fd
from . import semidiscrete as sd
from .curves import ellipse, interpolate, regular_polygon, regular_radial_rate, uniform_grid
from .geometry import TWO_PI, PolygonCurve, extended_fan_area_matrix, triangle_fan_areas
from .weakform import assemble_residual

DEFAULT_SEED = 20240601


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    detail: str

    def __post_init__(self):
        object.__setattr__(self, "passed", bool(self.passed))


# ---------------------------------------------------------------------------
# random shapes
# ---------------------------------------------------------------------------

def random_convex_polygon(rng, N, jitter=0.35):
    """Jittered equiangular samples of a random ellipse, randomly rotated and shifted.

    Affine images of points on a circle in angular order are always convex.
    """
    theta = TWO_PI * (np.arange(N) + rng.uniform(-jitter, jitter, N)) / N
    P = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    a, b = rng.uniform(0.5, 2.0, 2)
    phi = rng.uniform(0, TWO_PI)
    c, s = math.cos(phi), math.sin(phi)
    M = np.array([[c, -s], [s, c]]) @ np.diag([a, b])
    return PolygonCurve(P @ M.T + rng.normal(size=2))


def random_star_polygon(rng, N, spread=0.6):
    """Star-shaped polygon with radii in ``[1 - spread, 1 + spread]``; usually nonconvex."""
    theta = TWO_PI * (np.arange(N) + rng.uniform(-0.3, 0.3, N)) / N
    r = rng.uniform(1 - spread, 1 + spread, N)
    return PolygonCurve(np.stack([r * np.cos(theta), r * np.sin(theta)], axis=1))


def random_curve(rng, N):
    """Nondegenerate random closed polygon (not necessarily simple)."""
    while True:
        X = rng.normal(size=(N, 2))
        q = np.hypot(*(X - np.roll(X, 1, axis=0)).T)
        if q.min() > 1e-2:
            return PolygonCurve(X, orient=False)


def random_cyclic_system(rng, N):
    """Block-diagonally dominant cyclic system with random 2x2 blocks."""
    L = rng.normal(size=(N, 2, 2))
    U = rng.normal(size=(N, 2, 2))
    D = rng.normal(size=(N, 2, 2)) * 0.5
    D += (np.abs(L).sum(axis=(1, 2)) + np.abs(U).sum(axis=(1, 2)) + 1.0)[:, None, None] * np.eye(2)
    return fd.CyclicBlockTridiagonalSystem(L, D, U, rng.normal(size=(N, 2)))


def central_difference(fn, X, delta, dt=None):
    """``(fn(X(t+delta)) - fn(X(t-delta))) / (2 delta)`` along the RK4 flow.

    Each side is reached by RK4 micro-steps of size at most ``dt``.
    """
    dt = delta if dt is None else dt
    n = max(1, math.ceil(delta / dt))
    fwd, bwd = np.array(X), np.array(X)
    for _ in range(n):
        fwd = sd._rk4(fwd, delta / n)
        bwd = _rk4_back(bwd, delta / n)
    return (fn(fwd) - fn(bwd)) / (2 * delta)


def _rk4_back(X, h):
    """RK4 step of the time-reversed flow (integrates backwards by ``h``)."""
    f = sd.velocity
    k1 = f(X)
    k2 = f(X - 0.5 * h * k1)
    k3 = f(X - 0.5 * h * k2)
    k4 = f(X - h * k3)
    return X - (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def chain_rule_fan_rate(X, V):
    """Product-rule derivative of every ``S_j`` given vertex velocities ``V``."""
    r = lambda a, k: np.roll(a, -k, axis=0)  # noqa: E731
    e_in = X - r(X, -1)
    e_out = r(X, 1) - X
    de_in = V - r(V, -1)
    de_out = r(V, 1) - V

    def half_dot_perp(a, b):  # a . perp(b) / 2
        return 0.5 * (a[:, 1] * b[:, 0] - a[:, 0] * b[:, 1])

    return half_dot_perp(de_out, e_in) + half_dot_perp(e_out, de_in)


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

def suite_trig_lemma(rng, samples=10_000, max_n=20):
    worst = math.inf
    boundary = 0.0
    for n in range(1, max_n + 1):
        B = rng.uniform(0, math.pi / 2, size=(samples, n))
        s = np.sin(B).sum(axis=1)
        vals = s**2 - 0.5 * B.sum(axis=1) * np.sin(2 * B).sum(axis=1)
        worst = min(worst, float(vals.min()))
        if n > 1:
            for row in B[:20]:
                a = sd.trig_inequality_f(np.append(row[:-1], 0.0))
                boundary = max(boundary, abs(a - sd.trig_inequality_f(row[:-1])))
    ok = worst >= -1e-12 and boundary == 0.0
    return SuiteResult("trig-lemma", ok, f"min f_N={worst:.3e}, boundary mismatch={boundary:.1e}")


def suite_lumped_weak(rng, trials=200):
    worst = 0.0
    for _ in range(trials):
        N = int(rng.integers(4, 65))
        X = random_curve(rng, N)
        res = assemble_residual(X, sd.rhs(X), uniform_grid(N))
        worst = max(worst, res.relative())
    return SuiteResult("lumped-weak-equivalence", worst <= 1e-12, f"max relative residual={worst:.2e}")


def suite_perimeter_monotone(rng, trials=20):
    worst = -math.inf
    for _ in range(trials):
        X = random_convex_polygon(rng, int(rng.integers(5, 40)))
        worst = max(worst, sd.perimeter_rate(X))
    X0 = interpolate(ellipse(2, 1), uniform_grid(32))
    L = fd.evolve_full(X0, 0.25, 0.25 / 13).perimeter
    jump = float(np.max(np.diff(L)))
    ok = worst <= 1e-12 and jump <= 1e-10 * L[0]
    return SuiteResult("perimeter-monotone", ok,
                       f"max dL/dt on random convex={worst:.2e}, max step increase={jump:.2e}")


def suite_convexity(rng, trials=100):
    mismatches = 0
    for _ in range(trials):
        P = random_convex_polygon(rng, int(rng.integers(3, 30)))
        S = triangle_fan_areas(P)
        Sk = extended_fan_area_matrix(P)
        if not (np.all(S > 0) and np.nanmin(Sk) > 0):
            mismatches += 1
        Q = random_star_polygon(rng, int(rng.integers(5, 30)))
        if (triangle_fan_areas(Q).min() > 0) != (np.nanmin(extended_fan_area_matrix(Q)) > 0):
            mismatches += 1
    X0 = interpolate(ellipse(2, 1), uniform_grid(15))
    tau = 0.5 * (TWO_PI / 15) ** 2
    m = round(3.0 / tau)
    traj = fd.evolve_full(X0, 3.0, 3.0 / m)
    minS = float(traj.column("min_fan_area").min())
    ok = mismatches == 0 and minS > 0
    return SuiteResult("convexity", ok, f"characterization mismatches={mismatches}, N=15 run min S={minS:.3e}")


def suite_evolution_formulas(rng, trials=20):
    worst_fd, worst_chain, worst_forms = 0.0, 0.0, 0.0
    for _ in range(trials):
        X = random_convex_polygon(rng, int(rng.integers(5, 20))).vertices
        a, b = sd.edge_rate(X)
        worst_forms = max(worst_forms, np.abs(a - b).max() / np.abs(a).max())
        fd_q = central_difference(lambda Y: np.hypot(*(Y - np.roll(Y, 1, axis=0)).T), X, 1e-5)
        worst_fd = max(worst_fd, np.abs(fd_q - a).max() / np.abs(a).max())
        dS = sd.fan_area_rate(X)
        ch = chain_rule_fan_rate(X, sd.velocity(X))
        worst_chain = max(worst_chain, np.abs(dS - ch).max() / np.abs(ch).max())
    ok = worst_forms <= 1e-12 and worst_fd <= 1e-5 and worst_chain <= 1e-12
    return SuiteResult("evolution-formulas", ok,
                       f"forms={worst_forms:.1e} fd={worst_fd:.1e} chain={worst_chain:.1e}")


def suite_solver(rng, trials=100):
    worst_err, worst_res = 0.0, 0.0
    for _ in range(trials):
        s = random_cyclic_system(rng, int(rng.integers(4, 65)))
        x = fd.solve(s, "banded")
        xd = fd.solve(s, "dense")
        worst_err = max(worst_err, np.linalg.norm(x - xd) / np.linalg.norm(xd))
        worst_res = max(worst_res, s.residual(x))
    ok = worst_err <= 1e-10 and worst_res <= 1e-12
    return SuiteResult("solver-oracle", ok, f"max rel error={worst_err:.1e}, max residual={worst_res:.1e}")


def suite_regular_polygon(rng):
    V = sd.velocity(regular_polygon(4).vertices)
    err = abs(float(np.hypot(*V.T).max()) - (1 - math.pi / 4))
    rates = [float(np.hypot(*sd.velocity(regular_polygon(n).vertices).T).mean()) for n in (8, 16, 32, 64)]
    ratios = [a / b for a, b in zip(rates[:-1], rates[1:])]
    closed = max(abs(r - regular_radial_rate(n)) for r, n in zip(rates, (8, 16, 32, 64)))
    ok = err <= 1e-12 and all(abs(r - 4) <= 0.6 for r in ratios) and closed <= 1e-12
    return SuiteResult("regular-polygon", ok,
                       f"square error={err:.1e}, ratios={', '.join(f'{r:.3f}' for r in ratios)}")


SUITES = {
    "trig-lemma": suite_trig_lemma,
    "lumped-weak-equivalence": suite_lumped_weak,
    "perimeter-monotone": suite_perimeter_monotone,
    "convexity": suite_convexity,
    "evolution-formulas": suite_evolution_formulas,
    "solver-oracle": suite_solver,
    "regular-polygon": suite_regular_polygon,
}


def run_suites(names=None, seed=DEFAULT_SEED):
    """Run the named suites (all by default), each with its own seeded generator."""
    names = list(SUITES) if not names else names
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise KeyError(f"unknown suite(s): {', '.join(unknown)}")
    out = []
    for name in names:
        rng = np.random.default_rng([seed, list(SUITES).index(name)])
        out.append(SUITES[name](rng))
    return out
