import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from apcsf import semidiscrete as sd
from apcsf.checks import random_curve, random_star_polygon
from apcsf.curves import uniform_grid
from apcsf.geometry import TWO_PI, Grid, edge_lengths, perp
from apcsf.weakform import PiecewiseLinear, assemble_residual, h1_seminorm_pl, l2_norm_pl, union_nodes

seeds = st.integers(0, 2**32 - 1)


def _random_grid(rng, N, period=TWO_PI):
    w = rng.uniform(0.5, 1.5, N)
    nodes = np.concatenate([[0.0], np.cumsum(w) / w.sum() * period])
    nodes[-1] = period
    return Grid(nodes, period)


def _quadrature_residual(X, V, grid):
    """Brute-force Gauss quadrature of each weak-form term against every hat function."""
    N = len(X)
    gx, gw = np.polynomial.legendre.leggauss(6)
    q = edge_lengths(X)
    L = q.sum()
    out = np.zeros((N, 2))
    for j in range(N):  # element [xi_{j-1}, xi_j]
        a, h = grid.nodes[j - 1] if j else grid.nodes[N] - grid.h[0], grid.h[j]
        Xl, Xr = X[j - 1], X[j]
        Vl, Vr = V[j - 1], V[j]
        dX = (Xr - Xl) / h
        dV = (Vr - Vl) / h
        for s, w in zip(0.5 * (gx + 1), 0.5 * h * gw):
            Vs = (1 - s) * Vl + s * Vr
            for node, phi, dphi in ((j - 1, 1 - s, -1 / h), (j, s, 1 / h)):
                val = (np.linalg.norm(dX) * Vs * phi
                       + dX / np.linalg.norm(dX) * dphi
                       + h * h * np.linalg.norm(dX) / 6 * dV * dphi
                       + (2 * math.pi / L) * perp(dX) * phi)
                out[node % N] += w * val
    return out


@pytest.mark.parametrize("N", [3, 7, 20])
def test_residual_matches_quadrature(N):
    rng = np.random.default_rng(N)
    X = random_curve(rng, N).vertices
    V = rng.normal(size=(N, 2))
    grid = _random_grid(rng, N)
    res = assemble_residual(X, V, grid)
    assert np.allclose(res.total, _quadrature_residual(X, V, grid), rtol=1e-12, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(4, 64))
def test_rhs_zeroes_the_residual(seed, N):
    rng = np.random.default_rng(seed)
    X = random_curve(rng, N)
    assert assemble_residual(X, sd.rhs(X), uniform_grid(N)).relative() <= 1e-12


def test_residual_independent_of_grid():
    # the scheme does not depend on the parameter partition
    rng = np.random.default_rng(1)
    X = random_star_polygon(rng, 15).vertices
    V = sd.velocity(X)
    assert assemble_residual(X, V, _random_grid(rng, 15)).relative() <= 1e-12
    assert assemble_residual(X, V, uniform_grid(15, period=1.0)).relative() <= 1e-12


def test_random_velocity_does_not_zero_the_residual():
    rng = np.random.default_rng(2)
    X = random_curve(rng, 12)
    assert assemble_residual(X, rng.normal(size=(12, 2)), uniform_grid(12)).relative() > 1e-3


def test_mass_plus_lumping_is_lumped_mass():
    rng = np.random.default_rng(3)
    X = random_curve(rng, 10).vertices
    V = rng.normal(size=(10, 2))
    r = assemble_residual(X, V, _random_grid(rng, 10))
    q = edge_lengths(X)
    lumped = 0.5 * (q + np.roll(q, -1))[:, None] * V
    assert np.allclose(r.mass + r.lumping, lumped, rtol=1e-13, atol=1e-14)


def test_residual_is_linear_in_test_scaling():
    rng = np.random.default_rng(4)
    X = random_curve(rng, 9)
    V = rng.normal(size=(9, 2))
    g = uniform_grid(9)
    a = assemble_residual(X, V, g)
    b = assemble_residual(X, V, g, lam=-2.5)
    for name in ("mass", "stiffness", "lumping", "perimeter"):
        assert np.allclose(getattr(b, name), -2.5 * getattr(a, name), rtol=1e-15)


def test_curve_shortening_variant():
    X = random_star_polygon(np.random.default_rng(5), 14)
    r = assemble_residual(X, sd.rhs(X, area_preserving=False), uniform_grid(14), area_preserving=False)
    assert r.relative() <= 1e-12 and np.all(r.perimeter == 0)


def test_shape_mismatch():
    X = random_curve(np.random.default_rng(0), 8)
    with pytest.raises(ValueError):
        assemble_residual(X, np.zeros((8, 2)), uniform_grid(9))


# --- piecewise-linear norms -------------------------------------------------------

def _quad_norms(f, g):
    nodes = union_nodes(f.nodes, g.nodes)
    d = lambda x: np.interp(x, f.nodes, f.closed_values()[:, 0]) - np.interp(x, g.nodes, g.closed_values()[:, 0])  # noqa: E731
    l2 = sum(integrate.quad(lambda x: d(x) ** 2, a, b, epsabs=0, epsrel=1e-13)[0]
             for a, b in zip(nodes[:-1], nodes[1:]))
    eps = 1e-9
    h1 = sum((b - a) * ((d(b - eps * (b - a)) - d(a + eps * (b - a))) / ((1 - 2 * eps) * (b - a))) ** 2
             for a, b in zip(nodes[:-1], nodes[1:]))
    return math.sqrt(l2), math.sqrt(h1)


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(3, 30))
def test_norms_match_quadrature(seed, N):
    rng = np.random.default_rng(seed)
    f = PiecewiseLinear.on_grid(_random_grid(rng, N), rng.normal(size=N))
    g = PiecewiseLinear.on_grid(uniform_grid(2 * N), rng.normal(size=2 * N))
    l2, h1 = _quad_norms(f, g)
    assert l2_norm_pl(f, g) == pytest.approx(l2, rel=1e-10)
    assert h1_seminorm_pl(f, g) == pytest.approx(h1, rel=1e-6)


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(3, 20))
def test_norm_symmetry_and_identity(seed, N):
    rng = np.random.default_rng(seed)
    f = PiecewiseLinear.on_grid(uniform_grid(N), rng.normal(size=(N, 2)))
    g = PiecewiseLinear.on_grid(uniform_grid(2 * N), rng.normal(size=(2 * N, 2)))
    assert l2_norm_pl(f, g) == pytest.approx(l2_norm_pl(g, f), rel=1e-14)
    assert h1_seminorm_pl(f, g) == pytest.approx(h1_seminorm_pl(g, f), rel=1e-14)
    assert l2_norm_pl(f, f) == 0.0 and h1_seminorm_pl(f, f) == 0.0


def test_refined_interpolant_has_zero_distance():
    # a P1 function and its exact representation on the doubled grid coincide
    rng = np.random.default_rng(7)
    vals = rng.normal(size=(8, 2))
    f = PiecewiseLinear.on_grid(uniform_grid(8), vals)
    g = PiecewiseLinear.on_grid(uniform_grid(16), f(uniform_grid(16).vertex_params))
    assert l2_norm_pl(f, g) < 1e-14 and h1_seminorm_pl(f, g) < 1e-13


def test_constant_norm():
    f = PiecewiseLinear.on_grid(uniform_grid(5), np.full(5, 3.0))
    g = PiecewiseLinear.on_grid(uniform_grid(10), np.zeros(10))
    assert l2_norm_pl(f, g) == pytest.approx(3.0 * math.sqrt(TWO_PI), rel=1e-14)
    assert h1_seminorm_pl(f, g) == 0.0


def test_different_domains_rejected():
    f = PiecewiseLinear.on_grid(uniform_grid(5), np.zeros(5))
    g = PiecewiseLinear.on_grid(uniform_grid(5, period=1.0), np.zeros(5))
    with pytest.raises(ValueError):
        l2_norm_pl(f, g)


def test_union_nodes_merges_duplicates():
    a = np.linspace(0, 1, 5)
    b = np.linspace(0, 1, 9)
    assert np.array_equal(union_nodes(a, b), b)
