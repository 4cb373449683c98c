import math

import numpy as np
import pytest

from apcsf import semidiscrete as sd
from apcsf.curves import (
    circle, ellipse, interpolate, parametric_table, parse_curve, polygon_file,
    regular_polygon, regular_radial_rate, uniform_grid,
)
from apcsf.errors import ConfigError, InvalidN
from apcsf.geometry import TWO_PI, shoelace_area, write_polygon


def test_ellipse_nodal_values():
    X = interpolate(ellipse(2, 1), uniform_grid(64)).vertices
    assert X.shape == (64, 2)
    assert np.array_equal(X[0], [2.0, 0.0])
    xi = TWO_PI * np.arange(64) / 64
    assert np.allclose(X, np.stack([2 * np.cos(xi), np.sin(xi)], axis=1), atol=1e-15)
    assert shoelace_area(X) > 0


def test_ellipse_interpolant_area_converges():
    # area of the inscribed polygon: (N/2) a b sin(2 pi / N)
    for N in (16, 64):
        A = shoelace_area(interpolate(ellipse(2, 1), uniform_grid(N)))
        assert A == pytest.approx(0.5 * N * 2 * math.sin(TWO_PI / N), rel=1e-13)


def test_circle_gives_regular_polygon():
    X = interpolate(circle(1.5), uniform_grid(12)).vertices
    assert np.allclose(X, regular_polygon(12, 1.5).vertices, atol=1e-15)


def test_unit_period_matches_two_pi_period():
    a = interpolate(ellipse(2, 1), uniform_grid(32)).vertices
    b = interpolate(ellipse(2, 1, period=1.0), uniform_grid(32, period=1.0)).vertices
    assert np.allclose(a, b, atol=1e-15)


def test_uniform_grid_rejects_small_n():
    for N in (0, 2, 3.5):
        with pytest.raises(InvalidN):
            uniform_grid(N)


def test_table_reproduces_rows_exactly():
    pts = np.array([[0.1, 0.0], [1.0, 0.3], [0.7, 1.1], [-0.2, 0.8]])
    xi = TWO_PI * np.arange(4) / 4
    c = parametric_table(xi, pts)
    assert np.array_equal(interpolate(c, uniform_grid(4)).vertices, pts)
    # midpoints on the doubled grid are chord midpoints, including the wrap-around edge
    X8 = interpolate(c, uniform_grid(8)).vertices
    assert np.allclose(X8[1::2], 0.5 * (pts + np.roll(pts, -1, axis=0)))


def test_table_validation():
    with pytest.raises(ValueError):
        parametric_table([0.0, 2.0, 1.0], np.zeros((3, 2)))
    with pytest.raises(ValueError):
        parametric_table([0.0, 1.0], np.zeros((3, 2)))


def test_polygon_file(tmp_path):
    P = regular_polygon(6)
    path = tmp_path / "hex.txt"
    write_polygon(path, P)
    c = polygon_file(path)
    assert np.array_equal(interpolate(c, uniform_grid(6)).vertices, P.vertices)


def test_parse_curve():
    assert parse_curve("ellipse:2,1") == ellipse(2, 1)
    assert parse_curve("circle:3") == circle(3)
    for bad in ("ellipse:2", "ellipse:-1,1", "circle:0", "spiral:1", "file:"):
        with pytest.raises(ConfigError):
            parse_curve(bad)
    with pytest.raises(OSError):
        parse_curve("file:/nonexistent/polygon.txt")


def test_regular_radial_rate_matches_rhs():
    for N in (3, 4, 7, 32):
        for r in (0.5, 1.0, 3.0):
            X = regular_polygon(N, r).vertices
            V = sd.velocity(X)
            inward = -np.sum(V * X, axis=1) / r
            assert np.allclose(inward, regular_radial_rate(N, r), rtol=1e-12, atol=1e-15)


def test_regular_square_rate():
    assert regular_radial_rate(4) == pytest.approx(1 - math.pi / 4, abs=1e-15)
