import math

import numpy as np
import pytest

from graphlayers import contour_polylines, default_bandwidth, kde_grid


def gaussian_peak(h):
    return 1.0 / (2.0 * math.pi * h * h)


def point_in_polygon(x, y, poly):
    """Ray casting; poly is a closed (k, 2) array."""
    inside = False
    for (x0, y0), (x1, y1) in zip(poly[:-1], poly[1:]):
        if (y0 > y) != (y1 > y):
            xc = x0 + (y - y0) / (y1 - y0) * (x1 - x0)
            if x < xc:
                inside = not inside
    return inside


def test_input_validation():
    with pytest.raises(ValueError):
        kde_grid(np.empty((0, 2)), 1.0)
    with pytest.raises(ValueError):
        kde_grid(np.array([[0.0, 0.0]]), -1.0)
    with pytest.raises(ValueError):
        kde_grid(np.array([[0.0, 0.0]]), 1.0, resolution=4)
    f = kde_grid(np.array([[0.0, 0.0]]), 1.0)
    with pytest.raises(ValueError):
        contour_polylines(f, 0)


def test_single_point_peak():
    h = 0.7
    f = kde_grid(np.array([[2.0, -1.0]]), h, resolution=256)
    peak = float(f.grid.max())
    assert abs(peak - gaussian_peak(h)) / gaussian_peak(h) < 0.02


def test_mirror_symmetry_exact():
    pts = np.array([[-1.5, 0.25], [1.5, 0.25]])
    f = kde_grid(pts, 0.5, resolution=64)
    assert np.array_equal(f.grid, f.grid[::-1, :])


def test_total_mass():
    pts = np.array([[0.0, 0.0], [1.0, 0.5], [-0.5, 0.25]])
    f = kde_grid(pts, 0.2, resolution=256)
    wx, wy = f.cell_size
    mass = float(f.grid.sum() * wx * wy)
    assert 0.95 <= mass <= 1.0


def test_matches_direct_summation_oracle():
    rng = np.random.default_rng(4)
    pts = rng.normal(size=(7, 2))
    h = 0.4
    res = 24
    f = kde_grid(pts, h, resolution=res)
    xs, ys = f.cell_centers()
    norm = 1.0 / (pts.shape[0] * 2.0 * math.pi * h * h)
    for i in range(res):
        for j in range(res):
            direct = sum(
                math.exp(-((xs[i] - px) ** 2 + (ys[j] - py) ** 2) / (2 * h * h))
                for px, py in pts
            ) * norm
            assert abs(f.grid[i, j] - direct) < 1e-9


def test_bounds_are_padded_bbox():
    pts = np.array([[0.0, 1.0], [4.0, 3.0]])
    f = kde_grid(pts, 0.5)
    assert f.bounds == (-1.5, -0.5, 5.5, 4.5)


def test_single_bump_contour_is_circle():
    h = 1.0
    f = kde_grid(np.array([[0.0, 0.0]]), h, resolution=256)
    cs = contour_polylines(f, 4)
    assert len(cs.levels) == 4
    assert cs.levels == sorted(cs.levels)
    wx, _ = f.cell_size
    for level, polys in zip(cs.levels, cs.polylines):
        assert len(polys) == 1
        poly = polys[0]
        assert np.array_equal(poly[0], poly[-1])  # closed
        r = np.hypot(poly[:, 0], poly[:, 1])
        r_star = h * math.sqrt(-2.0 * math.log(level / gaussian_peak(h)))
        assert np.abs(r - r_star).max() < 2 * wx


def test_levels_formula():
    f = kde_grid(np.array([[0.0, 0.0]]), 1.0, resolution=64)
    cs = contour_polylines(f, 3)
    peak = float(f.grid.max())
    assert cs.levels == [peak / 4, 2 * peak / 4, 3 * peak / 4]


def test_flat_zero_field():
    f = kde_grid(np.array([[0.0, 0.0]]), 1.0, resolution=16)
    flat = f.__class__(grid=np.zeros_like(f.grid), bounds=f.bounds,
                       bandwidth=f.bandwidth, n_points=f.n_points)
    cs = contour_polylines(flat, 1)
    assert cs.levels == [] and cs.polylines == []


def test_two_distant_bumps():
    h = 0.3
    f = kde_grid(np.array([[-5.0, 0.0], [5.0, 0.0]]), h, resolution=256)
    cs = contour_polylines(f, 2)
    high = cs.polylines[-1]
    assert len(high) == 2
    for poly in high:
        assert np.array_equal(poly[0], poly[-1])


def test_contours_separate_plane():
    h = 1.0
    f = kde_grid(np.array([[0.0, 0.0]]), h, resolution=128)
    cs = contour_polylines(f, 3)
    xs, ys = f.cell_centers()
    rng = np.random.default_rng(8)
    for level, polys in zip(cs.levels, cs.polylines):
        poly = polys[0]
        for _ in range(60):
            i = int(rng.integers(0, 128))
            j = int(rng.integers(0, 128))
            density = f.grid[i, j]
            if abs(density - level) < 1e-6:
                continue
            if density > level:
                assert point_in_polygon(xs[i], ys[j], poly)


def test_default_bandwidth_fraction():
    pts = np.array([[0.0, 0.0], [3.0, 4.0]])
    assert default_bandwidth(pts) == pytest.approx(0.25)
    assert default_bandwidth(np.array([[1.0, 1.0]])) == 1.0
