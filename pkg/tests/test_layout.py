import numba
import numpy as np
import pytest

from graphlayers import (
    LayoutParams,
    decompose,
    from_edges,
    layout,
    overview_coordinates,
)
from oracles import erdos_renyi


def test_params_validation():
    with pytest.raises(ValueError):
        LayoutParams(iterations=0)
    with pytest.raises(ValueError):
        LayoutParams(theta=1.5)
    with pytest.raises(ValueError):
        LayoutParams(cooling=0.0)


def test_empty_input_rejected():
    g = from_edges([], n=0)
    with pytest.raises(ValueError):
        layout(g)


def test_single_edge_equilibrium():
    g = from_edges([(0, 1)])
    params = LayoutParams(seed=7)
    r = layout(g, params)
    dist = float(np.linalg.norm(r.positions[0] - r.positions[1]))
    assert abs(dist - params.natural_length) <= 0.1 * params.natural_length


def test_determinism_same_seed():
    g = from_edges([(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)])
    r1 = layout(g, LayoutParams(seed=42))
    r2 = layout(g, LayoutParams(seed=42))
    assert np.array_equal(r1.positions, r2.positions)
    r3 = layout(g, LayoutParams(seed=43))
    assert not np.array_equal(r1.positions, r3.positions)


def test_determinism_across_worker_counts():
    g = from_edges(erdos_renyi(60, 0.08, np.random.default_rng(1)), n=60)
    params = LayoutParams(iterations=60, seed=5)
    prev = numba.get_num_threads()
    try:
        numba.set_num_threads(1)
        r1 = layout(g, params)
        numba.set_num_threads(min(2, numba.config.NUMBA_NUM_THREADS))
        r2 = layout(g, params)
    finally:
        numba.set_num_threads(prev)
    assert np.array_equal(r1.positions, r2.positions)


def test_triangle_symmetry():
    g = from_edges([(0, 1), (1, 2), (2, 0)])
    r = layout(g, LayoutParams(seed=3))
    p = r.positions
    d = [np.linalg.norm(p[a] - p[b]) for a, b in [(0, 1), (1, 2), (2, 0)]]
    assert (max(d) - min(d)) / min(d) < 0.01


def test_finite_coordinates_on_corpus():
    rng = np.random.default_rng(9)
    for n, p in [(2, 1.0), (30, 0.1), (80, 0.05)]:
        g = from_edges(erdos_renyi(n, p, rng), n=n)
        r = layout(g, LayoutParams(iterations=80, seed=11))
        assert np.all(np.isfinite(r.positions))
    # coincident start: several isolated vertices plus a dense clump
    g = from_edges([(u, v) for u in range(6) for v in range(u + 1, 6)], n=9)
    r = layout(g, LayoutParams(iterations=50, seed=0))
    assert np.all(np.isfinite(r.positions))


def test_layer_layout_scope(k4_path_graph, k4_path_decomposition):
    lay = k4_path_decomposition.layer(1)
    r = layout(lay, LayoutParams(iterations=50, seed=2))
    assert r.scope == 1
    assert list(r.vertex_ids) == [3, 4, 5]
    assert r.positions.shape == (3, 2)
    with pytest.raises(KeyError):
        r.position_of(0)


def test_overview_clone_stacking(k4_path_graph, k4_path_decomposition):
    g = layout(k4_path_graph, LayoutParams(iterations=30, seed=1))
    coords = overview_coordinates(k4_path_decomposition, g, height_scale=10.0)
    by_value = {lay.value: lay for lay in coords.layers}
    assert by_value[3].z == 30.0 and by_value[1].z == 10.0
    # vertex 3 is cloned: same (x, y) in both layers
    i3 = list(by_value[3].vertex_ids).index(3)
    i1 = list(by_value[1].vertex_ids).index(3)
    assert np.array_equal(by_value[3].xy[i3], by_value[1].xy[i1])
    # multiset of z values for vertex 3 is {30, 10}
    zs = sorted(lay.z for lay in coords.layers if 3 in lay.vertex_ids)
    assert zs == [10.0, 30.0]


def test_overview_flat_when_height_zero(k4_path_graph, k4_path_decomposition):
    g = layout(k4_path_graph, LayoutParams(iterations=10, seed=1))
    coords = overview_coordinates(k4_path_decomposition, g, height_scale=0.0)
    assert all(lay.z == 0.0 for lay in coords.layers)


def test_overview_k5_z(k5_graph):
    d = decompose(k5_graph)
    g = layout(k5_graph, LayoutParams(iterations=10, seed=1))
    coords = overview_coordinates(d, g, height_scale=2.0)
    assert len(coords.layers) == 1
    assert coords.layers[0].z == 8.0


def test_overview_spread_scaling(k4_path_graph, k4_path_decomposition):
    g = layout(k4_path_graph, LayoutParams(iterations=10, seed=1))
    c1 = overview_coordinates(k4_path_decomposition, g, spread_scale=1.0)
    c2 = overview_coordinates(k4_path_decomposition, g, spread_scale=2.0)
    assert np.allclose(c2.layers[0].xy, 2.0 * c1.layers[0].xy)
