import numpy as np
import pytest

from graphlayers import (
    decompose,
    from_edges,
    layer_measures,
    measures_csv,
    ribbon_summary,
)
from oracles import erdos_renyi, oracle_clustering


def test_layer3_of_k4_path(k4_path_graph, k4_path_decomposition):
    m = layer_measures(k4_path_decomposition, k4_path_graph, 3)
    assert m.vertex_count == 4
    assert m.edge_count == 6
    assert m.clone_count == 1
    assert m.component_count == 1
    assert m.clustering == 1.0
    assert m.clique_deficit == 0
    assert m.largest_component == (4, 6)


def test_k4_minus_edge_clustering():
    g = from_edges([(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)])  # K4 minus (2,3)
    d = decompose(g)
    m = layer_measures(d, g, d.k_max)
    assert m.clustering == pytest.approx((2 / 3 + 2 / 3 + 1 + 1) / 4, abs=1e-15)
    assert m.clique_deficit == 1


def test_path_layer_clustering_zero():
    g = from_edges([(0, 1), (1, 2)])
    d = decompose(g)
    m = layer_measures(d, g, 1)
    assert m.clustering == 0.0
    assert m.transitivity == 0.0


def test_unknown_layer_value(k4_path_graph, k4_path_decomposition):
    with pytest.raises(KeyError):
        layer_measures(k4_path_decomposition, k4_path_graph, 7)


def test_k5_ribbon(k5_graph):
    d = decompose(k5_graph)
    s = ribbon_summary(d, k5_graph)
    assert s.L == 1 and s.k_max == 4
    row = s.rows[0]
    assert (row.value, row.vertex_count, row.edge_count) == (4, 5, 10)
    assert row.clone_count == 0
    assert row.component_count == 1
    assert row.clustering == 1.0
    assert row.clique_deficit == 0


def test_ribbon_edge_counts_sum_to_m():
    rng = np.random.default_rng(31)
    g = from_edges(erdos_renyi(80, 0.08, rng), n=80)
    d = decompose(g)
    s = ribbon_summary(d, g)
    assert sum(r.edge_count for r in s.rows) == g.m
    assert [r.value for r in s.rows] == sorted((r.value for r in s.rows), reverse=True)


def test_clustering_vs_bruteforce_sweep():
    rng = np.random.default_rng(13)
    for _ in range(6):
        n = int(rng.integers(20, 120))
        edges = erdos_renyi(n, float(rng.uniform(0.05, 0.25)), rng)
        g = from_edges(edges, n=n)
        d = decompose(g)
        for layer in d.layers:
            m = layer_measures(d, g, layer.value)
            # oracle works on the layer subgraph in local ids
            verts = layer.vertices
            local = {int(v): i for i, v in enumerate(verts)}
            sub = [(local[int(u)], local[int(v)]) for u, v in layer.edges]
            expected = oracle_clustering(len(verts), sub)
            assert abs(m.clustering - expected) < 1e-12


def test_deficit_present_iff_single_component():
    g = from_edges([(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])
    d = decompose(g)
    m = layer_measures(d, g, 2)
    assert m.component_count == 2
    assert m.clique_deficit is None
    assert m.largest_component[0] == 3


def test_clone_count_matches_multiplicity(k4_path_graph, k4_path_decomposition):
    d = k4_path_decomposition
    for layer in d.layers:
        m = layer_measures(d, k4_path_graph, layer.value)
        expected = sum(1 for v in layer.vertices if d.multiplicity(int(v)) >= 2)
        assert m.clone_count == expected


def test_csv_format(k4_path_graph, k4_path_decomposition):
    s = ribbon_summary(k4_path_decomposition, k4_path_graph)
    text = measures_csv(s)
    lines = text.strip().split("\n")
    assert lines[0] == "layer,value,vertices,edges,clones,components,clustering,deficit"
    assert lines[1] == "0,3,4,6,1,1,1.0,0"
    assert lines[2] == "1,1,3,2,1,1,0.0,1"
