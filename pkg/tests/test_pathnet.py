import numpy as np
import pytest

from graphlayers import (
    NoPathError,
    VertexNotInLayerError,
    build_net,
    decompose,
    expand_net,
    from_edges,
    shortest_path,
)
from graphlayers.pathnet import new_net
from oracles import erdos_renyi, oracle_bfs_distances


def single_layer(edges, n=None):
    g = from_edges(edges, n=n)
    d = decompose(g)
    assert d.L == 1
    return d.layers[0]


def c6_layer():
    return single_layer([(i, (i + 1) % 6) for i in range(6)])


def test_c6_tie_break():
    lay = c6_layer()
    assert shortest_path(lay, 0, 3) == [0, 1, 2, 3]


def test_path_to_self():
    lay = c6_layer()
    assert shortest_path(lay, 4, 4) == [4]


def test_vertex_not_in_layer():
    lay = c6_layer()
    with pytest.raises(VertexNotInLayerError):
        shortest_path(lay, 0, 11)


def test_disconnected_components_no_path():
    lay = single_layer([(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])
    with pytest.raises(NoPathError) as err:
        shortest_path(lay, 0, 4)
    assert err.value.vertex == 4


def test_expand_on_c6():
    lay = c6_layer()
    net = new_net(lay, shortest_path(lay, 0, 3))
    net2 = expand_net(net, lay, 5)
    assert net2.vertices == (0, 1, 2, 3, 5)
    assert net2.edges == ((0, 1), (1, 2), (2, 3), (0, 5))
    assert net2.anchors == (0, 3, 5)


def test_expand_noop_when_already_in_net():
    lay = c6_layer()
    net = new_net(lay, shortest_path(lay, 0, 3))
    assert expand_net(net, lay, 2) is net


def test_expand_star():
    # star K1,4: center 0, leaves 1..4; net {1}; expanding 2 goes through 0
    lay = single_layer([(0, 1), (0, 2), (0, 3), (0, 4)])
    net = new_net(lay, [1])
    net2 = expand_net(net, lay, 2)
    assert net2.vertices == (1, 2, 0)
    assert set(net2.edges) == {(0, 2), (0, 1)}


def test_expand_hop_cap():
    lay = c6_layer()
    net = new_net(lay, [0])
    with pytest.raises(NoPathError):
        expand_net(net, lay, 3, hop_cap=2)
    net2 = expand_net(net, lay, 3, hop_cap=3)
    assert set(net2.vertices) == {0, 1, 2, 3}


def test_build_net_anchor_pair_same():
    lay = c6_layer()
    net = build_net(lay, [4, 4])
    assert net.vertices == (4,)
    assert net.edges == ()


def test_build_net_requires_two_anchors():
    lay = c6_layer()
    with pytest.raises(ValueError):
        build_net(lay, [0])


def layer_adjacency_dict(layer):
    adj = {int(v): [] for v in layer.vertices}
    for u, v in layer.edges:
        adj[int(u)].append(int(v))
        adj[int(v)].append(int(u))
    for k in adj:
        adj[k].sort()
    return adj


def test_shortest_path_length_vs_oracle_sweep():
    rng = np.random.default_rng(77)
    for _ in range(10):
        n = int(rng.integers(8, 60))
        g = from_edges(erdos_renyi(n, 0.15, rng), n=n)
        d = decompose(g)
        for lay in d.layers:
            adj = layer_adjacency_dict(lay)
            verts = [int(v) for v in lay.vertices]
            src = verts[int(rng.integers(0, len(verts)))]
            dist = oracle_bfs_distances(adj, src)
            for dst in verts[: min(len(verts), 12)]:
                if dst in dist:
                    path = shortest_path(lay, src, dst)
                    assert len(path) - 1 == dist[dst]
                    for a, b in zip(path, path[1:]):
                        assert b in adj[a]
                else:
                    with pytest.raises(NoPathError):
                        shortest_path(lay, src, dst)


def test_expand_net_length_is_min_distance_to_net():
    rng = np.random.default_rng(123)
    for _ in range(8):
        n = int(rng.integers(10, 50))
        g = from_edges(erdos_renyi(n, 0.2, rng), n=n)
        d = decompose(g)
        lay = d.layers[0]
        verts = [int(v) for v in lay.vertices]
        if len(verts) < 3:
            continue
        adj = layer_adjacency_dict(lay)
        a, b, w = verts[0], verts[1], verts[-1]
        dist_ab = oracle_bfs_distances(adj, a)
        if b not in dist_ab:
            continue
        net = build_net(lay, [a, b])
        if w in net.vertices:
            continue
        dist_w = oracle_bfs_distances(adj, w)
        reachable = [t for t in net.vertices if t in dist_w]
        before = len(net.vertices)
        if not reachable:
            with pytest.raises(NoPathError):
                expand_net(net, lay, w)
            continue
        expected = min(dist_w[t] for t in reachable)
        net2 = expand_net(net, lay, w)
        added = len(net2.vertices) - before
        assert added == expected  # path adds exactly dist(w, net) new vertices
        # net stays connected
        net_adj = {v: [] for v in net2.vertices}
        for u, v in net2.edges:
            net_adj[u].append(v)
            net_adj[v].append(u)
        seen = oracle_bfs_distances(net_adj, net2.vertices[0])
        assert set(seen) == set(net2.vertices)


def test_deterministic_tie_breaking_repeated():
    lay = c6_layer()
    paths = {tuple(shortest_path(lay, 0, 3)) for _ in range(10)}
    assert paths == {(0, 1, 2, 3)}
