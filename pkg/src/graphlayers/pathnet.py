"""Shortest paths and incrementally grown path-nets inside one layer.

All searches are breadth-first with ascending-id expansion, so paths are
minimum-hop and tie-breaking is deterministic: each vertex keeps the
first predecessor that reached it.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from .peel import Layer


class VertexNotInLayerError(KeyError):
    def __init__(self, v: int, value: int):
        super().__init__(f"vertex {v} is not in layer {value}")
        self.vertex = v


class NoPathError(ValueError):
    def __init__(self, v: int, value: int, hop_cap: Optional[int] = None):
        detail = f" within {hop_cap} hops" if hop_cap is not None else ""
        super().__init__(f"no path reaches vertex {v} in layer {value}{detail}")
        self.vertex = v


@dataclass(frozen=True)
class PathNet:
    """Connected union of shortest paths grown anchor by anchor."""

    value: int
    vertices: Tuple[int, ...]        # insertion order, no duplicates
    edges: Tuple[Tuple[int, int], ...]  # (min, max) pairs, insertion order
    anchors: Tuple[int, ...]


def layer_adjacency(layer: Layer) -> Dict[int, List[int]]:
    """Sorted adjacency lists of the layer subgraph keyed by dense id."""
    adj: Dict[int, List[int]] = {int(v): [] for v in layer.vertices}
    for u, v in layer.edges:
        adj[int(u)].append(int(v))
        adj[int(v)].append(int(u))
    for lst in adj.values():
        lst.sort()
    return adj


def _check_member(layer: Layer, v: int) -> None:
    idx = np.searchsorted(layer.vertices, v)
    if idx >= layer.vertices.size or layer.vertices[idx] != v:
        raise VertexNotInLayerError(v, layer.value)


def _bfs_to_targets(
    adj: Dict[int, List[int]],
    start: int,
    targets: set,
    hop_cap: Optional[int] = None,
) -> List[int]:
    """Path from start to the first target vertex reached, BFS order.

    Neighbors expand in ascending id order; a vertex's predecessor is the
    first one to discover it, which makes the returned path unique.
    """
    parent: Dict[int, int] = {start: start}
    depth: Dict[int, int] = {start: 0}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        if hop_cap is not None and depth[x] >= hop_cap:
            continue
        for nb in adj[x]:
            if nb in targets:
                path = [nb, x]
                while parent[x] != x:
                    x = parent[x]
                    path.append(x)
                path.reverse()
                return path
            if nb not in parent:
                parent[nb] = x
                depth[nb] = depth[x] + 1
                queue.append(nb)
    raise NoPathError(start, -1, hop_cap)


def shortest_path(layer: Layer, u: int, v: int) -> List[int]:
    """Minimum-hop path from u to v in the layer subgraph."""
    _check_member(layer, u)
    _check_member(layer, v)
    if u == v:
        return [u]
    adj = layer_adjacency(layer)
    try:
        return _bfs_to_targets(adj, u, {v})
    except NoPathError:
        raise NoPathError(v, layer.value) from None


def new_net(layer: Layer, path: List[int]) -> PathNet:
    """Seed a net from a path (first two anchors)."""
    edges = tuple((min(a, b), max(a, b)) for a, b in zip(path, path[1:]))
    anchors = (path[0], path[-1]) if len(path) > 1 else (path[0], path[0])
    return PathNet(value=layer.value, vertices=tuple(path), edges=edges, anchors=anchors)


def expand_net(net: PathNet, layer: Layer, w: int, hop_cap: Optional[int] = None) -> PathNet:
    """Attach w to the net along an exact minimum-hop path.

    BFS from w halts at the first net vertex it reaches; the discovered
    path is merged in and w becomes the newest anchor. If w is already in
    the net this is a no-op.
    """
    _check_member(layer, w)
    if not net.vertices:
        raise ValueError("cannot expand an empty net")
    if w in net.vertices:
        return net
    adj = layer_adjacency(layer)
    try:
        path = _bfs_to_targets(adj, w, set(net.vertices), hop_cap)
    except NoPathError:
        raise NoPathError(w, layer.value, hop_cap) from None
    known = set(net.vertices)
    new_vertices = list(net.vertices) + [x for x in path if x not in known]
    known_edges = set(net.edges)
    appended = []
    for a, b in zip(path, path[1:]):
        e = (min(a, b), max(a, b))
        if e not in known_edges:
            known_edges.add(e)
            appended.append(e)
    return PathNet(
        value=net.value,
        vertices=tuple(new_vertices),
        edges=net.edges + tuple(appended),
        anchors=net.anchors + (w,),
    )


def build_net(layer: Layer, anchors: List[int], hop_cap: Optional[int] = None) -> PathNet:
    """shortest_path on the first two anchors, then expand_net for the rest."""
    if len(anchors) < 2:
        raise ValueError("a path-net needs at least two anchors")
    path = shortest_path(layer, anchors[0], anchors[1])
    net = new_net(layer, path)
    for w in anchors[2:]:
        net = expand_net(net, layer, w, hop_cap)
    return net
