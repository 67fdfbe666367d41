"""Deterministic force-directed 2D layouts with Barnes-Hut repulsion.

Fruchterman-Reingold style forces: pairwise repulsion approximated
through a quadtree (opening test width/distance < theta), spring
attraction along edges, displacement capped by a geometrically cooling
temperature. Same inputs give bitwise-identical output regardless of
worker count: every vertex accumulates its own force from the shared
tree in a fixed traversal order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Union

import numpy as np
from numba import njit, prange

from .graph import Graph, _build_csr
from .peel import Decomposition, Layer

_MAX_DEPTH = 48


@dataclass(frozen=True)
class LayoutParams:
    iterations: int = 500
    theta: float = 0.5
    repulsion: float = 1.0
    spring: float = 1.0
    natural_length: float = 1.0
    cooling: float = 0.99
    seed: int = 0

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not (0.0 < self.theta <= 1.2):
            raise ValueError("theta must be in (0, 1.2]")
        if not (0.0 < self.cooling <= 1.0):
            raise ValueError("cooling must be in (0, 1]")


@dataclass(frozen=True)
class LayoutResult:
    """2D positions for vertex_ids[i] at positions[i]; scope is 'global'
    or the layer value the layout was computed for."""

    vertex_ids: np.ndarray
    positions: np.ndarray  # (k, 2) float64
    scope: Union[str, int]
    params: LayoutParams

    def position_of(self, v: int) -> np.ndarray:
        idx = int(np.searchsorted(self.vertex_ids, v))
        if idx >= self.vertex_ids.size or self.vertex_ids[idx] != v:
            raise KeyError(f"vertex {v} not in layout scope {self.scope}")
        return self.positions[idx]


@dataclass(frozen=True)
class OverviewLayer:
    value: int
    vertex_ids: np.ndarray
    xy: np.ndarray  # (k, 2), already spread-scaled
    z: float


@dataclass(frozen=True)
class OverviewCoordinates:
    layers: List[OverviewLayer]
    height_scale: float
    spread_scale: float


@njit(cache=True)
def _build_quadtree(pos):
    """Array-backed quadtree; returns (child, cx, cy, half, sx, sy, cnt, pt, n_nodes).

    pt >= 0: leaf holding that vertex; pt == -1: internal or empty;
    pt == -2: depth-capped bucket (aggregate only).
    """
    n = pos.shape[0]
    cap = 4 * n + 64
    child = np.full((cap, 4), -1, np.int64)
    cx = np.zeros(cap, np.float64)
    cy = np.zeros(cap, np.float64)
    half = np.zeros(cap, np.float64)
    sx = np.zeros(cap, np.float64)
    sy = np.zeros(cap, np.float64)
    cnt = np.zeros(cap, np.int64)
    pt = np.full(cap, -1, np.int64)
    is_leaf = np.zeros(cap, np.uint8)  # 1 leaf/empty-slot, 0 internal, 2 bucket

    minx = pos[0, 0]
    maxx = pos[0, 0]
    miny = pos[0, 1]
    maxy = pos[0, 1]
    for i in range(n):
        if pos[i, 0] < minx:
            minx = pos[i, 0]
        if pos[i, 0] > maxx:
            maxx = pos[i, 0]
        if pos[i, 1] < miny:
            miny = pos[i, 1]
        if pos[i, 1] > maxy:
            maxy = pos[i, 1]
    span = max(maxx - minx, maxy - miny)
    h0 = span * 0.5 + 1e-9
    cx[0] = (minx + maxx) * 0.5
    cy[0] = (miny + maxy) * 0.5
    half[0] = h0
    is_leaf[0] = 1
    n_nodes = 1

    for p in range(n):
        x = pos[p, 0]
        y = pos[p, 1]
        # grow arrays if a worst-case insertion could overflow
        if n_nodes + 2 * _MAX_DEPTH + 8 > cap:
            new_cap = cap * 2
            child2 = np.full((new_cap, 4), -1, np.int64)
            child2[:cap] = child
            child = child2
            cx = np.concatenate((cx, np.zeros(cap, np.float64)))
            cy = np.concatenate((cy, np.zeros(cap, np.float64)))
            half = np.concatenate((half, np.zeros(cap, np.float64)))
            sx = np.concatenate((sx, np.zeros(cap, np.float64)))
            sy = np.concatenate((sy, np.zeros(cap, np.float64)))
            cnt = np.concatenate((cnt, np.zeros(cap, np.int64)))
            pt = np.concatenate((pt, np.full(cap, -1, np.int64)))
            is_leaf = np.concatenate((is_leaf, np.zeros(cap, np.uint8)))
            cap = new_cap
        node = 0
        depth = 0
        while True:
            cnt[node] += 1
            sx[node] += x
            sy[node] += y
            if is_leaf[node] == 2:  # bucket: aggregate only
                break
            if is_leaf[node] == 1:
                if cnt[node] == 1:  # was empty
                    pt[node] = p
                    break
                if depth >= _MAX_DEPTH:
                    is_leaf[node] = 2
                    pt[node] = -2
                    break
                # split: push the resident point one level down
                q = pt[node]
                pt[node] = -1
                is_leaf[node] = 0
                qx = pos[q, 0]
                qy = pos[q, 1]
                qi = (1 if qx > cx[node] else 0) + (2 if qy > cy[node] else 0)
                h2 = half[node] * 0.5
                nn = n_nodes
                n_nodes += 1
                child[node, qi] = nn
                cx[nn] = cx[node] + (h2 if qx > cx[node] else -h2)
                cy[nn] = cy[node] + (h2 if qy > cy[node] else -h2)
                half[nn] = h2
                is_leaf[nn] = 1
                cnt[nn] = 1
                sx[nn] = qx
                sy[nn] = qy
                pt[nn] = q
            # internal: descend toward p's quadrant
            qi = (1 if x > cx[node] else 0) + (2 if y > cy[node] else 0)
            if child[node, qi] == -1:
                h2 = half[node] * 0.5
                nn = n_nodes
                n_nodes += 1
                child[node, qi] = nn
                cx[nn] = cx[node] + (h2 if x > cx[node] else -h2)
                cy[nn] = cy[node] + (h2 if y > cy[node] else -h2)
                half[nn] = h2
                is_leaf[nn] = 1
            node = child[node, qi]
            depth += 1
    return child, cx, cy, half, sx, sy, cnt, pt, is_leaf, n_nodes


@njit(cache=True, parallel=True)
def _layout_iterations(offsets, adjacency, pos, iterations, theta, c_rep, c_spring,
                       nat_len, cooling, t0):
    n = pos.shape[0]
    if n <= 1:
        return pos
    theta2 = theta * theta
    rep_k2 = c_rep * nat_len * nat_len
    eps2 = 1e-18
    new_pos = np.empty_like(pos)
    t = t0
    for _ in range(iterations):
        child, cx, cy, half, sx, sy, cnt, pt, is_leaf, _n_nodes = _build_quadtree(pos)
        for i in prange(n):
            xi = pos[i, 0]
            yi = pos[i, 1]
            fx = 0.0
            fy = 0.0
            # Barnes-Hut repulsion
            stack = np.empty(4 * (_MAX_DEPTH + 2), np.int64)
            top = 0
            stack[top] = 0
            top += 1
            while top > 0:
                top -= 1
                node = stack[top]
                c = cnt[node]
                if c == 0:
                    continue
                if is_leaf[node] == 1 and pt[node] == i:
                    continue
                comx = sx[node] / c
                comy = sy[node] / c
                dx = xi - comx
                dy = yi - comy
                d2 = dx * dx + dy * dy
                width = 2.0 * half[node]
                if is_leaf[node] != 0 or width * width < theta2 * d2:
                    if d2 > eps2:
                        f = rep_k2 * c / d2
                        fx += dx * f
                        fy += dy * f
                else:
                    for q in range(4):
                        ch = child[node, q]
                        if ch != -1:
                            stack[top] = ch
                            top += 1
            # spring attraction along incident edges
            for idx in range(offsets[i], offsets[i + 1]):
                u = adjacency[idx]
                dx = pos[u, 0] - xi
                dy = pos[u, 1] - yi
                d = math.sqrt(dx * dx + dy * dy)
                if d > 1e-9:
                    f = c_spring * d / nat_len
                    fx += dx * f
                    fy += dy * f
            mag = math.sqrt(fx * fx + fy * fy)
            if mag > t:
                scale = t / mag
                fx *= scale
                fy *= scale
            new_pos[i, 0] = xi + fx
            new_pos[i, 1] = yi + fy
        pos[:, :] = new_pos[:, :]
        t *= cooling
    return pos


def initial_positions(n: int, seed: int) -> np.ndarray:
    """Seeded placement on a disk of radius sqrt(n)."""
    rng = np.random.default_rng(seed)
    angle = rng.random(n) * (2.0 * math.pi)
    radius = np.sqrt(rng.random(n)) * math.sqrt(n)
    return np.column_stack((radius * np.cos(angle), radius * np.sin(angle)))


def _subgraph_csr(layer: Layer):
    verts = layer.vertices
    local = np.searchsorted(verts, layer.edges)
    offsets, adjacency, _ = _build_csr(verts.size, local)
    return verts, offsets, adjacency


def layout(g_or_layer: Union[Graph, Layer], params: LayoutParams = LayoutParams()) -> LayoutResult:
    """Force-directed layout of a whole graph or a single layer subgraph."""
    if isinstance(g_or_layer, Graph):
        g = g_or_layer
        if g.n == 0:
            raise ValueError("layout requires at least one vertex")
        vertex_ids = np.arange(g.n, dtype=np.int64)
        offsets, adjacency = g.offsets, g.adjacency
        scope: Union[str, int] = "global"
        n = g.n
    else:
        layer = g_or_layer
        if layer.vertices.size == 0:
            raise ValueError("layout requires at least one vertex")
        vertex_ids, offsets, adjacency = _subgraph_csr(layer)
        scope = layer.value
        n = vertex_ids.size
    pos = initial_positions(n, params.seed)
    t0 = max(0.1, 0.2 * math.sqrt(n)) * params.natural_length
    pos = _layout_iterations(
        offsets,
        adjacency.astype(np.int64),
        pos,
        params.iterations,
        params.theta,
        params.repulsion,
        params.spring,
        params.natural_length,
        params.cooling,
        t0,
    )
    return LayoutResult(vertex_ids=vertex_ids, positions=pos, scope=scope, params=params)


def overview_coordinates(
    d: Decomposition,
    global_layout: LayoutResult,
    height_scale: float = 1.0,
    spread_scale: float = 1.0,
) -> OverviewCoordinates:
    """Stack the global 2D layout into 3D: z is the layer value times
    height_scale, so clones of a vertex share (x, y) and differ only in z."""
    if global_layout.vertex_ids.size < d.n:
        raise ValueError("global layout must cover all vertices")
    out: List[OverviewLayer] = []
    for layer in d.layers:
        idx = np.searchsorted(global_layout.vertex_ids, layer.vertices)
        xy = global_layout.positions[idx] * spread_scale
        out.append(
            OverviewLayer(
                value=layer.value,
                vertex_ids=layer.vertices,
                xy=xy,
                z=float(layer.value * height_scale),
            )
        )
    return OverviewCoordinates(layers=out, height_scale=height_scale, spread_scale=spread_scale)
