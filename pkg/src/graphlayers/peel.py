"""Vertex peel values and the fixed-point edge decomposition.

The decomposition repeatedly extracts the maximum-coreness core of the
residual graph as one layer, so layer values strictly decrease and every
edge lands in exactly one layer. Residual state lives in a per-edge alive
mask plus an in-place degree array; the graph itself is never rebuilt.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List

import numpy as np
from numba import njit, prange

from .graph import Graph


@dataclass(frozen=True)
class PeelMap:
    """Per-vertex coreness (peel value)."""

    core: np.ndarray

    def __getitem__(self, v: int) -> int:
        return int(self.core[v])

    @property
    def degeneracy(self) -> int:
        return int(self.core.max()) if self.core.size else 0


@dataclass(frozen=True)
class Layer:
    """One fixed point of degree peeling: every vertex has internal degree
    >= value and the (value+1)-core of the layer subgraph is empty."""

    value: int
    edges: np.ndarray      # (k, 2) dense-id pairs, u < v, canonical order
    vertices: np.ndarray   # sorted dense ids incident to the edges

    @property
    def edge_count(self) -> int:
        return int(self.edges.shape[0])

    @property
    def vertex_count(self) -> int:
        return int(self.vertices.size)


@dataclass(frozen=True)
class Decomposition:
    """Ordered layers (strictly decreasing value) partitioning the edge set."""

    layers: List[Layer]
    edge_layer: np.ndarray      # per canonical edge, the owning layer value
    clone_offsets: np.ndarray   # CSR over vertices into clone_values
    clone_values: np.ndarray    # layer values per vertex, descending
    n: int
    m: int

    @property
    def L(self) -> int:
        return len(self.layers)

    @property
    def k_max(self) -> int:
        return self.layers[0].value if self.layers else 0

    @property
    def values(self) -> List[int]:
        return [layer.value for layer in self.layers]

    def layer(self, value: int) -> Layer:
        for lay in self.layers:
            if lay.value == value:
                return lay
        raise KeyError(f"no layer with value {value}")

    def has_layer(self, value: int) -> bool:
        return any(lay.value == value for lay in self.layers)

    def multiplicity(self, v: int) -> int:
        return int(self.clone_offsets[v + 1] - self.clone_offsets[v])

    @property
    def multiplicities(self) -> np.ndarray:
        return np.diff(self.clone_offsets)

    @property
    def clone_map(self) -> Dict[int, List[int]]:
        """dense id -> descending layer values, for vertices in >=1 layer."""
        out: Dict[int, List[int]] = {}
        for v in range(self.n):
            s, e = self.clone_offsets[v], self.clone_offsets[v + 1]
            if e > s:
                out[v] = [int(x) for x in self.clone_values[s:e]]
        return out


@njit(cache=True)
def _bz_coreness(offsets, adjacency, edge_ids, edge_alive, deg):
    """Bucket-based min-degree peeling over the alive-edge subgraph."""
    n = deg.size
    core = np.zeros(n, np.int32)
    if n == 0:
        return core
    md = 0
    for v in range(n):
        if deg[v] > md:
            md = deg[v]
    bin_start = np.zeros(md + 2, np.int64)
    for v in range(n):
        bin_start[deg[v] + 1] += 1
    for d in range(1, md + 2):
        bin_start[d] += bin_start[d - 1]
    pos = np.empty(n, np.int64)
    vert = np.empty(n, np.int64)
    fill = bin_start[: md + 1].copy()
    for v in range(n):
        d = deg[v]
        pos[v] = fill[d]
        vert[fill[d]] = v
        fill[d] += 1
    degc = deg.copy()
    for i in range(n):
        v = vert[i]
        core[v] = degc[v]
        for idx in range(offsets[v], offsets[v + 1]):
            if edge_alive[edge_ids[idx]] == 0:
                continue
            u = adjacency[idx]
            du = degc[u]
            if du > degc[v]:
                pu = pos[u]
                pw = bin_start[du]
                w = vert[pw]
                if u != w:
                    vert[pu] = w
                    pos[w] = pu
                    vert[pw] = u
                    pos[u] = pw
                bin_start[du] += 1
                degc[u] = du - 1
    return core


@njit(cache=True, parallel=True)
def _level_coreness(offsets, adjacency, edge_ids, edge_alive, deg0):
    """Level-synchronous peeling; candidate flagging runs across threads.

    Output is independent of thread count: flag writes are per-slot and
    all merging is serial, so this matches _bz_coreness exactly.
    """
    n = deg0.size
    core = np.zeros(n, np.int32)
    if n == 0:
        return core
    deg = deg0.copy()
    alive = np.ones(n, np.uint8)
    queued = np.zeros(n, np.uint8)
    flags = np.zeros(n, np.uint8)
    frontier = np.empty(n, np.int64)
    touched = np.empty(n, np.int64)
    cand = np.arange(n)
    ncand = n
    remaining = n
    k = 0
    while remaining > 0:
        for ci in prange(ncand):
            v = cand[ci]
            flags[ci] = 1 if (alive[v] == 1 and deg[v] <= k) else 0
        nf = 0
        for ci in range(ncand):
            if flags[ci] == 1:
                frontier[nf] = cand[ci]
                nf += 1
        if nf == 0:
            mink = 2147483647
            for v in range(n):
                if alive[v] == 1 and deg[v] < mink:
                    mink = deg[v]
            k = mink
            ncand = 0
            for v in range(n):
                if alive[v] == 1:
                    cand[ncand] = v
                    ncand += 1
            continue
        for fi in range(nf):
            v = frontier[fi]
            core[v] = k
            alive[v] = 0
        remaining -= nf
        nt = 0
        for fi in range(nf):
            v = frontier[fi]
            for idx in range(offsets[v], offsets[v + 1]):
                if edge_alive[edge_ids[idx]] == 0:
                    continue
                u = adjacency[idx]
                if alive[u] == 1:
                    deg[u] -= 1
                    if queued[u] == 0:
                        queued[u] = 1
                        touched[nt] = u
                        nt += 1
        for ti in range(nt):
            u = touched[ti]
            queued[u] = 0
            cand[ti] = u
        ncand = nt
    return core


@njit(cache=True)
def _extract_layer(offsets, adjacency, edge_ids, edge_alive, deg, core, k):
    """Remove and return (canonical ids of) all alive edges inside the k-core."""
    n = deg.size
    cnt = 0
    for v in range(n):
        if core[v] != k:
            continue
        for idx in range(offsets[v], offsets[v + 1]):
            u = adjacency[idx]
            if u > v and core[u] == k and edge_alive[edge_ids[idx]] == 1:
                cnt += 1
    out = np.empty(cnt, np.int64)
    w = 0
    for v in range(n):
        if core[v] != k:
            continue
        for idx in range(offsets[v], offsets[v + 1]):
            u = adjacency[idx]
            if u > v and core[u] == k and edge_alive[edge_ids[idx]] == 1:
                e = edge_ids[idx]
                out[w] = e
                w += 1
                edge_alive[e] = 0
                deg[v] -= 1
                deg[u] -= 1
    return out


class _ThreadCount:
    """Context manager pinning numba's worker count (clamped to the host)."""

    def __init__(self, workers: int):
        self.workers = workers
        self.prev = None

    def __enter__(self):
        import numba

        self.prev = numba.get_num_threads()
        numba.set_num_threads(max(1, min(self.workers, numba.config.NUMBA_NUM_THREADS)))

    def __exit__(self, *exc):
        import numba

        numba.set_num_threads(self.prev)
        return False


def _residual_coreness(g: Graph, edge_alive, deg, workers: int) -> np.ndarray:
    if workers > 1:
        with _ThreadCount(workers):
            return _level_coreness(g.offsets, g.adjacency, g.edge_ids, edge_alive, deg)
    return _bz_coreness(g.offsets, g.adjacency, g.edge_ids, edge_alive, deg)


def coreness(g: Graph) -> PeelMap:
    """Coreness of every vertex via bucket-based min-degree removal, O(n+m)."""
    edge_alive = np.ones(g.m, np.uint8)
    deg = np.diff(g.offsets).astype(np.int32)
    core = _bz_coreness(g.offsets, g.adjacency, g.edge_ids, edge_alive, deg)
    return PeelMap(core=core)


def coreness_parallel(g: Graph, workers: int) -> PeelMap:
    """Same map as coreness(g), computed level-synchronously with threads."""
    if workers < 1:
        raise ValueError("workers must be >= 1")
    edge_alive = np.ones(g.m, np.uint8)
    deg = np.diff(g.offsets).astype(np.int32)
    with _ThreadCount(workers):
        core = _level_coreness(g.offsets, g.adjacency, g.edge_ids, edge_alive, deg)
    return PeelMap(core=core)


def decompose(g: Graph, workers: int = 1) -> Decomposition:
    """Iterated max-core extraction until no edges remain.

    Each round: compute residual coreness, take k = max, peel off the
    k-core's edges as the next layer. Values strictly decrease, so the
    loop runs exactly L times.
    """
    edge_alive = np.ones(g.m, np.uint8)
    deg = np.diff(g.offsets).astype(np.int32)
    edge_layer = np.zeros(g.m, np.int32)
    layers: List[Layer] = []
    remaining = g.m
    while remaining > 0:
        core = _residual_coreness(g, edge_alive, deg, workers)
        k = int(core.max())
        eids = _extract_layer(
            g.offsets, g.adjacency, g.edge_ids, edge_alive, deg, core, k
        )
        edge_layer[eids] = k
        edges = g.edges[eids]
        vertices = np.unique(edges)
        layers.append(Layer(value=k, edges=edges, vertices=vertices))
        remaining -= eids.size
    clone_offsets, clone_values = _build_clone_index(g.n, layers)
    return Decomposition(
        layers=layers,
        edge_layer=edge_layer,
        clone_offsets=clone_offsets,
        clone_values=clone_values,
        n=g.n,
        m=g.m,
    )


def _build_clone_index(n: int, layers: List[Layer]):
    mult = np.zeros(n, np.int64)
    for layer in layers:
        mult[layer.vertices] += 1
    clone_offsets = np.zeros(n + 1, np.int64)
    np.cumsum(mult, out=clone_offsets[1:])
    clone_values = np.empty(int(clone_offsets[-1]), np.int32)
    fill = clone_offsets[:-1].copy()
    for layer in layers:  # descending values, so per-vertex lists sort descending
        slots = fill[layer.vertices]
        clone_values[slots] = layer.value
        fill[layer.vertices] = slots + 1
    return clone_offsets, clone_values


def clones_of(d: Decomposition, v: int) -> List[int]:
    """Layer values containing v, descending; [] for vertices with no edges."""
    if not (0 <= v < d.n):
        raise IndexError(f"vertex {v} out of range [0, {d.n})")
    s, e = d.clone_offsets[v], d.clone_offsets[v + 1]
    return [int(x) for x in d.clone_values[s:e]]
