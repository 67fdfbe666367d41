"""Per-layer structural measures and the ribbon summary table.

Clustering is the average local (Watts-Strogatz) coefficient over the
layer's vertices; global transitivity is computed alongside. Sums of the
per-vertex coefficients use math.fsum so the result does not depend on
vertex enumeration order (artifact round-trips relabel dense ids).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from numba import njit

from .graph import Graph, _build_csr, connected_components
from .peel import Decomposition, Layer


@dataclass(frozen=True)
class LayerMeasures:
    value: int
    vertex_count: int
    edge_count: int
    clone_count: int
    component_count: int
    clustering: float
    transitivity: float
    largest_component: Tuple[int, int]  # (vertices, edges)
    clique_deficit: Optional[int]  # present iff component_count == 1

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "vertex_count": self.vertex_count,
            "edge_count": self.edge_count,
            "clone_count": self.clone_count,
            "component_count": self.component_count,
            "clustering": self.clustering,
            "transitivity": self.transitivity,
            "largest_component": list(self.largest_component),
            "clique_deficit": self.clique_deficit,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LayerMeasures":
        return cls(
            value=d["value"],
            vertex_count=d["vertex_count"],
            edge_count=d["edge_count"],
            clone_count=d["clone_count"],
            component_count=d["component_count"],
            clustering=d["clustering"],
            transitivity=d["transitivity"],
            largest_component=tuple(d["largest_component"]),
            clique_deficit=d["clique_deficit"],
        )


@dataclass(frozen=True)
class RibbonSummary:
    rows: List[LayerMeasures]  # ordered by decreasing layer value
    n: int
    m: int

    @property
    def L(self) -> int:
        return len(self.rows)

    @property
    def k_max(self) -> int:
        return self.rows[0].value if self.rows else 0


@njit(cache=True)
def _triangle_counts(offsets, adjacency):
    """tri[v] = number of triangles through v, by sorted-list edge intersection."""
    n = offsets.size - 1
    tri = np.zeros(n, np.int64)
    for v in range(n):
        for idx in range(offsets[v], offsets[v + 1]):
            u = adjacency[idx]
            if u <= v:
                continue
            i = offsets[v]
            j = offsets[u]
            vi_end = offsets[v + 1]
            uj_end = offsets[u + 1]
            while i < vi_end and j < uj_end:
                a = adjacency[i]
                b = adjacency[j]
                if a < b:
                    i += 1
                elif b < a:
                    j += 1
                else:
                    tri[a] += 1
                    i += 1
                    j += 1
    return tri


def clustering_coefficients(offsets: np.ndarray, adjacency: np.ndarray):
    """(average local clustering, transitivity) of a CSR subgraph."""
    n = offsets.size - 1
    if n == 0:
        return 0.0, 0.0
    tri = _triangle_counts(offsets, adjacency)
    deg = np.diff(offsets)
    coefs = []
    wedges = 0
    for v in range(n):
        d = int(deg[v])
        if d >= 2:
            pairs = d * (d - 1) // 2
            wedges += pairs
            coefs.append(tri[v] / pairs)
        else:
            coefs.append(0.0)
    avg = math.fsum(coefs) / n
    transitivity = float(int(tri.sum()) / wedges) if wedges > 0 else 0.0
    return avg, transitivity


def _layer_csr(layer: Layer):
    verts = layer.vertices
    local = np.searchsorted(verts, layer.edges)
    offsets, adjacency, _ = _build_csr(verts.size, local.astype(np.int64))
    return offsets, adjacency


def layer_measures(d: Decomposition, g: Graph, k: int) -> LayerMeasures:
    """All measures of the value-k layer, computed on the layer subgraph only."""
    layer = d.layer(k)  # raises KeyError for unknown k
    n_l = layer.vertex_count
    m_l = layer.edge_count
    offsets, adjacency = _layer_csr(layer)
    clustering, transitivity = clustering_coefficients(offsets, adjacency)
    comp = connected_components(g, edge_subset=layer.edges)
    clone_count = int(np.count_nonzero(d.multiplicities[layer.vertices] >= 2))
    largest_v = int(comp.sizes[0]) if comp.count else 0
    if comp.count:
        u_lab = comp.labels[layer.edges[:, 0]]
        largest_e = int(np.count_nonzero(u_lab == 0))
    else:
        largest_e = 0
    deficit = n_l * (n_l - 1) // 2 - m_l if comp.count == 1 else None
    return LayerMeasures(
        value=layer.value,
        vertex_count=n_l,
        edge_count=m_l,
        clone_count=clone_count,
        component_count=comp.count,
        clustering=clustering,
        transitivity=transitivity,
        largest_component=(largest_v, largest_e),
        clique_deficit=deficit,
    )


def ribbon_summary(d: Decomposition, g: Graph) -> RibbonSummary:
    """Measure rows for every layer, ordered by decreasing value."""
    rows = [layer_measures(d, g, layer.value) for layer in d.layers]
    return RibbonSummary(rows=rows, n=g.n, m=g.m)


CSV_HEADER = "layer,value,vertices,edges,clones,components,clustering,deficit"


def measures_csv(summary: RibbonSummary) -> str:
    """The ribbon table as CSV; floats keep full precision (repr)."""
    lines = [CSV_HEADER]
    for i, r in enumerate(summary.rows):
        deficit = "" if r.clique_deficit is None else str(r.clique_deficit)
        lines.append(
            f"{i},{r.value},{r.vertex_count},{r.edge_count},{r.clone_count},"
            f"{r.component_count},{r.clustering!r},{deficit}"
        )
    return "\n".join(lines) + "\n"
