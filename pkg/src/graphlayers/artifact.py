"""On-disk decomposition artifacts.

Layout of an artifact directory:

    manifest.json       n, m, L, k_max, layer values, measure table
    edges.txt           canonical edge list "u v" in dense ids (u < v, sorted)
    ids.json            dense id -> original id table, optional labels
    edge_layers.bin     per-edge owning layer value, little-endian uint32,
                        in canonical edge order
    clones.json         dense id -> descending layer values (multiplicity >= 2)
    measures.csv        ribbon table
    positions.global.bin / positions.layer_<k>.bin
                        8-byte LE pair count, then float32 LE (x, y) pairs

Graph and decomposition are reconstructed from edges.txt + edge_layers.bin,
so serving never re-runs the peeling.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

import numpy as np

from .graph import Graph, from_edges
from .layout import LayoutParams, LayoutResult, layout
from .measures import RibbonSummary, measures_csv
from .peel import Decomposition, Layer, _build_clone_index

FORMAT = "graph-layers/1"


class ArtifactError(RuntimeError):
    pass


def build_manifest(d: Decomposition, summary: RibbonSummary) -> dict:
    return {
        "format": FORMAT,
        "n": summary.n,
        "m": summary.m,
        "L": d.L,
        "k_max": d.k_max,
        "layer_values": d.values,
        "measures": [r.to_dict() for r in summary.rows],
    }


def write_positions(path: Path, positions: np.ndarray) -> None:
    arr = np.asarray(positions, dtype="<f4")
    with open(path, "wb") as f:
        f.write(struct.pack("<Q", arr.shape[0]))
        f.write(arr.tobytes(order="C"))


def read_positions(path: Path) -> np.ndarray:
    with open(path, "rb") as f:
        (count,) = struct.unpack("<Q", f.read(8))
        data = np.frombuffer(f.read(count * 8), dtype="<f4")
    return data.reshape(count, 2)


def write_artifact(
    out_dir: str,
    g: Graph,
    d: Decomposition,
    summary: RibbonSummary,
    global_layout: Optional[LayoutResult] = None,
) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = build_manifest(d, summary)
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", "utf-8")
    with open(out / "edges.txt", "w", encoding="utf-8") as f:
        for u, v in g.edges:
            f.write(f"{u} {v}\n")
    ids_doc = {
        "external_ids": list(g.external_ids),
        "labels": list(g.labels) if g.labels is not None else None,
    }
    (out / "ids.json").write_text(json.dumps(ids_doc), "utf-8")
    d.edge_layer.astype("<u4").tofile(out / "edge_layers.bin")
    clones = {
        str(v): [int(k) for k in d.clone_values[d.clone_offsets[v]:d.clone_offsets[v + 1]]]
        for v in range(d.n)
        if d.clone_offsets[v + 1] - d.clone_offsets[v] >= 2
    }
    (out / "clones.json").write_text(json.dumps(clones), "utf-8")
    (out / "measures.csv").write_text(measures_csv(summary), "utf-8")
    if global_layout is not None:
        write_positions(out / "positions.global.bin", global_layout.positions)
    return out


def _read_edges(path: Path) -> np.ndarray:
    import pandas as pd

    try:
        frame = pd.read_csv(path, sep=" ", header=None, dtype=np.int64, engine="c")
        return frame.to_numpy()
    except Exception:
        pass
    edges = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            toks = line.split()
            if toks:
                edges.append((int(toks[0]), int(toks[1])))
    return np.asarray(edges, dtype=np.int64).reshape(-1, 2)


def _rebuild_decomposition(g: Graph, edge_layer: np.ndarray) -> Decomposition:
    values = np.unique(edge_layer)[::-1]
    layers: List[Layer] = []
    for k in values:
        eids = np.nonzero(edge_layer == k)[0]
        edges = g.edges[eids]
        layers.append(Layer(value=int(k), edges=edges, vertices=np.unique(edges)))
    clone_offsets, clone_values = _build_clone_index(g.n, layers)
    return Decomposition(
        layers=layers,
        edge_layer=edge_layer.astype(np.int32),
        clone_offsets=clone_offsets,
        clone_values=clone_values,
        n=g.n,
        m=g.m,
    )


@dataclass
class ArtifactBundle:
    """A loaded artifact directory plus lazily computed per-layer layouts."""

    path: Path
    graph: Graph
    decomposition: Decomposition
    manifest: dict

    @classmethod
    def load(cls, directory: str) -> "ArtifactBundle":
        path = Path(directory)
        manifest_path = path / "manifest.json"
        if not manifest_path.exists():
            raise ArtifactError(f"{directory}: not an artifact (missing manifest.json)")
        manifest = json.loads(manifest_path.read_text("utf-8"))
        ids_doc = json.loads((path / "ids.json").read_text("utf-8"))
        external = ids_doc["external_ids"]
        labels = ids_doc.get("labels")
        edges = _read_edges(path / "edges.txt")
        g = from_edges(
            edges,
            n=len(external),
            external_ids=external,
            labels=labels,
        )
        edge_layer = np.fromfile(path / "edge_layers.bin", dtype="<u4").astype(np.int32)
        if edge_layer.size != g.m:
            raise ArtifactError(
                f"{directory}: edge_layers.bin has {edge_layer.size} entries, expected {g.m}"
            )
        d = _rebuild_decomposition(g, edge_layer)
        bundle = cls(path=path, graph=g, decomposition=d, manifest=manifest)
        bundle._check_manifest()
        return bundle

    def _check_manifest(self) -> None:
        man = self.manifest
        got = {
            "n": self.graph.n,
            "m": self.graph.m,
            "L": self.decomposition.L,
            "k_max": self.decomposition.k_max,
        }
        for key, val in got.items():
            if man.get(key) != val:
                raise ArtifactError(
                    f"{self.path}: manifest {key}={man.get(key)} but artifact has {val}"
                )

    def measures_row(self, k: int) -> dict:
        for row in self.manifest["measures"]:
            if row["value"] == k:
                return row
        raise KeyError(f"no layer with value {k}")

    # positions -----------------------------------------------------------

    def global_positions(self, params: Optional[LayoutParams] = None) -> np.ndarray:
        """float32 (n, 2) global positions, computing and persisting if absent."""
        path = self.path / "positions.global.bin"
        if not path.exists():
            result = layout(self.graph, params or LayoutParams())
            write_positions(path, result.positions)
        arr = read_positions(path)
        if arr.shape[0] != self.graph.n:
            raise ArtifactError(f"{path}: {arr.shape[0]} positions for n={self.graph.n}")
        return arr

    def layer_positions(self, k: int, params: Optional[LayoutParams] = None) -> np.ndarray:
        """float32 positions for the value-k layer vertices (ascending dense id)."""
        lay = self.decomposition.layer(k)
        path = self.path / f"positions.layer_{k}.bin"
        if not path.exists():
            result = layout(lay, params or LayoutParams())
            write_positions(path, result.positions)
        arr = read_positions(path)
        if arr.shape[0] != lay.vertex_count:
            raise ArtifactError(f"{path}: {arr.shape[0]} positions for layer of {lay.vertex_count}")
        return arr
