"""HTTP/JSON exploration service over decomposition artifacts.

All heavy computation happens offline; the service reads artifacts and
computes only cheap on-demand products (per-layer layouts, contours,
path-nets), caching them beside the artifact. Cache fills are
single-flight: concurrent identical requests share one computation.
"""

from __future__ import annotations

import json
import threading
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from .artifact import ArtifactBundle
from .contour import contour_polylines, default_bandwidth, kde_grid
from .graph import connected_components
from .layout import overview_coordinates, LayoutResult, LayoutParams
from .pathnet import NoPathError, VertexNotInLayerError, build_net

DEFAULT_PORT = 8765


class PathNetRequest(BaseModel):
    anchors: List[int] = Field(min_length=2)
    hop_cap: Optional[int] = None


class ContourRequest(BaseModel):
    positions: List[List[float]]
    bandwidth: Optional[float] = None
    levels: int = 8
    resolution: int = 128


class _Keyed:
    """Per-key locks so identical cache fills run once."""

    def __init__(self):
        self._guard = threading.Lock()
        self._locks: Dict[str, threading.Lock] = {}

    def lock(self, key: str) -> threading.Lock:
        with self._guard:
            if key not in self._locks:
                self._locks[key] = threading.Lock()
            return self._locks[key]


class GraphStore:
    def __init__(self):
        self.artifacts: Dict[str, ArtifactBundle] = {}
        self.locks = _Keyed()
        self._component_cache: Dict[str, np.ndarray] = {}

    def add(self, directory: str, name: Optional[str] = None) -> str:
        bundle = ArtifactBundle.load(directory)
        art_id = name or Path(directory).name
        self.artifacts[art_id] = bundle
        return art_id

    def get(self, art_id: str) -> ArtifactBundle:
        bundle = self.artifacts.get(art_id)
        if bundle is None:
            raise HTTPException(status_code=404, detail=f"unknown graph {art_id!r}")
        return bundle

    def layer(self, art_id: str, k: int):
        bundle = self.get(art_id)
        try:
            return bundle, bundle.decomposition.layer(k)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"graph {art_id!r} has no layer {k}")

    def layer_components(self, art_id: str, k: int) -> np.ndarray:
        key = f"{art_id}/components/{k}"
        with self.locks.lock(key):
            if key not in self._component_cache:
                bundle, layer = self.layer(art_id, k)
                self._component_cache[key] = connected_components(
                    bundle.graph, edge_subset=layer.edges
                ).labels
            return self._component_cache[key]

    def positions(self, art_id: str, k: Optional[int], independent: bool) -> np.ndarray:
        """Positions for a layer (or the whole graph when k is None)."""
        bundle = self.get(art_id)
        if k is None:
            with self.locks.lock(f"{art_id}/positions/global"):
                return bundle.global_positions()
        if independent:
            with self.locks.lock(f"{art_id}/positions/layer/{k}"):
                return bundle.layer_positions(k)
        with self.locks.lock(f"{art_id}/positions/global"):
            full = bundle.global_positions()
        layer = bundle.decomposition.layer(k)
        return full[layer.vertices]


def create_app(artifact_dirs: List[str], names: Optional[List[str]] = None) -> FastAPI:
    store = GraphStore()
    for i, directory in enumerate(artifact_dirs):
        store.add(directory, names[i] if names else None)

    app = FastAPI(title="graphlayers explore service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.store = store

    @app.get("/graphs")
    def list_graphs():
        out = []
        for art_id, bundle in store.artifacts.items():
            man = bundle.manifest
            out.append(
                {
                    "id": art_id,
                    "n": man["n"],
                    "m": man["m"],
                    "L": man["L"],
                    "k_max": man["k_max"],
                }
            )
        return out

    @app.get("/graphs/{art_id}/ribbon")
    def ribbon(art_id: str):
        bundle = store.get(art_id)
        man = bundle.manifest
        return {
            "n": man["n"],
            "m": man["m"],
            "L": man["L"],
            "k_max": man["k_max"],
            "rows": man["measures"],
        }

    @app.get("/graphs/{art_id}/layers/{k}")
    def layer_payload(art_id: str, k: int, layout: str = Query("global")):
        if layout not in ("global", "independent"):
            raise HTTPException(status_code=422, detail="layout must be global|independent")
        bundle, layer = store.layer(art_id, k)
        pos = store.positions(art_id, k, independent=(layout == "independent"))
        comp_labels = store.layer_components(art_id, k)
        d = bundle.decomposition
        g = bundle.graph
        nodes = []
        for i, v in enumerate(layer.vertices):
            v = int(v)
            s, e = d.clone_offsets[v], d.clone_offsets[v + 1]
            nodes.append(
                {
                    "id": v,
                    "original_id": g.external_ids[v],
                    "label": g.labels[v] if g.labels is not None else None,
                    "x": float(pos[i, 0]),
                    "y": float(pos[i, 1]),
                    "multiplicity": int(e - s),
                    "clone_layers": [int(x) for x in d.clone_values[s:e]],
                    "component": int(comp_labels[v]),
                }
            )
        return {
            "value": k,
            "layout": layout,
            "nodes": nodes,
            "edges": [[int(u), int(v)] for u, v in layer.edges],
            "measures": bundle.measures_row(k),
        }

    @app.get("/graphs/{art_id}/overview")
    def overview(art_id: str, height: float = 1.0, spread: float = 1.0):
        bundle = store.get(art_id)
        pos = store.positions(art_id, None, independent=False)
        result = LayoutResult(
            vertex_ids=np.arange(bundle.graph.n, dtype=np.int64),
            positions=pos.astype(np.float64),
            scope="global",
            params=LayoutParams(),
        )
        coords = overview_coordinates(
            bundle.decomposition, result, height_scale=height, spread_scale=spread
        )
        return {
            "height_scale": coords.height_scale,
            "spread_scale": coords.spread_scale,
            "layers": [
                {
                    "value": lay.value,
                    "z": lay.z,
                    "vertices": [int(v) for v in lay.vertex_ids],
                    "x": [float(x) for x in lay.xy[:, 0]],
                    "y": [float(y) for y in lay.xy[:, 1]],
                }
                for lay in coords.layers
            ],
        }

    @app.post("/graphs/{art_id}/layers/{k}/pathnet")
    def pathnet(art_id: str, k: int, req: PathNetRequest):
        _, layer = store.layer(art_id, k)
        try:
            net = build_net(layer, req.anchors, req.hop_cap)
        except VertexNotInLayerError as err:
            raise HTTPException(status_code=404, detail=str(err))
        except NoPathError as err:
            raise HTTPException(
                status_code=422,
                detail={"message": str(err), "anchor": err.vertex},
            )
        return {
            "value": net.value,
            "vertices": list(net.vertices),
            "edges": [list(e) for e in net.edges],
            "anchors": list(net.anchors),
        }

    def _contour_payload(art_id, k, bandwidth, levels, resolution, which, positions=None):
        if positions is None:
            positions = store.positions(art_id, k, independent=(which == "independent"))
        pts = np.asarray(positions, dtype=np.float64)
        h = bandwidth if bandwidth is not None else default_bandwidth(pts)
        field = kde_grid(pts, h, resolution)
        contours = contour_polylines(field, levels)
        return {
            "bandwidth": float(h),
            "resolution": resolution,
            "levels": contours.levels,
            "bounds": list(field.bounds),
            "polylines": [
                [[[float(x), float(y)] for x, y in poly] for poly in level_polys]
                for level_polys in contours.polylines
            ],
        }

    @app.get("/graphs/{art_id}/layers/{k}/contour")
    def contour(
        art_id: str,
        k: int,
        bandwidth: Optional[float] = None,
        levels: int = 8,
        resolution: int = 256,
        layout: str = Query("global"),
    ):
        store.layer(art_id, k)  # 404 early on unknown layer
        cache_key = f"contour_{k}_{bandwidth}_{levels}_{resolution}_{layout}.json"
        cache_dir = store.get(art_id).path / "cache"
        cache_file = cache_dir / cache_key
        with store.locks.lock(f"{art_id}/{cache_key}"):
            if cache_file.exists():
                return json.loads(cache_file.read_text("utf-8"))
            payload = _contour_payload(art_id, k, bandwidth, levels, resolution, layout)
            cache_dir.mkdir(exist_ok=True)
            cache_file.write_text(json.dumps(payload), "utf-8")
            return payload

    @app.post("/graphs/{art_id}/layers/{k}/contour")
    def contour_live(art_id: str, k: int, req: ContourRequest):
        # drag recomputation: the client sends its current vertex positions
        store.layer(art_id, k)
        return _contour_payload(
            art_id, k, req.bandwidth, req.levels, req.resolution, "live",
            positions=np.asarray(req.positions, dtype=np.float64),
        )

    @app.get("/graphs/{art_id}/vertices/{v}/clones")
    def clones(art_id: str, v: int):
        bundle = store.get(art_id)
        g = bundle.graph
        if not (0 <= v < g.n):
            raise HTTPException(status_code=404, detail=f"vertex {v} out of range")
        d = bundle.decomposition
        s, e = d.clone_offsets[v], d.clone_offsets[v + 1]
        return {
            "id": v,
            "original_id": g.external_ids[v],
            "label": g.labels[v] if g.labels is not None else None,
            "layers": [int(x) for x in d.clone_values[s:e]],
        }

    return app


def serve(artifact_dirs: List[str], port: int = DEFAULT_PORT, host: str = "127.0.0.1"):
    import uvicorn

    app = create_app(artifact_dirs)
    uvicorn.run(app, host=host, port=port, log_level="warning")
