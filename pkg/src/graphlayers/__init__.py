"""Peel-value layer decomposition of large undirected graphs, with
per-layer measures, deterministic layouts, path-nets, contour motifs,
and an HTTP exploration service."""

from .graph import (
    ComponentLabeling,
    EdgeListParseError,
    Graph,
    IngestOptions,
    connected_components,
    export_edge_list,
    from_edges,
    ingest_edge_list,
    neighbors,
)
from .peel import (
    Decomposition,
    Layer,
    PeelMap,
    clones_of,
    coreness,
    coreness_parallel,
    decompose,
)
from .measures import (
    LayerMeasures,
    RibbonSummary,
    layer_measures,
    measures_csv,
    ribbon_summary,
)
from .layout import (
    LayoutParams,
    LayoutResult,
    OverviewCoordinates,
    layout,
    overview_coordinates,
)
from .pathnet import (
    NoPathError,
    PathNet,
    VertexNotInLayerError,
    build_net,
    expand_net,
    shortest_path,
)
from .contour import ContourSet, DensityField, contour_polylines, default_bandwidth, kde_grid
from .artifact import ArtifactBundle, ArtifactError, write_artifact

__version__ = "0.1.0"

__all__ = [
    "ArtifactBundle",
    "ArtifactError",
    "ComponentLabeling",
    "ContourSet",
    "Decomposition",
    "DensityField",
    "EdgeListParseError",
    "Graph",
    "IngestOptions",
    "Layer",
    "LayerMeasures",
    "LayoutParams",
    "LayoutResult",
    "NoPathError",
    "OverviewCoordinates",
    "PathNet",
    "PeelMap",
    "RibbonSummary",
    "VertexNotInLayerError",
    "build_net",
    "clones_of",
    "connected_components",
    "contour_polylines",
    "coreness",
    "coreness_parallel",
    "decompose",
    "default_bandwidth",
    "expand_net",
    "export_edge_list",
    "from_edges",
    "ingest_edge_list",
    "kde_grid",
    "layer_measures",
    "layout",
    "measures_csv",
    "neighbors",
    "overview_coordinates",
    "ribbon_summary",
    "shortest_path",
    "write_artifact",
]
