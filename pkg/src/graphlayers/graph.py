"""Immutable undirected graphs in compressed adjacency form.

Edge lists are ingested from disk (memory-mapped or streamed, never the
whole text in memory), normalized to a simple undirected graph, and
indexed so that every canonical edge (u, v) with u < v has a stable id.
"""

from __future__ import annotations

import io
import mmap
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

import numpy as np

OriginalId = Union[int, str]


class EdgeListParseError(ValueError):
    """Raised for malformed edge-list lines; carries the 1-based line number."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


@dataclass(frozen=True)
class IngestOptions:
    """Knobs for edge-list ingestion.

    drop_self_loops is always true: peel values and clustering are defined
    on simple graphs, so self-loops are rejected at the door.
    """

    symmetrize: bool = True
    drop_self_loops: bool = True
    comment_prefix: str = "#"
    label_path: Optional[str] = None

    def __post_init__(self):
        if not self.drop_self_loops:
            raise ValueError("drop_self_loops is immutable-true")
        if len(self.comment_prefix) != 1:
            raise ValueError("comment_prefix must be a single character")


@dataclass(frozen=True)
class ComponentLabeling:
    """Connected-component labels over the dense vertex range.

    labels[v] is -1 for vertices with no incident edge in the edge set
    considered. Labels 0..count-1 are ordered by decreasing component
    vertex count, ties broken by the smallest contained original id.
    """

    labels: np.ndarray
    sizes: np.ndarray

    @property
    def count(self) -> int:
        return int(self.sizes.size)


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph in CSR form over dense vertex ids 0..n-1.

    offsets has length n+1; adjacency has length 2m with each vertex's
    neighbor slice sorted ascending. edge_ids maps each adjacency slot to
    the canonical edge index, where canonical edges are the (u, v) pairs
    with u < v sorted lexicographically.
    """

    n: int
    m: int
    offsets: np.ndarray
    adjacency: np.ndarray
    edge_ids: np.ndarray
    edges: np.ndarray  # canonical (m, 2) array, u < v, lexicographically sorted
    external_ids: tuple
    labels: Optional[tuple] = None

    def degree(self, v: int) -> int:
        return int(self.offsets[v + 1] - self.offsets[v])

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.offsets).astype(np.int64)

    def neighbors(self, v: int) -> np.ndarray:
        """Sorted neighbor list of v as a read-only view."""
        if not (0 <= v < self.n):
            raise IndexError(f"vertex {v} out of range [0, {self.n})")
        view = self.adjacency[self.offsets[v]:self.offsets[v + 1]]
        view.flags.writeable = False
        return view

    def original_id(self, v: int) -> OriginalId:
        return self.external_ids[v]

    def label(self, v: int) -> Optional[str]:
        if self.labels is None:
            return None
        return self.labels[v]

    def validate(self) -> None:
        """Check structural invariants; raises AssertionError on violation."""
        assert self.offsets.shape == (self.n + 1,)
        assert self.offsets[0] == 0 and self.offsets[-1] == 2 * self.m
        assert self.adjacency.shape == (2 * self.m,)
        assert self.edges.shape == (self.m, 2)
        for v in range(self.n):
            nbrs = self.adjacency[self.offsets[v]:self.offsets[v + 1]]
            assert np.all(np.diff(nbrs) > 0), f"adjacency of {v} not strictly sorted"
            assert not np.any(nbrs == v), f"self-loop at {v}"
        # symmetry: every slot (v -> u) has a partner (u -> v) sharing the edge id
        if self.m:
            assert np.all(self.edges[:, 0] < self.edges[:, 1])
            counts = np.bincount(self.edge_ids, minlength=self.m)
            assert np.all(counts == 2), "every edge must appear in exactly two slots"


def _parse_token(tok: bytes) -> OriginalId:
    try:
        return int(tok)
    except ValueError:
        return tok.decode("utf-8")


def _open_mapped(path: str):
    """Best-effort memory map; falls back to buffered reads (still streamed)."""
    f = open(path, "rb")
    try:
        mm = mmap.mmap(f.fileno(), 0, access=mmap.ACCESS_READ)
        return f, mm
    except (ValueError, OSError):
        return f, f


def _ingest_fast_integer(path: str, comment: str):
    """Vectorized path for plain two-column integer files.

    Returns (u, v) int64 arrays in file order, or None if the file does
    not fit the fast format (tokens, ragged rows, ...).
    """
    import pandas as pd

    try:
        frame = pd.read_csv(
            path,
            sep=r"\s+",
            comment=comment,
            header=None,
            dtype=np.int64,
            engine="c",
        )
    except Exception:
        return None
    if frame.shape[1] != 2 or frame.isna().any().any():
        return None
    return frame[0].to_numpy(), frame[1].to_numpy()


def _ingest_lines(path: str, comment_prefix: str):
    """Streamed parse handling tokens, extra columns, and line-numbered errors."""
    comment = comment_prefix.encode()
    us: list = []
    vs: list = []
    f, buf = _open_mapped(path)
    try:
        reader = buf if isinstance(buf, mmap.mmap) else io.BufferedReader(buf, 1 << 20)
        lineno = 0
        while True:
            raw = reader.readline()
            if not raw:
                break
            lineno += 1
            line = raw.strip()
            if not line or line.startswith(comment):
                continue
            toks = line.split()
            if len(toks) < 2:
                raise EdgeListParseError("expected at least two tokens", lineno)
            us.append(_parse_token(toks[0]))
            vs.append(_parse_token(toks[1]))
    finally:
        if isinstance(buf, mmap.mmap):
            buf.close()
        f.close()
    return us, vs


def _densify(us: Sequence[OriginalId], vs: Sequence[OriginalId]):
    """Assign dense ids by first appearance, skipping self-loops."""
    index: dict = {}
    external: list = []
    du = np.empty(len(us), dtype=np.int64)
    dv = np.empty(len(vs), dtype=np.int64)
    k = 0
    for i, (a, b) in enumerate(zip(us, vs)):
        if a == b:
            continue
        ia = index.get(a)
        if ia is None:
            ia = index[a] = len(external)
            external.append(a)
        ib = index.get(b)
        if ib is None:
            ib = index[b] = len(external)
            external.append(b)
        du[k] = ia
        dv[k] = ib
        k += 1
    return du[:k], dv[:k], external, index


def _canonical_edges(du: np.ndarray, dv: np.ndarray) -> np.ndarray:
    """Collapse duplicates (both orientations) into sorted unique (u, v), u < v."""
    if du.size == 0:
        return np.empty((0, 2), dtype=np.int64)
    lo = np.minimum(du, dv)
    hi = np.maximum(du, dv)
    order = np.lexsort((hi, lo))
    lo, hi = lo[order], hi[order]
    keep = np.ones(lo.size, dtype=bool)
    keep[1:] = (lo[1:] != lo[:-1]) | (hi[1:] != hi[:-1])
    return np.column_stack((lo[keep], hi[keep]))


def _build_csr(n: int, edges: np.ndarray):
    m = edges.shape[0]
    if m == 0:
        return (
            np.zeros(n + 1, dtype=np.int64),
            np.empty(0, dtype=np.int32),
            np.empty(0, dtype=np.int32),
        )
    eid = np.arange(m, dtype=np.int32)
    src = np.concatenate([edges[:, 0], edges[:, 1]])
    dst = np.concatenate([edges[:, 1], edges[:, 0]])
    eids = np.concatenate([eid, eid])
    order = np.lexsort((dst, src))
    adjacency = dst[order].astype(np.int32)
    edge_ids = eids[order]
    counts = np.bincount(src, minlength=n)
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    return offsets, adjacency, edge_ids


def from_edges(
    edges: Iterable[tuple],
    n: Optional[int] = None,
    external_ids: Optional[Sequence[OriginalId]] = None,
    labels: Optional[Sequence[Optional[str]]] = None,
) -> Graph:
    """Build a Graph from dense-id edge pairs.

    Self-loops are dropped and duplicate/reversed edges collapsed. n may
    exceed the largest endpoint to create isolated vertices.
    """
    arr = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
    keep = arr[:, 0] != arr[:, 1]
    arr = arr[keep]
    top = int(arr.max()) + 1 if arr.size else 0
    if n is None:
        n = top
    elif n < top:
        raise ValueError(f"n={n} too small for endpoint {top - 1}")
    canon = _canonical_edges(arr[:, 0], arr[:, 1])
    offsets, adjacency, edge_ids = _build_csr(n, canon)
    if external_ids is None:
        external_ids = range(n)
    ext = tuple(external_ids)
    if len(ext) != n:
        raise ValueError("external_ids length must equal n")
    lab = tuple(labels) if labels is not None else None
    return Graph(
        n=n,
        m=canon.shape[0],
        offsets=offsets,
        adjacency=adjacency,
        edge_ids=edge_ids,
        edges=canon,
        external_ids=ext,
        labels=lab,
    )


def _read_labels(path: str, index: dict, n: int) -> tuple:
    labels: list = [None] * n
    with open(path, "rb") as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.rstrip(b"\r\n")
            if not line:
                continue
            head, sep, tail = line.partition(b"\t")
            if not sep:
                raise EdgeListParseError("label line missing tab separator", lineno)
            key = _parse_token(head)
            dense = index.get(key)
            if dense is not None:
                labels[dense] = tail.decode("utf-8")
    return tuple(labels)


def ingest_edge_list(path: str, opts: IngestOptions = IngestOptions()) -> Graph:
    """Read a whitespace-separated "u v" edge list into a Graph.

    Comment lines (first non-blank char == opts.comment_prefix) are
    skipped, self-loops dropped, duplicates (including reversed) collapsed.
    Dense ids follow first appearance among kept edges. Integer-only files
    take a vectorized parse; anything else streams line by line.
    """
    fast = _ingest_fast_integer(path, opts.comment_prefix)
    if fast is not None:
        raw_u, raw_v = fast
        keep = raw_u != raw_v
        raw_u, raw_v = raw_u[keep], raw_v[keep]
        du, dv, external, index = _densify_int(raw_u, raw_v)
    else:
        us, vs = _ingest_lines(path, opts.comment_prefix)
        du, dv, external, index = _densify(us, vs)
    canon = _canonical_edges(du, dv)
    n = len(external)
    offsets, adjacency, edge_ids = _build_csr(n, canon)
    labels = None
    if opts.label_path is not None:
        labels = _read_labels(opts.label_path, index, n)
    return Graph(
        n=n,
        m=canon.shape[0],
        offsets=offsets,
        adjacency=adjacency,
        edge_ids=edge_ids,
        edges=canon,
        external_ids=tuple(external),
        labels=labels,
    )


def _densify_int(raw_u: np.ndarray, raw_v: np.ndarray):
    """First-appearance dense ids for integer id arrays, vectorized."""
    inter = np.empty(raw_u.size * 2, dtype=np.int64)
    inter[0::2] = raw_u
    inter[1::2] = raw_v
    uniq, first_pos, inverse = np.unique(inter, return_index=True, return_inverse=True)
    rank = np.argsort(np.argsort(first_pos, kind="stable"), kind="stable")
    dense_all = rank[inverse]
    order = np.argsort(first_pos, kind="stable")
    external = uniq[order]
    du = dense_all[0::2]
    dv = dense_all[1::2]
    index = {int(x): i for i, x in enumerate(external)}
    return du, dv, [int(x) for x in external], index


def neighbors(g: Graph, v: int) -> np.ndarray:
    """Module-level alias for Graph.neighbors."""
    return g.neighbors(v)


def _original_sort_key(oid: OriginalId):
    # ints before strings so mixed-id graphs still order totally
    return (0, oid, "") if isinstance(oid, int) else (1, 0, oid)


def connected_components(
    g: Graph, edge_subset: Optional[np.ndarray] = None
) -> ComponentLabeling:
    """Label connected components over g or over an edge subset.

    Vertices with no incident edge in the considered set get label -1.
    Labels are ordered by decreasing component size; ties broken by the
    smallest contained original id.
    """
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import connected_components as _scipy_cc

    edges = g.edges if edge_subset is None else np.asarray(edge_subset, dtype=np.int64)
    labels = np.full(g.n, -1, dtype=np.int64)
    if edges.size == 0:
        return ComponentLabeling(labels=labels, sizes=np.empty(0, dtype=np.int64))
    u, v = edges[:, 0], edges[:, 1]
    data = np.ones(u.size, dtype=np.int8)
    mat = coo_matrix((data, (u, v)), shape=(g.n, g.n))
    _, raw = _scipy_cc(mat, directed=False)
    incident = np.zeros(g.n, dtype=bool)
    incident[u] = True
    incident[v] = True
    comp_ids = np.unique(raw[incident])
    # order by (-size, min original id)
    keyed = []
    for cid in comp_ids:
        members = np.nonzero((raw == cid) & incident)[0]
        min_oid = min(_original_sort_key(g.external_ids[int(w)]) for w in members)
        keyed.append((-members.size, min_oid, cid, members))
    keyed.sort(key=lambda t: (t[0], t[1]))
    sizes = np.empty(len(keyed), dtype=np.int64)
    for new_label, (neg_size, _, _, members) in enumerate(keyed):
        labels[members] = new_label
        sizes[new_label] = -neg_size
    return ComponentLabeling(labels=labels, sizes=sizes)


def canonical_edge_lines(g: Graph) -> Iterable[str]:
    """Yield the canonical edge list, one "u v" line per edge in dense ids."""
    for u, v in g.edges:
        yield f"{u} {v}\n"


def export_edge_list(g: Graph, path: str) -> None:
    """Write the canonical edge list (u < v, lexicographically sorted)."""
    with open(path, "w", encoding="utf-8") as f:
        f.writelines(canonical_edge_lines(g))
