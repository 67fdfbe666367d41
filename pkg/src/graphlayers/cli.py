"""Offline pipeline driver: decompose, stats, layout, export, bench, serve.

Exit codes: 1 for edge-list parse errors, 2 for I/O or artifact errors.
Reported decomposition seconds exclude ingestion and artifact writing.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

from . import __version__
from .artifact import ArtifactBundle, ArtifactError, write_artifact, write_positions
from .graph import EdgeListParseError, IngestOptions, ingest_edge_list, export_edge_list, from_edges
from .layout import LayoutParams, layout
from .measures import ribbon_summary
from .peel import decompose
from .service import DEFAULT_PORT


def _warm_kernels(workers: int = 1) -> None:
    """Trigger numba JIT on a toy graph so timed runs measure the algorithm."""
    g = from_edges([(0, 1), (1, 2), (2, 0), (2, 3)])
    decompose(g, workers=workers)


def _layout_params(args) -> LayoutParams:
    return LayoutParams(
        iterations=args.iterations,
        theta=args.theta,
        cooling=args.cooling,
        seed=args.seed,
    )


def _add_layout_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--iterations", type=int, default=500)
    p.add_argument("--theta", type=float, default=0.5)
    p.add_argument("--cooling", type=float, default=0.99)
    p.add_argument("--seed", type=int, default=0)


def cmd_decompose(args) -> int:
    opts = IngestOptions(label_path=args.labels)
    g = ingest_edge_list(args.edge_list, opts)
    _warm_kernels(args.threads)
    t0 = time.perf_counter()
    d = decompose(g, workers=args.threads)
    elapsed = time.perf_counter() - t0
    summary = ribbon_summary(d, g)
    global_layout = None
    if args.layout:
        global_layout = layout(g, _layout_params(args))
    write_artifact(args.out, g, d, summary, global_layout)
    print(
        f"n={g.n} m={g.m} L={d.L} k_max={d.k_max} "
        f"decompose_seconds={elapsed:.4f}"
    )
    return 0


def cmd_bench(args) -> int:
    opts = IngestOptions()
    g = ingest_edge_list(args.edge_list, opts)
    _warm_kernels(args.threads)
    times = []
    for run in range(args.runs):
        t0 = time.perf_counter()
        d = decompose(g, workers=args.threads)
        elapsed = time.perf_counter() - t0
        times.append(elapsed)
        print(f"run {run + 1}: {elapsed:.4f} s (L={d.L} k_max={d.k_max})")
    mean = sum(times) / len(times)
    print(f"mean over {args.runs} runs: {mean:.4f} s  n={g.n} m={g.m}")
    return 0


def cmd_stats(args) -> int:
    bundle = ArtifactBundle.load(args.artifact)
    man = bundle.manifest
    print(f"n={man['n']} m={man['m']} L={man['L']} k_max={man['k_max']}")
    csv_path = bundle.path / "measures.csv"
    if csv_path.exists():
        print(csv_path.read_text("utf-8"), end="")
    return 0


def cmd_layout(args) -> int:
    bundle = ArtifactBundle.load(args.artifact)
    params = _layout_params(args)
    if args.layer is not None:
        lay = bundle.decomposition.layer(args.layer)
        result = layout(lay, params)
        out = bundle.path / f"positions.layer_{args.layer}.bin"
    else:
        result = layout(bundle.graph, params)
        out = bundle.path / "positions.global.bin"
    write_positions(out, result.positions)
    print(f"wrote {out} ({result.positions.shape[0]} positions)")
    return 0


def cmd_export(args) -> int:
    bundle = ArtifactBundle.load(args.artifact)
    if args.format == "edgelist":
        out = args.out or str(bundle.path / "export.edgelist")
        export_edge_list(bundle.graph, out)
    else:
        out = args.out or str(bundle.path / "export.csv")
        Path(out).write_text((bundle.path / "measures.csv").read_text("utf-8"), "utf-8")
    print(f"wrote {out}")
    return 0


def cmd_serve(args) -> int:
    from .service import serve

    serve(args.artifacts, port=args.port, host=args.host)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphlayers",
        description="Decompose graphs into peel-value layers and explore them.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="decompose an edge list into an artifact dir")
    p.add_argument("edge_list")
    p.add_argument("--out", required=True)
    p.add_argument("--labels", default=None)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--layout", action=argparse.BooleanOptionalAction, default=True)
    _add_layout_flags(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("bench", help="time repeated decompositions of an edge list")
    p.add_argument("edge_list")
    p.add_argument("--runs", type=int, default=5)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("stats", help="print the measure table of an artifact")
    p.add_argument("artifact")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("layout", help="(re)compute positions for an artifact")
    p.add_argument("artifact")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--layer", type=int, default=None)
    group.add_argument("--global", dest="global_", action="store_true")
    _add_layout_flags(p)
    p.set_defaults(func=cmd_layout)

    p = sub.add_parser("export", help="export canonical edge list or measures CSV")
    p.add_argument("artifact")
    p.add_argument("--format", choices=["csv", "edgelist"], default="edgelist")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("serve", help="serve artifacts over HTTP/JSON")
    p.add_argument("artifacts", nargs="+")
    p.add_argument("--port", type=int, default=int(os.environ.get("GRAPHLAYERS_PORT", DEFAULT_PORT)))
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EdgeListParseError as err:
        print(f"parse error: {err}", file=sys.stderr)
        return 1
    except (OSError, ArtifactError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except KeyError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
