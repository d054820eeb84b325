"""Command-line entry point: ``polyfold {unfold,distance,voronoi,verify}``.

Exit codes: 0 success, 1 failed verification, 2 invalid input,
3 numerical failure.
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import io
from .config import RunConfig, Tolerances
from .errors import InputError, NumericFailure, PolyfoldError
from .geodesic import geodesic_distance, geodesic_voronoi, shortest_paths_to
from .unfolder import cut_locus, run_source_unfolding, vistal_tree
from .verify import cells_from_vertices, run_suite


def _tolerances(pairs: list[str] | None) -> Tolerances:
    values = {}
    for p in pairs or []:
        if "=" not in p:
            raise InputError(f"--tol expects key=value, got {p!r}")
        k, v = p.split("=", 1)
        values[k.strip()] = v.strip()
    try:
        return Tolerances.from_mapping(values, Tolerances.from_env())
    except (KeyError, ValueError) as exc:
        raise InputError(str(exc).strip("'\"")) from None


def _config(args) -> RunConfig:
    return RunConfig(_tolerances(args.tol), args.max_events, getattr(args, "seed", 0))


def _source(cx, spec: str):
    facet, point = io.parse_point_spec(spec)
    return cx.facet_index(_facet_key(cx, facet)), np.array(point)


def _facet_key(cx, facet: str):
    names = [f.name for f in cx.facets]
    if facet in names:
        return facet
    if facet.lstrip("-").isdigit() and int(facet) < cx.n_facets:
        return int(facet)
    raise InputError(f"unknown facet {facet!r}")


def _unfold(args) -> int:
    cfg = _config(args)
    cx = io.load_complex(args.input, cfg.tol)
    F, x = _source(cx, args.source)
    res = run_source_unfolding(cx, F, x, cfg.tol, cfg.max_events)
    io.write_json(args.out, io.foldout_document(res))
    if args.svg:
        Path(args.svg).write_text(io.foldout_svg(res))
    if args.off:
        Path(args.off).write_text(io.foldout_off(res))
    if args.cut_locus:
        io.write_json(args.cut_locus, io.cut_locus_document(res, cut_locus(res)))
    if args.vistal:
        io.write_json(args.vistal, io.vistal_document(res, vistal_tree(res)))
    print(f"{len(res.events)} events, {len(res.foldout.cells)} cells, max images per facet {res.max_images()}",
          file=sys.stderr)
    return 0


def _distance(args) -> int:
    cfg = _config(args)
    cx = io.load_complex(args.input, cfg.tol)
    F, x = _source(cx, args.source)
    res = run_source_unfolding(cx, F, x, cfg.tol, cfg.max_events)
    G, w = _source(cx, args.target)
    out = {"distance": geodesic_distance(res, (G, w))}
    if args.paths:
        name = lambda f: cx.facets[f].name
        out["paths"] = [{"length": p.length, "facet_sequence": [name(f) for f in p.facet_sequence],
                         "breakpoints": [{"ridge": b.ridge, "from": name(b.facets[0]), "to": name(b.facets[1]),
                                          "point": b.chart_point,
                                          **({"ambient": b.ambient} if b.ambient is not None else {})}
                                         for b in p.breakpoints]}
                        for p in shortest_paths_to(res, (G, w))]
    print(io.dumps(out))
    return 0


def _voronoi(args) -> int:
    cfg = _config(args)
    cx = io.load_complex(args.input, cfg.tol)
    srcs = [_source(cx, s) for s in args.sources]
    gvd = geodesic_voronoi(cx, srcs, cfg.tol, cfg.max_events)
    io.write_json(args.out, io.gvd_document(gvd))
    if args.svg:
        Path(args.svg).write_text(io.gvd_svg(gvd))
    return 0


def _verify(args) -> int:
    cfg = _config(args)
    cx = io.load_complex(args.input, cfg.tol)
    F, x = _source(cx, args.source)
    t0 = time.perf_counter()
    res = run_source_unfolding(cx, F, x, cfg.tol, cfg.max_events)
    elapsed = time.perf_counter() - t0
    cells = None
    if args.foldout:
        doc = io.read_foldout(args.foldout)
        cells = cells_from_vertices([c["vertices"] for c in doc["cells"]])
    expected = io.read_json(args.expect_sequences) if args.expect_sequences else None
    checks = run_suite(res, args.samples, cfg.seed, args.oracle_max_len, cells, expected)
    for c in checks:
        print(c.line())
    n_bad = sum(not c.ok for c in checks)
    print(f"{len(checks) - n_bad}/{len(checks)} checks passed; {len(res.events)} events in {elapsed:.3f} s")
    return 1 if n_bad else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="polyfold", description="Source unfoldings of convex polyhedral surfaces.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, source=True):
        p.add_argument("--input", required=True, help="hpoly/1 or complex/1 JSON file")
        if source:
            p.add_argument("--source", required=True, help='"facet=<id>;point=[...]" in facet chart coordinates')
        p.add_argument("--tol", action="append", metavar="KEY=VALUE", help="tolerance override (repeatable)")
        p.add_argument("--max-events", type=int, default=1_000_000, help="iteration cap")

    p = sub.add_parser("unfold", help="compute the source foldout")
    common(p)
    p.add_argument("--out", required=True, help="foldout/1 JSON output")
    p.add_argument("--svg", help="SVG drawing (two-dimensional surfaces)")
    p.add_argument("--off", help="OFF boundary mesh (three-dimensional surfaces)")
    p.add_argument("--cut-locus", help="cut-locus JSON output")
    p.add_argument("--vistal", help="vistal-tree JSON output")
    p.set_defaults(func=_unfold)

    p = sub.add_parser("distance", help="intrinsic distance from the source to a target")
    common(p)
    p.add_argument("--target", required=True, help='"facet=<id>;point=[...]"')
    p.add_argument("--paths", action="store_true", help="also list all shortest paths")
    p.set_defaults(func=_distance)

    p = sub.add_parser("voronoi", help="geodesic Voronoi diagram of several sources")
    common(p, source=False)
    p.add_argument("--sources", required=True, nargs="+", help='one "facet=<id>;point=[...]" per source')
    p.add_argument("--out", required=True, help="gvd/1 JSON output")
    p.add_argument("--svg", help="SVG drawing of the cells (two-dimensional surfaces)")
    p.set_defaults(func=_voronoi)

    p = sub.add_parser("verify", help="run the invariant suite")
    common(p)
    p.add_argument("--oracle-max-len", type=int, default=None, help="longest facet sequence for the brute-force oracle")
    p.add_argument("--samples", type=int, default=100, help="random target points for the distance checks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--foldout", help="check the cells of this foldout/1 file instead of a fresh run")
    p.add_argument("--expect-sequences", help="JSON list of expected event facet sequences")
    p.set_defaults(func=_verify)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"polyfold: input error: {exc}", file=sys.stderr)
        return 2
    except NumericFailure as exc:
        print(f"polyfold: numerical failure: {exc}", file=sys.stderr)
        return 3
    except PolyfoldError as exc:
        print(f"polyfold: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
