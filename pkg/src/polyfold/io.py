"""JSON schemas (hpoly/1, complex/1, foldout/1, gvd/1), SVG and OFF export.

Floats are written with ``repr``, the shortest decimal string that reads
back to the identical double, so every file round-trips bit for bit.
"""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .complex import FacetComplex, build_abstract_complex, build_facet_complex
from .config import Tolerances
from .errors import InputError
from .geometry import HPolytope

# ---------------------------------------------------------------------------
# number formatting


def fmt(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("non-finite number in output")
    return repr(x + 0.0)


def _clean(obj: Any) -> Any:
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (np.floating, float)):
        return float(obj) + 0.0
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def dumps(obj: Any, indent: int | None = None) -> str:
    # json uses float.__repr__, i.e. shortest round-trip digits
    return json.dumps(_clean(obj), indent=indent, allow_nan=False)


def write_json(path, obj: Any) -> None:
    Path(path).write_text(dumps(obj, indent=1) + "\n")


def read_json(path) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from None


# ---------------------------------------------------------------------------
# inputs


def _halfspaces(items, dim: int, where: str) -> tuple[np.ndarray, np.ndarray, list[str | None]]:
    if not isinstance(items, list) or not items:
        raise InputError(f"{where}: 'halfspaces' must be a nonempty list")
    A, b, names = [], [], []
    for k, h in enumerate(items):
        try:
            a = [float(t) for t in h["a"]]
            bb = float(h["b"])
        except (KeyError, TypeError, ValueError):
            raise InputError(f"{where}: halfspace {k} needs numeric 'a' and 'b'") from None
        if len(a) != dim:
            raise InputError(f"{where}: halfspace {k} has {len(a)} coefficients, expected {dim}")
        if not all(map(math.isfinite, a + [bb])):
            raise InputError(f"{where}: halfspace {k} is not finite")
        A.append(a)
        b.append(bb)
        names.append(h.get("name"))
    return np.array(A), np.array(b), names


def parse_hpoly(data: dict) -> tuple[HPolytope, list[str] | None]:
    try:
        dim = int(data["dim"])
    except (KeyError, TypeError, ValueError):
        raise InputError("hpoly/1: missing integer 'dim'") from None
    A, b, names = _halfspaces(data.get("halfspaces"), dim, "hpoly/1")
    if np.any(np.linalg.norm(A, axis=1) == 0):
        raise InputError("hpoly/1: zero normal vector")
    labels = None
    if any(n is not None for n in names):
        labels = [str(n) if n is not None else str(k) for k, n in enumerate(names)]
        if len(set(labels)) != len(labels):
            raise InputError("hpoly/1: duplicate halfspace names")
    return HPolytope(A, b), labels


def parse_complex(data: dict, tol: Tolerances | None = None) -> FacetComplex:
    try:
        dim = int(data["dim"])
        facets = data["facets"]
        gluings = data["gluings"]
    except (KeyError, TypeError, ValueError):
        raise InputError("complex/1: needs 'dim', 'facets' and 'gluings'") from None
    fs = []
    for k, f in enumerate(facets):
        if "id" not in f or "vertices" not in f:
            raise InputError(f"complex/1: facet {k} needs 'id', 'halfspaces', 'vertices'")
        A, b, _ = _halfspaces(f.get("halfspaces"), dim, f"facet {f['id']}")
        try:
            V = np.array(f["vertices"], dtype=float).reshape(-1, dim)
        except ValueError:
            raise InputError(f"complex/1: facet {f['id']} has malformed vertices") from None
        fs.append((f["id"], HPolytope(A, b), V))
    gl = []
    for k, g in enumerate(gluings):
        try:
            (fa, va), (fb, vb) = g["ridge_of"], g["to"]
            gl.append(((fa, [int(i) for i in va]), (fb, [int(i) for i in vb])))
        except (KeyError, TypeError, ValueError):
            raise InputError(f"complex/1: gluing {k} must be {{'ridge_of': [F, ids], 'to': [G, ids]}}") from None
    return build_abstract_complex(fs, gl, tol)


def load_complex(source, tol: Tolerances | None = None) -> FacetComplex:
    """Complex from an hpoly/1 or complex/1 document (path or parsed dict)."""
    data = read_json(source) if isinstance(source, (str, Path)) else source
    if not isinstance(data, dict):
        raise InputError("input must be a JSON object")
    if "facets" in data:
        return parse_complex(data, tol)
    if "halfspaces" in data:
        P, names = parse_hpoly(data)
        return build_facet_complex(P, names, tol)
    raise InputError("input is neither hpoly/1 nor complex/1")


def hpoly_document(P: HPolytope, names=None) -> dict:
    hs = []
    for k, (a, b) in enumerate(P.halfspaces()):
        h = {"a": a, "b": b}
        if names is not None:
            h["name"] = names[k]
        hs.append(h)
    return {"schema": "hpoly/1", "dim": P.dim, "halfspaces": hs}


def complex_document(cx: FacetComplex) -> dict:
    """complex/1 description of any complex (charts become the abstract coordinates)."""
    facets = []
    for f in cx.facets:
        facets.append({"id": f.name, "halfspaces": [{"a": a, "b": b} for a, b in f.polytope.halfspaces()],
                       "vertices": f.vertices})
    gluings = []
    for r in cx.ridges:
        a, b = r.facets
        ids = []
        for f in (a, b):
            V = cx.facets[f].vertices
            ids.append([int(np.argmin(np.linalg.norm(V - p, axis=1))) for p in r.local[f]])
        gluings.append({"ridge_of": [cx.facets[a].name, ids[0]], "to": [cx.facets[b].name, ids[1]]})
    return {"schema": "complex/1", "dim": cx.dim, "facets": facets, "gluings": gluings}


def parse_point_spec(spec: str) -> tuple[str, list[float]]:
    """``"facet=<id>;point=[x, y, ...]"`` -> (facet id, coordinates)."""
    parts = {}
    for chunk in spec.split(";"):
        if not chunk.strip():
            continue
        if "=" not in chunk:
            raise InputError(f"bad point spec {spec!r}: expected key=value pairs")
        k, v = chunk.split("=", 1)
        parts[k.strip()] = v.strip()
    if "facet" not in parts or "point" not in parts:
        raise InputError(f"bad point spec {spec!r}: needs facet=... and point=[...]")
    try:
        pt = json.loads(parts["point"])
        pt = [float(t) for t in pt]
    except (json.JSONDecodeError, TypeError, ValueError):
        raise InputError(f"bad point spec {spec!r}: point must be a JSON list of numbers") from None
    return parts["facet"], pt


# ---------------------------------------------------------------------------
# outputs


def foldout_document(res) -> dict:
    cx = res.complex
    name = lambda f: cx.facets[f].name
    fo = res.foldout
    cells = [{"facet": name(c.facet), "event": c.event, "source_image": c.source_image,
              "facet_sequence": [name(f) for f in c.facet_sequence], "vertices": c.vertices} for c in fo.cells]
    events = [{"facet": name(e.facet), "nu": e.source_image, "radius": e.radius, "event_point": e.event_point,
               "angle_seq": e.angle_seq, "ridge": e.seen_through,
               "facet_sequence": [name(f) for f in e.facet_sequence]} for e in res.events]
    src = res.source
    return {"schema": "foldout/1", "dim": cx.dim, "origin": fo.origin,
            "source": {"facet": name(src.facet), "point": src.point},
            "surface_volume": cx.surface_volume(), "cells": cells, "events": events}


def read_foldout(path) -> dict:
    data = read_json(path)
    if not isinstance(data, dict) or "cells" not in data:
        raise InputError("not a foldout/1 document")
    try:
        data["cells"] = [dict(c, vertices=np.array(c["vertices"], dtype=float)) for c in data["cells"]]
    except (KeyError, TypeError, ValueError):
        raise InputError("foldout/1: malformed cell vertices") from None
    return data


def gvd_document(gvd) -> dict:
    cx = gvd.run.complex
    return {"schema": "gvd/1",
            "sources": [{"facet": cx.facets[F].name, "point": x} for F, x in gvd.sources],
            "cells": [{"facet": cx.facets[c.facet].name, "source_index": c.source_index, "vertices": c.vertices}
                      for c in gvd.cells],
            "region_volumes": [gvd.region_volume(i) for i in range(len(gvd.sources))]}


def cut_locus_document(res, locus) -> dict:
    cx = res.complex
    doc = {"schema": "cutlocus/1",
           "pieces": [{"facet": cx.facets[F].name, "vertices": V} for F, V in locus.pieces],
           "warped": [sorted(s) for s in locus.warped]}
    if locus.ambient_pieces is not None:
        doc["ambient_pieces"] = locus.ambient_pieces
        doc["vertices"] = cx.ambient_vertices
    return doc


def vistal_document(res, tree) -> dict:
    """Vistal tree with an explicit root node for the source (``events + 1`` nodes)."""
    cx = res.complex
    nodes = [{"node": "source", "parent": None, "radius": 0.0,
              "sources": [{"facet": cx.facets[s.facet].name, "point": s.point} for s in res.sources]}]
    for e in res.events:
        p = tree.parent[e.index]
        nodes.append({"node": e.index, "parent": "source" if p is None else p, "radius": e.radius,
                      "facet_sequence": [cx.facets[f].name for f in e.facet_sequence]})
    return {"schema": "vistal/1", "root": "source", "nodes": nodes}


def _polygon_order(V: np.ndarray) -> np.ndarray:
    c = V.mean(axis=0)
    ang = np.arctan2(V[:, 1] - c[1], V[:, 0] - c[0])
    return V[np.argsort(ang)]


def _boundary_edges(cells: list[np.ndarray], tol: float = 1e-9) -> list[tuple[np.ndarray, np.ndarray]]:
    """Polygon edges not shared with a neighbouring polygon."""
    polys = [_polygon_order(V) for V in cells]
    halfplanes = []
    for P in polys:
        Q = np.roll(P, -1, axis=0)
        e = Q - P
        n = np.stack([e[:, 1], -e[:, 0]], axis=1)
        n /= np.linalg.norm(n, axis=1)[:, None]
        halfplanes.append((n, np.einsum("ij,ij->i", n, P)))
    allv = np.vstack(polys)
    out = []
    for k, P in enumerate(polys):
        Q = np.roll(P, -1, axis=0)
        for a, b in zip(P, Q):
            # split at vertices of other cells lying on the edge (T-junctions)
            e = b - a
            L2 = float(e @ e)
            t = (allv - a) @ e / L2
            off = np.abs((allv - a) @ np.array([e[1], -e[0]])) / np.sqrt(L2)
            cuts = np.unique(np.concatenate([[0.0, 1.0], t[(off <= tol) & (t > tol) & (t < 1 - tol)]]))
            for t0, t1 in zip(cuts, cuts[1:]):
                m = a + 0.5 * (t0 + t1) * e
                shared = any(np.all(n @ m <= c + tol) for j, (n, c) in enumerate(halfplanes) if j != k)
                if not shared:
                    out.append((a + t0 * e, a + t1 * e))
    return out


def foldout_svg(res, size: float = 600.0) -> str:
    """SVG drawing of a two-dimensional foldout; cut-locus edges in red."""
    fo = res.foldout
    if fo.dim != 2:
        raise InputError("SVG export needs a two-dimensional foldout")
    allv = np.vstack([c.vertices for c in fo.cells])
    lo, hi = allv.min(axis=0), allv.max(axis=0)
    span = float(max(hi - lo))
    pad = 0.05 * span
    vb = f"{fmt(lo[0] - pad)} {fmt(-hi[1] - pad)} {fmt(span + 2 * pad)} {fmt(span + 2 * pad)}"
    sw = fmt(span / 400)
    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size:g}" height="{size:g}" viewBox="{vb}">',
             f'<g transform="scale(1,-1)" stroke="black" stroke-width="{sw}">']
    for c in fo.cells:
        P = _polygon_order(c.vertices)
        pts = " ".join(f"{fmt(x)},{fmt(y)}" for x, y in P)
        name = res.complex.facets[c.facet].name
        lines.append(f'<polygon points="{pts}" fill="#dde6f0" data-facet="{name}" data-event="{c.event}"/>')
    for a, b in _boundary_edges([c.vertices for c in fo.cells]):
        lines.append(f'<line x1="{fmt(a[0])}" y1="{fmt(a[1])}" x2="{fmt(b[0])}" y2="{fmt(b[1])}" '
                     f'stroke="#c00000" stroke-width="{fmt(2 * span / 400)}" class="cut-locus"/>')
    lines.append(f'<circle cx="0.0" cy="0.0" r="{fmt(span / 100)}" fill="#c00000" class="source"/>')
    lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def gvd_svg(gvd, size: float = 600.0) -> str:
    """Each facet chart drawn side by side, cells coloured by nearest source."""
    cx = gvd.run.complex
    if cx.dim != 2:
        raise InputError("SVG export needs a two-dimensional complex")
    palette = ["#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2", "#edc948", "#b07aa1", "#ff9da7"]
    ncol = int(math.ceil(math.sqrt(cx.n_facets)))
    spans = [np.ptp(f.vertices, axis=0).max() for f in cx.facets]
    step = 1.2 * max(spans)
    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size:g}" height="{size:g}" '
             f'viewBox="{fmt(-0.1 * step)} {fmt(-0.1 * step)} {fmt(ncol * step)} {fmt(ncol * step)}">']
    for c in gvd.cells:
        f = cx.facets[c.facet]
        off = np.array([(c.facet % ncol) * step, (c.facet // ncol) * step]) - f.vertices.min(axis=0)
        P = _polygon_order(c.vertices) + off
        pts = " ".join(f"{fmt(x)},{fmt(y)}" for x, y in P)
        lines.append(f'<polygon points="{pts}" fill="{palette[c.source_index % len(palette)]}" '
                     f'stroke="black" stroke-width="{fmt(step / 300)}" data-facet="{f.name}"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def foldout_off(res) -> str:
    """OFF mesh of the boundary of a three-dimensional foldout."""
    fo = res.foldout
    if fo.dim != 3:
        raise InputError("OFF export needs a three-dimensional foldout")
    tol = 1e-7
    verts: list[np.ndarray] = []
    index: dict[tuple, int] = {}
    faces: list[list[int]] = []

    def vid(p):
        key = tuple(np.round(p, 9) + 0.0)
        if key not in index:
            index[key] = len(verts)
            verts.append(p)
        return index[key]

    for k, c in enumerate(fo.cells):
        P = c.polytope
        V = c.vertices
        for i in range(P.n_halfspaces):
            on = V[np.abs(V @ P.A[i] - P.b[i]) <= tol]
            if len(on) < 3:
                continue
            ctr = on.mean(axis=0)
            probe = ctr + 1e-6 * P.A[i]
            if any(np.all(o.polytope.A @ probe <= o.polytope.b + 1e-12) for j, o in enumerate(fo.cells) if j != k):
                continue
            # order the face polygon around its normal
            n = P.A[i]
            u = on[0] - ctr
            u /= np.linalg.norm(u)
            w = np.cross(n, u)
            ang = np.arctan2((on - ctr) @ w, (on - ctr) @ u)
            ring = [vid(p) for p in on[np.argsort(ang)]]
            faces.append(ring)
    out = ["OFF", f"{len(verts)} {len(faces)} 0"]
    out += [" ".join(fmt(t) for t in p) for p in verts]
    out += [f"{len(f)} " + " ".join(map(str, f)) for f in faces]
    return "\n".join(out) + "\n"
