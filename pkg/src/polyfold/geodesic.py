"""Distances, shortest paths and geodesic Voronoi diagrams from completed runs."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from .complex import FacetComplex
from .config import Tolerances, resolve
from .errors import DuplicateSources, InputError, NoPathFound, PointOutsideFacet, SourceOnWarpedFace
from .folding import AffineIsometry, _unfold
from .geometry import HPolytope, chebyshev_center, enumerate_vertices, polytope_volume
from .unfolder import UnfoldResult, classify_source, run_multi_source
from .voronoi import restricted_voronoi_cell


@dataclass
class Breakpoint:
    ridge: int
    facets: tuple[int, int]       # (left behind, entered)
    chart_point: np.ndarray       # chart of the facet being left
    ambient: np.ndarray | None


@dataclass
class GeodesicPath:
    length: float
    facet_sequence: tuple[int, ...]
    breakpoints: list[Breakpoint]
    source_index: int = 0


def _target(cx: FacetComplex, w, tol: Tolerances) -> tuple[int, np.ndarray]:
    facet, point = w
    F = cx.facet_index(facet)
    x = np.asarray(point, dtype=float).reshape(-1)
    if len(x) != cx.dim:
        raise InputError(f"target must have {cx.dim} chart coordinates")
    if not cx.facets[F].polytope.contains(x, 10 * tol.pt * (1 + np.linalg.norm(x))):
        raise PointOutsideFacet("target point outside its facet")
    return F, x


def geodesic_distance(res: UnfoldResult, w, source_index: int | None = None) -> float:
    """Intrinsic distance from the source to ``w = (facet, chart point)``."""
    F, x = _target(res.complex, w, res.tol)
    Y = res.images[F]
    if source_index is not None:
        mask = np.array([res.events[e].source_index == source_index for e in res.event_ids[F]], dtype=bool)
        Y = Y[mask] if len(Y) else Y
    if len(Y) == 0:
        raise NoPathFound("facet has no source images")
    return float(np.min(np.linalg.norm(Y - x, axis=1)))


def _crossings(cx: FacetComplex, seq: tuple[int, ...], start: np.ndarray, end: np.ndarray, tol: Tolerances):
    """Parameters and chart points where ``[start, end]`` (first chart) crosses the ridges of ``seq``."""
    out = []
    for k in range(len(seq) - 1):
        F, G = seq[k], seq[k + 1]
        r = cx.ridge_between(F, G)
        M = _unfold(cx, seq[: k + 1])       # chart F -> first chart
        fr = cx.ridges[r].frames[F]
        n = M.apply_vector(fr.normal)
        p = M(fr.subspace.point)
        den = n @ (end - start)
        if abs(den) < 1e-15:
            return None
        t = float(n @ (p - start) / den)
        y = M.inverse()(start + t * (end - start))
        out.append((t, r, (F, G), y))
    return out


def _path_ok(cx, crossings, tol: Tolerances, margin: float) -> bool:
    """Crossings in order inside the ridges; a negative ``margin`` is lenient, a positive one strict."""
    last = margin
    for t, r, (F, G), y in crossings:
        if t < last - 1e-12 or t < margin or t > 1 - margin:
            return False
        fr = cx.ridges[r].frames[F]
        z = fr.subspace.to_local(y)
        if not np.all(fr.boundary.slack(z) >= margin):
            return False
        last = t
    return True


def shortest_paths_to(res: UnfoldResult, w, source_index: int | None = None) -> list[GeodesicPath]:
    """All shortest paths to ``w``, one per source image achieving the minimum."""
    cx, tol = res.complex, res.tol
    F, x = _target(cx, w, tol)
    mu = geodesic_distance(res, (F, x), source_index)
    paths = []
    for i, nu in enumerate(res.images[F]):
        ev = res.events[res.event_ids[F][i]]
        if source_index is not None and ev.source_index != source_index:
            continue
        L = float(np.linalg.norm(nu - x))
        if L > mu + tol.rad * (1 + mu):
            continue
        seq = res.sequences[F][i]
        M = _unfold(cx, seq)
        start = M(nu)
        end = M(x)
        cr = _crossings(cx, seq, start, end, tol)
        if cr is None or not _path_ok(cx, cr, tol, -tol.pt * 10):
            continue
        # grazing a face of dimension <= d-2 is not a shortest path through a ridge interior
        if len(cr) and not _path_ok(cx, cr, tol, tol.slack) and L > tol.pt:
            if not _path_ok(cx, cr, tol, -tol.pt * 10):
                continue
            interior = all(np.all(cx.ridges[r].frames[a].boundary.slack(cx.ridges[r].frames[a].subspace.to_local(y)) > tol.slack)
                           for t, r, (a, b), y in cr)
            if not interior:
                continue
        bps = [Breakpoint(r, fg, y, cx.to_ambient(fg[0], y) if cx.embedded else None) for t, r, fg, y in cr]
        paths.append(GeodesicPath(L, seq, bps, ev.source_index))
    return paths


# --------------------------------------------------------------------------
# brute-force oracle


@dataclass(eq=False)
class SequenceOracle:
    """All facet sequences from the source facet admitting a straight unfolded ray.

    A sequence is kept if some ray from the source crosses the unfolded
    ridges in order, a linear feasibility question: with ``u`` a point of
    the first unfolded ridge (relative to the source), ``u`` must be a
    nonnegative combination of each later ridge's vertices with total
    weight non-increasing along the sequence.
    """

    complex: FacetComplex
    facet: int
    point: np.ndarray
    max_len: int
    tol: Tolerances
    by_last: dict[int, list[tuple[tuple[int, ...], AffineIsometry]]] = field(default_factory=dict)

    def build(self) -> "SequenceOracle":
        cx = self.complex
        self.by_last = {self.facet: [((self.facet,), AffineIsometry.identity(cx.dim))]}
        stack = [((self.facet,), AffineIsometry.identity(cx.dim), [])]
        while stack:
            seq, M, ridges = stack.pop()
            if len(seq) >= self.max_len:
                continue
            F = seq[-1]
            for r in cx.ridges_of(F):
                G = cx.neighbor(F, r)
                if G in seq:
                    continue
                V = M(cx.ridges[r].local[F]) - self.point
                chain = ridges + [V]
                if not self._feasible(chain):
                    continue
                M2 = M.compose(_fold(cx, G, F))
                s2 = seq + (G,)
                self.by_last.setdefault(G, []).append((s2, M2))
                stack.append((s2, M2, chain))
        return self

    def _feasible(self, chain: list[np.ndarray]) -> bool:
        d = self.complex.dim
        sizes = [len(V) for V in chain]
        nv = sum(sizes)
        k = len(chain)
        # equalities: sum_j a_1j V_1j = sum_j a_ij V_ij for i >= 2, sum a_1 = 1
        rows, rhs = [], []
        offs = np.cumsum([0] + sizes)
        for i in range(1, k):
            blk = np.zeros((d, nv))
            blk[:, offs[0]:offs[1]] = chain[0].T
            blk[:, offs[i]:offs[i + 1]] = -chain[i].T
            rows.append(blk)
            rhs.append(np.zeros(d))
        first = np.zeros((1, nv))
        first[0, offs[0]:offs[1]] = 1.0
        rows.append(first)
        rhs.append(np.ones(1))
        A_eq = np.vstack(rows)
        b_eq = np.concatenate(rhs)
        ub_rows = []
        for i in range(1, k):
            row = np.zeros(nv)
            row[offs[i]:offs[i + 1]] = 1.0
            row[offs[i - 1]:offs[i]] -= 1.0
            ub_rows.append(row)
        A_ub = np.array(ub_rows) if ub_rows else None
        b_ub = np.full(len(ub_rows), 1e-9) if ub_rows else None
        res = linprog(np.zeros(nv), A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
                      bounds=[(0, None)] * nv, method="highs")
        return res.status == 0

    def distance(self, w) -> tuple[float, tuple[int, ...]]:
        cx, tol = self.complex, self.tol
        F, x = _target(cx, w, tol)
        best, best_seq = np.inf, None
        for seq, M in self.by_last.get(F, []):
            end = M(x)
            L = float(np.linalg.norm(end - self.point))
            if L >= best:
                continue
            if len(seq) > 1:
                cr = _crossings(cx, seq, self.point, end, tol)
                if cr is None or not _path_ok(cx, cr, tol, -1e-9 * (1 + L)):
                    continue
            best, best_seq = L, seq
        if best_seq is None:
            raise NoPathFound("no valid facet sequence within the length bound")
        return best, best_seq


def _fold(cx: FacetComplex, G: int, F: int) -> AffineIsometry:
    from .folding import folding_map

    return folding_map(cx, G, F)


_oracle_cache: dict = {}


def sequence_oracle(cx: FacetComplex, v, max_len: int | None = None, tol: Tolerances | None = None) -> SequenceOracle:
    tol = resolve(tol)
    F, x, tight = classify_source(cx, v[0], v[1], tol)
    if len(tight) >= 2:
        raise SourceOnWarpedFace("source lies on a face of dimension <= d-2")
    max_len = cx.n_facets if max_len is None else int(max_len)
    key = (id(cx), F, tuple(np.round(x, 15)), max_len)
    orc = _oracle_cache.get(key)
    if orc is None or orc.complex is not cx:
        orc = SequenceOracle(cx, F, x, max_len, tol).build()
        if len(_oracle_cache) > 64:
            _oracle_cache.clear()
        _oracle_cache[key] = orc
    return orc


def brute_force_distance(cx: FacetComplex, v, w, max_len: int | None = None, tol: Tolerances | None = None):
    """Shortest unfolded straight segment over repetition-free facet sequences.

    Returns ``(distance, facet_sequence)``.
    """
    return sequence_oracle(cx, v, max_len, tol).distance(w)


# --------------------------------------------------------------------------
# geodesic Voronoi diagrams


@dataclass
class VoronoiCell:
    facet: int
    source_index: int
    vertices: np.ndarray       # chart of ``facet``
    polytope: HPolytope

    def volume(self) -> float:
        return polytope_volume(self.vertices, self.polytope.dim)


@dataclass
class GeodesicVoronoiDiagram:
    sources: list[tuple[int, np.ndarray]]
    cells: list[VoronoiCell]
    run: UnfoldResult

    def region_volume(self, i: int) -> float:
        return float(sum(c.volume() for c in self.cells if c.source_index == i))

    def label(self, w) -> int:
        """Source index of the nearest source image to ``w``."""
        res = self.run
        F, x = _target(res.complex, w, res.tol)
        Y = res.images[F]
        i = int(np.argmin(np.linalg.norm(Y - x, axis=1)))
        return res.events[res.event_ids[F][i]].source_index


def geodesic_voronoi(cx: FacetComplex, sources: Sequence, tol: Tolerances | None = None,
                     max_events: int = 1_000_000) -> GeodesicVoronoiDiagram:
    """Partition of the surface by nearest source under the intrinsic metric."""
    tol = resolve(tol)
    srcs = []
    for facet, point in sources:
        F, x, tight = classify_source(cx, facet, point, tol)
        if len(tight) >= 2:
            raise SourceOnWarpedFace("source lies on a face of dimension <= d-2")
        srcs.append((F, x))
    for a in range(len(srcs)):
        for b in range(a):
            if srcs[a][0] == srcs[b][0] and np.linalg.norm(srcs[a][1] - srcs[b][1]) <= tol.pt:
                raise DuplicateSources("two sources coincide")
    res = run_multi_source(cx, srcs, tol, max_events)
    cells = []
    for F in range(cx.n_facets):
        Y = res.images[F]
        for i in range(len(Y)):
            c = restricted_voronoi_cell(cx, F, Y, i, tol)
            if not chebyshev_center(c.cell)[1] >= tol.slack:
                continue
            k = res.events[res.event_ids[F][i]].source_index
            cells.append(VoronoiCell(F, k, enumerate_vertices(c.cell, tol), c.cell))
    return GeodesicVoronoiDiagram(srcs, cells, res)
