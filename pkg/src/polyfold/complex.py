"""Facet/ridge complexes: boundaries of convex polytopes and glued pseudomanifolds."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Hashable, NamedTuple, Sequence

import numpy as np
from scipy.optimize import linprog

from .config import Tolerances, resolve
from .errors import (
    DegenerateInput,
    GluingMismatch,
    InputError,
    NonPositiveCurvature,
    NotPseudomanifold,
    NumericFailure,
    UnboundedInput,
)
from .geometry import (
    AffineSubspace,
    HPolytope,
    affine_rank,
    chebyshev_center,
    enumerate_vertices,
    gram_schmidt,
    polytope_volume,
)


@dataclass(frozen=True, eq=False)
class Chart:
    """Isometric coordinates on a facet's affine hull.

    ``origin``/``basis`` are ``None`` for abstract facets, whose input
    coordinates already are the chart.
    """

    facet_id: int
    origin: np.ndarray | None
    basis: np.ndarray | None

    def to_chart(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.origin is None:
            return x
        return (x - self.origin) @ self.basis

    def to_ambient(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if self.origin is None:
            return y
        return self.origin + y @ self.basis.T


@dataclass(eq=False)
class Facet:
    index: int
    name: str
    polytope: HPolytope
    chart: Chart
    vertices: np.ndarray          # chart coordinates, one row per local vertex
    vertex_ids: tuple[int, ...]   # global vertex ids of the local vertices
    ridge_rows: dict[int, int] = field(default_factory=dict)  # ridge index -> polytope row


class RidgeFrame(NamedTuple):
    """A ridge seen from one incident facet's chart."""

    subspace: AffineSubspace  # ridge hyperplane, local coordinates of dim d-1
    normal: np.ndarray        # unit normal pointing into the facet
    offset: float             # normal . y - offset is the signed distance into the facet
    boundary: HPolytope       # the ridge as a polytope in local coordinates


@dataclass(eq=False)
class Ridge:
    index: int
    facets: tuple[int, int]
    vertex_ids: tuple[int, ...]
    local: dict[int, np.ndarray]   # facet index -> chart coordinates of the ridge vertices
    frames: dict[int, RidgeFrame] = field(default_factory=dict)

    def other(self, f: int) -> int:
        a, b = self.facets
        return b if f == a else a


@dataclass(eq=False)
class FacetComplex:
    dim: int
    facets: list[Facet]
    ridges: list[Ridge]
    skeleton: dict[int, list[frozenset[int]]]
    ambient_vertices: np.ndarray | None = None
    tol: Tolerances = field(default_factory=lambda: resolve(None))

    def __post_init__(self):
        self._pair = {}
        for r in self.ridges:
            a, b = r.facets
            self._pair[(a, b)] = r.index
            self._pair[(b, a)] = r.index
        self._names = {f.name: f.index for f in self.facets}

    @property
    def embedded(self) -> bool:
        return self.ambient_vertices is not None

    @property
    def n_facets(self) -> int:
        return len(self.facets)

    def facet_index(self, key: Hashable) -> int:
        if isinstance(key, (int, np.integer)) and 0 <= int(key) < len(self.facets):
            return int(key)
        if key in self._names:
            return self._names[key]
        if isinstance(key, str) and key.isdigit() and int(key) < len(self.facets):
            return int(key)
        raise KeyError(f"unknown facet {key!r}")

    def ridge_between(self, f: int, g: int) -> int | None:
        return self._pair.get((f, g))

    def ridges_of(self, f: int) -> list[int]:
        return list(self.facets[f].ridge_rows)

    def neighbor(self, f: int, r: int) -> int:
        return self.ridges[r].other(f)

    def ridge_frame(self, f: int, r: int) -> RidgeFrame:
        return self.ridges[r].frames[f]

    def adjacency(self) -> dict[int, list[int]]:
        return {f.index: [self.neighbor(f.index, r) for r in f.ridge_rows] for f in self.facets}

    def facet_volume(self, f: int) -> float:
        return polytope_volume(self.facets[f].vertices, self.dim)

    def surface_volume(self) -> float:
        return float(sum(self.facet_volume(f.index) for f in self.facets))

    def warped_faces(self) -> list[frozenset[int]]:
        return [face for k in sorted(self.skeleton) for face in self.skeleton[k]]

    def to_ambient(self, f: int, y) -> np.ndarray:
        return self.facets[f].chart.to_ambient(y)

    def locate(self, x, tol: float | None = None) -> list[int]:
        """Facets containing the ambient point ``x`` (embedded complexes only)."""
        if not self.embedded:
            raise InputError("locate needs an embedded complex")
        tol = self.tol.pt * 10 if tol is None else tol
        out = []
        for f in self.facets:
            y = f.chart.to_chart(x)
            if np.linalg.norm(f.chart.to_ambient(y) - x) <= tol and f.polytope.contains(y, tol):
                out.append(f.index)
        return out


# --------------------------------------------------------------------------
# construction helpers


def _ridge_frame(facet: Facet, ridge_pts: np.ndarray, row: int, tol: Tolerances) -> RidgeFrame:
    d = facet.polytope.dim
    a = facet.polytope.A[row]
    normal = -a
    point = ridge_pts[0]
    basis = gram_schmidt(ridge_pts[1:] - point, tol.rank, limit=d - 1)
    if basis.shape[1] != d - 1:
        raise NumericFailure("ridge vertices do not span a (d-1)-dimensional face")
    # make the ridge basis exactly orthogonal to the facet normal
    basis = basis - np.outer(normal, normal @ basis)
    basis, _ = np.linalg.qr(basis)
    sub = AffineSubspace(point, basis)
    others = [i for i in range(facet.polytope.n_halfspaces) if i != row]
    P = HPolytope(facet.polytope.A[others], facet.polytope.b[others], normalize=False)
    boundary = P.restrict(sub, tol.pt)
    return RidgeFrame(sub, normal, float(normal @ point), boundary)


def _faces_below(polytope: HPolytope, verts: np.ndarray, maxdim: int, tol: float) -> list[frozenset[int]]:
    """Faces of a polytope of dimension <= maxdim as sets of local vertex indices."""
    inc = np.abs(verts @ polytope.A.T - polytope.b) <= tol
    rows = [frozenset(np.flatnonzero(inc[:, i]).tolist()) for i in range(polytope.n_halfspaces)]
    d = polytope.dim
    # facets of the polytope, then iterate intersections
    current = {s for s in rows if affine_rank(verts[sorted(s)]) == d - 1}
    faces: set[frozenset[int]] = set()
    k = d - 1
    while k > 0 and current:
        nxt = set()
        for s in current:
            for t in rows:
                u = s & t
                if u and u != s and affine_rank(verts[sorted(u)]) == k - 1:
                    nxt.add(u)
        if k - 1 <= maxdim:
            faces |= nxt
        current = nxt
        k -= 1
    return sorted(faces, key=lambda s: (len(s), sorted(s)))


def _is_bounded(P: HPolytope) -> bool:
    m, n = P.A.shape
    if m <= n:
        return False
    if np.linalg.matrix_rank(P.A) < n:
        return False
    res = linprog(np.zeros(m), A_eq=P.A.T, b_eq=np.zeros(n), bounds=[(1.0, None)] * m, method="highs")
    return res.status == 0


def build_facet_complex(
    P: HPolytope, names: Sequence[str] | None = None, tol: Tolerances | None = None
) -> FacetComplex:
    """Boundary complex of a full-dimensional bounded polytope ``P`` in R^(d+1)."""
    tol = resolve(tol)
    n = P.dim
    d = n - 1
    if d < 1:
        raise InputError("need a polytope of dimension at least 2")
    if P.is_trivially_empty():
        raise DegenerateInput("empty input polytope")
    # drop duplicate halfspaces, keeping input order
    keep: list[int] = []
    for i in range(P.n_halfspaces):
        if any(np.allclose(P.A[i], P.A[j], atol=1e-12) and abs(P.b[i] - P.b[j]) <= 1e-12 for j in keep):
            continue
        keep.append(i)
    if names is not None and len(names) != P.n_halfspaces:
        raise InputError("one name per halfspace required")
    P = HPolytope(P.A[keep], P.b[keep], normalize=False)
    labels = [str(names[i]) if names is not None else str(k) for k, i in enumerate(keep)]
    if not _is_bounded(P):
        raise UnboundedInput("input polyhedron is unbounded")
    _, radius = chebyshev_center(P)
    if not radius >= tol.int:
        raise DegenerateInput(f"input polytope is not full-dimensional (inradius {radius:.3g})")
    X = enumerate_vertices(P, tol)
    if len(X) < n + 1 or affine_rank(X) < n:
        raise NumericFailure("vertex enumeration failed")
    X = X + 0.0
    scale = 1.0 + np.max(np.abs(X))
    inc = np.abs(X @ P.A.T - P.b) <= 1e-7 * scale

    facet_rows = [i for i in range(P.n_halfspaces) if affine_rank(X[inc[:, i]]) == d]
    vsets = {i: frozenset(np.flatnonzero(inc[:, i]).tolist()) for i in facet_rows}

    facets: list[Facet] = []
    for fi, i in enumerate(facet_rows):
        vids = tuple(sorted(vsets[i]))
        origin = X[vids[0]]
        basis = gram_schmidt(X[list(vids[1:])] - origin, tol.rank, limit=d)
        if basis.shape[1] != d:
            raise NumericFailure("facet chart construction failed")
        # exact orthogonality to the facet normal
        basis = basis - np.outer(P.A[i], P.A[i] @ basis)
        basis, _ = np.linalg.qr(basis)
        basis = basis * np.sign(np.diag(gram_schmidt(X[list(vids[1:])] - origin, tol.rank, limit=d).T @ basis))
        chart = Chart(fi, origin, basis + 0.0)
        facets.append(Facet(fi, labels[i], HPolytope(np.zeros((0, d)), np.zeros(0)), chart,
                            chart.to_chart(X[list(vids)]), vids))

    ridges: list[Ridge] = []
    for (fa, i), (fb, j) in itertools.combinations(enumerate(facet_rows), 2):
        common = vsets[i] & vsets[j]
        if len(common) >= d and affine_rank(X[sorted(common)]) == d - 1:
            vids = tuple(sorted(common))
            local = {fa: facets[fa].chart.to_chart(X[list(vids)]), fb: facets[fb].chart.to_chart(X[list(vids)])}
            ridges.append(Ridge(len(ridges), (fa, fb), vids, local))

    # chart polytopes: one row per ridge
    for f in facets:
        i = facet_rows[f.index]
        sub = AffineSubspace(f.chart.origin, f.chart.basis)
        rows_A, rows_b = [], []
        for r in ridges:
            if f.index not in r.facets:
                continue
            g = r.other(f.index)
            j = facet_rows[g]
            loc = HPolytope(P.A[[j]], P.b[[j]], normalize=False).restrict(sub, tol.pt)
            if loc.n_halfspaces != 1 or loc.is_trivially_empty():
                raise NumericFailure("ridge constraint degenerate in facet chart")
            f.ridge_rows[r.index] = len(rows_b)
            rows_A.append(loc.A[0])
            rows_b.append(loc.b[0])
        f.polytope = HPolytope(np.array(rows_A), np.array(rows_b))
    for r in ridges:
        for f in r.facets:
            r.frames[f] = _ridge_frame(facets[f], r.local[f], facets[f].ridge_rows[r.index], tol)

    skeleton = _skeleton(facets, d, tol)
    cx = FacetComplex(d, facets, ridges, skeleton, X, tol)
    _check_ridge_degree(cx)
    return cx


def _skeleton(facets: list[Facet], d: int, tol: Tolerances) -> dict[int, list[frozenset[int]]]:
    faces: dict[int, set[frozenset[int]]] = {}
    for f in facets:
        for s in _faces_below(f.polytope, f.vertices, d - 2, 1e-7 * (1 + np.max(np.abs(f.vertices)))):
            glob = frozenset(f.vertex_ids[k] for k in s)
            k = affine_rank(f.vertices[sorted(s)])
            faces.setdefault(k, set()).add(glob)
    return {k: sorted(v, key=lambda s: sorted(s)) for k, v in sorted(faces.items())}


def _check_ridge_degree(cx: FacetComplex) -> None:
    for f in cx.facets:
        if len(f.ridge_rows) != f.polytope.n_halfspaces:
            raise NotPseudomanifold(f"facet {f.name} has an unglued ridge")


# --------------------------------------------------------------------------
# abstract (glued) complexes


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _interior_angle(verts: np.ndarray, k: int, poly: HPolytope, tol: float) -> float:
    """Angle of a convex polygon at local vertex ``k``."""
    v = verts[k]
    nbrs = []
    for i in range(poly.n_halfspaces):
        if abs(poly.A[i] @ v - poly.b[i]) <= tol:
            on = [j for j in range(len(verts)) if j != k and abs(poly.A[i] @ verts[j] - poly.b[i]) <= tol]
            if on:
                # nearest vertex along that edge
                j = min(on, key=lambda j: np.linalg.norm(verts[j] - v))
                nbrs.append(verts[j] - v)
    if len(nbrs) != 2:
        raise GluingMismatch("polygon vertex does not have two incident edges")
    a, b = nbrs
    c = float(a @ b / (np.linalg.norm(a) * np.linalg.norm(b)))
    return math.acos(max(-1.0, min(1.0, c)))


def build_abstract_complex(
    facets: Sequence[tuple[Hashable, HPolytope, np.ndarray]],
    gluings: Sequence[tuple[tuple[Hashable, Sequence[int]], tuple[Hashable, Sequence[int]]]],
    tol: Tolerances | None = None,
    check_curvature: bool = True,
) -> FacetComplex:
    """Complex from facet polytopes in their own charts plus ridge gluings.

    ``facets`` holds ``(id, polytope, vertices)``; each gluing pairs a ridge
    of one facet (listed by local vertex indices) with a ridge of another,
    vertex by vertex.
    """
    tol = resolve(tol)
    if not facets:
        raise InputError("no facets")
    d = facets[0][1].dim
    ids = [fid for fid, _, _ in facets]
    if len(set(map(str, ids))) != len(ids):
        raise InputError("duplicate facet ids")
    index = {fid: k for k, fid in enumerate(ids)}
    index.update({str(fid): k for k, fid in enumerate(ids)})
    out_facets: list[Facet] = []
    for k, (fid, poly, verts) in enumerate(facets):
        verts = np.asarray(verts, dtype=float).reshape(-1, d)
        if poly.dim != d:
            raise InputError("all facets must have the same dimension")
        if not np.all(poly.contains(verts, 1e-7)):
            raise InputError(f"facet {fid}: vertex outside its halfspaces")
        if affine_rank(verts) != d:
            raise DegenerateInput(f"facet {fid} is not full-dimensional in its chart")
        out_facets.append(Facet(k, str(fid), poly, Chart(k, None, None), verts, ()))

    uf = _UnionFind()
    used: dict[tuple[int, int], int] = {}
    ridges: list[Ridge] = []
    for (fa_id, va), (fb_id, vb) in gluings:
        try:
            fa, fb = index[fa_id], index[fb_id]
        except KeyError as exc:
            raise InputError(f"gluing names unknown facet {exc.args[0]!r}") from None
        va, vb = list(va), list(vb)
        if len(va) != len(vb) or len(va) < d:
            raise GluingMismatch("gluing lists must pair at least d vertices")
        rows = []
        for f, vl in ((fa, va), (fb, vb)):
            F = out_facets[f]
            P = F.verts_sub = F.vertices[vl]
            if affine_rank(P) != d - 1:
                raise GluingMismatch(f"facet {F.name}: glued vertices do not span a ridge")
            tight = [i for i in range(F.polytope.n_halfspaces)
                     if np.all(np.abs(P @ F.polytope.A[i] - F.polytope.b[i]) <= 1e-7)]
            if len(tight) != 1:
                raise GluingMismatch(f"facet {F.name}: glued vertices are not a ridge")
            rows.append(tight[0])
        for f, row in ((fa, rows[0]), (fb, rows[1])):
            if (f, row) in used:
                raise NotPseudomanifold(f"ridge of facet {out_facets[f].name} glued more than once")
        Pa, Pb = out_facets[fa].vertices[va], out_facets[fb].vertices[vb]
        Da = np.linalg.norm(Pa[:, None] - Pa[None], axis=-1)
        Db = np.linalg.norm(Pb[:, None] - Pb[None], axis=-1)
        if np.max(np.abs(Da - Db)) > tol.pt * 10 * (1 + np.max(Da)):
            raise GluingMismatch(f"ridge copies of {out_facets[fa].name}/{out_facets[fb].name} are not congruent")
        if fa == fb:
            raise NotPseudomanifold("a facet glued to itself")
        r = len(ridges)
        used[(fa, rows[0])] = r
        used[(fb, rows[1])] = r
        for x, y in zip(va, vb):
            uf.union((fa, x), (fb, y))
        ridges.append(Ridge(r, (fa, fb), (), {fa: Pa, fb: Pb}))
        out_facets[fa].ridge_rows[r] = rows[0]
        out_facets[fb].ridge_rows[r] = rows[1]

    for F in out_facets:
        if hasattr(F, "verts_sub"):
            del F.verts_sub
        if len(F.ridge_rows) != F.polytope.n_halfspaces:
            raise NotPseudomanifold(f"facet {F.name} has an unglued ridge")
        # every vertex must be the endpoint of exactly the listed ridge rows
    roots: dict = {}
    for F in out_facets:
        vids = []
        for j in range(len(F.vertices)):
            root = uf.find((F.index, j))
            vids.append(roots.setdefault(root, len(roots)))
        F.vertex_ids = tuple(vids)
    for R in ridges:
        fa, fb = R.facets
        Pa = R.local[fa]
        ids_a = []
        for p in Pa:
            j = int(np.argmin(np.linalg.norm(out_facets[fa].vertices - p, axis=1)))
            ids_a.append(out_facets[fa].vertex_ids[j])
        R.vertex_ids = tuple(ids_a)
        for f in R.facets:
            R.frames[f] = _ridge_frame(out_facets[f], R.local[f], out_facets[f].ridge_rows[R.index], tol)

    if d == 2 and check_curvature:
        total: dict[int, float] = {}
        for F in out_facets:
            for j, gid in enumerate(F.vertex_ids):
                total[gid] = total.get(gid, 0.0) + _interior_angle(F.vertices, j, F.polytope, 1e-7)
        for gid, ang in total.items():
            if ang >= 2 * math.pi - 1e-9:
                raise NonPositiveCurvature(f"vertex {gid} has total angle {ang:.6f} >= 2*pi")
    skeleton = _skeleton(out_facets, d, tol)
    return FacetComplex(d, out_facets, ridges, skeleton, None, tol)


# --------------------------------------------------------------------------
# standard shapes


def box_polytope(lengths: Sequence[float]) -> tuple[HPolytope, list[str]]:
    """Axis-aligned box ``[0, l_1] x ... x [0, l_n]`` with conventional facet names.

    In three dimensions the names are bot/top (z), front/back (y) and
    left/right (x); otherwise ``lo<i>``/``hi<i>``.
    """
    L = np.asarray(lengths, dtype=float)
    n = len(L)
    A, b, names = [], [], []
    order = list(range(n))[::-1]
    labels3 = {2: ("bot", "top"), 1: ("front", "back"), 0: ("left", "right")}
    for axis in order:
        e = np.zeros(n)
        e[axis] = 1.0
        lo, hi = labels3[axis] if n == 3 else (f"lo{axis}", f"hi{axis}")
        A += [-e, e]
        b += [0.0, L[axis]]
        names += [lo, hi]
    return HPolytope(np.array(A), np.array(b)), names


def cube() -> FacetComplex:
    P, names = box_polytope([1, 1, 1])
    return build_facet_complex(P, names)


def hypercube(n: int = 4) -> FacetComplex:
    P, names = box_polytope([1] * n)
    return build_facet_complex(P, names)


def hpolytope_from_points(points) -> HPolytope:
    """H-representation of the convex hull of a point cloud (coplanar hull facets merged)."""
    from scipy.spatial import ConvexHull

    pts = np.asarray(points, dtype=float)
    hull = ConvexHull(pts)
    rows: list[np.ndarray] = []
    for eq in hull.equations:
        eq = eq / np.linalg.norm(eq[:-1])
        if not any(np.allclose(eq, r, atol=1e-9) for r in rows):
            rows.append(eq)
    E = np.array(rows)
    return HPolytope(E[:, :-1], -E[:, -1])


def regular_tetrahedron() -> HPolytope:
    pts = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float)
    return hpolytope_from_points(pts)


def random_hull(n_points: int, seed: int, dim: int = 3) -> HPolytope:
    """Hull of points drawn uniformly from the unit sphere."""
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(n_points, dim))
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    return hpolytope_from_points(pts)
