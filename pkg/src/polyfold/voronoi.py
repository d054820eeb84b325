"""Restricted Voronoi geometry inside a facet chart.

A facet's generators ``Y`` are rows of an array in that facet's chart.
Cells are kept in H-form: the facet's halfspaces followed by one
bisector halfspace per other generator.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .complex import FacetComplex, RidgeFrame
from .config import Tolerances, resolve
from .errors import EmptyIntersection, EmptyPolyhedron, InputError, NotAMember, NotARidgeOfF
from .geometry import (
    AffineSubspace,
    HPolytope,
    chebyshev_center,
    enumerate_vertices,
    max_min_slack,
    null_space,
    polytope_volume,
    project_onto_polyhedron,
)
from .jets import angle_sequence, minimal_jet_frame

SAME_SIDE = "ridge-through-facet"
OPPOSITE_SIDE = "facet-through-ridge"


def bisector(nu, other) -> tuple[np.ndarray, float]:
    """Halfspace ``a.x <= b`` of points weakly closer to ``nu`` than to ``other``."""
    nu = np.asarray(nu, dtype=float)
    other = np.asarray(other, dtype=float)
    diff = other - nu
    n = np.linalg.norm(diff)
    if n == 0:
        raise InputError("coincident generators")
    return diff / n, float((other @ other - nu @ nu) / (2 * n))


def _bisectors(Y: np.ndarray, i: int, tol: Tolerances) -> tuple[np.ndarray, np.ndarray]:
    nu = Y[i]
    others = np.delete(Y, i, axis=0)
    diff = others - nu
    n = np.linalg.norm(diff, axis=1)
    keep = n > tol.pt
    diff, n, others = diff[keep], n[keep], others[keep]
    A = diff / n[:, None]
    b = (np.einsum("ij,ij->i", others, others) - nu @ nu) / (2 * n)
    return A, b


def member_index(Y: np.ndarray, nu, tol: Tolerances | None = None) -> int:
    if isinstance(nu, (int, np.integer)):
        if not 0 <= nu < len(Y):
            raise NotAMember(f"generator index {nu} out of range")
        return int(nu)
    tol = resolve(tol)
    nu = np.asarray(nu, dtype=float)
    if len(Y) == 0:
        raise NotAMember("empty generator set")
    dist = np.linalg.norm(Y - nu, axis=1)
    j = int(np.argmin(dist))
    if dist[j] > tol.pt * (1 + np.linalg.norm(nu)):
        raise NotAMember("point is not one of the generators")
    return j


@dataclass(frozen=True, eq=False)
class CutCell:
    facet: int
    owner: np.ndarray
    generators: np.ndarray
    cell: HPolytope
    n_facet_rows: int

    def inradius(self) -> float:
        return chebyshev_center(self.cell)[1]

    def is_empty(self, tol: Tolerances | None = None) -> bool:
        """Treats slivers thinner than ``tol.slack`` as empty."""
        return not self.inradius() >= resolve(tol).slack

    def vertices(self, tol: Tolerances | None = None) -> np.ndarray:
        return enumerate_vertices(self.cell, tol)

    def volume(self, tol: Tolerances | None = None) -> float:
        if self.is_empty(tol):
            return 0.0
        return polytope_volume(self.vertices(tol), self.cell.dim)


def restricted_voronoi_cell(cx: FacetComplex, F: int, Y, nu, tol: Tolerances | None = None) -> CutCell:
    """Cell of generator ``nu`` among ``Y`` intersected with facet ``F``."""
    tol = resolve(tol)
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    i = member_index(Y, nu, tol)
    P = cx.facets[F].polytope
    A, b = _bisectors(Y, i, tol)
    cell = HPolytope(np.vstack([P.A, A]), np.concatenate([P.b, b]), normalize=False)
    return CutCell(F, Y[i].copy(), Y, cell, P.n_halfspaces)


class Window(NamedTuple):
    """``R ∩ cell`` in ridge-local coordinates.

    The ridge rows must hold strictly for a point interior to ``R``;
    bisector rows are weak because Voronoi cells are closed.
    """

    frame: RidgeFrame
    A_ridge: np.ndarray
    b_ridge: np.ndarray
    A_bis: np.ndarray
    b_bis: np.ndarray
    empty: bool

    def polytope(self) -> HPolytope:
        if self.empty:
            d = self.frame.subspace.dim
            return HPolytope(np.zeros((1, d)), np.array([-1.0]), normalize=False)
        return HPolytope(np.vstack([self.A_ridge, self.A_bis]), np.concatenate([self.b_ridge, self.b_bis]), normalize=False)


def _check_ridge(cx: FacetComplex, F: int, R: int) -> RidgeFrame:
    if R < 0 or R >= len(cx.ridges) or F not in cx.ridges[R].facets:
        raise NotARidgeOfF(f"ridge {R} is not a ridge of facet {cx.facets[F].name}")
    return cx.ridges[R].frames[F]


def ridge_window(cx: FacetComplex, F: int, Y: np.ndarray, i: int, R: int, tol: Tolerances) -> Window:
    frame = _check_ridge(cx, F, R)
    sub = frame.subspace
    Aw, bw = _bisectors(Y, i, tol)
    A = Aw @ sub.basis
    b = bw - Aw @ sub.point
    nrm = np.linalg.norm(A, axis=1)
    par = nrm < 1e-12
    empty = bool(np.any(par & (b < -tol.pt)))
    A = A[~par] / nrm[~par, None]
    b = b[~par] / nrm[~par]
    B = frame.boundary
    return Window(frame, B.A, B.b, A, b, empty)


def _side(frame: RidgeFrame, w: np.ndarray) -> float:
    return float(frame.normal @ w - frame.offset)


def window_slack(win: Window) -> float:
    """Largest margin by which a point of the window stays inside the open ridge."""
    if win.empty:
        return -np.inf
    k = win.frame.subspace.dim
    if k == 0:
        return np.inf
    out = max_min_slack(win.A_ridge, win.b_ridge, win.A_bis, win.b_bis)
    if out is None:
        return -np.inf
    return out[1]


def can_see(
    cx: FacetComplex, F: int, Y, omega, R: int, mode: str = SAME_SIDE, tol: Tolerances | None = None
) -> bool:
    """Visibility of ridge ``R`` from generator ``omega`` within the diagram of ``Y`` on ``F``.

    ``mode`` is ``"ridge-through-facet"`` (``omega`` on the facet's side of
    the ridge) or ``"facet-through-ridge"`` (``omega`` on the other side).
    """
    tol = resolve(tol)
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    i = member_index(Y, omega, tol)
    frame = _check_ridge(cx, F, R)
    s = _side(frame, Y[i])
    if mode == SAME_SIDE:
        if not s > tol.pt:
            return False
    elif mode == OPPOSITE_SIDE:
        if not s < -tol.pt:
            return False
    else:
        raise ValueError(f"unknown visibility mode {mode!r}")
    return window_slack(ridge_window(cx, F, Y, i, R, tol)) > tol.slack


class RidgeQuery(NamedTuple):
    radius: float
    point: np.ndarray        # closest point in chart coordinates
    window: HPolytope        # closed window in ridge-local coordinates
    local_point: np.ndarray  # closest point in ridge-local coordinates
    support: np.ndarray      # outer support vector in ridge-local coordinates


def ridge_query(cx: FacetComplex, F: int, Y: np.ndarray, i: int, R: int, tol: Tolerances) -> RidgeQuery:
    win = ridge_window(cx, F, Y, i, R, tol)
    if win.empty:
        raise EmptyIntersection("ridge window is empty")
    frame = win.frame
    W = win.polytope()
    w = Y[i]
    wl = frame.subspace.to_local(w)
    h = _side(frame, w)
    try:
        ql, dist = project_onto_polyhedron(wl, W, None, tol)
    except EmptyPolyhedron:
        raise EmptyIntersection("ridge window is empty") from None
    rho = frame.subspace.to_global(ql)
    r = float(np.hypot(h, dist))
    return RidgeQuery(r, rho, W, ql, wl - ql)


def ridge_radius(cx: FacetComplex, F: int, Y, omega, R: int, tol: Tolerances | None = None) -> tuple[float, np.ndarray]:
    """Distance from ``omega`` to ``R ∩ cell`` and the closest point."""
    tol = resolve(tol)
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    q = ridge_query(cx, F, Y, member_index(Y, omega, tol), R, tol)
    return q.radius, q.point


def ridge_angle_sequence(query: RidgeQuery, tol: Tolerances | None = None) -> np.ndarray:
    """Angle sequence of a minimal jet frame at the closest point along ``R ∩ cell``."""
    tol = resolve(tol)
    frame = minimal_jet_frame(query.window, query.local_point, query.support, tol)
    return angle_sequence(query.support, frame)


def cut_cells(cx: FacetComplex, F: int, Y, tol: Tolerances | None = None) -> list[CutCell]:
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    return [restricted_voronoi_cell(cx, F, Y, i, tol) for i in range(len(Y))]


def cut_locus_in_facet(cx: FacetComplex, F: int, Y, tol: Tolerances | None = None) -> list[np.ndarray]:
    """Codimension-one pieces where two closed cut cells of ``F`` meet.

    Each piece is returned as its vertex array in the chart of ``F``.
    Cells of any dimension take part, so a lower-dimensional cell lying
    along a ridge contributes that ridge portion when another cell
    shares it.
    """
    tol = resolve(tol)
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    d = cx.dim
    cells = cut_cells(cx, F, Y, tol)
    alive = [j for j, c in enumerate(cells) if chebyshev_center(c.cell)[1] >= -tol.pt]
    pieces: list[np.ndarray] = []
    for i, j in itertools.combinations(alive, 2):
        a, b = bisector(Y[i], Y[j])
        H = AffineSubspace(a * b, null_space(a[None, :]))
        both = cells[i].cell.intersect(cells[j].cell)
        loc = both.restrict(H, tol.pt * 10)
        if loc.is_trivially_empty():
            continue
        if d - 1 == 0:
            if np.all(loc.b >= -tol.pt):
                pieces.append(H.point[None, :].copy())
            continue
        if not chebyshev_center(loc)[1] > tol.slack:
            continue
        V = enumerate_vertices(loc, tol)
        if len(V):
            pieces.append(H.to_global(V))
    return pieces
