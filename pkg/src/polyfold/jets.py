"""Jet frames, iterated tangent cones and angle sequences.

A jet frame is an ``(r, d)`` array of orthonormal rows ``zeta_1..zeta_r``;
the curve ``x + eps * J(eps)`` with
``J(eps) = sum eps^k zeta_k / sqrt(sum eps^2k)`` enters the relative
interior of the polyhedron for small ``eps > 0``.  Everything here is
decided from active constraints and dot products; ``eps`` never enters a
predicate.
"""
from __future__ import annotations

import enum

import numpy as np
from scipy.optimize import linprog

from .config import Tolerances, resolve
from .errors import NotAJetFrame, NotOuterSupport, TooManyTies
from .geometry import Cone, HPolytope, cone_decomposition, strict_interior_point

MAX_FRAMES = 64


class Ordering(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def jet_direction(frame: np.ndarray, eps: float) -> np.ndarray:
    """Unit vector ``J(eps)`` (zero for the empty frame)."""
    frame = np.atleast_2d(frame)
    r = len(frame)
    if r == 0 or frame.size == 0:
        return np.zeros(frame.shape[1] if frame.ndim == 2 else 0)
    w = eps ** np.arange(1, r + 1)
    return (w @ frame) / np.sqrt(np.sum(w * w))


def jet_point(x, frame: np.ndarray, eps: float) -> np.ndarray:
    return np.asarray(x, dtype=float) + eps * jet_direction(frame, eps)


def angle_sequence(nu, frame) -> np.ndarray:
    """Entries ``-nu . zeta_k`` in order."""
    frame = np.asarray(frame, dtype=float)
    if frame.size == 0:
        return np.zeros(0)
    return -(np.atleast_2d(frame) @ np.asarray(nu, dtype=float))


def compare_angle_sequences(a, b, tol: Tolerances | float | None = None) -> Ordering:
    """Lexicographic comparison after zero padding; entries within ``tol.ang`` tie."""
    eps = tol if isinstance(tol, float) else resolve(tol).ang
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    n = max(len(a), len(b))
    a = np.pad(a, (0, n - len(a)))
    b = np.pad(b, (0, n - len(b)))
    for x, y in zip(a, b):
        if x < y - eps:
            return Ordering.LESS
        if x > y + eps:
            return Ordering.GREATER
    return Ordering.EQUAL


def _active_rows(V: HPolytope, x: np.ndarray, tol: Tolerances) -> np.ndarray:
    scale = 1.0 + np.linalg.norm(x)
    return np.abs(V.b - V.A @ x) <= 10 * tol.pt * scale


def _check_frame(frame: np.ndarray, d: int) -> np.ndarray:
    frame = np.asarray(frame, dtype=float).reshape(-1, d)
    if len(frame) and np.max(np.abs(frame @ frame.T - np.eye(len(frame)))) > 1e-10:
        raise NotAJetFrame("frame vectors are not orthonormal")
    return frame


def _surviving_rows(A_act: np.ndarray, frame: np.ndarray, tol: Tolerances) -> np.ndarray:
    """Active rows that stay active along the jet; raises if the jet leaves the set."""
    keep = np.ones(len(A_act), dtype=bool)
    for z in frame:
        vals = A_act @ z
        out = keep & (vals > tol.ang)
        if np.any(out):
            raise NotAJetFrame("curve leaves the polyhedron")
        keep &= np.abs(vals) <= tol.ang
    return keep


def iterated_tangent_cone(V: HPolytope, x, frame=(), tol: Tolerances | None = None) -> Cone:
    """Tangent cone at ``x + eps J(eps)`` of the slice orthogonal to the frame."""
    tol = resolve(tol)
    x = np.asarray(x, dtype=float)
    d = V.dim
    frame = _check_frame(frame, d)
    if not V.contains(x, 10 * tol.pt * (1 + np.linalg.norm(x))):
        raise NotAJetFrame("base point outside the polyhedron")
    A_act = V.A[_active_rows(V, x, tol)]
    keep = _surviving_rows(A_act, frame, tol)
    return Cone(d, A_act[keep], frame if len(frame) else None)


def implicit_equalities(V: HPolytope, tol: Tolerances | None = None) -> np.ndarray:
    """Mask of rows that hold with equality on all of ``V``."""
    tol = resolve(tol)
    ip = strict_interior_point(V, None, tol)
    if ip is None:
        return np.ones(V.n_halfspaces, dtype=bool)
    return np.abs(V.b - V.A @ ip.point) <= 10 * tol.pt * (1 + np.linalg.norm(ip.point))


def is_jet_frame(V: HPolytope, x, frame, tol: Tolerances | None = None, partial: bool = False) -> bool:
    tol = resolve(tol)
    x = np.asarray(x, dtype=float)
    try:
        frame = _check_frame(frame, V.dim)
        act = _active_rows(V, x, tol)
        keep = _surviving_rows(V.A[act], frame, tol)
    except NotAJetFrame:
        return False
    if partial:
        return True
    eq = implicit_equalities(V, tol)[act]
    return bool(np.all(~keep | eq))


def _max_support(V: HPolytope, nu: np.ndarray) -> float:
    if V.n_halfspaces == 0:
        return np.inf if np.any(nu) else 0.0
    res = linprog(-nu, A_ub=V.A, b_ub=V.b, bounds=[(None, None)] * V.dim, method="highs")
    if res.status == 3:
        return np.inf
    if res.status != 0:
        return -np.inf
    return float(-res.fun)


def minimal_jet_frame(V: HPolytope, x, nu, tol: Tolerances | None = None) -> np.ndarray:
    """A jet frame at ``x`` along ``V`` with lexicographically minimal angle sequence."""
    tol = resolve(tol)
    x = np.asarray(x, dtype=float)
    nu = np.asarray(nu, dtype=float)
    d = V.dim
    scale = max(1.0, float(np.linalg.norm(nu)))
    top = _max_support(V, nu)
    if not top - nu @ x <= tol.ang * scale * (1 + np.linalg.norm(x)) + 10 * tol.pt * scale:
        raise NotOuterSupport("vector is not an outer support vector at the point")
    if d == 0:
        return np.zeros((0, 0))
    A_act = V.A[_active_rows(V, x, tol)]
    finished: list[np.ndarray] = []
    frontier: list[np.ndarray] = [np.zeros((0, d))]
    while frontier:
        nxt: list[np.ndarray] = []
        for frame in frontier:
            keep = _surviving_rows(A_act, frame, tol)
            cone = Cone(d, A_act[keep], frame if len(frame) else None)
            dec = cone_decomposition(cone, tol)
            if dec.lineality.shape[1]:
                # nu is orthogonal to the lineality space of a supported cone
                nxt.append(np.vstack([frame, dec.lineality[:, 0]]))
                continue
            if len(dec.rays) == 0:
                finished.append(frame)
                continue
            vals = dec.rays @ nu
            best = float(np.max(vals))
            if best >= -tol.ang * scale:
                k = int(np.flatnonzero(vals >= -tol.ang * scale)[0])
                nxt.append(np.vstack([frame, dec.rays[k]]))
            else:
                for k in np.flatnonzero(vals >= best - tol.ang * scale):
                    nxt.append(np.vstack([frame, dec.rays[k]]))
        if len(nxt) + len(finished) > MAX_FRAMES:
            raise TooManyTies(f"more than {MAX_FRAMES} tied jet frames")
        frontier = nxt
    best_frame = finished[0]
    best_seq = angle_sequence(nu, best_frame)
    for frame in finished[1:]:
        seq = angle_sequence(nu, frame)
        if compare_angle_sequences(seq, best_seq, tol) == Ordering.LESS:
            best_frame, best_seq = frame, seq
    return best_frame
