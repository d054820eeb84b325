"""Polyhedral kernel: H-polytopes, affine subspaces, cones.

Halfspaces are stored as rows ``a . x <= b`` with unit normals.  All
routines are written for small fixed dimension (d <= 5 or so) and a few
dozen constraints; nothing here tries to be asymptotically clever.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, QhullError

from .config import Tolerances, resolve
from .errors import EmptyPolyhedron, NumericFailure

logger = logging.getLogger(__name__)


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


def null_space(M: np.ndarray, rtol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis (columns) of the null space of ``M``."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    n = M.shape[1]
    if M.shape[0] == 0:
        return np.eye(n)
    u, s, vt = np.linalg.svd(M)
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > rtol * max(1.0, smax)))
    return vt[rank:].T.copy()


def orth(M: np.ndarray, rtol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis (columns) of the column space of ``M``."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0:
        return np.zeros((M.shape[0], 0))
    u, s, _ = np.linalg.svd(M, full_matrices=False)
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > rtol * max(1.0, smax)))
    return u[:, :rank].copy()


def matrix_rank(M: np.ndarray, rtol: float = 1e-10) -> int:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s > rtol * max(1.0, s[0])))


def affine_rank(points: np.ndarray, tol: float = 1e-9) -> int:
    """Dimension of the affine hull of a point set (-1 for no points)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if len(points) == 0:
        return -1
    diffs = points[1:] - points[0]
    if len(diffs) == 0:
        return 0
    s = np.linalg.svd(diffs, compute_uv=False)
    return int(np.sum(s > tol))


def gram_schmidt(vectors: Iterable[np.ndarray], tol: float = 1e-10, limit: int | None = None) -> np.ndarray:
    """Ordered Gram-Schmidt; vectors dependent on earlier ones are skipped.

    Returns the orthonormal vectors as columns.
    """
    basis: list[np.ndarray] = []
    for v in vectors:
        w = np.array(v, dtype=float)
        for _ in range(2):  # second pass for stability
            for q in basis:
                w = w - (q @ w) * q
        nrm = np.linalg.norm(w)
        if nrm > tol * max(1.0, np.linalg.norm(v)):
            basis.append(w / nrm)
            if limit is not None and len(basis) == limit:
                break
    if not basis:
        n = len(np.atleast_1d(v)) if "v" in locals() else 0
        return np.zeros((n, 0))
    return np.array(basis).T


@dataclass(frozen=True, eq=False)
class AffineSubspace:
    """``{point + basis @ z}`` with orthonormal basis columns."""

    point: np.ndarray
    basis: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "point", _frozen(self.point))
        object.__setattr__(self, "basis", _frozen(np.reshape(self.basis, (len(self.point), -1))))

    @property
    def ambient_dim(self) -> int:
        return len(self.point)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @classmethod
    def whole(cls, n: int) -> "AffineSubspace":
        return cls(np.zeros(n), np.eye(n))

    @classmethod
    def from_equations(cls, E, f, rtol: float = 1e-10) -> "AffineSubspace":
        """The solution set of ``E x = f`` (assumed consistent)."""
        E = np.atleast_2d(np.asarray(E, dtype=float))
        f = np.atleast_1d(np.asarray(f, dtype=float))
        x0, *_ = np.linalg.lstsq(E, f, rcond=None)
        if np.linalg.norm(E @ x0 - f) > 1e-8 * max(1.0, np.linalg.norm(f)):
            raise EmptyPolyhedron("inconsistent affine equations")
        return cls(x0, null_space(E, rtol))

    def to_local(self, x) -> np.ndarray:
        return (np.asarray(x, dtype=float) - self.point) @ self.basis

    def to_global(self, z) -> np.ndarray:
        return self.point + np.asarray(z, dtype=float) @ self.basis.T

    def project(self, x) -> np.ndarray:
        return self.to_global(self.to_local(x))


@dataclass(frozen=True, eq=False)
class HPolytope:
    """Intersection of halfspaces ``A x <= b``.

    Rows are normalized to unit length on construction (unless
    ``normalize=False``).  A row with zero normal and negative offset is
    kept as an explicit marker of infeasibility.
    """

    A: np.ndarray
    b: np.ndarray
    normalize: bool = field(default=True, repr=False)

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        b = np.array(self.b, dtype=float).reshape(-1)
        if A.ndim == 1:
            A = A.reshape(len(b), -1) if len(b) else A.reshape(0, A.shape[0] if A.size else 0)
        if self.normalize and len(b):
            norms = np.linalg.norm(A, axis=1)
            zero = norms < 1e-14
            keep = ~zero | (b < -1e-12)
            A, b, norms, zero = A[keep], b[keep], norms[keep], zero[keep]
            scale = np.where(zero, 1.0, norms)
            A = A / scale[:, None]
            b = b / scale
        object.__setattr__(self, "A", _frozen(A))
        object.__setattr__(self, "b", _frozen(b))

    @property
    def dim(self) -> int:
        return self.A.shape[1]

    @property
    def n_halfspaces(self) -> int:
        return len(self.b)

    @classmethod
    def from_halfspaces(cls, halfspaces: Iterable[tuple[Sequence[float], float]]) -> "HPolytope":
        rows = list(halfspaces)
        A = np.array([r[0] for r in rows], dtype=float)
        b = np.array([r[1] for r in rows], dtype=float)
        return cls(A, b)

    @classmethod
    def box(cls, lo, hi) -> "HPolytope":
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        n = len(lo)
        A = np.vstack([-np.eye(n), np.eye(n)])
        return cls(A, np.concatenate([-lo, hi]))

    def halfspaces(self) -> list[tuple[np.ndarray, float]]:
        return [(self.A[i].copy(), float(self.b[i])) for i in range(len(self.b))]

    def slack(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.b - x @ self.A.T

    def contains(self, x, tol: float = 1e-9) -> np.ndarray | bool:
        s = self.slack(x)
        return np.all(s >= -tol, axis=-1)

    def is_trivially_empty(self) -> bool:
        return bool(np.any((np.linalg.norm(self.A, axis=1) < 1e-14) & (self.b < 0)))

    def intersect(self, other: "HPolytope") -> "HPolytope":
        return HPolytope(np.vstack([self.A, other.A]), np.concatenate([self.b, other.b]), normalize=False)

    def add_halfspaces(self, A, b) -> "HPolytope":
        return self.intersect(HPolytope(A, b))

    def restrict(self, sub: AffineSubspace, tol: float = 1e-9) -> "HPolytope":
        """Express ``self ∩ sub`` in the local coordinates of ``sub``.

        Constraints parallel to ``sub`` are dropped when satisfied on it
        (within ``tol``) and turned into an infeasibility marker otherwise.
        """
        A = self.A @ sub.basis
        b = self.b - self.A @ sub.point
        norms = np.linalg.norm(A, axis=1)
        parallel = norms < 1e-12
        bad = parallel & (b < -tol)
        keep = ~parallel
        A2, b2 = A[keep], b[keep]
        if np.any(bad):
            A2 = np.vstack([A2, np.zeros((1, sub.dim))])
            b2 = np.concatenate([b2, [-1.0]])
        return HPolytope(A2, b2)

    def transformed(self, linear: np.ndarray, translation: np.ndarray) -> "HPolytope":
        """Image under ``x -> linear @ x + translation`` (``linear`` orthogonal)."""
        A = self.A @ linear.T
        b = self.b + A @ translation
        return HPolytope(A, b, normalize=False)

    def vertices(self, tol: Tolerances | None = None) -> np.ndarray:
        return enumerate_vertices(self, tol)

    def chebyshev(self) -> tuple[np.ndarray | None, float]:
        return chebyshev_center(self)


class InteriorPoint(NamedTuple):
    point: np.ndarray
    slack: float
    dim: int


def _solve_lp(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, bounds=None):
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs")
    return res


def max_min_slack(
    A_strict: np.ndarray,
    b_strict: np.ndarray,
    A_weak: np.ndarray | None = None,
    b_weak: np.ndarray | None = None,
    A_eq: np.ndarray | None = None,
    b_eq: np.ndarray | None = None,
    cap: float = 1.0,
):
    """Maximize ``t`` subject to ``A_strict x + t <= b_strict``, ``A_weak x <= b_weak``.

    Returns ``(x, t, strict_marginals)`` or ``None`` when infeasible.
    ``t`` is capped at ``cap`` so bounded answers come back for unbounded
    sets too.
    """
    A_strict = np.asarray(A_strict, dtype=float)
    n = A_strict.shape[1] if A_strict.ndim == 2 and A_strict.size else (
        np.asarray(A_weak).shape[1] if A_weak is not None and np.size(A_weak) else np.asarray(A_eq).shape[1]
    )
    rows, rhs = [], []
    ms = len(b_strict)
    if ms:
        rows.append(np.hstack([A_strict, np.ones((ms, 1))]))
        rhs.append(np.asarray(b_strict, dtype=float))
    if A_weak is not None and len(b_weak):
        rows.append(np.hstack([np.asarray(A_weak, dtype=float), np.zeros((len(b_weak), 1))]))
        rhs.append(np.asarray(b_weak, dtype=float))
    A_ub = np.vstack(rows) if rows else None
    b_ub = np.concatenate(rhs) if rhs else None
    Aeq = beq = None
    if A_eq is not None and len(b_eq):
        Aeq = np.hstack([np.asarray(A_eq, dtype=float), np.zeros((len(b_eq), 1))])
        beq = np.asarray(b_eq, dtype=float)
    c = np.zeros(n + 1)
    c[-1] = -1.0
    bounds = [(None, None)] * n + [(None, cap)]
    res = _solve_lp(c, A_ub, b_ub, Aeq, beq, bounds)
    if res.status == 2:
        return None
    if res.status != 0:
        # unbounded in x is harmless; anything else is a solver failure
        raise NumericFailure(f"LP failed: {res.message}")
    marg = np.zeros(ms)
    if ms and res.ineqlin is not None:
        marg = -np.asarray(res.ineqlin.marginals[:ms])
    return res.x[:n], float(res.x[n]), marg


def chebyshev_center(P: HPolytope, cap: float = 1e6) -> tuple[np.ndarray | None, float]:
    """Center and radius of the largest inscribed ball (radius < 0: empty)."""
    if P.is_trivially_empty():
        return None, -np.inf
    if P.n_halfspaces == 0:
        return np.zeros(P.dim), np.inf
    out = max_min_slack(P.A, P.b, cap=cap)
    if out is None:
        return None, -np.inf
    x, t, _ = out
    return x, t


def strict_interior_point(
    V: HPolytope, A: AffineSubspace | None = None, tol: Tolerances | None = None
) -> InteriorPoint | None:
    """A point in the relative interior of ``A ∩ V`` maximizing the minimum slack.

    Implicit equalities are detected from the LP dual and removed from the
    slack objective, so lower-dimensional intersections (including single
    points) still return a point; ``dim`` reports the dimension of the
    intersection.  Returns ``None`` when ``A ∩ V`` is empty.
    """
    tol = resolve(tol)
    if A is None:
        A = AffineSubspace.whole(V.dim)
    Q = V.restrict(A, tol.pt)
    if Q.is_trivially_empty():
        return None
    k = Q.dim
    if k == 0:
        return InteriorPoint(A.point.copy(), np.inf, 0)
    eq = np.zeros(Q.n_halfspaces, dtype=bool)
    for _ in range(Q.n_halfspaces + 1):
        strict = ~eq
        out = max_min_slack(Q.A[strict], Q.b[strict], A_eq=Q.A[eq], b_eq=Q.b[eq])
        if out is None:
            return None
        z, t, marg = out
        if t < -tol.slack:
            return None
        if t > tol.slack or not np.any(strict):
            break
        new = np.zeros_like(eq)
        new[np.flatnonzero(strict)[marg > 1e-9]] = True
        if not np.any(new):
            # dual gave nothing usable; fall back to the tight rows at z
            new[np.flatnonzero(strict)[np.abs(Q.b[strict] - Q.A[strict] @ z) <= tol.slack]] = True
            if not np.any(new):
                break
        eq |= new
        if np.all(eq):
            out = max_min_slack(np.zeros((0, k)), np.zeros(0), A_eq=Q.A, b_eq=Q.b)
            if out is None:
                return None
            z = out[0]
            t = np.inf
            break
    dim = k - matrix_rank(Q.A[eq], tol.rank) if np.any(eq) else k
    return InteriorPoint(A.to_global(z), float(t), int(dim))


def enumerate_vertices(P: HPolytope, tol: Tolerances | None = None) -> np.ndarray:
    """Vertices of a bounded H-polytope by solving all n-subsets of constraints.

    Returned in colexicographic order (last coordinate most significant),
    duplicates merged within ``tol.pt``.
    """
    tol = resolve(tol)
    m, n = P.A.shape
    if P.is_trivially_empty() or m < n:
        return np.zeros((0, n))
    if n == 0:
        return np.zeros((1, 0))
    combos = np.array(list(itertools.combinations(range(m), n)), dtype=int)
    pts = []
    for chunk in np.array_split(combos, max(1, len(combos) // 20000 + 1)):
        As = P.A[chunk]
        bs = P.b[chunk]
        sv = np.linalg.svd(As, compute_uv=False)
        ok = sv[:, -1] > 1e-9
        if not np.any(ok):
            continue
        X = np.linalg.solve(As[ok], bs[ok][..., None])[..., 0]
        feas = np.all(X @ P.A.T <= P.b + tol.pt * (1.0 + np.abs(P.b)), axis=1)
        pts.append(X[feas])
    if not pts:
        return np.zeros((0, n))
    X = np.vstack(pts)
    return dedupe_points(X, tol.pt * 10)


def dedupe_points(X: np.ndarray, tol: float) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if len(X) == 0:
        return X.reshape(0, X.shape[-1] if X.ndim == 2 else 0)
    kept: list[np.ndarray] = []
    for x in X:
        if kept and np.min(np.linalg.norm(np.array(kept) - x, axis=1)) <= tol * (1.0 + np.linalg.norm(x)):
            continue
        kept.append(x)
    K = np.array(kept)
    order = np.lexsort(np.round(K, 8).T)
    return K[order]


def polytope_volume(vertices: np.ndarray, dim: int | None = None) -> float:
    """Volume of the convex hull of ``vertices`` in their ambient dimension."""
    V = np.atleast_2d(np.asarray(vertices, dtype=float))
    dim = V.shape[1] if dim is None else dim
    if len(V) <= dim:
        return 0.0
    if dim == 1:
        return float(V.max() - V.min())
    if affine_rank(V) < dim:
        return 0.0
    try:
        return float(ConvexHull(V).volume)
    except QhullError:
        return 0.0


def _project_gi(p: np.ndarray, A: np.ndarray, b: np.ndarray, feas_tol: float):
    """Dual active-set projection of ``p`` onto ``{A x <= b}``.

    Goldfarb-Idnani with identity Hessian: starts from the unconstrained
    minimizer ``p`` and adds violated constraints one at a time, dropping
    active ones whose multipliers would turn negative.
    """
    m, n = A.shape
    x = p.copy()
    active: list[int] = []
    u = np.zeros(0)
    N = -A  # constraint g_i(x) = b_i - a_i.x >= 0 has gradient -a_i
    for _ in range(50 * (m + n) + 100):
        g = b - A @ x
        q = int(np.argmin(g)) if m else -1
        if m == 0 or g[q] >= -feas_tol:
            return x, active, u
        if q in active:
            # numerically stuck: treat as converged if the violation is tiny
            if g[q] >= -1e3 * feas_tol:
                return x, active, u
            raise NumericFailure("projection cycling on an active constraint")
        u_plus = np.append(u, 0.0)
        while True:
            nq = N[q]
            if active:
                Na = N[active].T
                r, *_ = np.linalg.lstsq(Na, nq, rcond=None)
                z = nq - Na @ r
            else:
                r = np.zeros(0)
                z = nq.copy()
            t1, l = np.inf, -1
            pos = r > 1e-12
            if np.any(pos):
                ratios = np.full(len(r), np.inf)
                ratios[pos] = u_plus[:-1][pos] / r[pos]
                l = int(np.argmin(ratios))
                t1 = ratios[l]
            zz = z @ nq
            gq = b[q] - A[q] @ x
            t2 = -gq / zz if zz > 1e-14 else np.inf
            t = min(t1, t2)
            if not np.isfinite(t):
                raise EmptyPolyhedron("polyhedron is empty")
            if t2 == np.inf or t1 < t2:
                if np.isfinite(t2):
                    x = x + t * z
                u_plus[:-1] -= t * r
                u_plus[-1] += t
                del active[l]
                u_plus = np.delete(u_plus, l)
                continue
            x = x + t * z
            u_plus[:-1] -= t * r
            u_plus[-1] += t
            active.append(q)
            u = u_plus
            break
    raise NumericFailure("projection did not terminate")


def kkt_residual(p, V: HPolytope, q, active, multipliers) -> float:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    lam = np.zeros(V.n_halfspaces)
    if len(active):
        lam[list(active)] = multipliers
    stat = np.linalg.norm(q - p + V.A.T @ lam)
    prim = max(0.0, float(np.max(V.A @ q - V.b))) if V.n_halfspaces else 0.0
    dual = max(0.0, float(-np.min(lam))) if len(lam) else 0.0
    comp = float(np.max(np.abs(lam * (V.b - V.A @ q)))) if len(lam) else 0.0
    return max(stat, prim, dual, comp)


def project_onto_polyhedron(
    p, V: HPolytope, A: AffineSubspace | None = None, tol: Tolerances | None = None
) -> tuple[np.ndarray, float]:
    """Closest point ``q`` of ``V`` (optionally ``V ∩ A``) to ``p`` and its distance.

    Raises :class:`EmptyPolyhedron` when the feasible set is empty and
    :class:`NumericFailure` when the KKT residual exceeds ``tol.kkt``.
    """
    tol = resolve(tol)
    p = np.asarray(p, dtype=float)
    if A is not None:
        Q = V.restrict(A, tol.pt)
        pl = A.to_local(p)
        if Q.is_trivially_empty():
            raise EmptyPolyhedron("polyhedron is empty")
        z, _ = project_onto_polyhedron(pl, Q, None, tol)
        q = A.to_global(z)
        return q, float(np.linalg.norm(p - q))
    if V.is_trivially_empty():
        raise EmptyPolyhedron("polyhedron is empty")
    scale = 1.0 + np.max(np.abs(V.b)) + np.linalg.norm(p) if V.n_halfspaces else 1.0
    q, active, u = _project_gi(p, V.A, V.b, 1e-13 * scale)
    res = kkt_residual(p, V, q, active, u)
    if res > tol.kkt * scale:
        raise NumericFailure(f"projection KKT residual {res:.3g} above tolerance")
    return q, float(np.linalg.norm(p - q))


@dataclass(frozen=True, eq=False)
class Cone:
    """Polyhedral cone with apex at the origin.

    H-representation ``{x : A x <= 0, E x = 0}``; optional generators
    (V-representation) may be attached for bookkeeping.
    """

    dim: int
    A: np.ndarray = None
    E: np.ndarray = None
    generators: np.ndarray | None = None

    def __post_init__(self):
        A = np.zeros((0, self.dim)) if self.A is None else np.reshape(np.asarray(self.A, dtype=float), (-1, self.dim))
        E = np.zeros((0, self.dim)) if self.E is None else np.reshape(np.asarray(self.E, dtype=float), (-1, self.dim))
        if len(A):
            nrm = np.linalg.norm(A, axis=1)
            A = A[nrm > 1e-14] / nrm[nrm > 1e-14, None]
        object.__setattr__(self, "A", _frozen(A))
        object.__setattr__(self, "E", _frozen(E))
        if self.generators is not None:
            object.__setattr__(self, "generators", _frozen(np.reshape(self.generators, (-1, self.dim))))

    def contains(self, x, tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=float)
        ok = True
        if len(self.A):
            ok &= bool(np.all(self.A @ x <= tol * (1 + np.linalg.norm(x))))
        if len(self.E):
            ok &= bool(np.all(np.abs(self.E @ x) <= tol * (1 + np.linalg.norm(x))))
        return ok

    def span_basis(self, rtol: float = 1e-10) -> np.ndarray:
        """Basis (columns) of the linear space cut out by the equalities."""
        return null_space(self.E, rtol) if len(self.E) else np.eye(self.dim)

    def lineality(self, rtol: float = 1e-10) -> np.ndarray:
        """Orthonormal basis (columns) of the largest linear subspace in the cone."""
        L0 = self.span_basis(rtol)
        if L0.shape[1] == 0:
            return L0
        if len(self.A) == 0:
            return L0
        N = null_space(self.A @ L0, rtol)
        return L0 @ N


class ConeRays(NamedTuple):
    rays: np.ndarray       # (k, n) unit vectors orthogonal to the lineality space
    lineality: np.ndarray  # (n, l) orthonormal basis


def extreme_rays(C: Cone, tol: Tolerances | None = None) -> np.ndarray:
    """Unit generators of the rays of ``C`` modulo its lineality space."""
    return cone_decomposition(C, tol).rays


def cone_decomposition(C: Cone, tol: Tolerances | None = None) -> ConeRays:
    """Extreme rays (double description) and lineality basis of ``C``."""
    tol = resolve(tol)
    n = C.dim
    L0 = C.span_basis(tol.rank)
    k = L0.shape[1]
    if k == 0:
        return ConeRays(np.zeros((0, n)), np.zeros((n, 0)))
    A1 = C.A @ L0 if len(C.A) else np.zeros((0, k))
    N = null_space(A1, tol.rank) if len(A1) else np.eye(k)
    lin = L0 @ N
    W = null_space(N.T, tol.rank) if N.shape[1] else np.eye(k)
    q = W.shape[1]
    if q == 0:
        return ConeRays(np.zeros((0, n)), lin)
    A2 = A1 @ W
    nrm = np.linalg.norm(A2, axis=1)
    A2 = A2[nrm > 1e-12] / nrm[nrm > 1e-12, None]
    rays_local = _double_description(A2, q, tol)
    if len(rays_local) == 0:
        return ConeRays(np.zeros((0, n)), lin)
    R = rays_local @ W.T @ L0.T
    R = R / np.linalg.norm(R, axis=1)[:, None]
    return ConeRays(R, lin)


def _double_description(A: np.ndarray, q: int, tol: Tolerances) -> np.ndarray:
    """Extreme rays of the pointed cone ``{x in R^q : A x <= 0}``.

    Standard incremental double description with the algebraic adjacency
    test.  ``A`` must have full column rank ``q``.
    """
    zero_tol = 1e-9
    m = len(A)
    if q == 1:
        out = [s for s in (np.array([1.0]), np.array([-1.0])) if np.all(A @ s <= zero_tol)]
        return np.array(out).reshape(-1, 1)
    # pick q independent rows in order
    chosen: list[int] = []
    for i in range(m):
        if matrix_rank(A[chosen + [i]], tol.rank) == len(chosen) + 1:
            chosen.append(i)
            if len(chosen) == q:
                break
    if len(chosen) < q:
        raise NumericFailure("cone is not pointed after lineality quotient")
    Ak = A[chosen]
    R = -np.linalg.inv(Ak)  # columns satisfy Ak r = -e_j
    gens = [R[:, j] / np.linalg.norm(R[:, j]) for j in range(q)]
    processed = list(chosen)
    for i in range(m):
        if i in chosen:
            continue
        a = A[i]
        vals = np.array([a @ g for g in gens])
        plus = [j for j in range(len(gens)) if vals[j] > zero_tol]
        minus = [j for j in range(len(gens)) if vals[j] < -zero_tol]
        zero = [j for j in range(len(gens)) if abs(vals[j]) <= zero_tol]
        if not plus:
            processed.append(i)
            continue
        Aproc = A[processed]
        zsets = [set(np.flatnonzero(np.abs(Aproc @ g) <= zero_tol)) for g in gens]
        new = [gens[j] for j in minus + zero]
        for jp in plus:
            for jm in minus:
                common = zsets[jp] & zsets[jm]
                if len(common) < q - 2:
                    continue
                if q > 2 and matrix_rank(Aproc[sorted(common)], 1e-8) < q - 2:
                    continue
                # no third generator with a superset zero set
                if any(common <= zsets[j] for j in range(len(gens)) if j not in (jp, jm)):
                    continue
                r = vals[jp] * gens[jm] - vals[jm] * gens[jp]
                nr = np.linalg.norm(r)
                if nr > 1e-14:
                    new.append(r / nr)
        gens = new
        processed.append(i)
        if not gens:
            break
    if not gens:
        return np.zeros((0, q))
    G = np.array(gens)
    # merge duplicates
    out: list[np.ndarray] = []
    for g in G:
        if not any(np.linalg.norm(g - h) < 1e-8 for h in out):
            out.append(g)
    return np.array(out)
