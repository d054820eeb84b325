"""Invariant checks for completed runs and a sampling oracle for jet frames.

Each check returns a :class:`Check` with a pass flag and a one-line
detail string; :func:`run_suite` bundles the full battery used by the
``verify`` subcommand.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .complex import FacetComplex
from .config import Tolerances, resolve
from .errors import NoPathFound
from .geodesic import geodesic_distance, sequence_oracle
from .geometry import HPolytope, chebyshev_center, enumerate_vertices, gram_schmidt, polytope_volume
from .jets import (
    Ordering,
    angle_sequence,
    compare_angle_sequences,
    is_jet_frame,
    jet_point,
    minimal_jet_frame,
)
from .unfolder import UnfoldResult, vistal_tree
from .voronoi import OPPOSITE_SIDE, can_see


@dataclass
class Check:
    name: str
    ok: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'} {self.name}: {self.detail}"


# ---------------------------------------------------------------------------
# foldout geometry; cells given as (vertices, H-polytope) in T_v


@dataclass
class CellGeometry:
    vertices: np.ndarray
    polytope: HPolytope


def cells_from_result(res: UnfoldResult) -> list[CellGeometry]:
    return [CellGeometry(c.vertices, c.polytope) for c in res.foldout.cells]


def cells_from_vertices(vertex_lists: Sequence[np.ndarray]) -> list[CellGeometry]:
    """H-descriptions for cells read back from a file (convex hull of each vertex list)."""
    from scipy.spatial import ConvexHull

    out = []
    for V in vertex_lists:
        V = np.asarray(V, dtype=float)
        d = V.shape[1]
        if d == 1:
            P = HPolytope(np.array([[-1.0], [1.0]]), np.array([-V.min(), V.max()]))
        else:
            E = ConvexHull(V).equations
            P = HPolytope(E[:, :-1], -E[:, -1])
        out.append(CellGeometry(V, P))
    return out


def check_measure(cells: list[CellGeometry], surface: float, rtol: float = 1e-9) -> Check:
    total = sum(polytope_volume(c.vertices, c.polytope.dim) for c in cells)
    err = abs(total - surface) / surface
    return Check("measure", err <= rtol, f"foldout volume {total:.12g} vs surface {surface:.12g} (rel err {err:.2e})")


def check_nonoverlap(cells: list[CellGeometry], tol: Tolerances | None = None, atol: float = 1e-9) -> Check:
    """Exact pairwise intersection volumes of the convex cells."""
    tol = resolve(tol)
    worst, pair = 0.0, None
    for a, b in itertools.combinations(range(len(cells)), 2):
        A, B = cells[a], cells[b]
        lo = np.maximum(A.vertices.min(0), B.vertices.min(0))
        hi = np.minimum(A.vertices.max(0), B.vertices.max(0))
        if np.any(hi - lo <= atol):
            continue
        P = A.polytope.intersect(B.polytope)
        if chebyshev_center(P)[1] <= 0:
            continue
        vol = polytope_volume(enumerate_vertices(P, tol), P.dim)
        if vol > worst:
            worst, pair = vol, (a, b)
    return Check("nonoverlap", worst < atol, f"max pairwise overlap {worst:.2e}" + (f" (cells {pair})" if pair else ""))


def check_nonoverlap_sampled(cells: list[CellGeometry], n: int, rng: np.random.Generator) -> Check:
    """Random points inside cells must lie in the open interior of at most one cell."""
    vols = np.array([polytope_volume(c.vertices, c.polytope.dim) for c in cells])
    k = rng.choice(len(cells), size=n, p=vols / vols.sum())
    pts = np.empty((n, cells[0].vertices.shape[1]))
    for j in np.unique(k):
        idx = np.flatnonzero(k == j)
        V = cells[j].vertices
        pts[idx] = rng.dirichlet(np.ones(len(V)), size=len(idx)) @ V
    count = np.zeros(n, dtype=int)
    for c in cells:
        count += np.all(pts @ c.polytope.A.T < c.polytope.b - 1e-9, axis=1)
    bad = int(np.sum(count > 1))
    return Check("nonoverlap-sampled", bad == 0, f"{bad} of {n} sampled points in two cell interiors")


def check_star(cells: list[CellGeometry], per_vertex: int = 100, atol: float = 1e-9) -> Check:
    ts = np.linspace(0.0, 1.0, per_vertex)
    bad = 0
    total = 0
    A = [c.polytope for c in cells]
    for c in cells:
        for w in c.vertices:
            pts = ts[:, None] * w[None, :]
            hit = np.zeros(len(pts), dtype=bool)
            for P in A:
                hit |= np.all(pts @ P.A.T <= P.b + atol * (1 + np.linalg.norm(w)), axis=1)
            bad += int(np.sum(~hit))
            total += len(pts)
    return Check("star-shaped", bad == 0, f"{bad} of {total} segment samples outside the foldout")


def check_isometry(res: UnfoldResult, rng: np.random.Generator, per_cell: int = 20, atol: float = 1e-9) -> Check:
    worst = 0.0
    for c in res.foldout.cells:
        V = enumerate_vertices(c.chart_polytope, res.tol)
        W = rng.dirichlet(np.ones(len(V)), size=per_cell) @ V
        chart = np.linalg.norm(W - c.source_image, axis=1)
        flat = np.linalg.norm(c.unfold(W), axis=1)
        worst = max(worst, float(np.max(np.abs(chart - flat))))
        worst = max(worst, float(np.linalg.norm(c.unfold(c.source_image))))
    return Check("isometry", worst <= atol, f"max distance mismatch {worst:.2e}")


def check_order_ideal(res: UnfoldResult) -> Check:
    tol = res.tol
    ev = res.events
    bad = 0
    for a, b in zip(ev, ev[1:]):
        eps = tol.rad * max(1.0, a.radius, b.radius)
        if b.radius < a.radius - eps:
            bad += 1
        elif abs(b.radius - a.radius) <= eps and compare_angle_sequences(b.angle_seq, a.angle_seq, tol) == Ordering.LESS:
            bad += 1
    return Check("order-ideal", bad == 0, f"{bad} ordering violations in {len(ev)} events")


def check_sequences(res: UnfoldResult) -> Check:
    cx = res.complex
    bad = 0
    for e in res.events:
        s = e.facet_sequence
        if len(set(s)) != len(s) or any(cx.ridge_between(a, b) is None for a, b in zip(s, s[1:])):
            bad += 1
    return Check("facet-sequences", bad == 0, f"{bad} invalid facet sequences")


def check_vistal(res: UnfoldResult) -> Check:
    try:
        tree = vistal_tree(res.events)
    except Exception as exc:  # reported, not raised
        return Check("vistal-tree", False, str(exc))
    bad = 0
    for k, p in tree.parent.items():
        if p is not None and not (p < k and res.events[p].radius <= res.events[k].radius + res.tol.rad):
            bad += 1
    ok = bad == 0 and len(tree) == len(res.events)
    return Check("vistal-tree", ok, f"{len(tree)} nodes, {bad} precedence violations")


def check_termination(res: UnfoldResult) -> Check:
    bound = res.complex.n_facets * res.max_images()
    n = len(res.events)
    return Check("event-bound", n <= bound, f"{n} events <= {res.complex.n_facets} facets x {res.max_images()} images")


def check_unique_visibility(res: UnfoldResult) -> Check:
    cx, tol = res.complex, res.tol
    bad = 0
    for F in range(cx.n_facets):
        Y = res.images[F]
        for i in range(len(Y)):
            e = res.events[res.event_ids[F][i]]
            if e.seen_through is None and len(e.facet_sequence) == 1:
                continue
            n = sum(can_see(cx, F, Y, i, R, OPPOSITE_SIDE, tol) for R in cx.ridges_of(F))
            bad += n != 1
    return Check("unique-visibility", bad == 0, f"{bad} source images not seeing their facet through exactly one ridge")


def random_surface_points(cx: FacetComplex, n: int, rng: np.random.Generator) -> list[tuple[int, np.ndarray]]:
    vols = np.array([cx.facet_volume(f.index) for f in cx.facets])
    Fs = rng.choice(cx.n_facets, size=n, p=vols / vols.sum())
    out = []
    for F in Fs:
        V = cx.facets[F].vertices
        out.append((int(F), rng.dirichlet(np.ones(len(V))) @ V))
    return out


def check_mount(res: UnfoldResult, pts, oracle) -> Check:
    worst = 0.0
    for F, w in pts:
        mu, _ = oracle.distance((F, w))
        gap = mu - float(np.min(np.linalg.norm(res.images[F] - w, axis=1)))
        worst = max(worst, gap)
    return Check("mount-inequality", worst <= 1e-6, f"max excess of distance over nearest image {worst:.2e}")


def check_oracle(res: UnfoldResult, pts, oracle) -> Check:
    worst = 0.0
    for F, w in pts:
        a = geodesic_distance(res, (F, w))
        b, _ = oracle.distance((F, w))
        worst = max(worst, abs(a - b) / (1 + b))
    return Check("oracle-equivalence", worst <= 1e-6, f"max relative distance gap {worst:.2e} over {len(pts)} points")


def check_expected_sequences(res: UnfoldResult, expected: Sequence[Sequence[str]]) -> Check:
    cx = res.complex
    got = sorted(tuple(cx.facets[f].name for f in e.facet_sequence) for e in res.events)
    want = sorted(tuple(map(str, s)) for s in expected)
    ok = got == want
    extra = sorted(set(got) - set(want))
    missing = sorted(set(want) - set(got))
    return Check("expected-sequences", ok, f"{len(got)} event sequences; extra {extra}; missing {missing}")


def run_suite(
    res: UnfoldResult,
    samples: int = 100,
    seed: int = 0,
    oracle_max_len: int | None = None,
    cells: list[CellGeometry] | None = None,
    expected_sequences=None,
) -> list[Check]:
    """Full invariant battery; ``cells`` overrides the foldout geometry under test."""
    rng = np.random.default_rng(seed)
    cx = res.complex
    geom = cells if cells is not None else cells_from_result(res)
    checks = [check_measure(geom, cx.surface_volume()), check_nonoverlap(geom, res.tol)]
    if cx.dim >= 3:
        checks.append(check_nonoverlap_sampled(geom, 10 ** 5, rng))
    checks += [check_star(geom), check_isometry(res, rng), check_order_ideal(res), check_sequences(res),
               check_vistal(res), check_termination(res), check_unique_visibility(res)]
    src = res.source
    try:
        oracle = sequence_oracle(cx, (src.facet, src.point), oracle_max_len, res.tol)
        pts = random_surface_points(cx, samples, rng)
        checks += [check_mount(res, pts, oracle), check_oracle(res, pts, oracle)]
    except NoPathFound as exc:
        checks.append(Check("oracle-equivalence", False, str(exc)))
    if expected_sequences is not None:
        checks.append(check_expected_sequences(res, expected_sequences))
    return checks


# ---------------------------------------------------------------------------
# jet frames


@dataclass
class JetInstance:
    V: HPolytope
    x: np.ndarray
    nu: np.ndarray
    vertices: np.ndarray


def _bounded(V: HPolytope) -> bool:
    from .jets import _max_support

    d = V.dim
    return all(np.isfinite(_max_support(V, s * e)) for e in np.eye(d) for s in (1.0, -1.0))


def random_jet_instance(rng: np.random.Generator, d: int | None = None, max_rows: int = 8) -> JetInstance:
    """Random polytope (possibly lower-dimensional), a boundary point and an outer support vector."""
    while True:
        d = int(rng.integers(1, 5)) if d is None else d
        m = int(rng.integers(d + 1, max_rows + 1))
        A = rng.normal(size=(m, d))
        A /= np.linalg.norm(A, axis=1)[:, None]
        b = rng.uniform(0.2, 1.0, size=m)
        flat = d >= 2 and m + 2 <= max_rows and rng.random() < 0.25
        if flat:
            # squash onto a hyperplane through the interior
            a = rng.normal(size=d)
            a /= np.linalg.norm(a)
            A = np.vstack([A, a, -a])
            b = np.concatenate([b, [0.0, 0.0]])
        V = HPolytope(A, b)
        verts = enumerate_vertices(V)
        if len(verts) < 2 and not flat:
            continue
        if len(verts) == 0:
            continue
        if not _bounded(V):
            continue
        break
    # pick a face through a random vertex
    v0 = verts[rng.integers(len(verts))]
    act = np.flatnonzero(np.abs(V.b - V.A @ v0) <= 1e-9)
    keep = act[rng.random(len(act)) < 0.6]
    on_face = np.all(np.abs(verts @ V.A[keep].T - V.b[keep]) <= 1e-9, axis=1)
    F = verts[on_face]
    x = rng.dirichlet(np.ones(len(F))) @ F
    tight = np.flatnonzero(np.abs(V.b - V.A @ x) <= 1e-9)
    lam = rng.exponential(size=len(tight)) * (rng.random(len(tight)) < 0.7)
    nu = lam @ V.A[tight] if len(tight) else np.zeros(d)
    if rng.random() < 0.5 and np.linalg.norm(nu) > 0:
        nu = nu / np.linalg.norm(nu)
    return JetInstance(V, x, nu, verts)


def sample_jet_frames(inst: JetInstance, n: int, rng: np.random.Generator, tol: Tolerances | None = None) -> list[np.ndarray]:
    """Random jet frames at ``x``: Gram-Schmidt of directions to a chain of points of ``V``.

    The chain ends at a relative-interior point, so the curve enters the
    relative interior.  Intermediate points are drawn from random faces,
    which makes ties with the minimal frame common.
    """
    tol = resolve(tol)
    V, x, verts = inst.V, inst.x, inst.vertices
    d = V.dim
    out = []
    for _ in range(n):
        r = int(rng.integers(0, d + 1))
        pts = []
        for _ in range(r):
            k = int(rng.integers(1, len(verts) + 1))
            sub = verts[rng.choice(len(verts), size=k, replace=False)]
            pts.append(rng.dirichlet(np.ones(k)) @ sub)
        pts.append(rng.dirichlet(np.ones(len(verts))) @ verts)
        dirs = [p - x for p in pts]
        Z = gram_schmidt(dirs, 1e-8)
        out.append(Z.T)
    return out


def _frame_checker(V: HPolytope, x: np.ndarray, tol: Tolerances):
    """Fast jet-frame test at a fixed point (active rows and implicit equalities precomputed)."""
    from .jets import _active_rows, implicit_equalities

    act = _active_rows(V, x, tol)
    A = V.A[act]
    eq = implicit_equalities(V, tol)[act]

    def ok(Z: np.ndarray) -> bool:
        keep = np.ones(len(A), dtype=bool)
        for z in Z:
            vals = A @ z
            if np.any(keep & (vals > tol.ang)):
                return False
            keep &= np.abs(vals) <= tol.ang
        return bool(np.all(~keep | eq))

    return ok


def jet_frame_violations(inst: JetInstance, n_samples: int, rng: np.random.Generator,
                         tol: Tolerances | None = None, eps_list=(1e-3, 1e-4), slack: float = 1e-9) -> dict:
    """Compare the constructed minimal frame against sampled jet frames.

    ``metric`` counts competitors strictly closer to ``x + nu`` at some
    ``eps`` in ``eps_list``; ``metric_excess`` is the largest such gap.
    """
    tol = resolve(tol)
    best = minimal_jet_frame(inst.V, inst.x, inst.nu, tol)
    seq = angle_sequence(inst.nu, best)
    valid = _frame_checker(inst.V, inst.x, tol)
    counts = {"invalid_constructed": int(not is_jet_frame(inst.V, inst.x, best, tol)),
              "invalid_samples": 0, "lex": 0, "metric": 0, "samples": 0, "metric_excess": 0.0}
    target = inst.x + inst.nu
    base = {eps: np.linalg.norm(target - jet_point(inst.x, best, eps)) for eps in eps_list}
    for Z in sample_jet_frames(inst, n_samples, rng, tol):
        if not valid(Z):
            counts["invalid_samples"] += 1
            continue
        counts["samples"] += 1
        if compare_angle_sequences(seq, angle_sequence(inst.nu, Z), tol) == Ordering.GREATER:
            counts["lex"] += 1
        gap = max(base[eps] - np.linalg.norm(target - jet_point(inst.x, Z, eps)) for eps in eps_list)
        if gap > slack:
            counts["metric"] += 1
            counts["metric_excess"] = max(counts["metric_excess"], float(gap))
    return counts
