"""Event-driven wavefront: source images, potential events, foldout assembly."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .complex import FacetComplex
from .config import Tolerances, resolve
from .errors import (
    EmptySet,
    InputError,
    IterationCapExceeded,
    NotMinimal,
    OrphanEvent,
    PointOutsideFacet,
    SourceOnWarpedFace,
)
from .folding import AffineIsometry, folding_map, unfold_along
from .geometry import HPolytope, chebyshev_center, enumerate_vertices, polytope_volume
from .jets import Ordering, compare_angle_sequences
from .voronoi import (
    _side,
    cut_locus_in_facet,
    restricted_voronoi_cell,
    ridge_angle_sequence,
    ridge_query,
    ridge_window,
    window_slack,
)

DEFAULT_MAX_EVENTS = 1_000_000


@dataclass(eq=False)
class Event:
    """A committed source image with its facet sequence and ordering data."""

    index: int
    facet: int
    source_image: np.ndarray
    facet_sequence: tuple[int, ...]
    radius: float
    event_point: np.ndarray
    angle_seq: np.ndarray
    seen_through: int | None
    source_index: int = 0

    @property
    def trivial(self) -> bool:
        return self.seen_through is None


@dataclass(eq=False)
class PotentialEvent:
    facet: int
    generator: int           # index into the facet's source images
    ridge: int
    target_facet: int
    image: np.ndarray        # unfolded source image in the target chart
    radius: float
    point: np.ndarray        # closest point on the ridge, chart of ``facet``
    query: object = field(repr=False, default=None)
    _angle: np.ndarray | None = field(repr=False, default=None)

    def angle_seq(self, tol: Tolerances) -> np.ndarray:
        if self._angle is None:
            self._angle = ridge_angle_sequence(self.query, tol)
        return self._angle

    @property
    def key(self) -> tuple[int, int, int]:
        return (self.facet, self.ridge, self.generator)


@dataclass(frozen=True)
class SourcePoint:
    facet: int
    point: np.ndarray


@dataclass(eq=False)
class UnfoldState:
    complex: FacetComplex
    sources: list[SourcePoint]
    tol: Tolerances
    images: list[list[np.ndarray]]
    sequences: list[list[tuple[int, ...]]]
    event_ids: list[list[int]]
    potential: list[list[PotentialEvent]]
    log: list[Event] = field(default_factory=list)
    max_events: int = DEFAULT_MAX_EVENTS
    processed: int = 0

    def generators(self, F: int) -> np.ndarray:
        Y = self.images[F]
        return np.array(Y) if Y else np.zeros((0, self.complex.dim))

    def all_potential(self) -> list[PotentialEvent]:
        return [pe for E in self.potential for pe in E]

    def image_count(self) -> list[int]:
        return [len(Y) for Y in self.images]


def classify_source(cx: FacetComplex, facet, point, tol: Tolerances | None = None) -> tuple[int, np.ndarray, list[int]]:
    """Facet index, chart point and the rows of that facet the point lies on."""
    tol = resolve(tol)
    F = cx.facet_index(facet)
    x = np.asarray(point, dtype=float).reshape(-1)
    if len(x) != cx.dim:
        raise InputError(f"source point must have {cx.dim} chart coordinates")
    s = cx.facets[F].polytope.slack(x)
    if np.min(s) < -tol.pt * (1 + np.linalg.norm(x)):
        raise PointOutsideFacet("source point outside its facet")
    tight = [int(k) for k in np.flatnonzero(s < tol.slack)]
    return F, x, tight


def _ridge_of_row(cx: FacetComplex, F: int, row: int) -> int:
    for r, k in cx.facets[F].ridge_rows.items():
        if k == row:
            return r
    raise InputError("facet row without a ridge")


def initialize_state(
    cx: FacetComplex,
    sources: Sequence[tuple[object, Sequence[float]]] | tuple[object, Sequence[float]],
    tol: Tolerances | None = None,
    max_events: int = DEFAULT_MAX_EVENTS,
) -> UnfoldState:
    """Seed the wavefront at one or several flat source points.

    A single source may be passed as ``(facet, point)``.  Each source in
    the interior of a facet seeds that facet only; a source in the
    relative interior of a ridge seeds both incident facets, with the
    lower-numbered facet as its home chart.
    """
    tol = resolve(tol)
    if len(sources) == 2 and not isinstance(sources[0], (tuple, list)) and np.ndim(sources[1]) == 1:
        sources = [sources]
    n = cx.n_facets
    state = UnfoldState(cx, [], tol, [[] for _ in range(n)], [[] for _ in range(n)],
                        [[] for _ in range(n)], [[] for _ in range(n)], max_events=max_events)
    seeds = []
    for k, (facet, point) in enumerate(sources):
        F, x, tight = classify_source(cx, facet, point, tol)
        if len(tight) >= 2 or (tight and cx.dim < 2):
            raise SourceOnWarpedFace("source lies on a face of dimension <= d-2")
        if tight:
            r = _ridge_of_row(cx, F, tight[0])
            G = cx.neighbor(F, r)
            home, other = min(F, G), max(F, G)
            if home != F:
                x = folding_map(cx, F, G)(x)
            seeds.append((k, home, x, [(other, folding_map(cx, home, other)(x))]))
        else:
            seeds.append((k, F, x, []))
        state.sources.append(SourcePoint(seeds[-1][1], seeds[-1][2]))
    for k, F, x, extra in seeds:
        for G, y in [(F, x)] + extra:
            Y = state.images[G]
            if Y and np.min(np.linalg.norm(np.array(Y) - y, axis=1)) <= tol.pt * (1 + np.linalg.norm(y)):
                from .errors import DuplicateSources

                raise DuplicateSources("two sources coincide")
            seq = (F,) if G == F else (F, G)
            _commit(state, G, y, seq, 0.0, y.copy(), np.zeros(0), None, k)
    for F in range(n):
        if state.images[F]:
            _refresh_potential(state, F)
    return state


def _commit(state: UnfoldState, F: int, nu, seq, radius, point, angle, ridge, source_index) -> Event:
    ev = Event(len(state.log), F, np.asarray(nu, dtype=float), tuple(seq), float(radius),
               np.asarray(point, dtype=float), np.asarray(angle, dtype=float), ridge, source_index)
    state.images[F].append(ev.source_image)
    state.sequences[F].append(ev.facet_sequence)
    state.event_ids[F].append(ev.index)
    state.log.append(ev)
    return ev


def _near_any(Y: list[np.ndarray], y: np.ndarray, tol: Tolerances) -> bool:
    if not Y:
        return False
    return bool(np.min(np.linalg.norm(np.array(Y) - y, axis=1)) <= tol.pt * (1 + np.linalg.norm(y)))


def _refresh_potential(state: UnfoldState, F: int) -> None:
    """Recompute every potential event based in facet ``F`` from scratch."""
    cx, tol = state.complex, state.tol
    Y = state.generators(F)
    out: list[PotentialEvent] = []
    for i in range(len(Y)):
        for R in cx.ridges_of(F):
            frame = cx.ridges[R].frames[F]
            if not _side(frame, Y[i]) > tol.pt:
                continue
            G = cx.neighbor(F, R)
            image = folding_map(cx, F, G)(Y[i])
            if _near_any(state.images[G], image, tol):
                continue
            win = ridge_window(cx, F, Y, i, R, tol)
            if not window_slack(win) > tol.slack:
                continue
            q = ridge_query(cx, F, Y, i, R, tol)
            out.append(PotentialEvent(F, i, R, G, image, q.radius, q.point, q))
    state.potential[F] = out


def _precedes(a: PotentialEvent, b: PotentialEvent, tol: Tolerances) -> bool:
    """Strict source-poset order on potential events."""
    eps = tol.rad * max(1.0, a.radius, b.radius)
    if a.radius < b.radius - eps:
        return True
    if a.radius > b.radius + eps:
        return False
    return compare_angle_sequences(a.angle_seq(tol), b.angle_seq(tol), tol) == Ordering.LESS


def choose_minimal_event(events: Iterable[PotentialEvent], tol: Tolerances | None = None) -> PotentialEvent:
    """Minimal radius, then minimal angle sequence, then smallest (facet, ridge, generator)."""
    tol = resolve(tol)
    events = list(events)
    if not events:
        raise EmptySet("no potential events")
    r = min(pe.radius for pe in events)
    eps = tol.rad * max(1.0, r)
    close = sorted((pe for pe in events if pe.radius <= r + eps), key=lambda pe: pe.key)
    best = close[0]
    if len(close) > 1:
        for pe in close[1:]:
            if compare_angle_sequences(pe.angle_seq(tol), best.angle_seq(tol), tol) == Ordering.LESS:
                best = pe
    else:
        best.angle_seq(tol)
    return best


def process_event(state: UnfoldState, pe: PotentialEvent, check: bool = True) -> Event:
    """Commit the unfolding of ``pe`` and update the potential events."""
    tol, cx = state.tol, state.complex
    if check:
        for other in state.all_potential():
            if other is not pe and _precedes(other, pe, tol):
                raise NotMinimal("a potential event precedes the one being processed")
    if state.processed >= state.max_events:
        raise IterationCapExceeded(f"more than {state.max_events} events processed")
    F, G, i = pe.facet, pe.target_facet, pe.generator
    fold = folding_map(cx, F, G)
    state.potential[F] = [e for e in state.potential[F] if e is not pe]
    ev = _commit(state, G, pe.image, state.sequences[F][i] + (G,), pe.radius, fold(pe.point),
                 pe.angle_seq(tol), pe.ridge, state.log[state.event_ids[F][i]].source_index)
    state.processed += 1
    _refresh_potential(state, G)
    # a new image can make potential events aimed at G elsewhere redundant
    for H in range(cx.n_facets):
        if H == G:
            continue
        E = state.potential[H]
        if any(e.target_facet == G for e in E):
            state.potential[H] = [e for e in E if e.target_facet != G or not _near_any([pe.image], e.image, tol)]
    return ev


def run_loop(state: UnfoldState) -> UnfoldState:
    while True:
        events = state.all_potential()
        if not events:
            return state
        pe = choose_minimal_event(events, state.tol)
        process_event(state, pe, check=False)


# --------------------------------------------------------------------------
# results


@dataclass(eq=False)
class FoldoutCell:
    facet: int
    event: int
    source_image: np.ndarray      # chart of ``facet``
    facet_sequence: tuple[int, ...]
    vertices: np.ndarray          # in T_v
    polytope: HPolytope           # in T_v
    chart_polytope: HPolytope     # in the chart of ``facet``
    unfold: AffineIsometry        # chart of ``facet`` -> T_v

    def volume(self) -> float:
        return polytope_volume(self.vertices, self.polytope.dim)


@dataclass(eq=False)
class Foldout:
    dim: int
    cells: list[FoldoutCell]
    origin: np.ndarray

    def volume(self) -> float:
        return float(sum(c.volume() for c in self.cells))

    def membership(self, pts, tol: float = 0.0) -> np.ndarray:
        """Count of cells whose interior (shrunk by ``tol``) contains each point."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        count = np.zeros(len(pts), dtype=int)
        for c in self.cells:
            count += np.all(pts @ c.polytope.A.T < c.polytope.b - tol, axis=1)
        return count

    def covers(self, pts, tol: float = 1e-9) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        hit = np.zeros(len(pts), dtype=bool)
        for c in self.cells:
            hit |= np.all(pts @ c.polytope.A.T <= c.polytope.b + tol, axis=1)
        return hit


@dataclass(eq=False)
class UnfoldResult:
    complex: FacetComplex
    sources: list[SourcePoint]
    events: list[Event]
    images: list[np.ndarray]
    sequences: list[list[tuple[int, ...]]]
    event_ids: list[list[int]]
    tol: Tolerances
    _foldout: Foldout | None = field(default=None, repr=False)

    @property
    def source(self) -> SourcePoint:
        return self.sources[0]

    def src(self, F) -> np.ndarray:
        return self.images[self.complex.facet_index(F)]

    def image_counts(self) -> list[int]:
        return [len(Y) for Y in self.images]

    def max_images(self) -> int:
        return max(self.image_counts())

    @property
    def foldout(self) -> Foldout:
        if self._foldout is None:
            self._foldout = build_foldout(self)
        return self._foldout


def _result(state: UnfoldState) -> UnfoldResult:
    return UnfoldResult(state.complex, state.sources, state.log,
                        [state.generators(F) for F in range(state.complex.n_facets)],
                        [list(s) for s in state.sequences], [list(e) for e in state.event_ids], state.tol)


def run_source_unfolding(
    cx: FacetComplex, facet, point, tol: Tolerances | None = None, max_events: int = DEFAULT_MAX_EVENTS
) -> UnfoldResult:
    """Source images, event log and (lazily) the foldout for a source point."""
    state = initialize_state(cx, [(facet, point)], tol, max_events)
    return _result(run_loop(state))


def run_multi_source(
    cx: FacetComplex, sources: Sequence[tuple[object, Sequence[float]]], tol: Tolerances | None = None,
    max_events: int = DEFAULT_MAX_EVENTS,
) -> UnfoldResult:
    state = initialize_state(cx, list(sources), tol, max_events)
    return _result(run_loop(state))


def build_foldout(res: UnfoldResult) -> Foldout:
    """Unfold every nonempty cut cell into the tangent chart of the source."""
    cx, tol = res.complex, res.tol
    origin_facet = res.sources[0].facet
    shift = res.sources[0].point
    cells: list[FoldoutCell] = []
    for F in range(cx.n_facets):
        Y = res.images[F]
        for i in range(len(Y)):
            seq = res.sequences[F][i]
            if seq[0] != origin_facet:
                continue
            cell = restricted_voronoi_cell(cx, F, Y, i, tol)
            if not chebyshev_center(cell.cell)[1] >= tol.slack:
                continue
            V = enumerate_vertices(cell.cell, tol)
            M = unfold_along(cx, seq)
            M = AffineIsometry(M.linear, M.translation - shift)
            cells.append(FoldoutCell(F, res.event_ids[F][i], Y[i], seq, M(V), M.apply_polytope(cell.cell), cell.cell, M))
    return Foldout(cx.dim, cells, np.zeros(cx.dim))


@dataclass
class VistalTree:
    parent: dict[int, int | None]
    children: dict[int, list[int]]
    roots: list[int]

    def __len__(self) -> int:
        return len(self.parent)

    def depth(self, k: int) -> int:
        n = 0
        while self.parent[k] is not None:
            k = self.parent[k]
            n += 1
        return n


def vistal_tree(events: Sequence[Event] | UnfoldResult) -> VistalTree:
    """Events ordered by facet-sequence prefix (geodesic precedence)."""
    if isinstance(events, UnfoldResult):
        events = events.events
    by_seq = {(e.source_index, e.facet_sequence): e.index for e in events}
    parent: dict[int, int | None] = {}
    children: dict[int, list[int]] = {e.index: [] for e in events}
    roots = []
    for e in events:
        if len(e.facet_sequence) == 1:
            parent[e.index] = None
            roots.append(e.index)
            continue
        p = by_seq.get((e.source_index, e.facet_sequence[:-1]))
        if p is None:
            raise OrphanEvent(f"event {e.index} has no parent event")
        parent[e.index] = p
        children[p].append(e.index)
    return VistalTree(parent, children, roots)


# --------------------------------------------------------------------------
# cut locus


@dataclass
class CutLocus:
    """Codimension-one pieces (vertex arrays, ambient or chart coordinates) plus warped faces."""

    pieces: list[tuple[int, np.ndarray]]         # (facet, vertices in chart)
    ambient_pieces: list[np.ndarray] | None      # deduplicated, embedded complexes only
    warped: list[frozenset[int]]


def _piece_key(V: np.ndarray) -> tuple:
    return tuple(sorted(tuple(np.round(v, 7) + 0.0) for v in V))


def cut_locus(res: UnfoldResult) -> CutLocus:
    cx, tol = res.complex, res.tol
    pieces = []
    for F in range(cx.n_facets):
        for V in cut_locus_in_facet(cx, F, res.images[F], tol):
            pieces.append((F, V))
    ambient = None
    if cx.embedded:
        seen, ambient = set(), []
        for F, V in pieces:
            W = cx.to_ambient(F, V)
            k = _piece_key(W)
            if k not in seen:
                seen.add(k)
                ambient.append(W)
    return CutLocus(pieces, ambient, cx.warped_faces())


def cell_adjacency_connected(res: UnfoldResult) -> bool:
    """Whether the foldout cells form a connected graph under codimension-one contact."""
    fo = res.foldout
    n = len(fo.cells)
    if n <= 1:
        return True
    adj = {k: set() for k in range(n)}
    d = fo.dim
    for a, b in itertools.combinations(range(n), 2):
        P = fo.cells[a].polytope.intersect(fo.cells[b].polytope)
        V = enumerate_vertices(P, res.tol)
        if len(V) >= d and _affine_dim(V) >= d - 1:
            adj[a].add(b)
            adj[b].add(a)
    seen, stack = {0}, [0]
    while stack:
        k = stack.pop()
        for j in adj[k] - seen:
            seen.add(j)
            stack.append(j)
    return len(seen) == n


def _affine_dim(V: np.ndarray) -> int:
    if len(V) <= 1:
        return 0
    return int(np.linalg.matrix_rank(V[1:] - V[0], 1e-9))
