import numpy as np
import pytest

from polyfold import build_facet_complex, random_hull, run_source_unfolding
from polyfold.errors import EmptySet, IterationCapExceeded, NotMinimal, PointOutsideFacet, SourceOnWarpedFace
from polyfold.geodesic import geodesic_distance
from polyfold.io import vistal_document
from polyfold.unfolder import (
    cell_adjacency_connected,
    choose_minimal_event,
    cut_locus,
    initialize_state,
    process_event,
    run_loop,
    vistal_tree,
)
from polyfold.verify import run_suite

from conftest import facet_point


def counts_by_name(res, names=("bot", "top", "front", "back", "left", "right")):
    return {n: len(res.src(n)) for n in names}


def test_cube_center_counts(cube_run):
    c = counts_by_name(cube_run)
    assert c == {"bot": 1, "top": 4, "front": 3, "back": 3, "left": 3, "right": 3}
    assert cube_run.max_images() == 4


def test_initial_potential_events(cube):
    st = initialize_state(cube, ("bot", [0.5, 0.5]))
    pes = st.all_potential()
    assert len(pes) == 4
    assert all(pe.radius == pytest.approx(0.5, abs=1e-12) for pe in pes)
    assert {cube.facets[pe.target_facet].name for pe in pes} == {"front", "back", "left", "right"}


def test_first_event_reflects_source(cube):
    st = initialize_state(cube, ("bot", [0.5, 0.5]))
    pe = choose_minimal_event(st.all_potential(), st.tol)
    ev = process_event(st, pe)
    G = cube.facets[ev.facet]
    assert ev.facet_sequence == (cube.facet_index("bot"), ev.facet)
    # the source sits 0.5 beyond the shared edge, in the side face's chart (frame normals point inward)
    R = cube.ridge_between(cube.facet_index("bot"), ev.facet)
    fr = cube.ridges[R].frames[ev.facet]
    assert float(ev.source_image @ fr.normal - fr.offset) == pytest.approx(-0.5, abs=1e-12)
    assert G.polytope.slack(ev.source_image).min() < 0


def test_top_images_distinct(cube_run):
    Y = cube_run.src("top")
    D = np.linalg.norm(Y[:, None] - Y[None], axis=-1) + np.eye(len(Y))
    assert D.min() > 0.5
    # the four images sit symmetrically around the face centre
    assert np.allclose(np.linalg.norm(Y - 0.5, axis=1), np.linalg.norm(Y[0] - 0.5))


def test_choose_minimal_rules(cube):
    st = initialize_state(cube, ("bot", [0.3, 0.4]))
    pes = st.all_potential()
    best = choose_minimal_event(pes, st.tol)
    assert best.radius == min(pe.radius for pe in pes)
    with pytest.raises(EmptySet):
        choose_minimal_event([])


def test_processing_non_minimal_rejected(cube):
    st = initialize_state(cube, ("bot", [0.3, 0.4]))
    pes = st.all_potential()
    worst = max(pes, key=lambda pe: pe.radius)
    with pytest.raises(NotMinimal):
        process_event(st, worst)


def test_iteration_cap(cube):
    st = initialize_state(cube, ("bot", [0.5, 0.5]), max_events=3)
    with pytest.raises(IterationCapExceeded):
        run_loop(st)


def test_source_on_vertex_or_edge_of_facet(cube):
    with pytest.raises(SourceOnWarpedFace):
        run_source_unfolding(cube, "bot", [0.0, 0.0])
    with pytest.raises(PointOutsideFacet):
        run_source_unfolding(cube, "bot", [1.5, 0.5])


def test_ridge_source_matches_nearby_interior(cube):
    a = run_source_unfolding(cube, "bot", [0.5, 0.0])
    b = run_source_unfolding(cube, "bot", [0.5, 1e-7])
    rng = np.random.default_rng(0)
    for _ in range(40):
        F = int(rng.integers(cube.n_facets))
        w = (F, facet_point(cube, F, rng))
        assert geodesic_distance(a, w) == pytest.approx(geodesic_distance(b, w), abs=1e-6)


def test_tetrahedron_foldout_area(tetra_run, tetra):
    assert tetra_run.foldout.volume() == pytest.approx(tetra.surface_volume(), rel=1e-9)


@pytest.mark.parametrize("run", ["cube_run", "cube_run_off", "brick_run", "tetra_run"])
def test_suite_passes(run, request):
    res = request.getfixturevalue(run)
    checks = run_suite(res, samples=40, seed=1)
    bad = [c.line() for c in checks if not c.ok]
    assert not bad, bad


def test_random_hulls_suite(hull_runs):
    for res in hull_runs:
        bad = [c.line() for c in run_suite(res, samples=30) if not c.ok]
        assert not bad, bad


def test_vistal_tree(cube_run):
    T = vistal_tree(cube_run)
    assert len(T) == len(cube_run.events)
    assert T.roots == [0]
    doc = vistal_document(cube_run, T)
    assert len(doc["nodes"]) == len(cube_run.events) + 1
    for e in cube_run.events:
        p = T.parent[e.index]
        if p is not None:
            assert cube_run.events[p].radius <= e.radius + 1e-12
            assert T.depth(e.index) == len(e.facet_sequence) - 1


def test_log_is_order_ideal(cube_run_off):
    seqs = {(e.source_index, e.facet_sequence) for e in cube_run_off.events}
    seen = set()
    for e in cube_run_off.events:
        if len(e.facet_sequence) > 1:
            assert (e.source_index, e.facet_sequence[:-1]) in seen
        seen.add((e.source_index, e.facet_sequence))
    assert seen == seqs


def test_event_radii_nondecreasing(brick_run):
    r = [e.radius for e in brick_run.events]
    assert all(b >= a - 1e-9 for a, b in zip(r, r[1:]))


def test_cut_locus_includes_warped_faces(cube_run):
    cl = cut_locus(cube_run)
    # faces of dimension d-2 of a two-dimensional surface are its vertices
    assert len(cl.warped) == 8
    assert cl.ambient_pieces
    # every piece sits on the surface at equal distance from two source images
    for F, V in cl.pieces:
        mid = V.mean(axis=0)
        d = np.sort(np.linalg.norm(cube_run.images[F] - mid, axis=1))
        assert d[1] - d[0] < 1e-9


def test_cells_adjacent(cube_run_off, brick_run):
    assert cell_adjacency_connected(cube_run_off)
    assert cell_adjacency_connected(brick_run)


def test_image_count_bound():
    cx = build_facet_complex(random_hull(12, 5))
    V = cx.facets[0].vertices
    res = run_source_unfolding(cx, 0, V.mean(axis=0))
    assert len(res.events) <= cx.n_facets * res.max_images()
