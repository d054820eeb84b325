import numpy as np
import pytest

from polyfold import build_facet_complex, hypercube, random_hull, run_source_unfolding
from polyfold.errors import DuplicateSources, PointOutsideFacet
from polyfold.geodesic import (
    brute_force_distance,
    geodesic_distance,
    geodesic_voronoi,
    sequence_oracle,
    shortest_paths_to,
)

from conftest import facet_point


def test_same_facet_distance(cube):
    res = run_source_unfolding(cube, "bot", [0.2, 0.2])
    assert geodesic_distance(res, ("bot", [0.5, 0.6])) == pytest.approx(0.5, abs=1e-12)


def test_center_to_top_center(cube_run):
    assert geodesic_distance(cube_run, ("top", [0.5, 0.5])) == pytest.approx(2.0, abs=1e-12)
    paths = shortest_paths_to(cube_run, ("top", [0.5, 0.5]))
    assert len(paths) == 4
    assert {p.facet_sequence[1:-1] for p in paths} == {(cube_run.complex.facet_index(n),)
                                                        for n in ("front", "back", "left", "right")}
    for p in paths:
        assert p.length == pytest.approx(2.0, abs=1e-12)
        assert len(p.breakpoints) == 2


def test_top_edge_midpoint(cube_run):
    assert geodesic_distance(cube_run, ("top", [0.5, 0.0])) == pytest.approx(1.5, abs=1e-12)
    # the target sits on the top/front edge, where the last crossing is the endpoint itself
    paths = shortest_paths_to(cube_run, ("top", [0.5, 0.0]))
    names = [tuple(cube_run.complex.facets[k].name for k in p.facet_sequence) for p in paths]
    assert names == [("bot", "front", "top")]
    d, _ = brute_force_distance(cube_run.complex, ("bot", [0.5, 0.5]), ("top", [0.5, 0.0]))
    assert d == pytest.approx(1.5, abs=1e-12)


def test_path_counts_off_diagonal(cube_run):
    assert len(shortest_paths_to(cube_run, ("top", [0.3, 0.3]))) == 2
    assert len(shortest_paths_to(cube_run, ("top", [0.2, 0.5]))) == 1


def test_breakpoints_on_ridges(cube_run):
    cx = cube_run.complex
    for p in shortest_paths_to(cube_run, ("top", [0.2, 0.7])):
        for bp in p.breakpoints:
            F, G = bp.facets
            assert cx.ridge_between(F, G) == bp.ridge
            assert cx.facets[F].polytope.contains(bp.chart_point, 1e-9)
            assert bp.ambient is not None
            # embedded breakpoints lie on the shared edge of both faces
            assert len(cx.locate(bp.ambient)) >= 2


def test_target_outside_facet(cube_run):
    with pytest.raises(PointOutsideFacet):
        geodesic_distance(cube_run, ("top", [1.3, 0.5]))


def test_symmetry_and_triangle(cube):
    rng = np.random.default_rng(4)
    pts = [(F, facet_point(cube, F, rng)) for F in rng.integers(cube.n_facets, size=4)]
    runs = [run_source_unfolding(cube, F, x) for F, x in pts]
    D = np.array([[geodesic_distance(runs[i], pts[j]) for j in range(4)] for i in range(4)])
    assert np.allclose(D, D.T, atol=1e-9)
    assert np.allclose(np.diag(D), 0, atol=1e-12)
    for i in range(4):
        for j in range(4):
            assert np.all(D[i, j] <= D[i] + D[:, j] + 1e-9)


def test_cut_point_witness(cube_run):
    # on a cut-locus piece at least two source images are nearest
    T = cube_run.complex.facet_index("top")
    for t in np.linspace(0.1, 0.4, 4):
        assert len(shortest_paths_to(cube_run, (T, [t, t]))) >= 2


@pytest.mark.parametrize("seed", range(3))
def test_oracle_equivalence_hulls(seed):
    cx = build_facet_complex(random_hull(9, seed + 20))
    x = cx.facets[0].vertices.mean(axis=0)
    res = run_source_unfolding(cx, 0, x)
    rng = np.random.default_rng(seed)
    orc = sequence_oracle(cx, (0, x))
    for _ in range(30):
        F = int(rng.integers(cx.n_facets))
        w = (F, facet_point(cx, F, rng))
        b, _ = orc.distance(w)
        assert geodesic_distance(res, w) == pytest.approx(b, abs=1e-6 * (1 + b))


def test_brute_force_examples(cube, cube_run):
    d, seq = brute_force_distance(cube, ("bot", [0.5, 0.5]), ("top", [0.2, 0.5]))
    assert d == pytest.approx(geodesic_distance(cube_run, ("top", [0.2, 0.5])), abs=1e-12)
    assert len(seq) == 3


def test_hypercube_distance():
    cx = hypercube(4)
    res = run_source_unfolding(cx, 0, [0.5, 0.5, 0.5])
    opp = [k for k in range(cx.n_facets) if cx.ridge_between(0, k) is None and k != 0][0]
    assert geodesic_distance(res, (opp, [0.5, 0.5, 0.5])) == pytest.approx(2.0, abs=1e-9)
    assert res.foldout.volume() == pytest.approx(8.0, rel=1e-9)


def test_voronoi_single_source_covers(cube):
    vd = geodesic_voronoi(cube, [("bot", [0.3, 0.6])])
    assert vd.region_volume(0) == pytest.approx(6.0, rel=1e-9)


def test_voronoi_opposite_centres(cube):
    vd = geodesic_voronoi(cube, [("bot", [0.5, 0.5]), ("top", [0.5, 0.5])])
    assert vd.region_volume(0) == pytest.approx(3.0, rel=1e-9)
    assert vd.region_volume(1) == pytest.approx(3.0, rel=1e-9)


def test_voronoi_labels_match_distances(cube):
    srcs = [("bot", [0.3, 0.3]), ("front", [0.6, 0.2]), ("top", [0.8, 0.5])]
    vd = geodesic_voronoi(cube, srcs)
    runs = [run_source_unfolding(cube, F, x) for F, x in srcs]
    rng = np.random.default_rng(1)
    for _ in range(40):
        F = int(rng.integers(cube.n_facets))
        w = (F, facet_point(cube, F, rng))
        d = [geodesic_distance(r, w) for r in runs]
        k = vd.label(w)
        assert d[k] <= min(d) + 1e-9
    assert sum(vd.region_volume(i) for i in range(3)) == pytest.approx(6.0, rel=1e-9)


def test_voronoi_duplicates(cube):
    with pytest.raises(DuplicateSources):
        geodesic_voronoi(cube, [("bot", [0.5, 0.5]), ("bot", [0.5, 0.5])])
