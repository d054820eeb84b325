import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyfold import build_facet_complex, random_hull
from polyfold.errors import InvalidSequence, NotAdjacent
from polyfold.folding import AffineIsometry, fold_along, folding_map, sequential_unfold_set, unfold_along
from polyfold.geometry import enumerate_vertices, polytope_volume


def test_front_to_bottom_reflects(cube):
    phi = folding_map(cube, "front", "bot")
    assert np.allclose(phi.linear, [[1, 0], [0, -1]], atol=1e-12)
    assert np.allclose(phi([[0.3, 0.8]]), [[0.3, -0.8]], atol=1e-12)


def test_fold_pair_inverse(cube):
    for r in cube.ridges:
        F, G = r.facets
        assert folding_map(cube, F, G).compose(folding_map(cube, G, F)).distance(AffineIsometry.identity(2)) < 1e-10


def test_fold_fixes_ridge_and_flips_side(brick):
    for r in brick.ridges:
        F, G = r.facets
        phi = folding_map(brick, F, G)
        assert np.allclose(phi(r.local[F]), r.local[G], atol=1e-12)
        # the image of F lies on the far side of the ridge from G
        fr = r.frames[G]
        img = phi(brick.facets[F].vertices)
        assert np.all(img @ fr.normal - fr.offset <= 1e-12)
        assert np.min(img @ fr.normal - fr.offset) < -0.5


def test_not_adjacent(cube):
    with pytest.raises(NotAdjacent):
        folding_map(cube, "bot", "top")


def test_singleton_identity(cube):
    assert unfold_along(cube, ["top"]).distance(AffineIsometry.identity(2)) == 0


def test_invalid_sequences(cube):
    with pytest.raises(InvalidSequence):
        unfold_along(cube, ["bot", "top"])
    with pytest.raises(InvalidSequence):
        unfold_along(cube, ["bot", "front", "bot"])
    with pytest.raises(InvalidSequence):
        unfold_along(cube, [])


def test_brick_top_beyond_back(brick):
    M = unfold_along(brick, ["bot", "back", "top"])
    top = M(brick.facets[brick.facet_index("top")].vertices)
    # back edge of bot is y = 1; the back face has height 1, so top lands in 2 <= y <= 3
    assert np.allclose(top[:, 1].min(), 2.0) and np.allclose(top[:, 1].max(), 3.0)
    assert np.allclose(top[:, 0].min(), 0.0) and np.allclose(top[:, 0].max(), 3.0)


def test_unfold_fold_inverse(brick):
    seq = ["bot", "back", "left", "top"]
    M = unfold_along(brick, seq).compose(fold_along(brick, seq))
    assert M.distance(AffineIsometry.identity(2)) < 1e-9


def test_cross_net(cube):
    # spanning path through all six faces: a classical net of area 6
    seq = ["left", "bot", "front", "right", "top", "back"]
    pieces = [(f, cube.facets[cube.facet_index(f)].polytope) for f in seq]
    imgs = sequential_unfold_set(cube, pieces, seq)
    areas = [polytope_volume(enumerate_vertices(P), 2) for P in imgs]
    assert sum(areas) == pytest.approx(6.0, rel=1e-9)
    for a, b in itertools.combinations(imgs, 2):
        V = enumerate_vertices(a.intersect(b))
        assert len(V) < 3 or polytope_volume(V, 2) < 1e-9


def test_ridge_piece_same_from_both_sides(cube):
    for r in cube.ridges:
        F, G = r.facets
        a = unfold_along(cube, [F])(r.local[F])
        b = unfold_along(cube, [F, G])(r.local[G])
        assert np.allclose(a, b, atol=1e-12)


def test_singleton_piece_unchanged(cube):
    P = cube.facets[0].polytope
    (img,) = sequential_unfold_set(cube, [(0, P)], [0])
    assert np.allclose(img.A, P.A) and np.allclose(img.b, P.b)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 50), st.integers(2, 6))
def test_random_walk_isometry(seed, length):
    cx = build_facet_complex(random_hull(9, seed % 7))
    rng = np.random.default_rng(seed)
    seq = [int(rng.integers(cx.n_facets))]
    for _ in range(length - 1):
        nb = [cx.neighbor(seq[-1], r) for r in cx.ridges_of(seq[-1])]
        nb = [g for g in nb if g not in seq]
        if not nb:
            break
        seq.append(int(rng.choice(nb)))
    M = unfold_along(cx, seq)
    assert np.allclose(M.linear @ M.linear.T, np.eye(2), atol=1e-12)
    V = cx.facets[seq[-1]].vertices
    W = M(V)
    D0 = np.linalg.norm(V[:, None] - V[None], axis=-1)
    D1 = np.linalg.norm(W[:, None] - W[None], axis=-1)
    assert np.allclose(D0, D1, atol=1e-9)
    # consecutive ridges coincide after unfolding
    for k in range(len(seq) - 1):
        r = cx.ridge_between(seq[k], seq[k + 1])
        a = unfold_along(cx, seq[: k + 1])(cx.ridges[r].local[seq[k]])
        b = unfold_along(cx, seq[: k + 2])(cx.ridges[r].local[seq[k + 1]])
        assert np.allclose(a, b, atol=1e-9)
