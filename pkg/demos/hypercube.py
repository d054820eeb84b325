"""Unfolding the boundary of the 4-cube, a three-dimensional surface.

The foldout is a solid in R^3 made of eight unit-cube pieces cut up
along the cut locus.  Writes hypercube.off for a mesh viewer.
"""

from pathlib import Path

from polyfold import hypercube, io, run_source_unfolding
from polyfold.geodesic import geodesic_distance


def main():
    cx = hypercube(4)
    res = run_source_unfolding(cx, 0, [0.5, 0.5, 0.5])
    opp = next(k for k in range(1, cx.n_facets) if cx.ridge_between(0, k) is None)
    print(f"{cx.n_facets} facets, {len(res.events)} events, max {res.max_images()} images per facet")
    print(f"distance to the opposite facet centre: {geodesic_distance(res, (opp, [0.5, 0.5, 0.5])):.12g}")
    print(f"foldout volume: {res.foldout.volume():.12g} in {len(res.foldout.cells)} cells")
    (Path(__file__).parent / "hypercube.off").write_text(io.foldout_off(res))


if __name__ == "__main__":
    main()
