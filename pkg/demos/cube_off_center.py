"""Top face of the cube seen from an off-centre source.

Every way of unfolding the source into the top face is listed.  Those
that are source images own a cell of the top face; the rest are beaten
everywhere on the face by some true image, which is checked on a grid.
"""

import numpy as np

from polyfold import cube, run_source_unfolding
from polyfold.geodesic import sequence_oracle
from polyfold.voronoi import cut_cells


def main():
    cx = cube()
    v = [0.3, 0.4]
    res = run_source_unfolding(cx, "bot", v)
    T = cx.facet_index("top")
    Y = res.images[T]
    cells = cut_cells(cx, T, Y)

    g = np.linspace(0, 1, 101)
    grid = np.stack(np.meshgrid(g, g), axis=-1).reshape(-1, 2)
    near = np.min(np.linalg.norm(grid[:, None] - Y[None], axis=-1), axis=1)

    seen = set()
    orc = sequence_oracle(cx, ("bot", v))
    for seq, M in sorted(orc.by_last[T], key=lambda t: len(t[0])):
        nu = M.inverse()(np.array([v]))[0]
        key = tuple(np.round(nu, 9))
        if key in seen:
            continue
        seen.add(key)
        names = " > ".join(cx.facets[k].name for k in seq)
        hit = np.flatnonzero(np.linalg.norm(Y - nu, axis=1) < 1e-9)
        if len(hit):
            print(f"image   {nu.round(3)} via {names}: cell area {cells[hit[0]].volume():.4f}")
        else:
            gap = np.min(np.linalg.norm(grid - nu, axis=1) - near)
            print(f"false   {nu.round(3)} via {names}: at least {gap:.4f} farther than a true image")
    print(f"{len(Y)} source images on the top face")


if __name__ == "__main__":
    main()
