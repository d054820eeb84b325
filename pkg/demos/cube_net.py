"""Source foldout of the unit cube from the centre of its bottom face.

Writes cube_net.svg and cube_net.json next to this script and prints
the image counts per face together with a few intrinsic distances.
"""

from pathlib import Path

from polyfold import cube, io, run_source_unfolding
from polyfold.geodesic import geodesic_distance, shortest_paths_to

HERE = Path(__file__).parent


def main():
    cx = cube()
    res = run_source_unfolding(cx, "bot", [0.5, 0.5])
    for f in cx.facets:
        print(f"{f.name:>6}: {len(res.images[f.index])} source images")
    print(f"{len(res.events)} events, {len(res.foldout.cells)} foldout cells, area {res.foldout.volume():.12g}")

    for name, w in [("top centre", ("top", [0.5, 0.5])), ("top edge", ("top", [0.5, 0.0])),
                    ("top diagonal", ("top", [0.3, 0.3]))]:
        paths = shortest_paths_to(res, w)
        seqs = [" > ".join(cx.facets[k].name for k in p.facet_sequence) for p in paths]
        print(f"{name}: distance {geodesic_distance(res, w):.6g} via {seqs}")

    (HERE / "cube_net.svg").write_text(io.foldout_svg(res))
    io.write_json(HERE / "cube_net.json", io.foldout_document(res))


if __name__ == "__main__":
    main()
