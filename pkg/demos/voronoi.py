"""Geodesic Voronoi diagram of three sources on the cube.

Region areas are printed and a drawing of the regions in the face
charts is written to voronoi.svg.
"""

from pathlib import Path

from polyfold import cube, geodesic_voronoi, io


def main():
    cx = cube()
    sources = [("bot", [0.5, 0.5]), ("top", [0.5, 0.5]), ("front", [0.2, 0.7])]
    gvd = geodesic_voronoi(cx, sources)
    for i, (F, x) in enumerate(sources):
        print(f"source {i} on {F} at {x}: area {gvd.region_volume(i):.6f}")
    print(f"total {sum(gvd.region_volume(i) for i in range(len(sources))):.12g}")
    (Path(__file__).parent / "voronoi.svg").write_text(io.gvd_svg(gvd))


if __name__ == "__main__":
    main()
