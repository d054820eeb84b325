"""Event log of a 3 x 1 x 1 box with the source in the middle of the bottom.

Prints every event in processing order with its radius and facet
sequence, then the vistal tree as an indented outline.
"""

from polyfold import box_polytope, build_facet_complex, run_source_unfolding
from polyfold.unfolder import vistal_tree


def main():
    cx = build_facet_complex(*box_polytope([3, 1, 1]))
    res = run_source_unfolding(cx, "bot", [1.5, 0.5])
    name = lambda k: cx.facets[k].name
    for e in res.events:
        print(f"{e.index:3d}  r={e.radius:.4f}  {' > '.join(map(name, e.facet_sequence))}")

    tree = vistal_tree(res)

    def show(k, depth):
        e = res.events[k]
        print("  " * depth + f"{name(e.facet)} (r={e.radius:.3f})")
        for c in tree.children[k]:
            show(c, depth + 1)

    print()
    for r in tree.roots:
        show(r, 0)


if __name__ == "__main__":
    main()
