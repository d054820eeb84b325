"""Source unfoldings of convex polyhedral surfaces in any dimension.

The surface is a complex of convex facets glued along ridges.  From a
source point, :func:`run_source_unfolding` finds every source image in
every facet chart and assembles the source foldout, a star-shaped,
nonoverlapping polyhedral ball in the tangent space at the source.
Distances, shortest paths, geodesic Voronoi diagrams and the cut locus
are read off the completed run.
"""
from .complex import (
    FacetComplex,
    box_polytope,
    build_abstract_complex,
    build_facet_complex,
    cube,
    hpolytope_from_points,
    hypercube,
    random_hull,
    regular_tetrahedron,
)
from .config import RunConfig, Tolerances, default_tolerances, set_default_tolerances
from .errors import InputError, NumericFailure, PolyfoldError
from .folding import AffineIsometry, fold_along, folding_map, unfold_along
from .geodesic import (
    brute_force_distance,
    geodesic_distance,
    geodesic_voronoi,
    sequence_oracle,
    shortest_paths_to,
)
from .geometry import HPolytope
from .jets import (
    Ordering,
    angle_sequence,
    compare_angle_sequences,
    is_jet_frame,
    iterated_tangent_cone,
    minimal_jet_frame,
)
from .unfolder import (
    UnfoldResult,
    cut_locus,
    run_multi_source,
    run_source_unfolding,
    vistal_tree,
)
from .voronoi import can_see, restricted_voronoi_cell, ridge_window

__version__ = "0.1.0"

__all__ = [
    "AffineIsometry", "FacetComplex", "HPolytope", "InputError", "NumericFailure", "Ordering",
    "PolyfoldError", "RunConfig", "Tolerances", "UnfoldResult", "angle_sequence", "box_polytope",
    "brute_force_distance", "build_abstract_complex", "build_facet_complex", "can_see",
    "compare_angle_sequences", "cube", "cut_locus", "default_tolerances", "fold_along", "folding_map",
    "geodesic_distance", "geodesic_voronoi", "hpolytope_from_points", "hypercube", "is_jet_frame",
    "iterated_tangent_cone", "minimal_jet_frame", "random_hull", "regular_tetrahedron",
    "restricted_voronoi_cell", "ridge_window", "run_multi_source", "run_source_unfolding",
    "sequence_oracle", "set_default_tolerances", "shortest_paths_to", "unfold_along", "vistal_tree",
]
