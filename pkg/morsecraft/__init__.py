"""
morsecraft - discrete Morse theory on simplicial complexes.

This package provides:
- Simplicial complexes: faces, links, stars, joins, boundaries, GF(2) homology
- Manifold checks: purity, pseudomanifold, link conditions, orientability
- Morse matchings: validation, Morse vectors, discrete Morse functions
- Searches: random and exhaustive matchings, collapses, endo-collapsibility,
  collapse depth and local constructibility
- Subdivisions: stellar and derived subdivisions, flips, prisms, nice
  subdivisions, and matching lifts that preserve critical counts
- Assembly: gluing, composition of boundary-critical matchings, local
  constructions and the handle pipeline
"""

from .exceptions import (
    MorsecraftError,
    ComplexError,
    ResourceLimitError,
    MatchingError,
    CancellationError,
    SubdivisionError,
    LiftDefectError,
    GluingError,
    ConstructionError,
    CompositionError,
    FormatError,
    SearchInconclusive,
)
from .config import RunConfig
from .simplicial import (
    Simplex,
    SimplicialComplex,
    SubcomplexRef,
    build_complex,
    make_simplex,
    face_string,
    face_key,
    parse_face,
    link,
    star,
    join,
    cone,
    boundary_subcomplex,
    interior_faces,
    dual_graph,
    is_pseudomanifold,
    is_strongly_connected,
    is_connected,
    connected_components,
    f_vector,
    euler_characteristic,
)
from .homology import betti_gf2, reduced_betti_gf2
from .manifold import (
    ManifoldReport,
    check_manifold,
    is_manifold_candidate,
    is_orientable,
    is_sphere_candidate,
    is_ball_candidate,
    is_tree_of_simplices,
)
from .matching import (
    MorseMatching,
    MorseVector,
    ValidationReport,
    validate_matching,
    critical_cells,
    morse_vector,
    morse_inequalities,
    morse_function,
)
from .collapse import CollapseSequence, replay
from .search import (
    Verdict,
    random_morse,
    optimal_morse,
    collapses_onto,
    collapses_to_vertex,
    constrained_search,
    is_endo_collapsible,
    collapse_depth,
    is_lc,
)
from .gradient import gradient_paths, cancel_pair, cancel_all
from .subdivision import (
    SubdivisionMap,
    star_face,
    derived_subdivision,
    bistellar_flip,
    prism_over,
    cone_matching,
    cone_over_matching,
    refine_keys,
    compose_maps,
)
from .nicesub import NicesubResult, nicesub_pipeline
from .stellar_lift import LiftResult, lift_matching, lift_through_derived
from .assembly import GluingSpec, GlueResult, ComposeResult, glue, compose_boundary_critical, union_counts
from .local_construction import LocalConstructionTrace, LocalConstruction, build_local_construction
from .handles import Handle, HandleDecomposition, PipelineResult, handle_pipeline
from .execution_graph import Stage, StageGraph, StageStatus
from .artifact import MatchingCertificate, CollapseCertificate, SubdivisionRecord, DepthReport, complex_hash

__version__ = "0.1.0"
__all__ = [
    # Errors and configuration
    "MorsecraftError",
    "ComplexError",
    "ResourceLimitError",
    "MatchingError",
    "CancellationError",
    "SubdivisionError",
    "LiftDefectError",
    "GluingError",
    "ConstructionError",
    "CompositionError",
    "FormatError",
    "SearchInconclusive",
    "RunConfig",
    # Complexes
    "Simplex",
    "SimplicialComplex",
    "SubcomplexRef",
    "build_complex",
    "make_simplex",
    "face_string",
    "face_key",
    "parse_face",
    "link",
    "star",
    "join",
    "cone",
    "boundary_subcomplex",
    "interior_faces",
    "dual_graph",
    "is_pseudomanifold",
    "is_strongly_connected",
    "is_connected",
    "connected_components",
    "f_vector",
    "euler_characteristic",
    "betti_gf2",
    "reduced_betti_gf2",
    "ManifoldReport",
    "check_manifold",
    "is_manifold_candidate",
    "is_orientable",
    "is_sphere_candidate",
    "is_ball_candidate",
    "is_tree_of_simplices",
    # Morse matchings and searches
    "MorseMatching",
    "MorseVector",
    "ValidationReport",
    "validate_matching",
    "critical_cells",
    "morse_vector",
    "morse_inequalities",
    "morse_function",
    "CollapseSequence",
    "replay",
    "Verdict",
    "random_morse",
    "optimal_morse",
    "collapses_onto",
    "collapses_to_vertex",
    "constrained_search",
    "is_endo_collapsible",
    "collapse_depth",
    "is_lc",
    "gradient_paths",
    "cancel_pair",
    "cancel_all",
    # Subdivisions and lifts
    "SubdivisionMap",
    "star_face",
    "derived_subdivision",
    "bistellar_flip",
    "prism_over",
    "cone_matching",
    "cone_over_matching",
    "refine_keys",
    "compose_maps",
    "NicesubResult",
    "nicesub_pipeline",
    "LiftResult",
    "lift_matching",
    "lift_through_derived",
    # Assembly
    "GluingSpec",
    "GlueResult",
    "ComposeResult",
    "glue",
    "compose_boundary_critical",
    "union_counts",
    "LocalConstructionTrace",
    "LocalConstruction",
    "build_local_construction",
    "Handle",
    "HandleDecomposition",
    "PipelineResult",
    "handle_pipeline",
    "Stage",
    "StageGraph",
    "StageStatus",
    # Artifacts
    "MatchingCertificate",
    "CollapseCertificate",
    "SubdivisionRecord",
    "DepthReport",
    "complex_hash",
]
