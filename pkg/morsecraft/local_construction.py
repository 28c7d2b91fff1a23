"""
Local constructions - glue a tree of d-simplices by repeatedly
identifying two adjacent boundary ridges.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional, Tuple

from .exceptions import ConstructionError
from .manifold import is_tree_of_simplices
from .search import is_lc
from .simplicial import Simplex, SimplicialComplex, boundary_subcomplex, face_key, face_string, is_pseudomanifold, make_simplex

logger = logging.getLogger(__name__)

__all__ = [
    "LocalConstructionTrace",
    "LocalConstruction",
    "identify_ridges",
    "identification_problem",
    "identification_candidates",
    "build_local_construction",
    "is_lc",
]


@dataclass
class LocalConstructionTrace:
    """
    A tree of d-simplices and the ridge pairs to identify, in order.

    Ridges are named in the labels of the complex at the time of the step;
    identifying (P + x, P + y) removes y.
    """
    tree: SimplicialComplex
    identifications: List[Tuple[Simplex, Simplex]] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {
            "identify": [[face_string(a), face_string(b)] for a, b in self.identifications],
        }


@dataclass
class LocalConstruction:
    complex: SimplicialComplex
    closed: bool
    merges: List[Tuple[int, int]] = field(default_factory=list)


def identification_problem(C: SimplicialComplex, r1: Simplex, r2: Simplex) -> Optional[str]:
    """
    Why (r1, r2) cannot be identified in C, or None when it can.
    """
    d = C.dim
    if r1 == r2:
        return "the two ridges coincide"
    if len(r1) != d or len(r2) != d:
        return f"both faces must be ridges of dimension {d - 1}"
    for r in (r1, r2):
        if r not in C or len(C.cofaces(r)) != 1:
            return f"{face_string(r)} is not a boundary ridge"
    shared = set(r1) & set(r2)
    if len(shared) != d - 1:
        return f"{face_string(r1)} and {face_string(r2)} are not adjacent"
    (x,) = set(r1) - shared
    (y,) = set(r2) - shared
    if tuple(sorted((x, y))) in C:
        return f"vertices {x} and {y} span an edge, identification would fold it"
    r2_set = set(r2)
    for face in C.all_faces():
        if y not in face:
            continue
        image = tuple(sorted(x if v == y else v for v in face))
        if image in C and not r2_set.issuperset(face):
            return f"{face_string(face)} would be identified with the existing face {face_string(image)}"
    return None


def identify_ridges(C: SimplicialComplex, r1, r2) -> Tuple[SimplicialComplex, Tuple[int, int]]:
    """
    Glue r2 onto r1.

    Returns:
        (the quotient, (kept vertex, removed vertex))

    Raises:
        ConstructionError: When the ridges are not distinct adjacent
            boundary ridges or the quotient would not be simplicial
    """
    r1, r2 = make_simplex(r1), make_simplex(r2)
    problem = identification_problem(C, r1, r2)
    if problem is not None:
        raise ConstructionError(problem)
    (x,) = set(r1) - set(r2)
    (y,) = set(r2) - set(r1)
    result = SimplicialComplex(([x if v == y else v for v in f] for f in C.facets), face_cap=C.face_cap)
    if len(result.facets) != len(C.facets) or not is_pseudomanifold(result):
        raise ConstructionError(f"identifying {face_string(r2)} with {face_string(r1)} breaks simpliciality")
    return result, (x, y)


def identification_candidates(C: SimplicialComplex) -> List[Tuple[Simplex, Simplex]]:
    """Every admissible (r1, r2) with r1 < r2, in canonical order."""
    ridges = sorted(boundary_subcomplex(C).facets(), key=face_key)
    ridges = [r for r in ridges if len(r) == C.dim]
    candidates = []
    for r1, r2 in combinations(ridges, 2):
        if len(set(r1) & set(r2)) != C.dim - 1:
            continue
        if identification_problem(C, r1, r2) is None:
            candidates.append((r1, r2))
    return candidates


def build_local_construction(trace: LocalConstructionTrace) -> LocalConstruction:
    """
    Replay a trace from its tree, re-checking every step.
    """
    if not is_tree_of_simplices(trace.tree):
        raise ConstructionError("the starting complex is not a tree of simplices")
    current = trace.tree
    merges: List[Tuple[int, int]] = []
    for i, (r1, r2) in enumerate(trace.identifications):
        try:
            current, merged = identify_ridges(current, r1, r2)
        except ConstructionError as e:
            raise ConstructionError(f"step {i}: {e}")
        merges.append(merged)
    closed = boundary_subcomplex(current).is_empty()
    logger.info("local construction: %d identifications, closed=%s", len(merges), closed)
    return LocalConstruction(current, closed, merges)
