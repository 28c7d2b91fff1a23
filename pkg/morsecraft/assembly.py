"""
Gluing manifolds along boundary pieces and composing boundary-critical
Morse matchings across the union.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from .exceptions import CompositionError, GluingError
from .matching import MorseMatching, Pair, critical_cells, morse_vector, validate_matching
from .search import DEFAULT_BUDGET, constrained_search
from .simplicial import (
    Simplex,
    SimplicialComplex,
    SubcomplexRef,
    boundary_subcomplex,
    face_key,
    face_string,
    is_pseudomanifold,
)

logger = logging.getLogger(__name__)


@dataclass
class GluingSpec:
    """
    Two d-dimensional pseudomanifolds and a vertex map from part of the
    boundary of left onto part of the boundary of right.

    identification maps left vertex -> right vertex.
    """
    left: SimplicialComplex
    right: SimplicialComplex
    identification: Dict[int, int]

    def to_dict(self) -> Dict:
        return {"map": [[a, b] for a, b in sorted(self.identification.items())]}


@dataclass
class GlueResult:
    """
    The quotient M with the images of both sides and of the identified
    region. right_labels maps each vertex of the right complex to its
    label in M.
    """
    complex: SimplicialComplex
    left_image: SubcomplexRef
    right_image: SubcomplexRef
    intersection: SubcomplexRef
    right_labels: Dict[int, int] = field(default_factory=dict)

    def relabel_right(self, face: Sequence[int]) -> Simplex:
        return tuple(sorted(self.right_labels[v] for v in face))


def _induced(region: SubcomplexRef, vertices) -> List[Simplex]:
    keep = set(vertices)
    return [f for f in region.faces if keep.issuperset(f)]


def glue(spec: GluingSpec) -> GlueResult:
    """
    Identify the induced boundary subcomplexes named by spec.

    Unidentified right vertices are relabeled max(left)+1, max(left)+2, ...
    in increasing order.

    Raises:
        GluingError: On a non-injective map, a region that is not a pure
            (d-1)-dimensional isomorphic copy, or faces of the two sides
            colliding outside the identified region
    """
    left, right = spec.left, spec.right
    if left.dim != right.dim:
        raise GluingError(f"dimensions differ: {left.dim} and {right.dim}")
    if not (is_pseudomanifold(left) and is_pseudomanifold(right)):
        raise GluingError("both sides must be pseudomanifolds")
    d = left.dim
    mapping = dict(spec.identification)
    if not mapping:
        raise GluingError("empty identification")
    if len(set(mapping.values())) != len(mapping):
        raise GluingError("identification is not injective")
    left_vertices, right_vertices = set(left.vertices), set(right.vertices)
    for a, b in mapping.items():
        if a not in left_vertices or b not in right_vertices:
            raise GluingError(f"identified pair {a}->{b} is not a pair of vertices")

    left_region = _induced(boundary_subcomplex(left), mapping.keys())
    right_region = set(_induced(boundary_subcomplex(right), mapping.values()))
    mapped = {tuple(sorted(mapping[v] for v in f)) for f in left_region}
    if mapped != right_region:
        extra = sorted(mapped ^ right_region, key=face_key)
        raise GluingError(f"identification is not simplicial on the boundary near {face_string(extra[0])}")
    region = SubcomplexRef(left, frozenset(left_region))
    if set(region.vertices()) != set(mapping):
        raise GluingError("every identified vertex must lie in the identified boundary region")
    if region.dim != d - 1 or not region.as_complex().is_pure():
        raise GluingError(f"identified region must be pure of dimension {d - 1}")

    inverse = {b: a for a, b in mapping.items()}
    base = left.max_vertex() + 1
    fresh = sorted(v for v in right.vertices if v not in inverse)
    labels = {v: inverse[v] for v in right.vertices if v in inverse}
    labels.update({v: base + i for i, v in enumerate(fresh)})

    moved = right.relabel(labels)
    left_faces = set(left.all_faces())
    for face in moved.all_faces():
        if face in left_faces and face not in region:
            raise GluingError(f"face collision at {face_string(face)} outside the identified region")

    M = SimplicialComplex(list(left.facets) + list(moved.facets), face_cap=max(left.face_cap, right.face_cap))
    if len(M.facets) != len(left.facets) + len(moved.facets):
        raise GluingError("a facet of the right side coincides with a facet of the left side")
    if not is_pseudomanifold(M):
        raise GluingError("the quotient is not a pseudomanifold")
    result = GlueResult(
        complex=M,
        left_image=SubcomplexRef.closure(M, left.facets),
        right_image=SubcomplexRef.closure(M, moved.facets),
        intersection=SubcomplexRef(M, region.faces),
        right_labels=labels,
    )
    logger.debug("glued %d + %d facets along %d faces", len(left.facets), len(moved.facets), len(region))
    return result


def union_counts(
    f_int: Sequence[int],
    g_int: Sequence[int],
    h_int: Sequence[int],
    d: int,
) -> List[int]:
    """
    Interior critical counts of the composed matching: the sum of the three
    for k <= d-2, the sum minus one for k in {d-1, d}. h_int has length d.
    """
    counts = []
    for k in range(d + 1):
        h = h_int[k] if k < len(h_int) else 0
        total = f_int[k] + g_int[k] + h
        counts.append(total - 1 if k >= d - 1 else total)
    return counts


@dataclass
class ComposeResult:
    matching: MorseMatching
    glued: GlueResult
    tier: int
    expected: List[int]


def _interior_counts(V: MorseMatching) -> List[int]:
    vector = morse_vector(V)
    if vector.c_int is None:
        raise CompositionError("matching does not live on a pseudomanifold")
    return list(vector.c_int)


def _check_inputs(spec: GluingSpec, glued: GlueResult, f, g, h, allow_components: bool) -> None:
    d = spec.left.dim
    if d < 2:
        raise CompositionError(f"composition needs dimension at least 2, got {d}")
    for name, V, K in (("f", f, spec.left), ("g", g, spec.right), ("h", h, glued.intersection.as_complex())):
        if V.complex != K:
            raise CompositionError(f"{name} does not live on the expected complex")
        if not V.boundary_critical:
            raise CompositionError(f"{name} is not flagged boundary-critical")
        report = validate_matching(V)
        if not report.valid:
            raise CompositionError(f"{name} is invalid: {report.violations[0].message}")
    if _interior_counts(f)[d] != 1 or _interior_counts(g)[d] != 1:
        raise CompositionError("f and g must each have exactly one critical interior facet")
    top = _interior_counts(h)[d - 1]
    if top != 1 and not (allow_components and top >= 1):
        raise CompositionError(f"h must have exactly one critical interior {d - 1}-cell, has {top}")


def _retarget(g: MorseMatching, facet: Simplex, budget: int) -> Optional[MorseMatching]:
    """g with its critical interior facet moved to facet, same counts."""
    boundary = boundary_subcomplex(g.complex)
    current = [c for c in critical_cells(g) if len(c) == len(facet) and c not in boundary]
    if current == [facet]:
        return g
    counts = _interior_counts(g)
    outcome, V = constrained_search(
        g.complex, counts, budget, pinned=[facet], stage="retarget", exact_counts=True
    )
    logger.debug("retarget to %s: %s", face_string(facet), outcome.verdict.value)
    return V


def compose_boundary_critical(
    spec: GluingSpec,
    f: MorseMatching,
    g: MorseMatching,
    h: MorseMatching,
    budget: int = DEFAULT_BUDGET,
    allow_components: bool = False,
) -> ComposeResult:
    """
    Boundary-critical matching on the union of spec with the union counts.

    Args:
        spec: Gluing of M1 = spec.left and M2 = spec.right
        f: Boundary-critical on M1 with one critical interior facet
        g: Boundary-critical on M2 with one critical interior facet
        h: Boundary-critical on the identified region, in left labels,
            with one critical interior (d-1)-cell
        budget: Node expansions for the retarget and fallback searches
        allow_components: Accept h with several critical interior
            (d-1)-cells, one per component of a disconnected region

    Returns:
        ComposeResult whose matching has interior counts union_counts(f, g, h)

    Raises:
        CompositionError: On violated preconditions or when neither the
            direct construction nor the fallback search succeeds
    """
    glued = glue(spec)
    _check_inputs(spec, glued, f, g, h, allow_components)
    d = spec.left.dim
    M = glued.complex
    expected = union_counts(_interior_counts(f), _interior_counts(g), _interior_counts(h), d)

    u = _direct(glued, f, g, h, budget)
    tier = 1
    if u is None or list(morse_vector(u).c_int or ()) != expected:
        tier = 2
        logger.info("compose: direct construction unavailable, searching for counts %s", expected)
        outcome, u = constrained_search(M, expected, budget, stage="compose", exact_counts=True)
        if u is None:
            raise CompositionError(
                f"no boundary-critical matching with interior counts {expected} on the union "
                f"(fallback search {outcome.verdict.value} after {outcome.expansions} expansions)"
            )
    achieved = list(morse_vector(u).c_int or ())
    if achieved != expected:
        raise CompositionError(f"composed counts {achieved} differ from {expected}")
    logger.info("compose: tier %d matching with interior counts %s", tier, achieved)
    return ComposeResult(u, glued, tier, expected)


def _direct(glued: GlueResult, f: MorseMatching, g: MorseMatching, h: MorseMatching, budget: int) -> Optional[MorseMatching]:
    d = f.complex.dim
    region_boundary = boundary_subcomplex(h.complex)
    sigmas = [c for c in critical_cells(h) if len(c) == d and c not in region_boundary]
    sigma = sigmas[0]
    labels = glued.right_labels
    inverse = {b: a for a, b in labels.items()}
    sigma_right = tuple(sorted(inverse[v] for v in sigma))
    owners = g.complex.cofaces(sigma_right)
    if len(owners) != 1:
        return None
    g2 = _retarget(g, owners[0], budget)
    if g2 is None:
        return None
    pairs: List[Pair] = list(f.pairs) + list(h.pairs)
    pairs.extend((glued.relabel_right(a), glued.relabel_right(b)) for a, b in g2.pairs)
    pairs.append((sigma, glued.relabel_right(owners[0])))
    u = MorseMatching(glued.complex, pairs, boundary_critical=True)
    report = validate_matching(u)
    if not report.valid:
        logger.debug("compose: direct matching rejected: %s", report.violations[0].message)
        return None
    return u

