"""
Nice subdivisions - an endo-collapsible subdivision of a ball whose
boundary is a derived subdivision of the original boundary.

Cylinder route, for a ball B coned over its boundary S (a single simplex
counts, coned from its barycenter):

1. certify S endo-collapsible and lift the certificate to sd^r S
2. build the staircase prism over sd^r S, which collapses onto its bottom
3. cone its top copy off to a fresh apex and match the cone from the
   lifted sphere certificate
4. glue cone and prism along the top copy and replay the whole collapse

Balls of any other shape fall back to a direct endo-collapsibility search
on successive derived subdivisions.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Hashable, Optional

from .assembly import GluingSpec, glue
from .collapse import CollapseSequence, collapse_order, replay
from .config import RunConfig
from .exceptions import ComplexError, ConstructionError, SearchInconclusive
from .manifold import check_manifold
from .matching import MorseMatching, critical_cells
from .search import Verdict, is_endo_collapsible
from .simplicial import Simplex, SimplicialComplex, boundary_subcomplex, cone, make_simplex
from .stellar_lift import lift_through_derived
from .subdivision import (
    SubdivisionMap,
    compose_maps,
    cone_over_matching,
    derived_subdivision,
    identity_map,
    prism_over,
    refine_keys,
)

logger = logging.getLogger(__name__)

CYLINDER = "cylinder"
SEARCH = "search"


@dataclass
class NicesubResult:
    """
    The subdivided ball, its carrier map from the input, and an
    endo-collapsibility certificate.

    rounds is the number of derived rounds applied to the boundary, route
    names the construction used and keys carries the input vertex keys
    onto the boundary vertices of the result.
    """
    complex: SimplicialComplex
    map: SubdivisionMap
    certificate: MorseMatching
    rounds: int
    critical: Simplex
    route: str
    keys: Dict[int, Hashable] = field(default_factory=dict)


def cone_point(B: SimplicialComplex) -> Optional[Simplex]:
    """
    Source face carrying the cone apex when B is a cone over its
    boundary: the interior cone vertex, or the facet of a single simplex.
    None for any other ball.
    """
    if len(B.facets) == 1:
        return B.facets[0]
    boundary = set(boundary_subcomplex(B).facets())
    common = set(B.facets[0]).intersection(*B.facets[1:])
    for v in sorted(common):
        if {tuple(u for u in f if u != v) for f in B.facets} == boundary:
            return (v,)
    return None


def nicesub_pipeline(
    B: SimplicialComplex,
    config: Optional[RunConfig] = None,
    rounds: int = 1,
    keys: Optional[Dict[int, Hashable]] = None,
) -> NicesubResult:
    """
    Build B' with an endo-collapsibility certificate.

    Args:
        B: Pure complex with non-empty boundary passing the manifold stack
        config: Budget and the maximal number of derived rounds
        rounds: Derived rounds applied to the boundary on the cylinder route
        keys: Vertex keys of B, defaulting to the vertex ids

    Returns:
        NicesubResult

    Raises:
        ComplexError: Closed input or failed manifold checks
        SearchInconclusive: A certificate search ran out of budget
        ConstructionError: Every search was exhausted without a certificate
    """
    config = config or RunConfig()
    if rounds < 0:
        raise ValueError("rounds must be non-negative")
    report = check_manifold(B)
    if not report.ok:
        raise ComplexError(f"input fails the manifold checks: {report.reasons or report.link_failures}")
    if report.closed:
        raise ComplexError("nicesub needs a complex with non-empty boundary")
    keys = dict(keys) if keys is not None else {v: v for v in B.vertices}

    support = cone_point(B)
    if support is not None:
        S = boundary_subcomplex(B).as_complex()
        sphere = is_endo_collapsible(S, config.budget)
        if sphere.found:
            return _cylinder(B, S, sphere.matching, support, rounds, keys)
        logger.info("nicesub: boundary sphere not certified (%s), searching instead", sphere.verdict.value)
    return _search(B, config, keys)


def _cylinder(
    B: SimplicialComplex,
    S: SimplicialComplex,
    W: MorseMatching,
    support: Simplex,
    rounds: int,
    keys: Dict[int, Hashable],
) -> NicesubResult:
    if rounds:
        lifted = lift_through_derived(S, W, rounds)
        Sr, W, to_Sr = lifted.complex, lifted.matching, lifted.map
    else:
        Sr, to_Sr = S, identity_map(S)
    _, boundary_keys = refine_keys(S, {v: keys[v] for v in S.vertices}, rounds)

    prism = prism_over(Sr, list(Sr.vertices))
    top = Sr.relabel(prism.top_vertex)
    apex = top.max_vertex() + 1
    top_matching = MorseMatching(top, [
        (make_simplex(prism.top_vertex[v] for v in s), make_simplex(prism.top_vertex[v] for v in t))
        for s, t in W.pairs
    ])
    sigma, cone_pairs = cone_over_matching(apex, top_matching)
    D = cone(top, apex)

    glued = glue(GluingSpec(prism.complex, D, {v: v for v in top.vertices}))
    Bp = glued.complex
    cone_pairs = [(glued.relabel_right(s), glued.relabel_right(t)) for s, t in cone_pairs]
    sigma = glued.relabel_right(sigma)
    new_apex = glued.right_labels[apex]

    V = MorseMatching(Bp, cone_pairs + list(prism.sequence.steps), boundary_critical=True)
    V.ensure_valid()
    order = collapse_order(MorseMatching(Bp, cone_pairs), frozen=glued.left_image.faces)
    steps = [(s, t) for s, t in order if t is not None] + list(prism.sequence.steps)
    replay(Bp, CollapseSequence(steps), onto=prism.bottom, removed_first=[sigma])

    vertex_support = {v: to_Sr.vertex_support[v] for v in Sr.vertices}
    for v, t in prism.top_vertex.items():
        vertex_support[t] = make_simplex(set(to_Sr.vertex_support[v]) | set(support))
    vertex_support[new_apex] = support
    logger.info("nicesub: cylinder over %d boundary facets, %d pairs", len(Sr.facets), len(V.pairs))
    return NicesubResult(
        Bp, SubdivisionMap(B, Bp, vertex_support), V, rounds, sigma, CYLINDER,
        {v: boundary_keys[v] for v in Sr.vertices},
    )


def _search(B: SimplicialComplex, config: RunConfig, keys: Dict[int, Hashable]) -> NicesubResult:
    current, total = B, identity_map(B)
    inconclusive = False
    for r in range(config.max_derived_rounds + 1):
        if r:
            current, step = derived_subdivision(current, 1)
            total = compose_maps(total, step)
        result = is_endo_collapsible(current, config.budget)
        logger.info("nicesub: search at derived round %d: %s", r, result.verdict.value)
        if result.found:
            V = result.matching
            boundary = boundary_subcomplex(current)
            critical = next(f for f in critical_cells(V) if len(f) == current.dim + 1 and f not in boundary)
            _, refined = refine_keys(B, keys, r)
            return NicesubResult(current, total, V, r, critical, SEARCH, {v: refined[v] for v in boundary.vertices()})
        inconclusive = inconclusive or result.verdict is Verdict.INCONCLUSIVE
    if inconclusive:
        raise SearchInconclusive("no endo-collapsible derived subdivision within budget", stage="nicesub")
    raise ConstructionError(f"no endo-collapsible derived subdivision within {config.max_derived_rounds} rounds")
