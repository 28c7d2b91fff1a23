"""
Subdivisions - stellar and derived subdivisions, bistellar flips and
staircase prisms.

Every subdivision returns a SubdivisionMap. The map records, for each
vertex of the target, the source face whose relative interior contains
it (an old vertex maps to itself, a starring apex to the starred face).
Carriers follow from this: a target face lies in the relative interior of
the union of its vertices' supports.
"""

import logging
import threading
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Hashable, List, Optional, Sequence, Set, Tuple

from .collapse import CollapseSequence, replay
from .exceptions import ComplexError, MatchingError, SubdivisionError
from .matching import MorseMatching, critical_cells
from .search import RemovalSearch
from .simplicial import (
    Simplex,
    SimplicialComplex,
    SubcomplexRef,
    dim_order,
    face_key,
    face_string,
    facets_of,
    link,
    make_simplex,
    subfaces,
    top_down_order,
)

logger = logging.getLogger(__name__)


@dataclass
class SubdivisionMap:
    """
    Carrier data between a complex and one of its subdivisions.
    """
    source: SimplicialComplex
    target: SimplicialComplex
    vertex_support: Dict[int, Simplex]
    _carrier: Optional[Dict[Simplex, FrozenSet[Simplex]]] = field(default=None, repr=False, compare=False)

    def support(self, face: Simplex) -> Simplex:
        """Smallest source face containing the target face."""
        verts: Set[int] = set()
        for v in face:
            verts.update(self.vertex_support[v])
        return tuple(sorted(verts))

    @property
    def carrier(self) -> Dict[Simplex, FrozenSet[Simplex]]:
        """Source face -> target faces in its relative interior."""
        if self._carrier is None:
            groups: Dict[Simplex, Set[Simplex]] = {f: set() for f in self.source.all_faces()}
            for face in self.target.all_faces():
                groups[self.support(face)].add(face)
            self._carrier = {f: frozenset(fs) for f, fs in groups.items()}
        return self._carrier

    def carrier_closure(self, face: Simplex) -> List[Simplex]:
        """Target faces subdividing the closed source face."""
        result: List[Simplex] = []
        for sub in subfaces(face):
            result.extend(self.carrier[sub])
        return sorted(result, key=dim_order)

    @property
    def apex_faces(self) -> Dict[int, Simplex]:
        """Fresh vertices and the source faces they subdivide."""
        return {v: s for v, s in self.vertex_support.items() if len(s) > 1}

    def to_dict(self) -> Dict[str, List[str]]:
        return {
            face_string(f): sorted(face_string(g) for g in targets)
            for f, targets in sorted(self.carrier.items(), key=lambda kv: dim_order(kv[0]))
        }


def identity_map(K: SimplicialComplex) -> SubdivisionMap:
    return SubdivisionMap(K, K, {v: (v,) for v in K.vertices})


def compose_maps(first: SubdivisionMap, second: SubdivisionMap) -> SubdivisionMap:
    """The map from first.source to second.target."""
    if second.source != first.target:
        raise SubdivisionError("maps do not compose: intermediate complexes differ")
    support: Dict[int, Simplex] = {}
    for v, face in second.vertex_support.items():
        verts: Set[int] = set()
        for u in face:
            verts.update(first.vertex_support[u])
        support[v] = tuple(sorted(verts))
    return SubdivisionMap(first.source, second.target, support)


def _star_facets(facets: Set[Simplex], s: Simplex, apex: int) -> Set[Simplex]:
    s_set = set(s)
    touched = [f for f in facets if s_set.issubset(f)]
    if not touched:
        raise ComplexError(f"{face_string(s)} is not a face")
    result = set(facets)
    for f in touched:
        result.discard(f)
        for v in s:
            result.add(tuple(sorted([u for u in f if u != v] + [apex])))
    return result


def star_face(K: SimplicialComplex, s: Sequence[int], apex: Optional[int] = None) -> Tuple[SimplicialComplex, SubdivisionMap]:
    """
    Stellar subdivision of K at s with a fresh apex.

    Starring a vertex is the identity subdivision.

    Args:
        K: Complex to subdivide
        s: Face to star
        apex: Fresh vertex id (default max vertex + 1)

    Returns:
        (subdivided complex, carrier map)
    """
    s = make_simplex(s)
    if s not in K:
        raise ComplexError(f"{face_string(s)} is not a face of the complex")
    if len(s) == 1:
        return K, identity_map(K)
    apex = K.max_vertex() + 1 if apex is None else apex
    if apex in set(K.vertices):
        raise ComplexError(f"apex {apex} is not fresh")
    target = SimplicialComplex(_star_facets(set(K.facets), s, apex), face_cap=K.face_cap)
    support = {v: (v,) for v in K.vertices}
    support[apex] = s
    logger.debug("starred %s with apex %d", face_string(s), apex)
    return target, SubdivisionMap(K, target, support)


def derived_schedule(K: SimplicialComplex) -> List[Simplex]:
    """Faces of dimension >= 1, by decreasing dimension then face_key."""
    schedule: List[Simplex] = []
    for k in range(K.dim, 0, -1):
        schedule.extend(sorted(K.faces(k), key=face_key))
    return schedule


def derived_subdivision(K: SimplicialComplex, rounds: int = 1) -> Tuple[SimplicialComplex, SubdivisionMap]:
    """
    Iterated barycentric subdivision realized as starrings.

    Apex ids are allocated as max id + 1, + 2, ... in starring order.
    """
    if rounds < 1:
        raise ValueError("rounds must be at least 1")
    total = identity_map(K)
    current = K
    for r in range(rounds):
        facets = set(current.facets)
        support = {v: (v,) for v in current.vertices}
        next_id = current.max_vertex() + 1
        for s in derived_schedule(current):
            facets = _star_facets(facets, s, next_id)
            support[next_id] = s
            next_id += 1
        target = SimplicialComplex(facets, face_cap=K.face_cap)
        # materialize the whole poset now so the face cap triggers here
        target.num_faces()
        step = SubdivisionMap(current, target, support)
        total = compose_maps(total, step)
        current = target
        logger.info("derived round %d: %d facets", r + 1, len(target.facets))
    return current, total


def count_maximal_chains(K: SimplicialComplex) -> int:
    """Maximal chains of non-empty faces, counted directly."""
    counts: Dict[Simplex, int] = {}
    for face in K.all_faces():
        if len(face) == 1:
            counts[face] = 1
        else:
            counts[face] = sum(counts[sub] for sub in facets_of(face))
    return sum(counts[f] for f in K.facets)


def bistellar_flip(M: SimplicialComplex, s: Sequence[int], t: Sequence[int]) -> SimplicialComplex:
    """
    Replace s * boundary(t) by boundary(s) * t.

    Requires dim s + dim t = dim M, link(M, s) equal to the boundary of t,
    and t not already a face.
    """
    s, t = make_simplex(s), make_simplex(t)
    if (len(s) - 1) + (len(t) - 1) != M.dim:
        raise SubdivisionError(f"dim {face_string(s)} + dim {face_string(t)} must equal {M.dim}")
    if s not in M:
        raise SubdivisionError(f"{face_string(s)} is not a face")
    if t in M:
        raise SubdivisionError(f"{face_string(t)} is already a face")
    if set(s) & set(t):
        raise SubdivisionError("s and t must be disjoint")
    expected = {f for f in facets_of(t)} if len(t) > 1 else set()
    if set(link(M, s).facets) != expected:
        raise SubdivisionError(f"link of {face_string(s)} is not the boundary of {face_string(t)}")
    s_set = set(s)
    kept = [f for f in M.facets if not s_set.issubset(f)]
    if len(s) == 1:
        added = [t]
    else:
        added = [tuple(sorted([u for u in s if u != v] + list(t))) for v in s]
    logger.debug("flip %s -> %s", face_string(s), face_string(t))
    return SimplicialComplex(kept + added, face_cap=M.face_cap)


# -- staircase prisms ------------------------------------------------------

_prism_cache: Dict[int, List[Tuple[Simplex, Simplex]]] = {}
_prism_lock = threading.Lock()


def _staircase(bottom: Sequence[int], top: Sequence[int]) -> List[Simplex]:
    k = len(bottom)
    return [tuple(sorted(list(bottom[: j + 1]) + list(top[j:]))) for j in range(k)]


def _model_prism_collapse(k: int) -> List[Tuple[Simplex, Simplex]]:
    """
    Collapse of the staircase prism over the k-simplex onto its bottom and
    the prism over its boundary. Bottom vertices are 0..k, top k+1..2k+1.
    """
    with _prism_lock:
        cached = _prism_cache.get(k)
        if cached is not None:
            return cached
        bottom = list(range(k + 1))
        top = [k + 1 + i for i in bottom]
        model = SimplicialComplex(_staircase(bottom, top))
        top_ids = set(top)

        def projection(face: Simplex) -> FrozenSet[int]:
            return frozenset(v - (k + 1) if v in top_ids else v for v in face)

        full = frozenset(bottom)
        frozen = [
            f for f in model.all_faces()
            if projection(f) != full or not (set(f) & top_ids)
        ]
        outcome = RemovalSearch(model, frozen, [0] * (model.dim + 1), stage=f"prism{k}").run()
        if not outcome.found:
            raise SubdivisionError(f"no collapse found for the prism over a {k}-simplex")
        _prism_cache[k] = outcome.pairs
        return outcome.pairs


@dataclass
class PrismResult:
    complex: SimplicialComplex
    bottom: SubcomplexRef
    top: SubcomplexRef
    sequence: CollapseSequence
    top_vertex: Dict[int, int]


def prism_over(K: SimplicialComplex, vertex_order: Sequence[int]) -> PrismResult:
    """
    Staircase triangulation of K x I with a verified collapse onto the
    bottom copy.

    Args:
        K: Pure complex
        vertex_order: Permutation of the vertex set of K

    Returns:
        PrismResult holding the prism, both copies of K and the collapse
    """
    order = list(vertex_order)
    if sorted(order) != list(K.vertices):
        raise SubdivisionError("vertex_order must be a permutation of the vertex set")
    if not K.is_pure():
        raise ComplexError("prism_over needs a pure complex")
    rank = {v: i for i, v in enumerate(order)}
    base = K.max_vertex() + 1
    top_vertex = {v: base + rank[v] for v in order}

    facets = []
    for f in K.facets:
        ordered = sorted(f, key=rank.__getitem__)
        facets.extend(_staircase(ordered, [top_vertex[v] for v in ordered]))
    C = SimplicialComplex(facets, face_cap=K.face_cap)
    bottom = SubcomplexRef.closure(C, K.facets)
    top = SubcomplexRef.closure(C, (tuple(sorted(top_vertex[v] for v in f)) for f in K.facets))

    steps: List[Tuple[Simplex, Simplex]] = []
    for face in sorted(K.all_faces(), key=top_down_order):
        ordered = sorted(face, key=rank.__getitem__)
        k = len(ordered) - 1
        rename = {i: ordered[i] for i in range(k + 1)}
        rename.update({k + 1 + i: top_vertex[ordered[i]] for i in range(k + 1)})
        for a, b in _model_prism_collapse(k):
            steps.append((
                tuple(sorted(rename[v] for v in a)),
                tuple(sorted(rename[v] for v in b)),
            ))
    sequence = CollapseSequence(steps)
    replay(C, sequence, onto=bottom)
    logger.info("prism over %d facets: %d collapse steps verified", len(K.facets), len(steps))
    return PrismResult(C, bottom, top, sequence, top_vertex)


# -- cones -----------------------------------------------------------------

def cone_matching(apex: int, simplex: Sequence[int], pivot: Optional[int] = None) -> Tuple[Simplex, List[Tuple[Simplex, Simplex]]]:
    """
    Endo-collapse of the open cone apex * boundary(simplex).

    With rho = simplex minus pivot, the face apex + rho is critical and
    apex + G is matched with apex + G + pivot for every proper subface G of
    rho (G empty included). Pairs are listed top-down, in removal order.

    Returns:
        (critical facet, pairs)
    """
    simplex = make_simplex(simplex)
    if len(simplex) < 2:
        raise ComplexError("cone matching needs a simplex of dimension >= 1")
    pivot = simplex[-1] if pivot is None else pivot
    if pivot not in simplex:
        raise ComplexError(f"pivot {pivot} is not a vertex of {face_string(simplex)}")
    rho = tuple(v for v in simplex if v != pivot)
    critical = tuple(sorted(rho + (apex,)))
    pairs: List[Tuple[Simplex, Simplex]] = []
    groups: List[Simplex] = [()] + [g for g in subfaces(rho) if len(g) < len(rho)]
    for g in sorted(groups, key=top_down_order):
        lower = tuple(sorted(g + (apex,)))
        upper = tuple(sorted(g + (apex, pivot)))
        pairs.append((lower, upper))
    return critical, pairs


def cone_over_matching(apex: int, V: MorseMatching) -> Tuple[Simplex, List[Tuple[Simplex, Simplex]]]:
    """
    Endo-collapse of the cone apex * S from an endo-collapsible matching
    V on the closed sphere S.

    V has one critical vertex w and one critical facet F. The cone pairs
    apex with apex + w and lifts every pair of V to the faces joined with
    apex; apex + F is left critical and every face of S stays unmatched.

    Returns:
        (critical facet, pairs) with pairs listed top-down
    """
    S = V.complex
    if apex in S.vertices:
        raise ComplexError(f"apex {apex} is already a vertex of the sphere")
    critical = sorted(critical_cells(V), key=dim_order)
    if len(critical) != 2 or len(critical[0]) != 1 or len(critical[1]) != S.dim + 1:
        raise MatchingError("cone needs a matching with one critical vertex and one critical facet")
    w, top = critical
    pairs = [(make_simplex(s + (apex,)), make_simplex(t + (apex,))) for s, t in V.pairs]
    pairs.append(((apex,), make_simplex(w + (apex,))))
    pairs.sort(key=lambda p: top_down_order(p[1]))
    return make_simplex(top + (apex,)), pairs


# -- vertex keys -----------------------------------------------------------


def refine_keys(K: SimplicialComplex, keys: Dict[int, Hashable], rounds: int) -> Tuple[SimplicialComplex, Dict[int, Hashable]]:
    """
    Carry vertex keys through rounds of derived subdivision.

    An old vertex keeps its key and an apex keys the set of keys of the
    face it subdivides, so keys do not depend on vertex ids.
    """
    for _ in range(rounds):
        K, step = derived_subdivision(K, 1)
        keys = dict(keys)
        for apex, face in step.apex_faces.items():
            keys[apex] = frozenset(keys[v] for v in face)
    return K, keys
