"""
Stellar lift - transport a Morse matching through a stellar subdivision
with the critical counts preserved exactly.

Starring s with apex a subdivides every face F = s + R into the pieces
a + A + R with A a proper subset of s. The lifted matching keeps faces
away from s untouched, cones pairs that contain s with the opposite
vertex, and disposes of the remaining pieces of a subdivided face by an
endo-collapse of that region, computed once per region shape on a model
simplex.
"""

import logging
import threading
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Tuple

from .exceptions import LiftDefectError
from .matching import MorseMatching, Pair, critical_cells, validate_matching
from .search import DEFAULT_BUDGET, constrained_search
from .simplicial import Simplex, SimplicialComplex, boundary_subcomplex, face_key, face_string, make_simplex, top_down_order
from .subdivision import SubdivisionMap, compose_maps, derived_schedule, identity_map, star_face

logger = logging.getLogger(__name__)

_region_cache: Dict[Tuple[int, int, int], List[Pair]] = {}
_region_lock = threading.Lock()


@dataclass
class LiftResult:
    """
    Lifted matching with the map it was lifted along.

    correspondence maps each old critical face to the new critical faces
    it accounts for.
    """
    complex: SimplicialComplex
    map: SubdivisionMap
    matching: MorseMatching
    correspondence: Dict[Simplex, List[Simplex]] = field(default_factory=dict)


def _proper_subsets(s: Simplex) -> List[Simplex]:
    subsets: List[Simplex] = []
    for k in range(len(s)):
        subsets.extend(combinations(s, k))
    return subsets


def _piece(apex: int, A: Tuple[int, ...], R: Tuple[int, ...], extra: Tuple[int, ...] = ()) -> Simplex:
    return tuple(sorted((apex,) + A + R + extra))


def _model_region(p: int, q: int, omit: int) -> List[Pair]:
    """
    Endo-collapse of the starred model simplex.

    The model simplex is 0..p+q-1 with s = 0..p-1, R = p..p+q-1 and apex
    p+q. The facet apex + (s - {omit}) + R is critical; the returned pairs
    cover every other face in the relative interior.
    """
    key = (p, q, omit)
    with _region_lock:
        cached = _region_cache.get(key)
        if cached is not None:
            return cached
        simplex = SimplicialComplex([tuple(range(p + q))])
        region, _ = star_face(simplex, tuple(range(p)), apex=p + q)
        keep = tuple(v for v in range(p + q + 1) if v != omit)
        outcome, V = constrained_search(
            region,
            [0] * region.dim + [1],
            budget=DEFAULT_BUDGET,
            pinned=[keep],
            stage=f"region{key}",
        )
        if V is None:
            raise LiftDefectError(
                f"no endo-collapse of the starred region (|s|={p}, |R|={q}, omitted vertex {omit}): "
                f"{outcome.verdict.value}"
            )
        _region_cache[key] = list(V.pairs)
        return _region_cache[key]


def _region_pairs(s: Simplex, R: Tuple[int, ...], omit: int, apex: int) -> List[Pair]:
    p, q = len(s), len(R)
    rename = {i: s[i] for i in range(p)}
    rename.update({p + j: R[j] for j in range(q)})
    rename[p + q] = apex
    pairs = []
    for a, b in _model_region(p, q, s.index(omit)):
        pairs.append((tuple(sorted(rename[v] for v in a)), tuple(sorted(rename[v] for v in b))))
    return pairs


def _unmatched(V: MorseMatching) -> List[Simplex]:
    partner = V.partner
    return [f for f in V.complex.all_faces() if f not in partner]


def _lift(K: SimplicialComplex, V: MorseMatching, s: Simplex) -> LiftResult:
    target, m = star_face(K, s)
    if len(s) == 1:
        return LiftResult(target, m, MorseMatching(target, V.pairs, V.boundary_critical),
                          {f: [f] for f in _unmatched(V)})
    apex = next(iter(m.apex_faces))
    s_set = set(s)
    boundary = boundary_subcomplex(K) if V.boundary_critical else None

    def rest(face: Simplex) -> Tuple[int, ...]:
        return tuple(v for v in face if v not in s_set)

    pairs: List[Pair] = []
    for sigma, tau in sorted(V.pairs, key=lambda p: top_down_order(p[1])):
        if not s_set.issubset(tau):
            pairs.append((sigma, tau))
            continue
        extra = tuple(v for v in tau if v not in sigma)
        if len(extra) != 1:
            raise LiftDefectError(f"pair ({face_string(sigma)}, {face_string(tau)}) has no unique opposite vertex")
        w = extra[0]
        if s_set.issubset(sigma):
            R = rest(sigma)
            for A in _proper_subsets(s):
                pairs.append((_piece(apex, A, R), _piece(apex, A, R, (w,))))
        else:
            if w not in s_set:
                raise LiftDefectError(f"opposite vertex {w} of {face_string(tau)} is not in the starred face")
            pairs.append((sigma, _piece(apex, sigma, ())))
            pairs.extend(_region_pairs(s, rest(tau), w, apex))

    correspondence: Dict[Simplex, List[Simplex]] = {}
    for delta in sorted(_unmatched(V), key=top_down_order):
        if not s_set.issubset(delta):
            correspondence[delta] = [delta]
            continue
        R = rest(delta)
        if boundary is not None and delta in boundary:
            correspondence[delta] = sorted((_piece(apex, A, R) for A in _proper_subsets(s)), key=face_key)
            continue
        pieces = {v: _piece(apex, tuple(u for u in s if u != v), R) for v in s}
        omit = min(s, key=lambda v: face_key(pieces[v]))
        correspondence[delta] = [pieces[omit]]
        pairs.extend(_region_pairs(s, R, omit, apex))

    lifted = MorseMatching(target, pairs, V.boundary_critical)
    return LiftResult(target, m, lifted, correspondence)


def _check(result: LiftResult, label: str) -> None:
    report = validate_matching(result.matching)
    if not report.valid:
        raise LiftDefectError(
            f"lift through {label} produced an invalid matching: {report.violations[0].message}"
        )


def lift_matching(K: SimplicialComplex, V: MorseMatching, s) -> LiftResult:
    """
    Lift V along the starring of s.

    Args:
        K: Complex carrying V
        V: Valid matching
        s: Face of dimension >= 1

    Returns:
        LiftResult with the same Morse vector (same interior counts for
        boundary-critical V starred on the boundary)
    """
    V.ensure_valid()
    s = make_simplex(s)
    result = _lift(K, V, s)
    _check(result, face_string(s))
    logger.debug("lifted %d pairs through %s", len(result.matching.pairs), face_string(s))
    return result


def _compose_correspondence(
    first: Dict[Simplex, List[Simplex]],
    second: Dict[Simplex, List[Simplex]],
) -> Dict[Simplex, List[Simplex]]:
    return {old: sorted((n for mid in news for n in second[mid]), key=face_key) for old, news in first.items()}


def lift_through_derived(K: SimplicialComplex, V: MorseMatching, rounds: int = 1) -> LiftResult:
    """
    Fold lift_matching over the derived-subdivision starring schedule.

    The result lives on derived_subdivision(K, rounds) with identical
    vertex labels; validity is checked once at the end.
    """
    if rounds < 1:
        raise ValueError("rounds must be at least 1")
    V.ensure_valid()
    current, matching = K, V
    total = identity_map(K)
    correspondence = {f: [f] for f in critical_cells(V)}
    for r in range(rounds):
        for s in derived_schedule(current):
            step = _lift(matching.complex, matching, s)
            total = compose_maps(total, step.map)
            correspondence = _compose_correspondence(correspondence, step.correspondence)
            matching = step.matching
        current = matching.complex
        logger.info("lifted matching through derived round %d", r + 1)
    result = LiftResult(current, total, matching, correspondence)
    _check(result, f"{rounds} derived rounds")
    return result
