"""
Morse matchings - acyclic partial matchings on the face poset.

Matchings are the stored form of a discrete Morse function; an
integer-valued function realizing a matching can be produced on demand
with morse_function.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
from pydantic import BaseModel, Field

from .exceptions import MatchingError
from .homology import betti_gf2
from .simplicial import (
    Simplex,
    SimplicialComplex,
    SubcomplexRef,
    boundary_subcomplex,
    dim_order,
    euler_characteristic,
    face_key,
    face_string,
    facets_of,
    is_pseudomanifold,
    make_simplex,
)

logger = logging.getLogger(__name__)

Pair = Tuple[Simplex, Simplex]


@dataclass(frozen=True)
class MorseVector:
    """
    Critical counts per dimension, with interior counts when the complex
    has a boundary.
    """
    c: Tuple[int, ...]
    c_int: Optional[Tuple[int, ...]] = None

    @property
    def total(self) -> int:
        return sum(self.c)

    @property
    def euler_sum(self) -> int:
        return sum((-1) ** i * n for i, n in enumerate(self.c))

    def sort_key(self) -> Tuple[int, Tuple[int, ...]]:
        """Fewest critical cells first, then lexicographic."""
        return (self.total, self.c)

    def to_dict(self) -> Dict[str, List[int]]:
        return {
            "morse_vector": list(self.c),
            "c_int": list(self.c_int) if self.c_int is not None else list(self.c),
        }


class MorseMatching:
    """
    A partial matching of faces with codimension-one cofaces.

    The pair list is stored canonically (sorted by dimension, then vertex
    tuple). Validity is checked by validate_matching, not on construction,
    so that invalid matchings can be reported on.
    """

    def __init__(
        self,
        complex: SimplicialComplex,
        pairs: Iterable[Tuple[Sequence[int], Sequence[int]]] = (),
        boundary_critical: bool = False,
    ):
        self.complex = complex
        normalized = [(make_simplex(a), make_simplex(b)) for a, b in pairs]
        self.pairs: Tuple[Pair, ...] = tuple(sorted(normalized, key=lambda p: (dim_order(p[0]), face_key(p[1]))))
        self.boundary_critical = boundary_critical
        self._partner: Optional[Dict[Simplex, Simplex]] = None
        self._valid: Optional[bool] = None

    @property
    def partner(self) -> Dict[Simplex, Simplex]:
        """Face -> matched face, in both directions."""
        if self._partner is None:
            table: Dict[Simplex, Simplex] = {}
            for a, b in self.pairs:
                table[a] = b
                table[b] = a
            self._partner = table
        return self._partner

    def is_matched(self, face: Simplex) -> bool:
        return face in self.partner

    def with_pairs(self, pairs: Iterable[Pair], boundary_critical: Optional[bool] = None) -> "MorseMatching":
        flag = self.boundary_critical if boundary_critical is None else boundary_critical
        return MorseMatching(self.complex, pairs, flag)

    def ensure_valid(self) -> None:
        """Raise MatchingError unless validate_matching passes."""
        if self._valid is None:
            self._valid = validate_matching(self).valid
        if not self._valid:
            report = validate_matching(self)
            raise MatchingError(f"invalid matching: {report.violations[0].message}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MorseMatching):
            return NotImplemented
        return (
            self.complex == other.complex
            and self.pairs == other.pairs
            and self.boundary_critical == other.boundary_critical
        )

    def __hash__(self) -> int:
        return hash((self.complex, self.pairs, self.boundary_critical))

    def __repr__(self) -> str:
        return f"MorseMatching(pairs={len(self.pairs)}, boundary_critical={self.boundary_critical})"


class Violation(BaseModel):
    """One failed check, with the faces that witness it."""

    kind: str = Field(..., description="incidence | injectivity | cycle | boundary")
    message: str = Field(..., description="Human-readable explanation")
    witness: List[str] = Field(default_factory=list, description="Canonical face strings")


class ValidationReport(BaseModel):
    """Result of validate_matching."""

    violations: List[Violation] = Field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def to_dict(self) -> Dict:
        return {"valid": self.valid, "violations": [v.model_dump() for v in self.violations]}


def _pair_cycle(pairs_by_level: Dict[int, List[Pair]], partner: Dict[Simplex, Simplex]) -> Optional[List[Simplex]]:
    """A closed V-path, if one exists, as an alternating face list."""
    for level in sorted(pairs_by_level):
        graph = nx.DiGraph()
        for sigma, tau in pairs_by_level[level]:
            graph.add_node(sigma)
            for other in facets_of(tau):
                if other != sigma and partner.get(other) is not None and len(partner[other]) > len(other):
                    graph.add_edge(sigma, other)
        if nx.is_directed_acyclic_graph(graph):
            continue
        cycle = nx.find_cycle(graph)
        witness: List[Simplex] = []
        for sigma, _ in cycle:
            witness.extend([sigma, partner[sigma]])
        return witness
    return None


def validate_matching(V: MorseMatching) -> ValidationReport:
    """
    Check incidence, injectivity, acyclicity and the boundary-critical flag.

    Violations are returned as report entries; nothing is raised.
    """
    report = ValidationReport()
    K = V.complex
    seen: Dict[Simplex, Pair] = {}
    for free, coface in V.pairs:
        if free not in K or coface not in K:
            report.violations.append(Violation(
                kind="incidence",
                message=f"pair ({face_string(free)}, {face_string(coface)}) uses a face outside the complex",
                witness=[face_string(free), face_string(coface)],
            ))
            continue
        if len(coface) != len(free) + 1 or not set(free).issubset(coface):
            report.violations.append(Violation(
                kind="incidence",
                message=f"{face_string(free)} is not a facet of {face_string(coface)}",
                witness=[face_string(free), face_string(coface)],
            ))
        for face in (free, coface):
            if face in seen:
                report.violations.append(Violation(
                    kind="injectivity",
                    message=f"{face_string(face)} occurs in two pairs",
                    witness=[face_string(face)],
                ))
            seen[face] = (free, coface)

    if report.valid:
        by_level: Dict[int, List[Pair]] = {}
        for free, coface in V.pairs:
            by_level.setdefault(len(free), []).append((free, coface))
        cycle = _pair_cycle(by_level, V.partner)
        if cycle:
            report.violations.append(Violation(
                kind="cycle",
                message="closed V-path " + " -> ".join(face_string(f) for f in cycle),
                witness=[face_string(f) for f in cycle],
            ))

    if V.boundary_critical:
        if not is_pseudomanifold(K):
            report.violations.append(Violation(
                kind="boundary",
                message="boundary-critical flag set on a complex without a well-defined boundary",
            ))
        else:
            boundary = boundary_subcomplex(K)
            for free, coface in V.pairs:
                touched = [f for f in (free, coface) if f in boundary]
                if touched:
                    report.violations.append(Violation(
                        kind="boundary",
                        message=f"pair touches boundary face {face_string(touched[0])}",
                        witness=[face_string(f) for f in touched],
                    ))
    if not report.valid:
        logger.debug("matching has %d violations", len(report.violations))
    return report


def critical_cells(V: MorseMatching) -> List[Simplex]:
    """Unmatched faces, ordered by dimension then face_key."""
    V.ensure_valid()
    partner = V.partner
    return [f for f in V.complex.all_faces() if f not in partner]


def morse_vector(V: MorseMatching) -> MorseVector:
    """
    Critical counts per dimension.

    c_int is filled whenever the complex is a pseudomanifold, so that the
    boundary is defined; for closed complexes it equals c.
    """
    K = V.complex
    counts = [0] * (K.dim + 1)
    interior = [0] * (K.dim + 1)
    boundary: Optional[SubcomplexRef] = boundary_subcomplex(K) if is_pseudomanifold(K) else None
    for face in critical_cells(V):
        counts[len(face) - 1] += 1
        if boundary is not None and face not in boundary:
            interior[len(face) - 1] += 1
    return MorseVector(tuple(counts), tuple(interior) if boundary is not None else None)


def morse_inequalities(V: MorseMatching) -> Dict:
    """Weak Morse inequalities and the Euler identity, as a report."""
    vector = morse_vector(V)
    betti = betti_gf2(V.complex)
    return {
        "morse_vector": list(vector.c),
        "betti": list(betti),
        "weak_inequalities": [c >= b for c, b in zip(vector.c, betti)],
        "euler_identity": vector.euler_sum == euler_characteristic(V.complex),
    }


def morse_function(V: MorseMatching) -> Dict[Simplex, int]:
    """
    Integer-valued discrete Morse function inducing V.

    Matched faces share a value; every other covering relation strictly
    increases. Values come from a lexicographic topological order of the
    contracted Hasse diagram.
    """
    V.ensure_valid()
    partner = V.partner

    def node(face: Simplex) -> Simplex:
        mate = partner.get(face)
        return mate if mate is not None and len(mate) > len(face) else face

    graph = nx.DiGraph()
    for face in V.complex.all_faces():
        graph.add_node(node(face))
        for sub in facets_of(face):
            if partner.get(sub) == face:
                continue
            graph.add_edge(node(sub), node(face))
    order = nx.lexicographical_topological_sort(graph, key=dim_order)
    value = {n: i for i, n in enumerate(order)}
    return {face: value[node(face)] for face in V.complex.all_faces()}

