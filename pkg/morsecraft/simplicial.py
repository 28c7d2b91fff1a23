"""
Simplicial complexes - canonical simplices, lazily materialized face
posets, and the subcomplex operations everything else is built on.

A simplex is a strictly increasing tuple of non-negative vertex ids. A
SimplicialComplex is immutable after construction; its face index and
coface incidence are materialized per dimension on first use.
"""

import hashlib
import logging
import threading
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Set, Tuple

import networkx as nx

from .exceptions import ComplexError, ResourceLimitError

logger = logging.getLogger(__name__)

Simplex = Tuple[int, ...]

DEFAULT_FACE_CAP = 50_000_000


def make_simplex(vertices: Iterable[int]) -> Simplex:
    """
    Normalize a vertex collection to canonical form.

    Args:
        vertices: Distinct non-negative integer vertex ids

    Returns:
        Strictly increasing tuple
    """
    items = list(vertices)
    for v in items:
        if isinstance(v, bool) or not isinstance(v, int) or v < 0:
            raise ComplexError(f"vertex ids must be non-negative integers, got {v!r}")
    simplex = tuple(sorted(items))
    if len(set(simplex)) != len(simplex):
        raise ComplexError(f"repeated vertex id in {items}")
    return simplex


def face_string(simplex: Simplex) -> str:
    """Canonical string form used in JSON artifacts, e.g. "0-1-2"."""
    return "-".join(str(v) for v in simplex)


def parse_face(text: str) -> Simplex:
    """Inverse of face_string."""
    try:
        return make_simplex(int(part) for part in text.split("-"))
    except ValueError as e:
        raise ComplexError(f"bad face string {text!r}: {e}")


def face_key(simplex: Simplex) -> str:
    """Tie-breaking key: lexicographic on canonical face strings."""
    return face_string(simplex)


def dim_order(simplex: Simplex) -> Tuple[int, str]:
    """Increasing dimension, then face_key."""
    return (len(simplex), face_key(simplex))


def top_down_order(simplex: Simplex) -> Tuple[int, str]:
    """Decreasing dimension, then face_key."""
    return (-len(simplex), face_key(simplex))


def facets_of(simplex: Simplex) -> List[Simplex]:
    """Codimension-one faces of a simplex (empty list for a vertex)."""
    if len(simplex) <= 1:
        return []
    return [simplex[:i] + simplex[i + 1:] for i in range(len(simplex))]


def subfaces(simplex: Simplex) -> Iterator[Simplex]:
    """All non-empty faces of a simplex, itself included."""
    for k in range(1, len(simplex) + 1):
        yield from combinations(simplex, k)


def _remove_dominated(candidates: Iterable[Simplex]) -> List[Simplex]:
    ordered = sorted(set(candidates), key=top_down_order)
    kept: List[Simplex] = []
    by_vertex: Dict[int, List[FrozenSet[int]]] = {}
    for simplex in ordered:
        as_set = frozenset(simplex)
        dominated = False
        if simplex:
            for bigger in by_vertex.get(simplex[0], ()):
                if as_set <= bigger:
                    dominated = True
                    break
        if dominated:
            continue
        kept.append(simplex)
        for v in simplex:
            by_vertex.setdefault(v, []).append(as_set)
    return kept


class SimplicialComplex:
    """
    A finite abstract simplicial complex given by its facets.

    Faces are materialized lazily per dimension under a lock; the total
    number of materialized faces is capped to protect against factorial
    growth under repeated subdivision.
    """

    def __init__(self, facets: Iterable[Iterable[int]], face_cap: int = DEFAULT_FACE_CAP):
        normalized = [make_simplex(f) for f in facets]
        normalized = [f for f in normalized if f]
        self._facets: Tuple[Simplex, ...] = tuple(sorted(_remove_dominated(normalized), key=face_key))
        self._facet_set: FrozenSet[Simplex] = frozenset(self._facets)
        self.face_cap = face_cap
        self.dim: int = max((len(f) - 1 for f in self._facets), default=-1)
        self._faces: Dict[int, FrozenSet[Simplex]] = {}
        self._cofaces: Dict[int, Dict[Simplex, Tuple[Simplex, ...]]] = {}
        self._materialized = 0
        self._lock = threading.RLock()

    # -- basic accessors -------------------------------------------------

    @property
    def facets(self) -> Tuple[Simplex, ...]:
        return self._facets

    @property
    def facet_set(self) -> FrozenSet[Simplex]:
        return self._facet_set

    @property
    def vertices(self) -> Tuple[int, ...]:
        return tuple(sorted(v for (v,) in self.faces(0)))

    def is_empty(self) -> bool:
        return not self._facets

    def faces(self, k: int) -> FrozenSet[Simplex]:
        """All k-dimensional faces."""
        if k < 0 or k > self.dim:
            return frozenset()
        cached = self._faces.get(k)
        if cached is not None:
            return cached
        with self._lock:
            cached = self._faces.get(k)
            if cached is not None:
                return cached
            layer: Set[Simplex] = set()
            for facet in self._facets:
                if len(facet) > k:
                    layer.update(combinations(facet, k + 1))
            if self._materialized + len(layer) > self.face_cap:
                raise ResourceLimitError(
                    f"face cap {self.face_cap} exceeded while materializing dimension {k}"
                )
            self._materialized += len(layer)
            frozen = frozenset(layer)
            self._faces[k] = frozen
            logger.debug("materialized %d faces of dimension %d", len(frozen), k)
            return frozen

    def all_faces(self) -> List[Simplex]:
        """Every face, ordered by dimension then face_key."""
        result: List[Simplex] = []
        for k in range(self.dim + 1):
            result.extend(sorted(self.faces(k), key=face_key))
        return result

    def num_faces(self) -> int:
        return sum(len(self.faces(k)) for k in range(self.dim + 1))

    def __contains__(self, simplex: object) -> bool:
        if not isinstance(simplex, tuple) or not simplex:
            return False
        return simplex in self.faces(len(simplex) - 1)

    def _coface_layer(self, k: int) -> Dict[Simplex, Tuple[Simplex, ...]]:
        cached = self._cofaces.get(k)
        if cached is not None:
            return cached
        with self._lock:
            cached = self._cofaces.get(k)
            if cached is not None:
                return cached
            up: Dict[Simplex, List[Simplex]] = {s: [] for s in self.faces(k)}
            for tau in sorted(self.faces(k + 1), key=face_key):
                for sigma in facets_of(tau):
                    up[sigma].append(tau)
            layer = {s: tuple(ts) for s, ts in up.items()}
            self._cofaces[k] = layer
            return layer

    def cofaces(self, simplex: Simplex) -> Tuple[Simplex, ...]:
        """Faces of dimension one higher that contain the simplex."""
        if simplex not in self:
            raise ComplexError(f"{face_string(simplex)} is not a face")
        return self._coface_layer(len(simplex) - 1)[simplex]

    def f_vector(self) -> Tuple[int, ...]:
        return tuple(len(self.faces(k)) for k in range(self.dim + 1))

    def is_pure(self) -> bool:
        return all(len(f) - 1 == self.dim for f in self._facets)

    def content_hash(self) -> str:
        """SHA-256 of the sorted canonical facet listing."""
        listing = "\n".join(sorted(face_string(f) for f in self._facets))
        return hashlib.sha256(listing.encode("utf-8")).hexdigest()

    def relabel(self, mapping: Mapping[int, int]) -> "SimplicialComplex":
        """Rename vertices; the mapping must be injective on the vertex set."""
        images = [mapping.get(v, v) for v in self.vertices]
        if len(set(images)) != len(images):
            raise ComplexError("relabeling is not injective on the vertex set")
        return SimplicialComplex(
            ([mapping.get(v, v) for v in f] for f in self._facets),
            face_cap=self.face_cap,
        )

    def max_vertex(self) -> int:
        return max((f[-1] for f in self._facets), default=-1)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SimplicialComplex):
            return NotImplemented
        return self._facet_set == other._facet_set

    def __hash__(self) -> int:
        return hash(self._facet_set)

    def __repr__(self) -> str:
        return f"SimplicialComplex(dim={self.dim}, facets={len(self._facets)})"


@dataclass(frozen=True)
class SubcomplexRef:
    """
    A downward-closed set of faces of a parent complex.
    """
    parent: SimplicialComplex
    faces: FrozenSet[Simplex]

    def __post_init__(self):
        for face in self.faces:
            if face not in self.parent:
                raise ComplexError(f"{face_string(face)} is not a face of the parent complex")
            for sub in facets_of(face):
                if sub not in self.faces:
                    raise ComplexError(
                        f"subcomplex not closed: {face_string(sub)} missing below {face_string(face)}"
                    )

    @classmethod
    def closure(cls, parent: SimplicialComplex, generators: Iterable[Simplex]) -> "SubcomplexRef":
        """Smallest subcomplex of parent containing the generators."""
        closed: Set[Simplex] = set()
        for g in generators:
            closed.update(subfaces(g))
        return cls(parent, frozenset(closed))

    @property
    def dim(self) -> int:
        return max((len(f) - 1 for f in self.faces), default=-1)

    def facets(self) -> List[Simplex]:
        return sorted(_remove_dominated(self.faces), key=face_key)

    def as_complex(self) -> SimplicialComplex:
        return SimplicialComplex(self.facets(), face_cap=self.parent.face_cap)

    def vertices(self) -> Tuple[int, ...]:
        return tuple(sorted(f[0] for f in self.faces if len(f) == 1))

    def is_empty(self) -> bool:
        return not self.faces

    def __contains__(self, simplex: object) -> bool:
        return simplex in self.faces

    def __len__(self) -> int:
        return len(self.faces)


def build_complex(facet_lists: Sequence[Sequence[int]], face_cap: int = DEFAULT_FACE_CAP) -> SimplicialComplex:
    """
    Build a complex from raw facet lists.

    Args:
        facet_lists: Non-empty list of vertex-id lists
        face_cap: Materialization cap for the face poset

    Returns:
        SimplicialComplex with dominated facets removed
    """
    if not facet_lists:
        raise ComplexError("cannot build a complex from an empty facet list")
    for row in facet_lists:
        if not row:
            raise ComplexError("empty facet in input")
    return SimplicialComplex(facet_lists, face_cap=face_cap)


def _require_face(K: SimplicialComplex, s: Simplex) -> Simplex:
    s = make_simplex(s)
    if s not in K:
        raise ComplexError(f"{face_string(s)} is not a face of the complex")
    return s


def link(K: SimplicialComplex, s: Simplex) -> SimplicialComplex:
    """Faces disjoint from s whose union with s is a face of K."""
    s = _require_face(K, s)
    s_set = set(s)
    pieces = [tuple(v for v in f if v not in s_set) for f in K.facets if s_set.issubset(f)]
    return SimplicialComplex([p for p in pieces if p], face_cap=K.face_cap)


def star(K: SimplicialComplex, s: Simplex) -> SubcomplexRef:
    """Closed star: every face containing s together with its subfaces."""
    s = _require_face(K, s)
    s_set = set(s)
    return SubcomplexRef.closure(K, (f for f in K.facets if s_set.issubset(f)))


def join(A: SimplicialComplex, B: SimplicialComplex) -> SimplicialComplex:
    """Join of complexes on disjoint vertex sets."""
    common = set(A.vertices) & set(B.vertices)
    if common:
        raise ComplexError(f"join requires disjoint vertex sets, shared: {sorted(common)}")
    if A.is_empty():
        return B
    if B.is_empty():
        return A
    return SimplicialComplex(
        (a + b for a in A.facets for b in B.facets),
        face_cap=max(A.face_cap, B.face_cap),
    )


def cone(K: SimplicialComplex, apex: int) -> SimplicialComplex:
    """Join of K with the single vertex apex."""
    if apex in set(K.vertices):
        raise ComplexError(f"cone apex {apex} is already a vertex")
    return join(K, SimplicialComplex([[apex]], face_cap=K.face_cap))


def simplex_boundary(s: Sequence[int]) -> SimplicialComplex:
    """The boundary of the simplex on the given vertices."""
    s = make_simplex(s)
    if len(s) < 2:
        raise ComplexError("the boundary of a vertex is empty")
    return SimplicialComplex(facets_of(s))


def ridge_incidence(M: SimplicialComplex) -> Dict[Simplex, Tuple[Simplex, ...]]:
    """Map each ridge of a pure complex to the facets containing it."""
    if not M.is_pure():
        raise ComplexError("complex is not pure")
    if M.dim <= 0:
        return {(): M.facets} if M.facets else {}
    return {r: M.cofaces(r) for r in M.faces(M.dim - 1)}


def is_pseudomanifold(K: SimplicialComplex) -> bool:
    """Pure, with every ridge in at most two facets."""
    if K.is_empty() or not K.is_pure():
        return False
    return all(len(fs) <= 2 for fs in ridge_incidence(K).values())


def boundary_subcomplex(M: SimplicialComplex) -> SubcomplexRef:
    """
    Ridges lying in exactly one facet, closed downward.

    Empty for closed pseudomanifolds and for 0-dimensional complexes.
    """
    if M.is_empty():
        return SubcomplexRef(M, frozenset())
    incidence = ridge_incidence(M)
    crowded = [r for r, fs in incidence.items() if len(fs) > 2]
    if crowded:
        first = min(crowded, key=face_key)
        raise ComplexError(f"ridge {face_string(first)} lies in {len(incidence[first])} facets")
    if M.dim == 0:
        return SubcomplexRef(M, frozenset())
    return SubcomplexRef.closure(M, (r for r, fs in incidence.items() if len(fs) == 1))


def interior_faces(M: SimplicialComplex, boundary: Optional[SubcomplexRef] = None) -> List[Simplex]:
    """Faces of M not on its boundary, ordered by dimension."""
    boundary = boundary if boundary is not None else boundary_subcomplex(M)
    return [f for f in M.all_faces() if f not in boundary]


def dual_graph(M: SimplicialComplex) -> nx.Graph:
    """Graph on facets with an edge for every shared ridge."""
    graph = nx.Graph()
    graph.add_nodes_from(M.facets)
    for ridge, owners in sorted(ridge_incidence(M).items(), key=lambda kv: face_key(kv[0])):
        for a, b in combinations(owners, 2):
            graph.add_edge(a, b, ridge=ridge)
    return graph


def is_strongly_connected(K: SimplicialComplex) -> bool:
    """Pure with a connected dual graph."""
    if K.is_empty() or not K.is_pure():
        return False
    return nx.is_connected(dual_graph(K))


def is_connected(K: SimplicialComplex) -> bool:
    """Connectivity of the 1-skeleton."""
    if K.is_empty():
        return False
    graph = nx.Graph()
    graph.add_nodes_from(K.vertices)
    graph.add_edges_from(K.faces(1))
    return nx.is_connected(graph)


def connected_components(K: SimplicialComplex) -> List[SimplicialComplex]:
    """Vertex-connected components, ordered by least vertex."""
    graph = nx.Graph()
    graph.add_nodes_from(K.vertices)
    graph.add_edges_from(K.faces(1))
    parts = sorted((sorted(c) for c in nx.connected_components(graph)), key=lambda c: c[0])
    result = []
    for part in parts:
        members = set(part)
        result.append(SimplicialComplex([f for f in K.facets if f[0] in members], face_cap=K.face_cap))
    return result


def f_vector(K: SimplicialComplex) -> Tuple[int, ...]:
    return K.f_vector()


def euler_characteristic(K: SimplicialComplex) -> int:
    return sum((-1) ** k * n for k, n in enumerate(K.f_vector()))
