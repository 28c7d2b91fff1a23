"""
Manifold recognition as a stack of necessary conditions.

Ball and sphere recognition is undecidable in general. For links of
dimension at most 2 the checks are complete (point counts, cycles and
paths, surface classification via Euler characteristic, orientability and
boundary); above that only pseudomanifold and GF(2) Betti patterns are
checked.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import networkx as nx

from .homology import betti_gf2
from .simplicial import (
    SimplicialComplex,
    boundary_subcomplex,
    dual_graph,
    euler_characteristic,
    face_key,
    is_connected,
    is_pseudomanifold,
    link,
)

logger = logging.getLogger(__name__)


@dataclass
class ManifoldReport:
    """
    Outcome of check_manifold.
    """
    dimension: int
    pure: bool
    pseudomanifold: bool
    closed: bool
    link_failures: Dict[int, str] = field(default_factory=dict)
    reasons: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.pure and self.pseudomanifold and not self.link_failures and not self.reasons

    def to_dict(self) -> Dict:
        return {
            "dimension": self.dimension,
            "pure": self.pure,
            "pseudomanifold": self.pseudomanifold,
            "closed": self.closed,
            "ok": self.ok,
            "link_failures": {str(v): msg for v, msg in sorted(self.link_failures.items())},
            "reasons": list(self.reasons),
        }


def is_orientable(K: SimplicialComplex) -> bool:
    """
    Coherent orientation propagation over the dual graph.

    Each facet gets a sign; facets sharing a ridge must induce opposite
    orientations on it. Non-pseudomanifolds are reported non-orientable.
    """
    if not is_pseudomanifold(K):
        return False
    if K.dim == 0:
        return True
    graph = dual_graph(K)
    sign: Dict[tuple, int] = {}
    for start in sorted(graph.nodes, key=face_key):
        if start in sign:
            continue
        sign[start] = 1
        queue = deque([start])
        while queue:
            facet = queue.popleft()
            for other in sorted(graph.neighbors(facet), key=face_key):
                ridge = graph.edges[facet, other]["ridge"]
                i = next(j for j, v in enumerate(facet) if v not in ridge)
                k = next(j for j, v in enumerate(other) if v not in ridge)
                induced = sign[facet] * (-1) ** i
                wanted = -induced * (-1) ** k
                if other in sign:
                    if sign[other] != wanted:
                        return False
                else:
                    sign[other] = wanted
                    queue.append(other)
    return True


def _is_cycle(K: SimplicialComplex) -> bool:
    if K.dim != 1 or not K.is_pure() or not is_connected(K):
        return False
    degree = nx.Graph(list(K.facets))
    return all(d == 2 for _, d in degree.degree())


def _is_path(K: SimplicialComplex) -> bool:
    if K.dim != 1 or not K.is_pure() or not is_connected(K):
        return False
    graph = nx.Graph(list(K.facets))
    return nx.is_tree(graph) and max(d for _, d in graph.degree()) <= 2


def is_sphere_candidate(K: SimplicialComplex, d: Optional[int] = None) -> bool:
    """
    Necessary conditions for K to be a combinatorial d-sphere.
    """
    d = K.dim if d is None else d
    if K.is_empty() or K.dim != d or not K.is_pure():
        return False
    if d == 0:
        return len(K.vertices) == 2
    if d == 1:
        return _is_cycle(K)
    report = check_manifold(K)
    if not report.ok or not report.closed or not is_connected(K):
        return False
    if d == 2:
        return euler_characteristic(K) == 2
    return betti_gf2(K) == (1,) + (0,) * (d - 1) + (1,)


def is_ball_candidate(K: SimplicialComplex, d: Optional[int] = None) -> bool:
    """
    Necessary conditions for K to be a combinatorial d-ball.
    """
    d = K.dim if d is None else d
    if K.is_empty() or K.dim != d or not K.is_pure():
        return False
    if d == 0:
        return len(K.vertices) == 1
    if d == 1:
        return _is_path(K)
    report = check_manifold(K)
    if not report.ok or report.closed or not is_connected(K):
        return False
    boundary = boundary_subcomplex(K).as_complex()
    if not is_sphere_candidate(boundary, d - 1):
        return False
    if d == 2:
        return euler_characteristic(K) == 1
    return betti_gf2(K) == (1,) + (0,) * d


def _link_verdict(L: SimplicialComplex, on_boundary: bool, d: int) -> Optional[str]:
    kind = "ball" if on_boundary else "sphere"
    if d <= 2:
        ok = is_ball_candidate(L, d) if on_boundary else is_sphere_candidate(L, d)
        if ok and d == 2 and not is_orientable(L):
            ok = False
        return None if ok else f"link is not a {d}-{kind}"
    if not is_pseudomanifold(L) or L.dim != d:
        return f"link is not a {d}-pseudomanifold"
    closed = boundary_subcomplex(L).is_empty()
    if closed == on_boundary:
        return f"link is not a {d}-{kind} (boundary mismatch)"
    expected = (1,) + (0,) * d if on_boundary else (1,) + (0,) * (d - 1) + (1,)
    if betti_gf2(L) != expected:
        return f"link Betti numbers {betti_gf2(L)} differ from a {d}-{kind}"
    return None


def check_manifold(K: SimplicialComplex) -> ManifoldReport:
    """
    Run the necessary-condition stack on every vertex link.

    Args:
        K: Complex to examine

    Returns:
        ManifoldReport with per-vertex failures
    """
    pure = (not K.is_empty()) and K.is_pure()
    pseudo = is_pseudomanifold(K)
    report = ManifoldReport(dimension=K.dim, pure=pure, pseudomanifold=pseudo, closed=False)
    if not pure:
        report.reasons.append("complex is not pure")
        return report
    if not pseudo:
        report.reasons.append("some ridge lies in three or more facets")
        return report
    boundary = boundary_subcomplex(K)
    report.closed = boundary.is_empty()
    if K.dim == 0:
        return report
    boundary_vertices = set(boundary.vertices())
    for v in K.vertices:
        verdict = _link_verdict(link(K, (v,)), v in boundary_vertices, K.dim - 1)
        if verdict:
            report.link_failures[v] = verdict
    if report.link_failures:
        logger.debug("manifold check: %d vertex links failed", len(report.link_failures))
    return report


def is_manifold_candidate(K: SimplicialComplex) -> bool:
    return check_manifold(K).ok


def is_tree_of_simplices(M: SimplicialComplex) -> bool:
    """
    Dual graph is a tree, M is a pseudomanifold with non-empty boundary and
    passes the vertex-link stack.

    At d >= 3 this is a necessary-condition check for being a ball.
    """
    if not is_pseudomanifold(M):
        return False
    if M.dim == 0:
        return len(M.vertices) == 1
    if boundary_subcomplex(M).is_empty():
        return False
    if not nx.is_tree(dual_graph(M)):
        return False
    return check_manifold(M).ok


def count_boundary_faces(M: SimplicialComplex) -> List[int]:
    """Boundary f-vector padded to dim M + 1 entries."""
    boundary = boundary_subcomplex(M)
    counts = [0] * (M.dim + 1)
    for face in boundary.faces:
        counts[len(face) - 1] += 1
    return counts


__all__ = [
    "ManifoldReport",
    "check_manifold",
    "count_boundary_faces",
    "is_ball_candidate",
    "is_manifold_candidate",
    "is_orientable",
    "is_sphere_candidate",
    "is_tree_of_simplices",
]
